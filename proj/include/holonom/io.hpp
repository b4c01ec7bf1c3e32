#pragma once

// JSON file formats: problems, targets, seeds and synthesis results.
// Complex matrices are stored as {"re": [[...]], "im": [[...]]}.

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "holonom/synthesis.hpp"

namespace holonom {

using Json = nlohmann::json;

// Malformed or inconsistent input file; the message names the offending field.
class InputError : public Error {
 public:
  using Error::Error;
};

std::string version_string();

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j, const std::string& field, Eigen::Index dim);

Json problem_to_json(const ControlProblem& problem);
ControlProblem problem_from_json(const Json& j);

// FNV-1a 64 over the canonical serialization, as "fnv1a64:<hex>".
std::string problem_hash(const ControlProblem& problem);

struct TargetSpec {
  UnitaryMatrix unitary;
  std::optional<HermitianMatrix> hamiltonian;  // set for generator-form targets
  double epsilon = 0.0;
};

Json target_to_json(const TargetSpec& target);
TargetSpec target_from_json(const Json& j, Eigen::Index dim);
TargetSpec unitary_target(const UnitaryMatrix& u);

std::string to_string(ControlMode mode);
ControlMode control_mode_from_string(const std::string& s);

Json seed_to_json(const SeedParams& seed);
SeedParams seed_from_json(const Json& j);

Json sequence_to_json(const PulseSequence& seq);
PulseSequence sequence_from_json(const Json& j, ControlMode mode);

Json report_to_json(const SynthesisReport& report);
SynthesisReport report_from_json(const Json& j);

struct ResultFile {
  std::string version;
  std::uint64_t master_seed = 0;
  std::string problem_hash;
  PulseSequence sequence;
  int n_star = 1;
  double tol = 0.0;             // per-solve Newton tolerance
  double acceptance_tol = 0.0;  // n_star * tol, the bound verify checks
  double final_error = 0.0;
  SeedParams seed;
  SynthesisReport report;

  bool operator==(const ResultFile&) const = default;
};

Json result_to_json(const ResultFile& r);
ResultFile result_from_json(const Json& j);

Json read_json_file(const std::string& path);

}  // namespace holonom
