#include "holonom/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#ifndef HOLONOM_VERSION
#define HOLONOM_VERSION "0.0.0"
#endif

namespace holonom {

namespace {

const Json& require(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(where + ": missing field '" + key + "'");
  return *it;
}

double require_number(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_number()) throw InputError(where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

RealMatrix real_block(const Json& j, const std::string& field, Eigen::Index dim) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim) {
    std::ostringstream os;
    os << "field '" << field << "' must have " << dim << " rows";
    throw InputError(os.str());
  }
  RealMatrix m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
      std::ostringstream os;
      os << "field '" << field << "' row " << r << " must have " << dim << " entries";
      throw InputError(os.str());
    }
    for (Eigen::Index c = 0; c < dim; ++c) {
      const Json& x = row[static_cast<std::size_t>(c)];
      if (!x.is_number()) {
        std::ostringstream os;
        os << "field '" << field << "' entry (" << r << ", " << c << ") is not a number";
        throw InputError(os.str());
      }
      m(r, c) = x.get<double>();
    }
  }
  return m;
}

HermitianMatrix hermitian_field(const Json& j, const std::string& field, Eigen::Index dim) {
  const ComplexMatrix m = matrix_from_json(j, field, dim);
  try {
    return HermitianMatrix(m, 1e-10);
  } catch (const NotHermitian& e) {
    throw InputError("field '" + field + "': " + e.what());
  }
}

Json real_array(const std::vector<double>& v) { return Json(v); }

std::vector<double> real_vector(const Json& j, const std::string& field) {
  if (!j.is_array()) throw InputError("field '" + field + "' must be an array");
  std::vector<double> v;
  v.reserve(j.size());
  for (const Json& x : j) {
    if (!x.is_number()) throw InputError("field '" + field + "' must contain numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace

std::string version_string() { return HOLONOM_VERSION; }

std::string to_string(ControlMode mode) {
  return mode == ControlMode::TimingControl ? "timing" : "amplitude";
}

ControlMode control_mode_from_string(const std::string& s) {
  if (s == "timing") return ControlMode::TimingControl;
  if (s == "amplitude") return ControlMode::AmplitudeControl;
  throw InputError("field 'mode' must be \"timing\" or \"amplitude\", got \"" + s + "\"");
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json rr = Json::array();
    Json ri = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return Json{{"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& field, Eigen::Index dim) {
  if (!j.is_object()) throw InputError("field '" + field + "' must be an object with re/im arrays");
  const RealMatrix re = real_block(require(j, "re", field), field + ".re", dim);
  const RealMatrix im = real_block(require(j, "im", field), field + ".im", dim);
  ComplexMatrix m(dim, dim);
  m.real() = re;
  m.imag() = im;
  return m;
}

Json problem_to_json(const ControlProblem& problem) {
  Json j;
  j["dim"] = problem.dim();
  j["h0"] = matrix_to_json(problem.h0.matrix());
  j["pa"] = matrix_to_json(problem.pa.matrix());
  j["pb"] = matrix_to_json(problem.pb.matrix());
  j["mode"] = to_string(problem.mode);
  if (problem.mode == ControlMode::AmplitudeControl) j["tau_fixed"] = problem.tau_fixed;
  j["hbar"] = 1;
  return j;
}

ControlProblem problem_from_json(const Json& j) {
  const std::string where = "problem";
  const Json& jd = require(j, "dim", where);
  if (!jd.is_number_integer() || jd.get<long long>() < 1) {
    throw InputError("field 'dim' must be a positive integer");
  }
  const auto dim = static_cast<Eigen::Index>(jd.get<long long>());
  if (auto it = j.find("hbar"); it != j.end()) {
    if (!it->is_number() || it->get<double>() != 1.0) throw InputError("field 'hbar' must be 1");
  }
  ControlMode mode = ControlMode::TimingControl;
  if (auto it = j.find("mode"); it != j.end()) {
    if (!it->is_string()) throw InputError("field 'mode' must be a string");
    mode = control_mode_from_string(it->get<std::string>());
  }
  double tau = 0.0;
  if (mode == ControlMode::AmplitudeControl) {
    tau = require_number(j, "tau_fixed", where);
    if (!(tau > 0.0)) throw InputError("field 'tau_fixed' must be positive");
  }
  HermitianMatrix h0 = hermitian_field(require(j, "h0", where), "h0", dim);
  HermitianMatrix pa = hermitian_field(require(j, "pa", where), "pa", dim);
  HermitianMatrix pb = hermitian_field(require(j, "pb", where), "pb", dim);
  return ControlProblem(std::move(h0), std::move(pa), std::move(pb), mode, tau);
}

std::string problem_hash(const ControlProblem& problem) {
  const std::string canon = problem_to_json(problem).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

TargetSpec unitary_target(const UnitaryMatrix& u) { return TargetSpec{u, std::nullopt, 0.0}; }

Json target_to_json(const TargetSpec& target) {
  if (target.hamiltonian) {
    return Json{{"generator",
                 {{"hamiltonian", matrix_to_json(target.hamiltonian->matrix())},
                  {"epsilon", target.epsilon}}}};
  }
  return Json{{"unitary", matrix_to_json(target.unitary.matrix())}};
}

TargetSpec target_from_json(const Json& j, Eigen::Index dim) {
  if (!j.is_object()) throw InputError("target: expected a JSON object");
  if (auto it = j.find("unitary"); it != j.end()) {
    const ComplexMatrix m = matrix_from_json(*it, "unitary", dim);
    try {
      return unitary_target(UnitaryMatrix(m, 1e-8));
    } catch (const NotUnitary& e) {
      throw InputError(std::string("field 'unitary': ") + e.what());
    }
  }
  if (auto it = j.find("generator"); it != j.end()) {
    HermitianMatrix h = hermitian_field(require(*it, "hamiltonian", "generator"), "hamiltonian", dim);
    const double eps = require_number(*it, "epsilon", "generator");
    if (!(eps > 0.0)) throw InputError("field 'epsilon' must be positive");
    if (h.spectral_norm() > 1.0 + 1e-10) throw InputError("field 'hamiltonian' must have spectral norm <= 1");
    UnitaryMatrix u = expm_hermitian_generator(h, eps);
    return TargetSpec{std::move(u), std::move(h), eps};
  }
  throw InputError("target: missing field 'unitary' or 'generator'");
}

Json seed_to_json(const SeedParams& seed) {
  return Json{{"values", real_array(seed.values)},
              {"mode", to_string(seed.mode)},
              {"achieved_fn", seed.achieved_fn},
              {"converged", seed.converged},
              {"iterations", seed.iterations},
              {"trace", real_array(seed.trace)}};
}

SeedParams seed_from_json(const Json& j) {
  SeedParams s;
  s.values = real_vector(require(j, "values", "seed"), "values");
  if (auto it = j.find("mode"); it != j.end()) s.mode = control_mode_from_string(it->get<std::string>());
  if (auto it = j.find("achieved_fn"); it != j.end()) s.achieved_fn = it->get<double>();
  if (auto it = j.find("converged"); it != j.end()) s.converged = it->get<bool>();
  if (auto it = j.find("iterations"); it != j.end()) s.iterations = it->get<int>();
  if (auto it = j.find("trace"); it != j.end()) s.trace = real_vector(*it, "trace");
  return s;
}

Json sequence_to_json(const PulseSequence& seq) {
  Json arr = Json::array();
  for (const Pulse& p : seq.pulses) {
    arr.push_back({{"slot", p.slot},
                   {"perturbation", p.perturbation == Perturbation::A ? "A" : "B"},
                   {"parameter", p.parameter}});
  }
  return arr;
}

PulseSequence sequence_from_json(const Json& j, ControlMode mode) {
  if (!j.is_array()) throw InputError("field 'pulses' must be an array");
  PulseSequence seq;
  seq.mode = mode;
  for (const Json& p : j) {
    Pulse pulse;
    const Json& slot = require(p, "slot", "pulse");
    if (!slot.is_number_integer()) throw InputError("pulse: field 'slot' must be an integer");
    pulse.slot = slot.get<int>();
    const Json& pert = require(p, "perturbation", "pulse");
    if (pert == "A") {
      pulse.perturbation = Perturbation::A;
    } else if (pert == "B") {
      pulse.perturbation = Perturbation::B;
    } else {
      throw InputError("pulse: field 'perturbation' must be \"A\" or \"B\"");
    }
    pulse.parameter = require_number(p, "parameter", "pulse");
    seq.pulses.push_back(pulse);
  }
  return seq;
}

Json report_to_json(const SynthesisReport& report) {
  Json path = Json::array();
  for (const ContinuationStep& s : report.continuation_path) {
    path.push_back({{"n", s.n},
                    {"converged", s.converged},
                    {"iterations", s.iterations},
                    {"residual", s.residual}});
  }
  return Json{{"newton_residuals", real_array(report.newton_residuals)},
              {"continuation_path", std::move(path)},
              {"n_star", report.n_star},
              {"n_start", report.n_start},
              {"final_error", report.final_error},
              {"jacobian_min_singular_value", report.jacobian_min_singular_value}};
}

SynthesisReport report_from_json(const Json& j) {
  SynthesisReport r;
  r.newton_residuals = real_vector(require(j, "newton_residuals", "report"), "newton_residuals");
  for (const Json& s : require(j, "continuation_path", "report")) {
    r.continuation_path.push_back({s.at("n").get<int>(), s.at("converged").get<bool>(),
                                   s.at("iterations").get<int>(), s.at("residual").get<double>()});
  }
  r.n_star = require(j, "n_star", "report").get<int>();
  r.n_start = require(j, "n_start", "report").get<int>();
  r.final_error = require_number(j, "final_error", "report");
  r.jacobian_min_singular_value = require_number(j, "jacobian_min_singular_value", "report");
  return r;
}

Json result_to_json(const ResultFile& r) {
  return Json{{"tool", "holonom"},
              {"version", r.version},
              {"master_seed", r.master_seed},
              {"problem_hash", r.problem_hash},
              {"mode", to_string(r.sequence.mode)},
              {"pulses", sequence_to_json(r.sequence)},
              {"n_star", r.n_star},
              {"repetitions", r.n_star},
              {"tol", r.tol},
              {"acceptance_tol", r.acceptance_tol},
              {"final_error", r.final_error},
              {"seed", seed_to_json(r.seed)},
              {"report", report_to_json(r.report)}};
}

ResultFile result_from_json(const Json& j) {
  const std::string where = "result";
  try {
    ResultFile r;
    r.version = require(j, "version", where).get<std::string>();
    r.master_seed = require(j, "master_seed", where).get<std::uint64_t>();
    r.problem_hash = require(j, "problem_hash", where).get<std::string>();
    const ControlMode mode = control_mode_from_string(require(j, "mode", where).get<std::string>());
    r.sequence = sequence_from_json(require(j, "pulses", where), mode);
    r.n_star = require(j, "n_star", where).get<int>();
    if (r.n_star < 1) throw InputError("field 'n_star' must be >= 1");
    r.tol = require_number(j, "tol", where);
    r.acceptance_tol = require_number(j, "acceptance_tol", where);
    r.final_error = require_number(j, "final_error", where);
    r.seed = seed_from_json(require(j, "seed", where));
    r.report = report_from_json(require(j, "report", where));
    return r;
  } catch (const Json::exception& e) {
    throw InputError(std::string("result: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("malformed JSON in '" + path + "': " + e.what());
  }
}

}  // namespace holonom
