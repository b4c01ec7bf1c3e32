#pragma once

// Full pulse-sequence synthesis: identity seed by repetition of a root of
// identity, Newton steps toward nearby targets, and path splitting through
// fractional powers for far targets.

#include <optional>
#include <vector>

#include "holonom/seedfinder.hpp"

namespace holonom {

struct Pulse {
  int slot = 1;  // 1-based position in the sequence
  Perturbation perturbation = Perturbation::A;
  double parameter = 0.0;  // timing, or amplitude in AmplitudeControl mode

  bool operator==(const Pulse&) const = default;
};

struct PulseSequence {
  std::vector<Pulse> pulses;
  ControlMode mode = ControlMode::TimingControl;

  std::vector<double> parameters() const;
  static PulseSequence from_parameters(const std::vector<double>& params, ControlMode mode);
  bool operator==(const PulseSequence&) const = default;
};

// N^2 pulses, or N (N + 1) for odd N.
std::size_t sequence_length(Eigen::Index n);

struct ContinuationStep {
  int n = 0;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;

  bool operator==(const ContinuationStep&) const = default;
};

struct SynthesisReport {
  std::vector<double> newton_residuals;
  std::vector<ContinuationStep> continuation_path;
  int n_star = 1;
  int n_start = 1;
  double final_error = 0.0;
  double jacobian_min_singular_value = 0.0;

  bool operator==(const SynthesisReport&) const = default;
};

// Failures carry the partial trace so callers can decide to split further.
class SynthesisError : public Error {
 public:
  SynthesisError(const std::string& what, SynthesisReport report)
      : Error(what), report_(std::move(report)) {}
  const SynthesisReport& report() const noexcept { return report_; }

 private:
  SynthesisReport report_;
};

class RankDeficient : public SynthesisError {
 public:
  RankDeficient(const std::string& what, int rank, SynthesisReport report = {})
      : SynthesisError(what, std::move(report)), rank_(rank) {}
  int rank() const noexcept { return rank_; }

 private:
  int rank_;
};

class MaxIterations : public SynthesisError {
 public:
  using SynthesisError::SynthesisError;
};

class Unreachable : public SynthesisError {
 public:
  using SynthesisError::SynthesisError;
};

struct SynthesisOptions {
  double tol = 1e-8;
  int max_iterations = 50;
  double svd_cutoff = 1e-10;
  // Quadratic penalty keeping timings >= tau_min (timing mode only).
  bool positive_timings = false;
  double tau_min = 0.0;
  double penalty_weight = 1.0;
};

UnitaryMatrix evolution(const ControlProblem& problem, const PulseSequence& seq);

PulseSequence build_identity_seed(const ControlProblem& problem, const SeedParams& seed);

// Coordinates of the anti-Hermitian part of X in a fixed orthonormal basis
// (inner product Re tr(X^dagger Y)). The first N entries are the diagonal
// directions i E_kk.
RealVector anti_hermitian_coords(const ComplexMatrix& x);

struct Jacobian {
  RealMatrix columns;     // N^2 x K, column k = coords(U^dagger dU/dtheta_k)
  ComplexMatrix evolution;
  std::vector<ComplexMatrix> derivatives;  // dU/dtheta_k
};

Jacobian jacobian(const ControlProblem& problem, const PulseSequence& seq);

struct NewtonStep {
  std::vector<double> delta;
  double min_singular_value = 0.0;
  double max_singular_value = 0.0;
  int rank = 0;
};

// Solves sum_k dU/dtheta_k delta_k = -i U H eps modulo global phase by
// truncated-SVD least squares. Throws RankDeficient below rank N^2 - 1.
NewtonStep newton_step(const ControlProblem& problem, const PulseSequence& seq,
                       const HermitianMatrix& target_generator, double epsilon,
                       const SynthesisOptions& options = {});

// Smallest retained singular value of the phase-projected Jacobian at the
// identity sequence of `seed`; 0 when rank falls short of N^2 - 1.
double seed_conditioning(const ControlProblem& problem, const SeedParams& seed,
                         const SynthesisOptions& options = {});

// Converged seeds from a multi-start, best conditioned first. Ties keep
// start order so the result is deterministic.
std::vector<SeedParams> ranked_seeds(const ControlProblem& problem, const MultiStartResult& ms,
                                     const SynthesisOptions& options = {});

struct SynthesisResult {
  PulseSequence sequence;
  SynthesisReport report;
};

SynthesisResult solve_near_identity(const ControlProblem& problem, const PulseSequence& seed_seq,
                                    const UnitaryMatrix& target,
                                    const SynthesisOptions& options = {});

// n_start <= 0 picks ceil(|G|_2 / 0.1) with G the phase-centred generator of target.
int auto_n_start(const UnitaryMatrix& target);

SynthesisResult continuation(const ControlProblem& problem, const PulseSequence& seed_seq,
                             const UnitaryMatrix& target, int n_start = 0,
                             const SynthesisOptions& options = {});

// evolution(seq)^repetitions
UnitaryMatrix repeated_evolution(const ControlProblem& problem, const PulseSequence& seq,
                                 int repetitions);

}  // namespace holonom
