#pragma once

// Search for base pulse parameters whose product is an Nth root of the
// identity, by driving F_N (sum of squared characteristic-polynomial
// coefficient moduli) down to its global minimum 2.

#include <cstdint>
#include <optional>
#include <vector>

#include "holonom/controllability.hpp"
#include "holonom/pulse.hpp"
#include "holonom/randmat.hpp"

namespace holonom {

struct SeedParams {
  std::vector<double> values;
  ControlMode mode = ControlMode::TimingControl;
  double achieved_fn = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> trace;  // F_N after each accepted step, starting value first

  bool operator==(const SeedParams&) const = default;
};

struct RootOfIdentity {
  UnitaryMatrix matrix;
  int order = 0;
};

struct DescentConfig {
  double tol_seed = 1e-9;
  int max_iterations = 2000;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
  int stall_window = 25;
  double stall_rel = 1e-12;
  // Switch from steepest descent to BFGS once F_N drops below this.
  double quasi_newton_below = 2.5;
  // Gauss-Newton steps on the polynomial coefficients after convergence.
  int polish_iterations = 8;
};

SeedParams make_seed_params(std::vector<double> values, ControlMode mode);

UnitaryMatrix product_of_n(const ControlProblem& problem, const SeedParams& params);
double f_n(const ControlProblem& problem, const SeedParams& params);
std::vector<double> f_n_gradient(const ControlProblem& problem, const SeedParams& params);

// Raw-vector forms used by the optimizer.
double f_n(const ControlProblem& problem, const std::vector<double>& values);
double f_n_with_gradient(const ControlProblem& problem, const std::vector<double>& values,
                         std::vector<double>& grad);

// Timings uniform in [0, 2 pi / max(|Ha|, |Hb|)], amplitudes uniform in [-2, 2].
SeedParams random_start(const ControlProblem& problem, Rng& rng);

SeedParams find_seed(const ControlProblem& problem, const SeedParams& start,
                     const DescentConfig& config = {});
SeedParams find_seed(const ControlProblem& problem, std::uint64_t rng_seed,
                     const DescentConfig& config = {});

struct MultiStartResult {
  std::vector<SeedParams> runs;        // indexed by start number
  std::optional<std::size_t> first_converged;
  int successes = 0;
  double success_fraction = 0.0;
  double best_fn = 0.0;
};

// Start k draws from derive_seed(master_seed, k); output is independent of
// thread scheduling.
MultiStartResult multi_start(const ControlProblem& problem, int starts, std::uint64_t master_seed,
                             const DescentConfig& config = {}, int threads = 0);

RootOfIdentity as_root_of_identity(const ControlProblem& problem, const SeedParams& seed);

}  // namespace holonom
