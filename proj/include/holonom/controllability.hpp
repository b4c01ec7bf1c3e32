#pragma once

// Control problems H(t) = H0 + C_a(t) Pa + C_b(t) Pb and their Lie-algebraic
// controllability.

#include <optional>
#include <vector>

#include "holonom/matcore.hpp"

namespace holonom {

enum class ControlMode { TimingControl, AmplitudeControl };

struct ControlProblem {
  HermitianMatrix h0;
  HermitianMatrix pa;
  HermitianMatrix pb;
  ControlMode mode = ControlMode::TimingControl;
  // Pulse duration in AmplitudeControl mode.
  double tau_fixed = 0.0;

  ControlProblem(HermitianMatrix h0, HermitianMatrix pa, HermitianMatrix pb,
                 ControlMode mode = ControlMode::TimingControl, double tau_fixed = 0.0);

  Eigen::Index dim() const noexcept { return h0.dim(); }
  HermitianMatrix ha() const { return h0 + pa; }
  HermitianMatrix hb() const { return h0 + pb; }
};

// Problem with zero drift: Ha = ha, Hb = hb.
ControlProblem timing_problem(const HermitianMatrix& ha, const HermitianMatrix& hb);

struct ControllabilityReport {
  int algebra_dim = 0;
  bool full_u_n = false;
  bool full_su_n_plus_phase = false;
  bool kac_satisfied = false;
  bool saturated = false;  // false when max_depth ran out before closure
  int depth_reached = 0;
  std::vector<ComplexMatrix> generated_basis;
};

// Rank-acceptance threshold on the Gram-Schmidt residual (relative).
inline constexpr double kBracketRankTol = 1e-9;
inline constexpr double kKacZeroTol = 1e-10;

// Dimension of the Lie algebra generated by {i Ha, i Hb}. max_depth <= 0 means 2 N^2.
ControllabilityReport bracket_generation_dim(const ControlProblem& problem, int max_depth = 0,
                                             bool keep_basis = false);

// True iff Hb has no (near-)zero off-diagonal entries in the eigenbasis of Ha.
// Throws DegenerateEigenbasisWarning when Ha has a repeated eigenvalue.
bool kac_check(const ControlProblem& problem, double zero_tol = kKacZeroTol);

}  // namespace holonom
