#pragma once

// Single-pulse propagators shared by the seed search and the full synthesis.
// Slot k (0-based) uses perturbation A for even k and B for odd k.

#include "holonom/controllability.hpp"

namespace holonom {

enum class Perturbation { A, B };

constexpr Perturbation perturbation_for_slot(std::size_t k) noexcept {
  return k % 2 == 0 ? Perturbation::A : Perturbation::B;
}

// Number of base pulses for the root-of-identity search: N, or N + 1 when N is
// odd so that the alternation closes on B and repetition keeps it intact.
constexpr std::size_t base_pulse_count(Eigen::Index n) noexcept {
  const auto un = static_cast<std::size_t>(n);
  return un % 2 == 0 ? un : un + 1;
}

// exp(-i H_(k) theta) in timing mode, exp(-i (H0 + theta P_(k)) tau) in amplitude mode.
ComplexMatrix pulse_factor(const ControlProblem& problem, Perturbation p, double theta);

// d/dtheta of pulse_factor, given the factor itself.
ComplexMatrix pulse_factor_derivative(const ControlProblem& problem, Perturbation p, double theta,
                                      const ComplexMatrix& factor);

// Ordered product of pulses, first parameter acting first (rightmost).
ComplexMatrix pulse_product(const ControlProblem& problem, const std::vector<double>& params);

// d/dtheta_k of pulse_product for every k. Prefix/suffix accumulation, O(K) products.
std::vector<ComplexMatrix> pulse_product_derivatives(const ControlProblem& problem,
                                                     const std::vector<double>& params,
                                                     ComplexMatrix* product = nullptr);

}  // namespace holonom
