#include "holonom/pulse.hpp"

namespace holonom {

namespace {

const HermitianMatrix& perturbation_matrix(const ControlProblem& problem, Perturbation p) {
  return p == Perturbation::A ? problem.pa : problem.pb;
}

HermitianMatrix timing_generator(const ControlProblem& problem, Perturbation p) {
  return problem.h0 + perturbation_matrix(problem, p);
}

HermitianMatrix amplitude_generator(const ControlProblem& problem, Perturbation p, double c) {
  return problem.h0 + perturbation_matrix(problem, p) * c;
}

}  // namespace

ComplexMatrix pulse_factor(const ControlProblem& problem, Perturbation p, double theta) {
  if (problem.mode == ControlMode::TimingControl) {
    return expm_hermitian_generator(timing_generator(problem, p), theta).matrix();
  }
  return expm_hermitian_generator(amplitude_generator(problem, p, theta), problem.tau_fixed)
      .matrix();
}

ComplexMatrix pulse_factor_derivative(const ControlProblem& problem, Perturbation p, double theta,
                                      const ComplexMatrix& factor) {
  if (problem.mode == ControlMode::TimingControl) {
    return Complex(0.0, -1.0) * (timing_generator(problem, p).matrix() * factor);
  }
  return expm_frechet(amplitude_generator(problem, p, theta), perturbation_matrix(problem, p),
                      problem.tau_fixed);
}

ComplexMatrix pulse_product(const ControlProblem& problem, const std::vector<double>& params) {
  const auto n = problem.dim();
  ComplexMatrix u = ComplexMatrix::Identity(n, n);
  for (std::size_t k = 0; k < params.size(); ++k) {
    u = pulse_factor(problem, perturbation_for_slot(k), params[k]) * u;
  }
  return u;
}

std::vector<ComplexMatrix> pulse_product_derivatives(const ControlProblem& problem,
                                                     const std::vector<double>& params,
                                                     ComplexMatrix* product) {
  const auto n = problem.dim();
  const std::size_t count = params.size();
  std::vector<ComplexMatrix> factors(count);
  for (std::size_t k = 0; k < count; ++k) {
    factors[k] = pulse_factor(problem, perturbation_for_slot(k), params[k]);
  }
  // prefix[k] = F_{k-1} ... F_0, suffix[k] = F_{K-1} ... F_{k+1}
  std::vector<ComplexMatrix> prefix(count + 1);
  prefix[0] = ComplexMatrix::Identity(n, n);
  for (std::size_t k = 0; k < count; ++k) prefix[k + 1] = factors[k] * prefix[k];
  std::vector<ComplexMatrix> out(count);
  ComplexMatrix suffix = ComplexMatrix::Identity(n, n);
  for (std::size_t k = count; k-- > 0;) {
    const ComplexMatrix d =
        pulse_factor_derivative(problem, perturbation_for_slot(k), params[k], factors[k]);
    out[k] = suffix * d * prefix[k];
    suffix = suffix * factors[k];
  }
  if (product) *product = prefix[count];
  return out;
}

}  // namespace holonom
