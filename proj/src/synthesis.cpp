#include "holonom/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace holonom {

namespace {

void require_well_formed(const ControlProblem& problem, const PulseSequence& seq) {
  const std::size_t want = sequence_length(problem.dim());
  if (seq.pulses.size() != want) {
    std::ostringstream os;
    os << "pulse sequence has " << seq.pulses.size() << " pulses, expected " << want;
    throw MalformedSequence(os.str());
  }
  if (seq.mode != problem.mode) throw MalformedSequence("pulse sequence mode differs from problem mode");
  for (std::size_t k = 0; k < seq.pulses.size(); ++k) {
    const Pulse& p = seq.pulses[k];
    if (p.slot != static_cast<int>(k + 1) || p.perturbation != perturbation_for_slot(k) ||
        !std::isfinite(p.parameter)) {
      std::ostringstream os;
      os << "pulse " << k + 1 << " is malformed (slot " << p.slot << ")";
      throw MalformedSequence(os.str());
    }
  }
}

RealVector phase_direction(Eigen::Index n) {
  RealVector p = RealVector::Zero(n * n);
  p.head(n).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  return p;
}

// Removes the global-phase component.
void project_out_phase(RealMatrix& m, const RealVector& p) { m -= p * (p.transpose() * m); }

}  // namespace

std::vector<double> PulseSequence::parameters() const {
  std::vector<double> v;
  v.reserve(pulses.size());
  for (const Pulse& p : pulses) v.push_back(p.parameter);
  return v;
}

PulseSequence PulseSequence::from_parameters(const std::vector<double>& params, ControlMode mode) {
  PulseSequence s;
  s.mode = mode;
  s.pulses.reserve(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    s.pulses.push_back(Pulse{static_cast<int>(k + 1), perturbation_for_slot(k), params[k]});
  }
  return s;
}

std::size_t sequence_length(Eigen::Index n) {
  return static_cast<std::size_t>(n) * base_pulse_count(n);
}

UnitaryMatrix evolution(const ControlProblem& problem, const PulseSequence& seq) {
  require_well_formed(problem, seq);
  return UnitaryMatrix(pulse_product(problem, seq.parameters()));
}

UnitaryMatrix repeated_evolution(const ControlProblem& problem, const PulseSequence& seq,
                                 int repetitions) {
  return evolution(problem, seq).pow(repetitions);
}

PulseSequence build_identity_seed(const ControlProblem& problem, const SeedParams& seed) {
  if (!seed.converged) {
    std::ostringstream os;
    os << "seed did not converge (F_N = " << seed.achieved_fn << ")";
    throw SeedNotConverged(os.str());
  }
  if (seed.values.size() != base_pulse_count(problem.dim())) {
    throw UnsupportedDimension("seed length does not match the problem dimension");
  }
  std::vector<double> params;
  params.reserve(sequence_length(problem.dim()));
  for (Eigen::Index rep = 0; rep < problem.dim(); ++rep) {
    params.insert(params.end(), seed.values.begin(), seed.values.end());
  }
  return PulseSequence::from_parameters(params, problem.mode);
}

RealVector anti_hermitian_coords(const ComplexMatrix& x) {
  const Eigen::Index n = x.rows();
  RealVector c(n * n);
  for (Eigen::Index k = 0; k < n; ++k) c(k) = x(k, k).imag();
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Index idx = n;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      c(idx++) = s * (x(j, k).real() - x(k, j).real());
      c(idx++) = s * (x(j, k).imag() + x(k, j).imag());
    }
  }
  return c;
}

Jacobian jacobian(const ControlProblem& problem, const PulseSequence& seq) {
  require_well_formed(problem, seq);
  Jacobian jac;
  jac.derivatives = pulse_product_derivatives(problem, seq.parameters(), &jac.evolution);
  const Eigen::Index n = problem.dim();
  jac.columns.resize(n * n, static_cast<Eigen::Index>(jac.derivatives.size()));
  const ComplexMatrix u_adj = jac.evolution.adjoint();
  for (std::size_t k = 0; k < jac.derivatives.size(); ++k) {
    jac.columns.col(static_cast<Eigen::Index>(k)) = anti_hermitian_coords(u_adj * jac.derivatives[k]);
  }
  return jac;
}

namespace {

NewtonStep newton_from_jacobian(const ControlProblem& problem, const Jacobian& jac,
                                const std::vector<double>& theta, const HermitianMatrix& generator,
                                double epsilon, const SynthesisOptions& options,
                                double lambda = 0.0) {
  const Eigen::Index n = problem.dim();
  const RealVector p = phase_direction(n);
  RealMatrix a = jac.columns;
  project_out_phase(a, p);
  RealMatrix rhs = anti_hermitian_coords(Complex(0.0, -epsilon) * generator.matrix());
  project_out_phase(rhs, p);

  Eigen::JacobiSVD<RealMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sv = svd.singularValues();
  const double cutoff = options.svd_cutoff * (sv.size() > 0 ? sv(0) : 0.0);
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > cutoff) ++rank;
  }
  NewtonStep step;
  step.rank = rank;
  step.min_singular_value = rank > 0 ? sv(rank - 1) : 0.0;
  step.max_singular_value = sv.size() > 0 ? sv(0) : 0.0;
  const int needed = static_cast<int>(n * n) - 1;
  if (rank < needed) {
    std::ostringstream os;
    os << "linearized system has rank " << rank << " < " << needed;
    throw RankDeficient(os.str(), rank);
  }

  const Eigen::Index m = a.cols();
  RealVector delta = RealVector::Zero(m);
  if (epsilon != 0.0) {
    if (!options.positive_timings || problem.mode != ControlMode::TimingControl) {
      // lambda > 0 gives the Levenberg-Marquardt filter sigma / (sigma^2 + lambda^2).
      for (int k = 0; k < rank; ++k) {
        const double filt = sv(k) / (sv(k) * sv(k) + lambda * lambda);
        delta += (svd.matrixU().col(k).dot(rhs.col(0)) * filt) * svd.matrixV().col(k);
      }
    } else {
      // Stack penalty rows w (theta_k + delta_k - tau_min) for violated slots.
      std::vector<Eigen::Index> active;
      for (Eigen::Index k = 0; k < m; ++k) {
        if (theta[static_cast<std::size_t>(k)] < options.tau_min) active.push_back(k);
      }
      const double w = std::sqrt(options.penalty_weight);
      const Eigen::Index damp_rows = lambda > 0.0 ? m : 0;
      RealMatrix aug = RealMatrix::Zero(a.rows() + static_cast<Eigen::Index>(active.size()) + damp_rows, m);
      RealVector b = RealVector::Zero(aug.rows());
      aug.topRows(a.rows()) = a;
      b.head(a.rows()) = rhs.col(0);
      for (std::size_t r = 0; r < active.size(); ++r) {
        const auto row = a.rows() + static_cast<Eigen::Index>(r);
        aug(row, active[r]) = w;
        b(row) = w * (options.tau_min - theta[static_cast<std::size_t>(active[r])]);
      }
      if (damp_rows > 0) aug.bottomRows(m) = lambda * RealMatrix::Identity(m, m);
      Eigen::JacobiSVD<RealMatrix> svd2(aug, Eigen::ComputeThinU | Eigen::ComputeThinV);
      svd2.setThreshold(options.svd_cutoff);
      delta = svd2.solve(b);
    }
  }

  // Trust region on the infinity norm.
  double theta_max = 1.0;
  for (double t : theta) theta_max = std::max(theta_max, std::abs(t));
  const double limit = 0.5 * theta_max;
  const double dmax = delta.cwiseAbs().maxCoeff();
  if (dmax > limit) delta *= limit / dmax;

  step.delta.assign(delta.data(), delta.data() + m);
  return step;
}

std::vector<double> add(const std::vector<double>& x, const std::vector<double>& d, double alpha) {
  std::vector<double> y(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] + alpha * d[k];
  return y;
}

}  // namespace

NewtonStep newton_step(const ControlProblem& problem, const PulseSequence& seq,
                       const HermitianMatrix& target_generator, double epsilon,
                       const SynthesisOptions& options) {
  if (target_generator.dim() != problem.dim()) {
    throw DimensionMismatch("newton_step: generator dimension differs from problem");
  }
  if (target_generator.spectral_norm() > 1.0 + 1e-10) {
    throw std::invalid_argument("newton_step: target generator must have spectral norm <= 1");
  }
  const Jacobian jac = jacobian(problem, seq);
  return newton_from_jacobian(problem, jac, seq.parameters(), target_generator, epsilon, options);
}

double seed_conditioning(const ControlProblem& problem, const SeedParams& seed,
                         const SynthesisOptions& options) {
  const PulseSequence seq = build_identity_seed(problem, seed);
  const Jacobian jac = jacobian(problem, seq);
  try {
    return newton_from_jacobian(problem, jac, seq.parameters(),
                                HermitianMatrix::zero(problem.dim()), 0.0, options)
        .min_singular_value;
  } catch (const RankDeficient&) {
    return 0.0;
  }
}

std::vector<SeedParams> ranked_seeds(const ControlProblem& problem, const MultiStartResult& ms,
                                     const SynthesisOptions& options) {
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t k = 0; k < ms.runs.size(); ++k) {
    if (ms.runs[k].converged) order.emplace_back(seed_conditioning(problem, ms.runs[k], options), k);
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<SeedParams> out;
  out.reserve(order.size());
  for (const auto& [sv, k] : order) out.push_back(ms.runs[k]);
  return out;
}

SynthesisResult solve_near_identity(const ControlProblem& problem, const PulseSequence& seed_seq,
                                    const UnitaryMatrix& target, const SynthesisOptions& options) {
  if (target.dim() != problem.dim()) throw DimensionMismatch("target dimension differs from problem");
  require_well_formed(problem, seed_seq);

  SynthesisResult res{seed_seq, {}};
  SynthesisReport& rep = res.report;
  std::vector<double> theta = seed_seq.parameters();

  auto residual_at = [&](const std::vector<double>& t) {
    return phase_aligned_distance(UnitaryMatrix(pulse_product(problem, t)), target);
  };

  double residual = residual_at(theta);
  rep.newton_residuals.push_back(residual);
  int iter = 0;
  double lambda = 0.0;
  while (residual > options.tol) {
    if (iter >= options.max_iterations) {
      std::ostringstream os;
      os << "Newton iteration did not reach tol " << options.tol << " in " << iter
         << " iterations (residual " << residual << ")";
      rep.final_error = residual;
      throw MaxIterations(os.str(), rep);
    }
    ++iter;
    const PulseSequence current = PulseSequence::from_parameters(theta, problem.mode);
    const Jacobian jac = jacobian(problem, current);
    // U^dagger target = e^{i phi} exp(-i G)
    const HermitianMatrix g =
        phase_centered_log(UnitaryMatrix(jac.evolution).adjoint() * target);
    const double eps = g.spectral_norm();
    NewtonStep step;
    try {
      step = newton_from_jacobian(problem, jac, theta, g * (1.0 / eps), eps, options, lambda);
    } catch (const RankDeficient& e) {
      rep.final_error = residual;
      throw RankDeficient(e.what(), e.rank(), rep);
    }
    rep.jacobian_min_singular_value = step.min_singular_value;

    // Levenberg-Marquardt: only steps that lower the residual are taken. A
    // rejected step raises lambda and re-solves on the same linearization.
    std::vector<double> best_theta = add(theta, step.delta, 1.0);
    double best_res = residual_at(best_theta);
    for (int retry = 0; best_res >= residual && retry < 12; ++retry) {
      lambda = lambda == 0.0 ? 1e-3 * step.max_singular_value : 4.0 * lambda;
      step = newton_from_jacobian(problem, jac, theta, g * (1.0 / eps), eps, options, lambda);
      best_theta = add(theta, step.delta, 1.0);
      best_res = residual_at(best_theta);
    }
    if (best_res >= residual) {
      std::ostringstream os;
      os << "Newton iteration stalled at residual " << residual << " after " << iter
         << " iterations";
      rep.final_error = residual;
      throw MaxIterations(os.str(), rep);
    }
    lambda = lambda < 1e-6 * step.max_singular_value ? 0.0 : lambda / 8.0;
    theta = std::move(best_theta);
    residual = best_res;
    rep.newton_residuals.push_back(residual);
  }

  res.sequence = PulseSequence::from_parameters(theta, problem.mode);
  rep.final_error = residual;
  rep.continuation_path.push_back({1, true, iter, residual});
  return res;
}

int auto_n_start(const UnitaryMatrix& target) {
  const double g = phase_centered_log(target).spectral_norm();
  return std::max(1, static_cast<int>(std::ceil(g / 0.1 - 1e-12)));
}

SynthesisResult continuation(const ControlProblem& problem, const PulseSequence& seed_seq,
                             const UnitaryMatrix& target, int n_start,
                             const SynthesisOptions& options) {
  if (target.dim() != problem.dim()) throw DimensionMismatch("target dimension differs from problem");
  const HermitianMatrix generator = phase_centered_log(target);
  if (n_start <= 0) n_start = auto_n_start(target);

  SynthesisReport rep;
  rep.n_start = n_start;
  std::optional<SynthesisResult> last_ok;
  int last_n = 0;
  PulseSequence current = seed_seq;

  for (int n = n_start; n >= 1; --n) {
    const UnitaryMatrix fractional = expm_hermitian_generator(generator, 1.0 / n);
    try {
      SynthesisResult r = solve_near_identity(problem, current, fractional, options);
      rep.continuation_path.push_back(
          {n, true, static_cast<int>(r.report.newton_residuals.size()) - 1, r.report.final_error});
      current = r.sequence;
      last_ok = std::move(r);
      last_n = n;
    } catch (const SynthesisError& e) {
      rep.continuation_path.push_back({n, false,
                                       static_cast<int>(e.report().newton_residuals.size()) - 1,
                                       e.report().final_error});
      if (!last_ok) {
        std::ostringstream os;
        os << "no fractional power converged starting from n = " << n_start << ": " << e.what();
        rep.newton_residuals = e.report().newton_residuals;
        throw Unreachable(os.str(), rep);
      }
      break;
    }
  }

  SynthesisResult out{last_ok->sequence, rep};
  out.report.n_star = last_n;
  out.report.newton_residuals = last_ok->report.newton_residuals;
  out.report.jacobian_min_singular_value = last_ok->report.jacobian_min_singular_value;
  out.report.final_error =
      phase_aligned_distance(repeated_evolution(problem, out.sequence, last_n), target);
  if (out.report.final_error > last_n * options.tol * (1.0 + 1e-6) + 1e-14) {
    std::ostringstream os;
    os << "repeated sequence misses target: error " << out.report.final_error << " > "
       << last_n << " * " << options.tol;
    throw Unreachable(os.str(), out.report);
  }
  return out;
}

}  // namespace holonom
