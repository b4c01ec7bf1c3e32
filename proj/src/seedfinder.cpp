#include "holonom/seedfinder.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

namespace holonom {

namespace {

void require_base_length(const ControlProblem& problem, std::size_t len) {
  const std::size_t want = base_pulse_count(problem.dim());
  if (len != want) {
    std::ostringstream os;
    os << "expected " << want << " base parameters for N = " << problem.dim() << ", got " << len;
    if (problem.dim() % 2 == 1) os << " (odd N carries one extra pulse to close the alternation)";
    throw UnsupportedDimension(os.str());
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

std::vector<double> axpy(const std::vector<double>& x, double alpha, const std::vector<double>& d) {
  std::vector<double> y(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] + alpha * d[k];
  return y;
}

}  // namespace

SeedParams make_seed_params(std::vector<double> values, ControlMode mode) {
  SeedParams p;
  p.values = std::move(values);
  p.mode = mode;
  return p;
}

UnitaryMatrix product_of_n(const ControlProblem& problem, const SeedParams& params) {
  require_base_length(problem, params.values.size());
  return UnitaryMatrix(pulse_product(problem, params.values));
}

double f_n(const ControlProblem& problem, const std::vector<double>& values) {
  require_base_length(problem, values.size());
  return root_distance(UnitaryMatrix(pulse_product(problem, values)));
}

double f_n(const ControlProblem& problem, const SeedParams& params) {
  return f_n(problem, params.values);
}

namespace {

// Characteristic polynomial coefficients of the product and their
// derivatives: dA[k][j] = d a_j / d theta_k.
struct CoeffJacobian {
  std::vector<Complex> a;
  std::vector<std::vector<Complex>> da;
};

CoeffJacobian coeff_jacobian(const ControlProblem& problem, const std::vector<double>& values) {
  require_base_length(problem, values.size());
  ComplexMatrix u;
  const std::vector<ComplexMatrix> du = pulse_product_derivatives(problem, values, &u);
  const UnitaryEigen eig = unitary_eigen(UnitaryMatrix(u));
  const auto n = static_cast<std::size_t>(problem.dim());

  std::vector<Complex> roots(n);
  for (std::size_t m = 0; m < n; ++m) roots[m] = std::polar(1.0, eig.phases(static_cast<Eigen::Index>(m)));
  CoeffJacobian out;
  out.a = poly_from_roots(roots);

  // d det(x - U) = -tr(adj(x - U) dU), and for normal U the adjugate is
  // diagonal in the Schur basis with entries prod_{l != m} (x - lambda_l).
  // This holds for repeated eigenvalues too.
  std::vector<std::vector<Complex>> cofactor(n);
  for (std::size_t m = 0; m < n; ++m) {
    std::vector<Complex> others;
    others.reserve(n - 1);
    for (std::size_t l = 0; l < n; ++l) {
      if (l != m) others.push_back(roots[l]);
    }
    cofactor[m] = poly_from_roots(others);
  }

  const ComplexMatrix& q = eig.vectors;
  out.da.assign(values.size(), std::vector<Complex>(n + 1, Complex(0.0)));
  for (std::size_t k = 0; k < values.size(); ++k) {
    const ComplexMatrix rotated = q.adjoint() * du[k] * q;
    for (std::size_t j = 0; j < n; ++j) {
      Complex d(0.0);
      for (std::size_t m = 0; m < n; ++m) {
        d -= cofactor[m][j] * rotated(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
      }
      out.da[k][j] = d;
    }
  }
  return out;
}

}  // namespace

double f_n_with_gradient(const ControlProblem& problem, const std::vector<double>& values,
                         std::vector<double>& grad) {
  const CoeffJacobian cj = coeff_jacobian(problem, values);
  double f = 0.0;
  for (const Complex& c : cj.a) f += std::norm(c);
  grad.assign(values.size(), 0.0);
  for (std::size_t k = 0; k < values.size(); ++k) {
    double g = 0.0;
    for (std::size_t j = 0; j < cj.a.size(); ++j) g += 2.0 * std::real(std::conj(cj.a[j]) * cj.da[k][j]);
    grad[k] = g;
  }
  return f;
}

std::vector<double> f_n_gradient(const ControlProblem& problem, const SeedParams& params) {
  std::vector<double> g;
  f_n_with_gradient(problem, params.values, g);
  return g;
}

SeedParams random_start(const ControlProblem& problem, Rng& rng) {
  const std::size_t count = base_pulse_count(problem.dim());
  std::vector<double> v(count);
  if (problem.mode == ControlMode::TimingControl) {
    const double scale = std::max(problem.ha().spectral_norm(), problem.hb().spectral_norm());
    const double hi = 2.0 * std::numbers::pi / (scale > 0.0 ? scale : 1.0);
    std::uniform_real_distribution<double> uni(0.0, hi);
    for (double& x : v) x = uni(rng);
  } else {
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (double& x : v) x = uni(rng);
  }
  return make_seed_params(std::move(v), problem.mode);
}

namespace {

// Gauss-Newton on the middle coefficients a_1 .. a_(N-1), which vanish
// exactly at a root. F_N - 2 is quadratic in the distance to the root set, so
// F_N <= 2 + 1e-9 still leaves ~1e-5 in the matrix; this takes it to
// rounding level in a few steps.
void polish(const ControlProblem& problem, std::vector<double>& x, double& f, SeedParams& out,
            const DescentConfig& config) {
  const std::size_t n = static_cast<std::size_t>(problem.dim());
  if (n < 2) return;
  const auto rows = static_cast<Eigen::Index>(2 * (n - 1));
  const auto cols = static_cast<Eigen::Index>(x.size());
  for (int it = 0; it < config.polish_iterations; ++it) {
    const CoeffJacobian cj = coeff_jacobian(problem, x);
    RealVector r(rows);
    RealMatrix jac(rows, cols);
    for (std::size_t j = 1; j < n; ++j) {
      const auto row = static_cast<Eigen::Index>(2 * (j - 1));
      r(row) = cj.a[j].real();
      r(row + 1) = cj.a[j].imag();
      for (std::size_t k = 0; k < x.size(); ++k) {
        jac(row, static_cast<Eigen::Index>(k)) = cj.da[k][j].real();
        jac(row + 1, static_cast<Eigen::Index>(k)) = cj.da[k][j].imag();
      }
    }
    if (r.norm() < 1e-15) return;
    Eigen::JacobiSVD<RealMatrix> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    const RealVector step = svd.solve(r);
    std::vector<double> x_new(x.size());
    double f_new = f;
    for (double alpha = 1.0; alpha > 1e-3; alpha *= 0.5) {
      for (std::size_t k = 0; k < x.size(); ++k) {
        x_new[k] = x[k] - alpha * step(static_cast<Eigen::Index>(k));
      }
      f_new = f_n(problem, x_new);
      if (f_new < f) break;
    }
    if (!(f_new < f)) return;
    x = std::move(x_new);
    f = f_new;
    ++out.iterations;
    out.trace.push_back(f);
  }
}

}  // namespace

SeedParams find_seed(const ControlProblem& problem, const SeedParams& start,
                     const DescentConfig& config) {
  SeedParams out = start;
  out.mode = problem.mode;
  out.iterations = 0;
  out.converged = false;
  out.trace.clear();

  std::vector<double> x = start.values;
  std::vector<double> g;
  double f = f_n_with_gradient(problem, x, g);
  out.trace.push_back(f);

  const std::size_t dim = x.size();
  const double target = 2.0 + config.tol_seed;
  double steepest_step = 0.1;
  bool quasi_newton = false;
  RealMatrix inv_hess;

  while (f > target && out.iterations < config.max_iterations) {
    const double gnorm = norm(g);
    if (gnorm == 0.0) break;

    if (!quasi_newton && f < config.quasi_newton_below) {
      quasi_newton = true;
      inv_hess = RealMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)) *
                 (steepest_step / gnorm);
    }

    std::vector<double> d(dim);
    double alpha;
    if (quasi_newton) {
      const Eigen::Map<const RealVector> gv(g.data(), static_cast<Eigen::Index>(dim));
      const RealVector dv = -(inv_hess * gv);
      d.assign(dv.data(), dv.data() + dim);
      if (dot(d, g) >= 0.0) {
        inv_hess.setIdentity();
        inv_hess *= steepest_step / gnorm;
        for (std::size_t k = 0; k < dim; ++k) d[k] = -inv_hess(0, 0) * g[k];
      }
      alpha = 1.0;
    } else {
      for (std::size_t k = 0; k < dim; ++k) d[k] = -g[k] / gnorm;
      alpha = steepest_step;
    }

    // Armijo backtracking.
    const double slope = dot(g, d);
    std::vector<double> x_new;
    std::vector<double> g_new;
    double f_new = f;
    bool accepted = false;
    int backtracks = 0;
    for (; backtracks <= config.max_backtracks; ++backtracks) {
      x_new = axpy(x, alpha, d);
      f_new = f_n(problem, x_new);
      if (f_new <= f + config.armijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= config.backtrack;
    }
    if (!accepted) break;

    f_new = f_n_with_gradient(problem, x_new, g_new);
    if (quasi_newton) {
      const Eigen::Index nd = static_cast<Eigen::Index>(dim);
      RealVector s(nd), y(nd);
      for (std::size_t k = 0; k < dim; ++k) {
        s(static_cast<Eigen::Index>(k)) = x_new[k] - x[k];
        y(static_cast<Eigen::Index>(k)) = g_new[k] - g[k];
      }
      const double sy = s.dot(y);
      if (sy > 1e-14 * s.norm() * y.norm()) {
        const double rho = 1.0 / sy;
        const RealMatrix eye = RealMatrix::Identity(nd, nd);
        inv_hess = (eye - rho * s * y.transpose()) * inv_hess * (eye - rho * y * s.transpose()) +
                   rho * s * s.transpose();
      }
    } else {
      const double taken = alpha;
      steepest_step = backtracks == 0 ? 2.0 * taken : taken;
    }

    x = std::move(x_new);
    g = std::move(g_new);
    f = f_new;
    ++out.iterations;
    out.trace.push_back(f);

    const std::size_t w = static_cast<std::size_t>(config.stall_window);
    if (out.trace.size() > w) {
      const double before = out.trace[out.trace.size() - 1 - w];
      if ((before - f) < config.stall_rel * before) break;
    }
  }

  if (f <= target) polish(problem, x, f, out, config);

  out.values = std::move(x);
  out.achieved_fn = f;
  out.converged = f <= target;
  return out;
}

SeedParams find_seed(const ControlProblem& problem, std::uint64_t rng_seed,
                     const DescentConfig& config) {
  Rng rng(rng_seed);
  return find_seed(problem, random_start(problem, rng), config);
}

MultiStartResult multi_start(const ControlProblem& problem, int starts, std::uint64_t master_seed,
                             const DescentConfig& config, int threads) {
  if (starts < 1) throw std::invalid_argument("multi_start: need at least one start");
  MultiStartResult res;
  res.runs.resize(static_cast<std::size_t>(starts));

  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int workers = std::clamp(threads > 0 ? threads : hw, 1, starts);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int k = next++; k < starts; k = next++) {
      res.runs[static_cast<std::size_t>(k)] =
          find_seed(problem, derive_seed(master_seed, static_cast<std::uint64_t>(k)), config);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  }

  res.best_fn = res.runs.front().achieved_fn;
  for (std::size_t k = 0; k < res.runs.size(); ++k) {
    const SeedParams& r = res.runs[k];
    res.best_fn = std::min(res.best_fn, r.achieved_fn);
    if (r.converged) {
      ++res.successes;
      if (!res.first_converged) res.first_converged = k;
    }
  }
  res.success_fraction = static_cast<double>(res.successes) / starts;
  return res;
}

RootOfIdentity as_root_of_identity(const ControlProblem& problem, const SeedParams& seed) {
  RootOfIdentity r{product_of_n(problem, seed), static_cast<int>(problem.dim())};
  const double fn = root_distance(r.matrix);
  if (fn > 2.0 + 1e-8) {
    std::ostringstream os;
    os << "product is not a root of identity: F_N = " << fn;
    throw SeedNotConverged(os.str());
  }
  return r;
}

}  // namespace holonom
