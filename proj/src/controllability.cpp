#include "holonom/controllability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace holonom {

ControlProblem::ControlProblem(HermitianMatrix h0_, HermitianMatrix pa_, HermitianMatrix pb_,
                               ControlMode mode_, double tau_fixed_)
    : h0(std::move(h0_)), pa(std::move(pa_)), pb(std::move(pb_)), mode(mode_),
      tau_fixed(tau_fixed_) {
  if (h0.dim() != pa.dim() || h0.dim() != pb.dim()) {
    std::ostringstream os;
    os << "control problem dimensions disagree: h0 " << h0.dim() << ", pa " << pa.dim()
       << ", pb " << pb.dim();
    throw DimensionMismatch(os.str());
  }
  if (mode == ControlMode::AmplitudeControl && !(tau_fixed > 0.0)) {
    throw std::invalid_argument("amplitude control needs a positive tau_fixed");
  }
}

ControlProblem timing_problem(const HermitianMatrix& ha, const HermitianMatrix& hb) {
  return ControlProblem(HermitianMatrix::zero(ha.dim()), ha, hb);
}

namespace {

// Real coordinates of a matrix under the inner product Re tr(X^dagger Y).
RealVector realify(const ComplexMatrix& x) {
  const auto n = x.size();
  RealVector v(2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    v(2 * k) = x.data()[k].real();
    v(2 * k + 1) = x.data()[k].imag();
  }
  return v;
}

ComplexMatrix complexify(const RealVector& v, Eigen::Index dim) {
  ComplexMatrix x(dim, dim);
  for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = Complex(v(2 * k), v(2 * k + 1));
  return x;
}

class OrthoBasis {
 public:
  explicit OrthoBasis(Eigen::Index dim) : dim_(dim) {}

  // Modified Gram-Schmidt, two passes. Returns true if x was independent.
  // `scale` sets the size below which a residual counts as zero; brackets of
  // unit basis elements pass 1 so near-cancelled commutators are not noise.
  bool add(const ComplexMatrix& x, double scale = 0.0) {
    RealVector r = realify(x);
    const double norm0 = std::max(r.norm(), scale);
    if (norm0 == 0.0) return false;
    for (int pass = 0; pass < 2; ++pass) {
      for (const RealVector& q : vecs_) r -= q.dot(r) * q;
    }
    const double res = r.norm();
    if (res <= kBracketRankTol * norm0) return false;
    vecs_.push_back(r / res);
    mats_.push_back(complexify(vecs_.back(), dim_));
    return true;
  }

  int size() const { return static_cast<int>(vecs_.size()); }
  const ComplexMatrix& matrix(std::size_t k) const { return mats_[k]; }
  const std::vector<ComplexMatrix>& matrices() const { return mats_; }

 private:
  Eigen::Index dim_;
  std::vector<RealVector> vecs_;
  std::vector<ComplexMatrix> mats_;
};

}  // namespace

ControllabilityReport bracket_generation_dim(const ControlProblem& problem, int max_depth,
                                             bool keep_basis) {
  const Eigen::Index n = problem.dim();
  const int full = static_cast<int>(n * n);
  if (max_depth <= 0) max_depth = 2 * full;

  const Complex i(0.0, 1.0);
  OrthoBasis basis(n);
  basis.add(i * problem.ha().matrix());
  basis.add(i * problem.hb().matrix());

  ControllabilityReport rep;
  // Elements [old_end, size) are new since the last sweep; pairs of old
  // elements were bracketed already.
  std::size_t old_end = 0;
  bool closed = false;
  int depth = 0;
  while (basis.size() < full && depth < max_depth) {
    ++depth;
    const std::size_t end = static_cast<std::size_t>(basis.size());
    bool added = false;
    for (std::size_t b = old_end; b < end && basis.size() < full; ++b) {
      for (std::size_t a = 0; a < b && basis.size() < full; ++a) {
        added |= basis.add(commutator(basis.matrix(a), basis.matrix(b)), 1.0);
      }
    }
    old_end = end;
    if (!added) {
      closed = true;
      break;
    }
  }

  rep.algebra_dim = basis.size();
  rep.depth_reached = depth;
  rep.full_u_n = rep.algebra_dim == full;
  rep.full_su_n_plus_phase = rep.algebra_dim >= full - 1;
  rep.saturated = closed || rep.full_u_n;
  if (keep_basis) rep.generated_basis = basis.matrices();
  return rep;
}

bool kac_check(const ControlProblem& problem, double zero_tol) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(problem.ha().matrix());
  if (es.info() != Eigen::Success) throw NumericalError("kac_check: eigensolver failed on Ha");
  const RealVector& w = es.eigenvalues();
  const auto n = w.size();
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double gap = w(k + 1) - w(k);
    if (gap < 1e-10) throw DegenerateEigenbasisWarning(gap);
  }
  const ComplexMatrix hb = problem.hb().matrix();
  const double scale = hb.cwiseAbs().maxCoeff();
  if (scale == 0.0) return n == 1;
  const ComplexMatrix rotated = es.eigenvectors().adjoint() * hb * es.eigenvectors();
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      if (r != c && std::abs(rotated(r, c)) <= zero_tol * scale) return false;
    }
  }
  return true;
}

}  // namespace holonom
