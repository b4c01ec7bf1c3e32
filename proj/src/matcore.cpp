#include "holonom/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace holonom {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBranchCutTol = 1e-8;

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw DimensionMismatch(os.str());
  }
}

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch " << a << " vs " << b;
    throw DimensionMismatch(os.str());
  }
}

// Wrap a phase into (-pi, pi].
double wrap_phase(double x) {
  double y = std::remainder(x, 2.0 * kPi);
  if (y <= -kPi) y += 2.0 * kPi;
  return y;
}

ComplexMatrix from_spectrum(const ComplexMatrix& q, const ComplexVector& d) {
  return q * d.asDiagonal() * q.adjoint();
}

}  // namespace

// ---------------------------------------------------------------------------
// HermitianMatrix

HermitianMatrix::HermitianMatrix(const ComplexMatrix& a, double tol) {
  require_square(a, "HermitianMatrix");
  const double dev = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (!(dev <= tol)) {
    std::ostringstream os;
    os << "matrix is not Hermitian: max |A - A^dagger| = " << dev;
    throw NotHermitian(os.str());
  }
  m_ = 0.5 * (a + a.adjoint());
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index n) {
  return HermitianMatrix(ComplexMatrix::Zero(n, n), Trusted{});
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index n) {
  return HermitianMatrix(ComplexMatrix::Identity(n, n), Trusted{});
}

HermitianMatrix HermitianMatrix::diagonal(const RealVector& d) {
  return HermitianMatrix(d.cast<Complex>().asDiagonal().toDenseMatrix(), Trusted{});
}

double HermitianMatrix::spectral_norm() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  require_same_dim(dim(), o.dim(), "HermitianMatrix +");
  return HermitianMatrix(m_ + o.m_, Trusted{});
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  require_same_dim(dim(), o.dim(), "HermitianMatrix -");
  return HermitianMatrix(m_ - o.m_, Trusted{});
}

HermitianMatrix HermitianMatrix::operator*(double s) const {
  return HermitianMatrix(m_ * s, Trusted{});
}

// ---------------------------------------------------------------------------
// UnitaryMatrix

UnitaryMatrix::UnitaryMatrix(const ComplexMatrix& u, double tol) {
  require_square(u, "UnitaryMatrix");
  const auto n = u.rows();
  const double dev = (u.adjoint() * u - ComplexMatrix::Identity(n, n)).norm();
  if (!(dev <= tol)) {
    std::ostringstream os;
    os << "matrix is not unitary: |U^dagger U - I|_F = " << dev;
    throw NotUnitary(os.str());
  }
  m_ = u;
}

UnitaryMatrix UnitaryMatrix::identity(Eigen::Index n) {
  return UnitaryMatrix(ComplexMatrix::Identity(n, n));
}

UnitaryMatrix UnitaryMatrix::adjoint() const { return UnitaryMatrix(m_.adjoint()); }

UnitaryMatrix UnitaryMatrix::operator*(const UnitaryMatrix& o) const {
  require_same_dim(dim(), o.dim(), "UnitaryMatrix *");
  return UnitaryMatrix(m_ * o.m_);
}

UnitaryMatrix UnitaryMatrix::pow(int n) const {
  if (n < 0) return adjoint().pow(-n);
  ComplexMatrix acc = ComplexMatrix::Identity(dim(), dim());
  for (int i = 0; i < n; ++i) acc = m_ * acc;
  return UnitaryMatrix(acc);
}

// ---------------------------------------------------------------------------

UnitaryEigen unitary_eigen(const UnitaryMatrix& u) {
  // Unitaries are normal, so the Schur form is diagonal and its Schur vectors
  // are an orthonormal eigenbasis even for repeated eigenvalues.
  Eigen::ComplexSchur<ComplexMatrix> schur(u.matrix());
  if (schur.info() != Eigen::Success) {
    std::ostringstream os;
    os << "Schur decomposition did not converge (N = " << u.dim()
       << ", |U|_F = " << u.matrix().norm() << ")";
    throw NumericalError(os.str());
  }
  UnitaryEigen out;
  out.vectors = schur.matrixU();
  const auto& t = schur.matrixT();
  out.phases.resize(u.dim());
  for (Eigen::Index k = 0; k < u.dim(); ++k) out.phases(k) = wrap_phase(std::arg(t(k, k)));
  return out;
}

UnitaryMatrix expm_hermitian_generator(const HermitianMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix());
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "Hermitian eigensolver did not converge (N = " << h.dim()
       << ", |H|_F = " << h.matrix().norm() << ")";
    throw NumericalError(os.str());
  }
  const RealVector& w = es.eigenvalues();
  ComplexVector d(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) d(k) = std::polar(1.0, -w(k) * t);
  return UnitaryMatrix(from_spectrum(es.eigenvectors(), d));
}

std::vector<Complex> poly_from_roots(const std::vector<Complex>& roots) {
  std::vector<Complex> c{Complex(1.0)};
  for (const Complex& r : roots) {
    std::vector<Complex> next(c.size() + 1, Complex(0.0));
    for (std::size_t j = 0; j < c.size(); ++j) {
      next[j + 1] += c[j];
      next[j] -= r * c[j];
    }
    c = std::move(next);
  }
  return c;
}

CharPoly char_poly(const UnitaryMatrix& u) {
  const UnitaryEigen eig = unitary_eigen(u);
  std::vector<Complex> roots;
  roots.reserve(eig.phases.size());
  for (Eigen::Index k = 0; k < eig.phases.size(); ++k) roots.push_back(std::polar(1.0, eig.phases(k)));
  CharPoly p{poly_from_roots(roots)};
  p.coefficients.back() = Complex(1.0);
  return p;
}

double root_distance(const UnitaryMatrix& u) {
  double s = 0.0;
  for (const Complex& a : char_poly(u).coefficients) s += std::norm(a);
  return s;
}

double phase_aligned_distance(const UnitaryMatrix& u, const UnitaryMatrix& v) {
  require_same_dim(u.dim(), v.dim(), "phase_aligned_distance");
  // Equals sqrt(2N - 2 |tr(U^dagger V)|), but evaluated as the norm of the
  // aligned difference: the closed form cancels catastrophically below ~1e-8.
  const Complex overlap = (v.matrix().adjoint() * u.matrix()).trace();
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0);
  return (u.matrix() - phase * v.matrix()).norm();
}

HermitianMatrix unitary_log(const UnitaryMatrix& u) {
  const UnitaryEigen eig = unitary_eigen(u);
  for (Eigen::Index k = 0; k < eig.phases.size(); ++k) {
    if (kPi - std::abs(eig.phases(k)) < kBranchCutTol) throw BranchCutWarning(eig.phases(k));
  }
  const ComplexVector g = (-eig.phases).cast<Complex>();
  return HermitianMatrix(from_spectrum(eig.vectors, g), 1e-10);
}

HermitianMatrix phase_centered_log(const UnitaryMatrix& u) {
  const UnitaryEigen eig = unitary_eigen(u);
  const auto n = eig.phases.size();
  std::vector<double> sorted(eig.phases.data(), eig.phases.data() + n);
  std::sort(sorted.begin(), sorted.end());

  // Widest cyclic gap; its midpoint is rotated onto the cut.
  double best_gap = sorted.front() + 2.0 * kPi - sorted.back();
  double best_mid = sorted.back() + 0.5 * best_gap;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double gap = sorted[k + 1] - sorted[k];
    if (gap > best_gap) {
      best_gap = gap;
      best_mid = sorted[k] + 0.5 * gap;
    }
  }
  const double shift = best_mid - kPi;

  RealVector g(n);
  for (Eigen::Index k = 0; k < n; ++k) g(k) = -wrap_phase(eig.phases(k) - shift);
  g.array() -= g.mean();
  return HermitianMatrix(from_spectrum(eig.vectors, g.cast<Complex>()), 1e-10);
}

UnitaryMatrix fractional_power(const UnitaryMatrix& u, int n) {
  if (n < 1) throw std::invalid_argument("fractional_power: n must be >= 1");
  if (n == 1) return u;
  return expm_hermitian_generator(unitary_log(u), 1.0 / n);
}

ComplexMatrix expm_general(const ComplexMatrix& a) {
  ComplexMatrix out = a.exp();
  if (!out.allFinite()) {
    std::ostringstream os;
    os << "matrix exponential overflowed (|A|_F = " << a.norm() << ")";
    throw NumericalError(os.str());
  }
  return out;
}

ComplexMatrix expm_frechet(const HermitianMatrix& h, const HermitianMatrix& e, double t) {
  require_same_dim(h.dim(), e.dim(), "expm_frechet");
  const auto n = h.dim();
  const Complex mi(0.0, -t);
  ComplexMatrix block = ComplexMatrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = mi * h.matrix();
  block.bottomRightCorner(n, n) = mi * h.matrix();
  block.topRightCorner(n, n) = mi * e.matrix();
  return expm_general(block).topRightCorner(n, n);
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a.rows(), b.rows(), "commutator");
  require_same_dim(a.cols(), b.cols(), "commutator");
  return a * b - b * a;
}

}  // namespace holonom
