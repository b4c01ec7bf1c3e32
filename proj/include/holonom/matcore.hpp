#pragma once

// Dense complex matrix algebra on U(N) and its Lie algebra.
//
// Conventions: hbar = 1, generators are Hermitian and evolutions are
// exp(-i H t). Unitaries are compared modulo a global phase.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "holonom/errors.hpp"

namespace holonom {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;

class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  // Checks |A - A^dagger|_max <= tol, then stores (A + A^dagger) / 2.
  explicit HermitianMatrix(const ComplexMatrix& a, double tol = kHermitianTol);

  static HermitianMatrix zero(Eigen::Index n);
  static HermitianMatrix identity(Eigen::Index n);
  static HermitianMatrix diagonal(const RealVector& d);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  double spectral_norm() const;

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator*(double s) const;

 private:
  struct Trusted {};
  HermitianMatrix(ComplexMatrix m, Trusted) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

class UnitaryMatrix {
 public:
  UnitaryMatrix() = default;
  // Checks |U^dagger U - I|_F <= tol.
  explicit UnitaryMatrix(const ComplexMatrix& u, double tol = kUnitaryTol);

  static UnitaryMatrix identity(Eigen::Index n);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

  UnitaryMatrix adjoint() const;
  UnitaryMatrix operator*(const UnitaryMatrix& o) const;
  UnitaryMatrix pow(int n) const;

 private:
  ComplexMatrix m_;
};

// Monic characteristic polynomial, coefficients by ascending power.
struct CharPoly {
  std::vector<Complex> coefficients;
};

// Eigen-decomposition of a unitary: U = Q diag(exp(i phases)) Q^dagger, Q unitary.
struct UnitaryEigen {
  ComplexMatrix vectors;
  RealVector phases;  // principal branch (-pi, pi]
};

UnitaryEigen unitary_eigen(const UnitaryMatrix& u);

// exp(-i H t) by spectral decomposition.
UnitaryMatrix expm_hermitian_generator(const HermitianMatrix& h, double t);

CharPoly char_poly(const UnitaryMatrix& u);

// Expands prod_k (lambda - roots_k) into ascending-power coefficients.
std::vector<Complex> poly_from_roots(const std::vector<Complex>& roots);

// F_N(U) = sum_j |a_j|^2. Never below 2; equals 2 exactly on Nth roots of identity.
double root_distance(const UnitaryMatrix& u);

// min over phi of |U - e^{i phi} V|_F.
double phase_aligned_distance(const UnitaryMatrix& u, const UnitaryMatrix& v);

// Hermitian G with U = exp(-i G), eigenphases in (-pi, pi].
// Throws BranchCutWarning for an eigenphase within 1e-8 of pi.
HermitianMatrix unitary_log(const UnitaryMatrix& u);

// Traceless Hermitian G with U = e^{i phi} exp(-i G) for some phi. The global
// phase is chosen so the widest gap of the spectrum sits on the branch cut,
// which gives the shortest generator and never hits the cut.
HermitianMatrix phase_centered_log(const UnitaryMatrix& u);

// exp(-i unitary_log(U) / n).
UnitaryMatrix fractional_power(const UnitaryMatrix& u, int n);

// d/ds exp(-i (H + s E) t) at s = 0, via the 2N x 2N block exponential.
ComplexMatrix expm_frechet(const HermitianMatrix& h, const HermitianMatrix& e, double t);

// General matrix exponential (scaling and squaring with Pade approximant).
ComplexMatrix expm_general(const ComplexMatrix& a);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace holonom
