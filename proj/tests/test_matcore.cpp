#include <gtest/gtest.h>

#include <numbers>

#include "holonom/matcore.hpp"
#include "holonom/randmat.hpp"
#include "oracles.hpp"

namespace holonom {
namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

UnitaryMatrix diag_unitary(std::initializer_list<double> phases) {
  ComplexVector d(static_cast<Eigen::Index>(phases.size()));
  Eigen::Index k = 0;
  for (double p : phases) d(k++) = std::polar(1.0, p);
  return UnitaryMatrix(d.asDiagonal().toDenseMatrix());
}

TEST(HermitianMatrix, RejectsNonHermitian) {
  ComplexMatrix a(2, 2);
  a << 1, 2, 3, 4;
  EXPECT_THROW(HermitianMatrix{a}, NotHermitian);
  EXPECT_THROW(HermitianMatrix{ComplexMatrix(2, 3)}, DimensionMismatch);
}

TEST(HermitianMatrix, SymmetrizesWithinTolerance) {
  ComplexMatrix a = oracle::sigma_x();
  a(0, 1) += 1e-13;
  const HermitianMatrix h(a);
  EXPECT_EQ(h.matrix(), h.matrix().adjoint());
}

TEST(UnitaryMatrix, RejectsNonUnitary) {
  EXPECT_THROW(UnitaryMatrix{ComplexMatrix::Identity(2, 2) * 1.001}, NotUnitary);
}

TEST(ExpmHermitianGenerator, ZeroGeneratorGivesIdentity) {
  const UnitaryMatrix u = expm_hermitian_generator(HermitianMatrix::zero(3), 1.0);
  EXPECT_LT((u.matrix() - ComplexMatrix::Identity(3, 3)).norm(), 1e-15);
}

TEST(ExpmHermitianGenerator, PauliZQuarterTurn) {
  const UnitaryMatrix u = expm_hermitian_generator(HermitianMatrix(oracle::sigma_z()), kPi / 2);
  ComplexMatrix expected(2, 2);
  expected << -kI, 0, 0, kI;
  EXPECT_LT((u.matrix() - expected).norm(), 1e-15);
}

TEST(ExpmHermitianGenerator, MatchesTaylorSeries) {
  const HermitianMatrix h = sample_gue(4, 1.0, 1234);
  const UnitaryMatrix u = expm_hermitian_generator(h, 0.3);
  EXPECT_LT(oracle::rel_err(u.matrix(), oracle::series_evolution(h.matrix(), 0.3)), 1e-12);
}

TEST(ExpmHermitianGenerator, SemigroupProperty) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const HermitianMatrix h = sample_gue(5, 2.0, derive_seed(5, s));
    const ComplexMatrix lhs =
        expm_hermitian_generator(h, 0.7).matrix() * expm_hermitian_generator(h, -1.9).matrix();
    EXPECT_LT((lhs - expm_hermitian_generator(h, -1.2).matrix()).norm(), 1e-10);
  }
}

TEST(CharPoly, IdentityIsBinomial) {
  const CharPoly p = char_poly(UnitaryMatrix::identity(2));
  ASSERT_EQ(p.coefficients.size(), 3u);
  EXPECT_LT(std::abs(p.coefficients[0] - 1.0), 1e-15);
  EXPECT_LT(std::abs(p.coefficients[1] + 2.0), 1e-15);
  EXPECT_EQ(p.coefficients[2], Complex(1.0));
}

TEST(CharPoly, DiagonalPlusMinusOne) {
  const CharPoly p = char_poly(diag_unitary({0.0, kPi}));
  EXPECT_LT(std::abs(p.coefficients[0] + 1.0), 1e-15);
  EXPECT_LT(std::abs(p.coefficients[1]), 1e-15);
  EXPECT_EQ(p.coefficients[2], Complex(1.0));
}

TEST(CharPoly, HaarMatchesConvolutionOracle) {
  const UnitaryMatrix u = sample_haar_unitary(4, 77);
  const CharPoly p = char_poly(u);
  const std::vector<Complex> ref = oracle::char_poly_by_convolution(u.matrix());
  ASSERT_EQ(p.coefficients.size(), ref.size());
  for (std::size_t j = 0; j < ref.size(); ++j) EXPECT_LT(std::abs(p.coefficients[j] - ref[j]), 1e-12);
  EXPECT_NEAR(std::abs(p.coefficients[0]), 1.0, 1e-10);
  EXPECT_EQ(p.coefficients.back(), Complex(1.0));
}

TEST(RootDistance, CubeRootsOfUnity) {
  EXPECT_NEAR(root_distance(diag_unitary({0.0, 2 * kPi / 3, 4 * kPi / 3})), 2.0, 1e-14);
}

TEST(RootDistance, IdentityIsCentralBinomial) {
  EXPECT_NEAR(root_distance(UnitaryMatrix::identity(2)), 6.0, 1e-14);
  EXPECT_NEAR(root_distance(UnitaryMatrix::identity(4)), 70.0, 1e-12);
}

TEST(RootDistance, BoundHoldsOnHaarSamples) {
  Rng rng(2024);
  double min_fn = 1e300;
  double mean = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double fn = root_distance(sample_haar_unitary(4, rng));
    min_fn = std::min(min_fn, fn);
    mean += fn / 1000.0;
  }
  EXPECT_GE(min_fn, 2.0 - 1e-12);
  // Each coefficient is the trace of an irreducible exterior power, so
  // E|a_j|^2 = 1 under Haar and E F_N = N + 1 (identity sits at 70).
  EXPECT_NEAR(mean, 5.0, 0.5);
}

TEST(RootDistance, ConjugatedRootsAttainMinimum) {
  for (int n : {2, 3, 4, 6}) {
    ComplexVector d(n);
    for (int k = 0; k < n; ++k) d(k) = std::polar(1.0, 2 * kPi * k / n + 0.37);
    for (std::uint64_t s = 0; s < 5; ++s) {
      const ComplexMatrix m = sample_haar_unitary(n, derive_seed(n, s)).matrix();
      const UnitaryMatrix u(m.adjoint() * d.asDiagonal() * m);
      EXPECT_NEAR(root_distance(u), 2.0, 1e-10);
    }
  }
}

TEST(PhaseAlignedDistance, BasicCases) {
  const UnitaryMatrix u = sample_haar_unitary(3, 8);
  EXPECT_LT(phase_aligned_distance(u, u), 1e-14);
  const UnitaryMatrix v(u.matrix() * std::polar(1.0, 2.1));
  EXPECT_LT(phase_aligned_distance(u, v), 1e-12);
  EXPECT_NEAR(phase_aligned_distance(UnitaryMatrix::identity(2), diag_unitary({0.0, kPi})), 2.0,
              1e-14);
  EXPECT_THROW(phase_aligned_distance(u, UnitaryMatrix::identity(2)), DimensionMismatch);
}

TEST(PhaseAlignedDistance, MatchesClosedForm) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const UnitaryMatrix u = sample_haar_unitary(4, derive_seed(10, s));
    const UnitaryMatrix v = sample_haar_unitary(4, derive_seed(11, s));
    const double closed =
        std::sqrt(8.0 - 2.0 * std::abs((u.matrix().adjoint() * v.matrix()).trace()));
    EXPECT_NEAR(phase_aligned_distance(u, v), closed, 1e-12);
  }
}

TEST(PhaseAlignedDistance, ResolvesSmallDistances) {
  const UnitaryMatrix u = sample_haar_unitary(4, 3);
  const HermitianMatrix g = sample_gue(4, 1.0, 4);
  const UnitaryMatrix v = u * expm_hermitian_generator(g, 1e-10);
  const double d = phase_aligned_distance(u, v);
  EXPECT_GT(d, 1e-12);
  EXPECT_LT(d, 1e-9);
}

TEST(PhaseAlignedDistance, IsPseudometric) {
  Rng rng(99);
  for (int k = 0; k < 200; ++k) {
    const UnitaryMatrix a = sample_haar_unitary(3, rng);
    const UnitaryMatrix b = sample_haar_unitary(3, rng);
    const UnitaryMatrix c = sample_haar_unitary(3, rng);
    const double ab = phase_aligned_distance(a, b);
    EXPECT_NEAR(ab, phase_aligned_distance(b, a), 1e-12);
    EXPECT_LE(phase_aligned_distance(a, c), ab + phase_aligned_distance(b, c) + 1e-9);
  }
}

TEST(UnitaryLog, IdentityAndDiagonal) {
  EXPECT_LT(unitary_log(UnitaryMatrix::identity(3)).matrix().norm(), 1e-15);
  const HermitianMatrix g = unitary_log(diag_unitary({-0.3, 0.4}));
  ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
  expected(0, 0) = 0.3;
  expected(1, 1) = -0.4;
  EXPECT_LT((g.matrix() - expected).norm(), 1e-14);
}

TEST(UnitaryLog, RoundTripsGueGenerator) {
  HermitianMatrix g0 = sample_gue(4, 1.0, 31);
  g0 = g0 * (2.5 / g0.spectral_norm());
  const HermitianMatrix g = unitary_log(expm_hermitian_generator(g0, 1.0));
  EXPECT_LT((g.matrix() - g0.matrix()).norm(), 1e-10);
  EXPECT_LT((expm_hermitian_generator(g, 1.0).matrix() - expm_hermitian_generator(g0, 1.0).matrix()).norm(),
            1e-10);
}

TEST(UnitaryLog, ReportsBranchCut) {
  try {
    unitary_log(diag_unitary({kPi, 0.2}));
    FAIL() << "expected BranchCutWarning";
  } catch (const BranchCutWarning& w) {
    EXPECT_NEAR(std::abs(w.phase()), kPi, 1e-12);
  }
}

TEST(PhaseCenteredLog, AvoidsCutAndIsTraceless) {
  const UnitaryMatrix u = diag_unitary({kPi, 0.2, -1.0});
  const HermitianMatrix g = phase_centered_log(u);
  EXPECT_LT(std::abs(g.matrix().trace()), 1e-13);
  EXPECT_LT(phase_aligned_distance(expm_hermitian_generator(g, 1.0), u), 1e-13);
  EXPECT_LT(phase_centered_log(UnitaryMatrix(ComplexMatrix::Identity(3, 3) * std::polar(1.0, 2.0)))
                .matrix()
                .norm(),
            1e-14);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const UnitaryMatrix h = sample_haar_unitary(5, derive_seed(40, s));
    const HermitianMatrix gh = phase_centered_log(h);
    EXPECT_LT(phase_aligned_distance(expm_hermitian_generator(gh, 1.0), h), 1e-12);
    EXPECT_LT(gh.spectral_norm(), kPi);
  }
}

TEST(FractionalPower, Basics) {
  const UnitaryMatrix u = sample_haar_unitary(3, 5);
  EXPECT_EQ(fractional_power(u, 1).matrix(), u.matrix());
  const UnitaryMatrix r = fractional_power(diag_unitary({kPi / 2, -kPi / 2}), 2);
  EXPECT_LT((r.matrix() - diag_unitary({kPi / 4, -kPi / 4}).matrix()).norm(), 1e-14);
  EXPECT_THROW(fractional_power(u, 0), std::invalid_argument);
}

TEST(FractionalPower, RepeatedMultiplicationRecoversHaar) {
  const UnitaryMatrix u = sample_haar_unitary(4, 2718);
  const UnitaryMatrix r = fractional_power(u, 8);
  ComplexMatrix acc = ComplexMatrix::Identity(4, 4);
  for (int k = 0; k < 8; ++k) acc = acc * r.matrix();
  EXPECT_LT(phase_aligned_distance(UnitaryMatrix(acc), u), 1e-9);
}

TEST(FractionalPower, PropertyOverRandomUnitaries) {
  Rng rng(17);
  int tested = 0;
  for (int k = 0; k < 100; ++k) {
    const UnitaryMatrix u = sample_haar_unitary(4, rng);
    const UnitaryEigen eig = unitary_eigen(u);
    if (kPi - eig.phases.cwiseAbs().maxCoeff() < 1e-3) continue;
    const int n = 2 + k % 7;
    EXPECT_LT(phase_aligned_distance(fractional_power(u, n).pow(n), u), 1e-9);
    ++tested;
  }
  EXPECT_GT(tested, 90);
}

TEST(ExpmFrechet, ZeroDirection) {
  const HermitianMatrix h = sample_gue(3, 1.0, 1);
  EXPECT_LT(expm_frechet(h, HermitianMatrix::zero(3), 0.7).norm(), 1e-14);
}

TEST(ExpmFrechet, ZeroGeneratorIsLinear) {
  const HermitianMatrix e = sample_gue(3, 1.0, 2);
  const ComplexMatrix d = expm_frechet(HermitianMatrix::zero(3), e, 0.4);
  EXPECT_LT((d - Complex(0.0, -0.4) * e.matrix()).norm(), 1e-14);
}

TEST(ExpmFrechet, MatchesCentralDifferences) {
  for (int n : {2, 4, 6, 8}) {
    for (std::uint64_t s = 0; s < 3; ++s) {
      const HermitianMatrix h = sample_gue(n, 1.5, derive_seed(100 + n, s));
      const HermitianMatrix e = sample_gue(n, 1.0, derive_seed(200 + n, s));
      const double t = n == 4 && s == 0 ? 0.2 : 0.9;
      const ComplexMatrix fd = oracle::central_difference(
          [&](double x) { return oracle::series_evolution((h + e * x).matrix(), t); }, 0.0, 1e-5);
      EXPECT_LT(oracle::rel_err(expm_frechet(h, e, t), fd), 1e-6) << "n=" << n << " s=" << s;
    }
  }
}

TEST(Commutator, Identities) {
  const ComplexMatrix a = sample_haar_unitary(4, 1).matrix();
  const ComplexMatrix b = sample_gue(4, 1.0, 2).matrix();
  EXPECT_LT(commutator(a, a).norm(), 1e-14);
  EXPECT_LT((commutator(a, b) + commutator(b, a)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((commutator(oracle::sigma_z(), oracle::sigma_x()) - 2.0 * kI * oracle::sigma_y()).norm(),
            1e-15);
  EXPECT_THROW(commutator(a, oracle::sigma_x()), DimensionMismatch);
}

}  // namespace
}  // namespace holonom
