#include "holonom/randmat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace holonom {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

ComplexMatrix ginibre(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      a(i, j) = Complex(re, im);
    }
  }
  return a;
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  // splitmix64 finalizer over (master, stream)
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

HermitianMatrix sample_gue(Eigen::Index n, double scale, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_gue: dimension must be >= 1");
  const ComplexMatrix a = ginibre(n, rng);
  // E|H_ij|^2 = 1, semicircle radius 2 sqrt(n).
  const double norm = scale / (2.0 * std::sqrt(static_cast<double>(n)));
  return HermitianMatrix(0.5 * (a + a.adjoint()) * norm);
}

HermitianMatrix sample_gue(Eigen::Index n, double scale, std::uint64_t seed) {
  Rng rng(seed);
  return sample_gue(n, scale, rng);
}

UnitaryMatrix sample_haar_unitary(Eigen::Index n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_haar_unitary: dimension must be >= 1");
  const ComplexMatrix z = ginibre(n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    const double ad = std::abs(d);
    q.col(k) *= ad > 0.0 ? d / ad : Complex(1.0);
  }
  return UnitaryMatrix(q);
}

UnitaryMatrix sample_haar_unitary(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_haar_unitary(n, rng);
}

std::string to_string(SpectrumSource s) {
  switch (s) {
    case SpectrumSource::HaarUnitary: return "haar";
    case SpectrumSource::PulseProduct: return "product";
    case SpectrumSource::PoissonPhases: return "poisson";
  }
  return "unknown";
}

SpectrumSource spectrum_source_from_string(const std::string& s) {
  if (s == "haar") return SpectrumSource::HaarUnitary;
  if (s == "product") return SpectrumSource::PulseProduct;
  if (s == "poisson") return SpectrumSource::PoissonPhases;
  throw std::invalid_argument("unknown spectrum source '" + s + "'");
}

SpectralSample spectral_sample_from_phases(std::vector<double> phases, SpectrumSource source) {
  if (phases.empty()) throw std::invalid_argument("spectral sample needs at least one phase");
  std::sort(phases.begin(), phases.end());
  SpectralSample s;
  s.source = source;
  const std::size_t n = phases.size();
  s.spacings.resize(n);
  for (std::size_t k = 0; k + 1 < n; ++k) s.spacings[k] = phases[k + 1] - phases[k];
  s.spacings[n - 1] = phases.front() + kTwoPi - phases.back();
  s.eigenphases = std::move(phases);
  return s;
}

SpectralSample spectral_sample(const UnitaryMatrix& u, SpectrumSource source) {
  const UnitaryEigen eig = unitary_eigen(u);
  return spectral_sample_from_phases({eig.phases.data(), eig.phases.data() + eig.phases.size()},
                                     source);
}

SpectralSample sample_poisson_phases(Eigen::Index n, Rng& rng) {
  std::uniform_real_distribution<double> uni(-std::numbers::pi, std::numbers::pi);
  std::vector<double> phases(static_cast<std::size_t>(n));
  for (double& p : phases) p = uni(rng);
  return spectral_sample_from_phases(std::move(phases), SpectrumSource::PoissonPhases);
}

SpacingSummary spacing_statistics(const std::vector<SpectralSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("spacing_statistics: no samples");
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : samples) {
    for (double g : s.spacings) sum += g;
    count += s.spacings.size();
  }
  SpacingSummary out;
  out.mean_spacing = sum / static_cast<double>(count);
  double var = 0.0;
  std::size_t small = 0;
  for (const auto& s : samples) {
    for (double g : s.spacings) {
      var += (g - out.mean_spacing) * (g - out.mean_spacing);
      if (g < 0.1 * out.mean_spacing) ++small;
    }
  }
  out.spacing_variance = var / static_cast<double>(count);
  out.min_spacing_fraction = static_cast<double>(small) / static_cast<double>(count);
  return out;
}

}  // namespace holonom
