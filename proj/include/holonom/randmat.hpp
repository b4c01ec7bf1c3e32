#pragma once

// Random-matrix ensembles and eigenphase spacing statistics.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "holonom/matcore.hpp"

namespace holonom {

using Rng = std::mt19937_64;

// Counter-based fan-out of a master seed: stream k is independent of how
// many other streams were drawn before it.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// GUE draw scaled so the spectral radius is close to `scale`.
HermitianMatrix sample_gue(Eigen::Index n, double scale, std::uint64_t seed);
HermitianMatrix sample_gue(Eigen::Index n, double scale, Rng& rng);

// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
UnitaryMatrix sample_haar_unitary(Eigen::Index n, std::uint64_t seed);
UnitaryMatrix sample_haar_unitary(Eigen::Index n, Rng& rng);

enum class SpectrumSource { HaarUnitary, PulseProduct, PoissonPhases };

std::string to_string(SpectrumSource s);
SpectrumSource spectrum_source_from_string(const std::string& s);

struct SpectralSample {
  std::vector<double> eigenphases;  // sorted, in (-pi, pi]
  std::vector<double> spacings;     // cyclic nearest-neighbour gaps, sum to 2 pi
  SpectrumSource source = SpectrumSource::HaarUnitary;
};

SpectralSample spectral_sample(const UnitaryMatrix& u, SpectrumSource source);
SpectralSample spectral_sample_from_phases(std::vector<double> phases, SpectrumSource source);

// N i.i.d. uniform phases, the uncorrelated reference spectrum.
SpectralSample sample_poisson_phases(Eigen::Index n, Rng& rng);

struct SpacingSummary {
  double mean_spacing = 0.0;
  double spacing_variance = 0.0;
  double min_spacing_fraction = 0.0;  // fraction of gaps below 0.1 * mean
};

SpacingSummary spacing_statistics(const std::vector<SpectralSample>& samples);

}  // namespace holonom
