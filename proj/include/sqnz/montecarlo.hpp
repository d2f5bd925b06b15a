// Copyright (c) 2026 The sqnz authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Stochastic path: Gaussian force realizations with the band's squeezed
// two-point function, the causal velocity response, and seeded ensembles.

#include "sqnz/kernels.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

namespace sqnz {

/// Minimum number of band modes accepted by the synthesizer.
inline constexpr int kMinModes = 64;

/// Equispaced band frequencies with trapezoid weights folded into the
/// amplitudes: weight_j = sqrt(A w_j^3 h_j).
struct ModeSet {
  std::vector<double> omega;
  std::vector<double> weight;
};

ModeSet band_modes(const BandConfig& band, int n_modes);

/// Largest time step that still resolves the top of the band.
double nyquist_dt(const BandConfig& band);

struct NoiseRealization {
  double dt = 0.0;
  std::vector<double> samples; ///< xi(k dt), k = 0..N-1
  std::uint64_t seed = 0;
  int n_modes = 0;
};

/// Number of grid points for a run: round(duration / dt) + 1.
std::size_t grid_length(double duration, double dt);

/// Seed of sample i under a master seed (SplitMix64 of a counter).
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index);

/// One realization xi(t) = sum_j weight_j Re[i alpha_j e^{-i w_j t}],
/// alpha_j = mu b_j - nu b_j^*. Throws ConfigError for n_modes < kMinModes or a
/// time step at or above nyquist_dt.
NoiseRealization synthesize_noise(const BandConfig& band, double duration, double dt,
                                  int n_modes, std::uint64_t seed);

/// Sum of independent band realizations. Band 0 draws from seed, band b > 0
/// from substream_seed(seed, b), so a single band matches the overload above.
NoiseRealization synthesize_noise(std::span<const BandConfig> bands, double duration,
                                  double dt, int n_modes, std::uint64_t seed);

/// Same draws with alpha_j = mu b_j + nu b_j^*, which flips the sign of the
/// nonstationary correlation and leaves the stationary one unchanged.
NoiseRealization synthesize_noise_mirror(std::span<const BandConfig> bands, double duration,
                                         double dt, int n_modes, std::uint64_t seed);

/// Causal trapezoid convolution v_k = (e/m) dt sum'_{l<=k} Kdot((k-l) dt) xi_l,
/// evaluated through zero-padded real FFTs. Plans are built once per instance;
/// apply() may be called concurrently with distinct output buffers.
class VelocityConvolver {
public:
  VelocityConvolver(std::size_t n, double dt, const OscillatorConfig& osc);
  ~VelocityConvolver();
  VelocityConvolver(const VelocityConvolver&) = delete;
  VelocityConvolver& operator=(const VelocityConvolver&) = delete;

  std::size_t size() const { return n_; }
  void apply(std::span<const double> xi, std::span<double> v) const;

private:
  struct Plans;
  std::size_t n_;
  double scale_;
  double kdot0_;
  std::vector<double> kdot_;
  std::unique_ptr<Plans> plans_;
};

std::vector<double> simulate_velocity(const NoiseRealization& noise,
                                      const OscillatorConfig& osc);

struct EnsembleConfig {
  double duration = 0.0;
  double dt = 0.0;
  int n_modes = 128;
  int n_samples = 10000;
  std::uint64_t seed = 0;
  /// Requested output times, snapped to the nearest grid point. Empty means
  /// output_points equispaced grid points ending at duration.
  std::vector<double> output_times;
  int output_points = 100;
  /// Also run the mirrored draws so st and ns can be separated.
  bool split = false;
  int threads = 1;
};

/// Minimum ensemble size accepted by ensemble_dispersion.
inline constexpr int kMinSamples = 100;

struct EnsembleResult {
  std::vector<double> times;
  std::vector<double> mean_v2; ///< raw <v^2>
  std::vector<double> stderr_v2;
  std::vector<double> vac;     ///< expected vacuum <v^2> of the same discretization
  std::size_t n_samples = 0;
  /// Filled when EnsembleConfig::split is set.
  std::vector<double> st, st_stderr, ns, ns_stderr;

  std::size_t size() const { return times.size(); }
  double delta(std::size_t i) const { return mean_v2[i] - vac[i]; }
};

/// Mean and standard error of v^2 over independent realizations; sample i
/// draws from substream_seed(seed, i). Bit-identical for any thread count.
EnsembleResult ensemble_dispersion(std::span<const BandConfig> bands,
                                   const OscillatorConfig& osc, const EnsembleConfig& cfg);
EnsembleResult ensemble_dispersion(const BandConfig& band, const OscillatorConfig& osc,
                                   const EnsembleConfig& cfg);

/// Exact ensemble average of xi(t) xi(t2) for the discretized mode set,
/// vacuum included.
double discrete_noise_kernel(double t, double t2, const BandConfig& band, int n_modes);

/// Raw dump: 32-byte header ("SQNZ", u32 version, f64 dt, u64 length,
/// u64 seed) followed by little-endian f64 samples.
inline constexpr std::uint32_t kDumpVersion = 1;
void write_noise_dump(const std::filesystem::path& path, const NoiseRealization& noise);
NoiseRealization read_noise_dump(const std::filesystem::path& path);

} // namespace sqnz
