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

#include "sqnz/montecarlo.hpp"

#include "sqnz/errors.hpp"
#include "sqnz/parallel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>
#include <random>
#include <string>

using std::numbers::pi;

namespace sqnz {

namespace {

using cd = std::complex<double>;

constexpr std::size_t kResync = 256;
constexpr std::size_t kBlock = 32;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::size_t fft_length(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

void check_run(std::span<const BandConfig> bands, double duration, double dt, int n_modes) {
  if (bands.empty()) throw ConfigError("at least one band is required");
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw ConfigError("duration must be finite and > 0");
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  if (n_modes < kMinModes)
    throw ConfigError("n_modes must be >= " + std::to_string(kMinModes) + " (got " +
                      std::to_string(n_modes) + ")");
  for (const auto& b : bands)
    if (!(dt < nyquist_dt(b)))
      throw ConfigError("dt = " + std::to_string(dt) + " violates the band Nyquist limit " +
                        std::to_string(nyquist_dt(b)) + " = pi / (2 (Xi + Delta/2))");
}

// Adds the band's realization to xi (and the mirrored draw to mirror, if given).
void add_band(const BandConfig& band, std::size_t n, double dt, int n_modes,
              std::uint64_t seed, double* xi, double* mirror) {
  const ModeSet modes = band_modes(band, n_modes);
  const auto& sq = band.squeeze;
  const cd nu = sq.nu();
  const cd i(0.0, 1.0);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  for (std::size_t j = 0; j < modes.omega.size(); ++j) {
    const double re = normal(gen);
    const double im = normal(gen);
    const cd b(re, im);
    const cd c = i * modes.weight[j] * (sq.mu * b - nu * std::conj(b));
    const cd cm = i * modes.weight[j] * (sq.mu * b + nu * std::conj(b));
    const double w = modes.omega[j];
    const cd step = std::polar(1.0, -w * dt);
    cd phase = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      xi[k] += (c * phase).real();
      if (mirror) mirror[k] += (cm * phase).real();
      if ((k + 1) % kResync == 0)
        phase = std::polar(1.0, -w * dt * static_cast<double>(k + 1));
      else
        phase *= step;
    }
  }
}

std::uint64_t band_seed(std::uint64_t seed, std::size_t b) {
  return b == 0 ? seed : substream_seed(seed, b);
}

NoiseRealization synthesize(std::span<const BandConfig> bands, double duration, double dt,
                            int n_modes, std::uint64_t seed, bool mirrored) {
  check_run(bands, duration, dt, n_modes);
  NoiseRealization out;
  out.dt = dt;
  out.seed = seed;
  out.n_modes = n_modes;
  out.samples.assign(grid_length(duration, dt), 0.0);
  std::vector<double> scratch(mirrored ? out.samples.size() : 0);
  for (std::size_t b = 0; b < bands.size(); ++b) {
    if (mirrored)
      add_band(bands[b], out.samples.size(), dt, n_modes, band_seed(seed, b), scratch.data(),
               out.samples.data());
    else
      add_band(bands[b], out.samples.size(), dt, n_modes, band_seed(seed, b),
               out.samples.data(), nullptr);
  }
  return out;
}

struct Moments {
  double mean;
  double stderr_;
};

Moments moments(const double* x, std::size_t n) {
  const double mean = pairwise_sum(x, n) / static_cast<double>(n);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = (x[i] - mean) * (x[i] - mean);
  const double var = n > 1 ? pairwise_sum(d.data(), n) / static_cast<double>(n - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

std::vector<std::size_t> output_indices(const EnsembleConfig& cfg, std::size_t n) {
  std::vector<std::size_t> idx;
  if (cfg.output_times.empty()) {
    const std::size_t p = std::min<std::size_t>(
        static_cast<std::size_t>(std::max(1, cfg.output_points)), n - 1);
    for (std::size_t q = 1; q <= p; ++q) {
      const auto k = static_cast<std::size_t>(
          std::llround(static_cast<double>(q) * static_cast<double>(n - 1) / static_cast<double>(p)));
      if (idx.empty() || k > idx.back()) idx.push_back(k);
    }
    return idx;
  }
  for (double t : cfg.output_times) {
    if (!(t >= 0.0)) throw ConfigError("output times must be >= 0");
    const auto k = static_cast<std::size_t>(std::llround(t / cfg.dt));
    if (k >= n)
      throw ConfigError("output time " + std::to_string(t) + " beyond duration");
    if (!idx.empty() && k <= idx.back())
      throw ConfigError("output times must be strictly increasing on the dt grid");
    idx.push_back(k);
  }
  return idx;
}

// Expected vacuum <v^2> of the discrete mode set pushed through the discrete
// trapezoid convolution, at the given grid indices.
std::vector<double> discrete_vacuum(std::span<const BandConfig> bands,
                                    const OscillatorConfig& osc, double dt, int n_modes,
                                    const std::vector<std::size_t>& idx) {
  std::vector<double> vac(idx.size(), 0.0);
  if (idx.empty()) return vac;
  const std::size_t kmax = idx.back();
  std::vector<double> kd(kmax + 1);
  for (std::size_t m = 0; m <= kmax; ++m)
    kd[m] = response_kernel_dot(static_cast<double>(m) * dt, osc);
  const double pre = osc.coupling() * dt * dt;
  for (const auto& band : bands) {
    const ModeSet modes = band_modes(band, n_modes);
    for (std::size_t j = 0; j < modes.omega.size(); ++j) {
      const double w = modes.omega[j];
      const double w2 = modes.weight[j] * modes.weight[j];
      const cd step = std::polar(1.0, w * dt);
      cd phase = 1.0, sum = 0.0;
      std::size_t o = 0;
      for (std::size_t m = 0; m <= kmax && o < idx.size(); ++m) {
        sum += kd[m] * phase;
        if (m == idx[o]) {
          const cd d = sum - 0.5 * kd[0] - 0.5 * kd[m] * phase;
          vac[o] += pre * w2 * 0.5 * std::norm(d);
          ++o;
        }
        if ((m + 1) % kResync == 0)
          phase = std::polar(1.0, w * dt * static_cast<double>(m + 1));
        else
          phase *= step;
      }
    }
  }
  return vac;
}

} // namespace

ModeSet band_modes(const BandConfig& band, int n_modes) {
  if (n_modes < 2) throw ConfigError("n_modes must be >= 2");
  ModeSet m;
  const auto n = static_cast<std::size_t>(n_modes);
  const double h = band.Delta / static_cast<double>(n - 1);
  m.omega.resize(n);
  m.weight.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double w = band.lo() + h * static_cast<double>(j);
    const double hj = (j == 0 || j + 1 == n) ? 0.5 * h : h;
    m.omega[j] = w;
    m.weight[j] = std::sqrt(band.A * w * w * w * hj);
  }
  return m;
}

double nyquist_dt(const BandConfig& band) { return pi / (2.0 * band.hi()); }

std::size_t grid_length(double duration, double dt) {
  return static_cast<std::size_t>(std::llround(duration / dt)) + 1;
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

NoiseRealization synthesize_noise(const BandConfig& band, double duration, double dt,
                                  int n_modes, std::uint64_t seed) {
  return synthesize(std::span(&band, 1), duration, dt, n_modes, seed, false);
}

NoiseRealization synthesize_noise(std::span<const BandConfig> bands, double duration,
                                  double dt, int n_modes, std::uint64_t seed) {
  return synthesize(bands, duration, dt, n_modes, seed, false);
}

NoiseRealization synthesize_noise_mirror(std::span<const BandConfig> bands, double duration,
                                         double dt, int n_modes, std::uint64_t seed) {
  return synthesize(bands, duration, dt, n_modes, seed, true);
}

struct VelocityConvolver::Plans {
  std::size_t len = 0;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  fftw_complex* kernel = nullptr; // FFT of the zero-padded Kdot samples

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (kernel) fftw_free(kernel);
  }
};

namespace {

struct FftBuffers {
  double* real;
  fftw_complex* spec;
  explicit FftBuffers(std::size_t len)
      : real(static_cast<double*>(fftw_malloc(sizeof(double) * len))),
        spec(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (len / 2 + 1)))) {
    if (!real || !spec) throw std::bad_alloc();
  }
  ~FftBuffers() {
    fftw_free(real);
    fftw_free(spec);
  }
  FftBuffers(const FftBuffers&) = delete;
  FftBuffers& operator=(const FftBuffers&) = delete;
};

} // namespace

VelocityConvolver::VelocityConvolver(std::size_t n, double dt, const OscillatorConfig& osc)
    : n_(n), scale_(std::sqrt(osc.charge2) / osc.mass * dt), kdot_(n),
      plans_(std::make_unique<Plans>()) {
  if (n == 0) throw ConfigError("velocity grid must be nonempty");
  for (std::size_t k = 0; k < n; ++k)
    kdot_[k] = response_kernel_dot(static_cast<double>(k) * dt, osc);
  kdot0_ = kdot_[0];

  auto& p = *plans_;
  p.len = fft_length(2 * n - 1);
  FftBuffers buf(p.len);
  p.kernel = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (p.len / 2 + 1)));
  if (!p.kernel) throw std::bad_alloc();
  const int len = static_cast<int>(p.len);
  {
    std::lock_guard lock(planner_mutex());
    p.forward = fftw_plan_dft_r2c_1d(len, buf.real, buf.spec, FFTW_ESTIMATE);
    p.backward = fftw_plan_dft_c2r_1d(len, buf.spec, buf.real, FFTW_ESTIMATE);
  }
  std::fill(buf.real, buf.real + p.len, 0.0);
  std::copy(kdot_.begin(), kdot_.end(), buf.real);
  fftw_execute_dft_r2c(p.forward, buf.real, p.kernel);
}

VelocityConvolver::~VelocityConvolver() = default;

void VelocityConvolver::apply(std::span<const double> xi, std::span<double> v) const {
  if (xi.size() != n_ || v.size() != n_)
    throw ConfigError("velocity convolution: grid length mismatch");
  const auto& p = *plans_;
  FftBuffers buf(p.len);
  std::fill(buf.real, buf.real + p.len, 0.0);
  std::copy(xi.begin(), xi.end(), buf.real);
  fftw_execute_dft_r2c(p.forward, buf.real, buf.spec);
  for (std::size_t k = 0; k < p.len / 2 + 1; ++k) {
    const double ar = buf.spec[k][0], ai = buf.spec[k][1];
    const double br = p.kernel[k][0], bi = p.kernel[k][1];
    buf.spec[k][0] = ar * br - ai * bi;
    buf.spec[k][1] = ar * bi + ai * br;
  }
  fftw_execute_dft_c2r(p.backward, buf.spec, buf.real);
  const double inv = 1.0 / static_cast<double>(p.len);
  v[0] = 0.0;
  for (std::size_t k = 1; k < n_; ++k)
    v[k] = scale_ * (buf.real[k] * inv - 0.5 * (kdot_[k] * xi[0] + kdot0_ * xi[k]));
}

std::vector<double> simulate_velocity(const NoiseRealization& noise,
                                      const OscillatorConfig& osc) {
  const VelocityConvolver conv(noise.samples.size(), noise.dt, osc);
  std::vector<double> v(noise.samples.size());
  conv.apply(noise.samples, v);
  return v;
}

EnsembleResult ensemble_dispersion(std::span<const BandConfig> bands,
                                   const OscillatorConfig& osc, const EnsembleConfig& cfg) {
  check_run(bands, cfg.duration, cfg.dt, cfg.n_modes);
  if (cfg.n_samples < kMinSamples)
    throw ConfigError("n_samples must be >= " + std::to_string(kMinSamples));
  const std::size_t n = grid_length(cfg.duration, cfg.dt);
  const std::vector<std::size_t> idx = output_indices(cfg, n);
  const std::size_t n_out = idx.size();
  const auto ns = static_cast<std::size_t>(cfg.n_samples);

  const VelocityConvolver conv(n, cfg.dt, osc);
  std::vector<double> v2(n_out * ns), mv2(cfg.split ? n_out * ns : 0);

  const std::size_t blocks = (ns + kBlock - 1) / kBlock;
  parallel_for(blocks, resolve_threads(cfg.threads), [&](std::size_t blk) {
    std::vector<double> xi(n), xm(n), v(n);
    const std::size_t end = std::min(ns, (blk + 1) * kBlock);
    for (std::size_t s = blk * kBlock; s < end; ++s) {
      const std::uint64_t seed = substream_seed(cfg.seed, s);
      std::fill(xi.begin(), xi.end(), 0.0);
      std::fill(xm.begin(), xm.end(), 0.0);
      for (std::size_t b = 0; b < bands.size(); ++b)
        add_band(bands[b], n, cfg.dt, cfg.n_modes, band_seed(seed, b), xi.data(),
                 cfg.split ? xm.data() : nullptr);
      conv.apply(xi, v);
      for (std::size_t o = 0; o < n_out; ++o) v2[o * ns + s] = v[idx[o]] * v[idx[o]];
      if (cfg.split) {
        conv.apply(xm, v);
        for (std::size_t o = 0; o < n_out; ++o) mv2[o * ns + s] = v[idx[o]] * v[idx[o]];
      }
    }
  });

  EnsembleResult r;
  r.n_samples = ns;
  r.vac = discrete_vacuum(bands, osc, cfg.dt, cfg.n_modes, idx);
  r.times.resize(n_out);
  r.mean_v2.resize(n_out);
  r.stderr_v2.resize(n_out);
  if (cfg.split) {
    r.st.resize(n_out);
    r.st_stderr.resize(n_out);
    r.ns.resize(n_out);
    r.ns_stderr.resize(n_out);
  }
  std::vector<double> tmp(ns);
  for (std::size_t o = 0; o < n_out; ++o) {
    r.times[o] = static_cast<double>(idx[o]) * cfg.dt;
    const Moments m = moments(&v2[o * ns], ns);
    r.mean_v2[o] = m.mean;
    r.stderr_v2[o] = m.stderr_;
    if (cfg.split) {
      for (std::size_t s = 0; s < ns; ++s) tmp[s] = 0.5 * (v2[o * ns + s] + mv2[o * ns + s]);
      const Moments a = moments(tmp.data(), ns);
      for (std::size_t s = 0; s < ns; ++s) tmp[s] = 0.5 * (v2[o * ns + s] - mv2[o * ns + s]);
      const Moments d = moments(tmp.data(), ns);
      r.st[o] = a.mean - r.vac[o];
      r.st_stderr[o] = a.stderr_;
      r.ns[o] = d.mean;
      r.ns_stderr[o] = d.stderr_;
    }
  }
  return r;
}

EnsembleResult ensemble_dispersion(const BandConfig& band, const OscillatorConfig& osc,
                                   const EnsembleConfig& cfg) {
  return ensemble_dispersion(std::span(&band, 1), osc, cfg);
}

double discrete_noise_kernel(double t, double t2, const BandConfig& band, int n_modes) {
  const ModeSet m = band_modes(band, n_modes);
  const auto& sq = band.squeeze;
  double s = 0.0;
  for (std::size_t j = 0; j < m.omega.size(); ++j) {
    const double w = m.omega[j];
    s += m.weight[j] * m.weight[j] *
         ((0.5 + sq.nbar) * std::cos(w * (t - t2)) +
          sq.mu * sq.eta * std::cos(w * (t + t2) - sq.theta));
  }
  return s;
}

namespace {

template <class T>
void put_le(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw ConfigError("noise dump truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

} // namespace

void write_noise_dump(const std::filesystem::path& path, const NoiseRealization& noise) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  os.write("SQNZ", 4);
  put_le<std::uint32_t>(os, kDumpVersion);
  put_le<double>(os, noise.dt);
  put_le<std::uint64_t>(os, noise.samples.size());
  put_le<std::uint64_t>(os, noise.seed);
  for (double x : noise.samples) put_le<double>(os, x);
  if (!os) throw ConfigError("write failed for " + path.string());
}

NoiseRealization read_noise_dump(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "SQNZ", 4) != 0)
    throw ConfigError(path.string() + ": not a noise dump (bad magic)");
  const auto version = get_le<std::uint32_t>(is);
  if (version != kDumpVersion)
    throw ConfigError(path.string() + ": unsupported dump version " + std::to_string(version));
  NoiseRealization n;
  n.dt = get_le<double>(is);
  const auto len = get_le<std::uint64_t>(is);
  n.seed = get_le<std::uint64_t>(is);
  n.samples.resize(len);
  for (auto& x : n.samples) x = get_le<double>(is);
  return n;
}

} // namespace sqnz
