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

#include "sqnz/dispersion.hpp"
#include "sqnz/errors.hpp"
#include "sqnz/montecarlo.hpp"

#include "doctest.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

using namespace sqnz;
using std::numbers::pi;

namespace {

BandConfig band(double xi, double delta, double r, double theta, double A = 1.0) {
  return make_band(xi, delta, A, squeeze_derive(r, theta));
}

struct Stat {
  double mean;
  double err;
};

template <class F>
Stat sample_stat(int n, F value) {
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = value(i);
    s += x;
    s2 += x * x;
  }
  const double m = s / n;
  const double var = (s2 - n * m * m) / (n - 1);
  return {m, std::sqrt(var / n)};
}

// Continuum two-point function of the synthesized force, vacuum included.
double continuum_kernel(double t, double t2, const BandConfig& b) {
  const auto k = noise_kernel(t, t2, b);
  return k.stationary + k.nonstationary + vacuum_noise_kernel(t, t2, b);
}

constexpr int kRealizations = 10000;

std::vector<std::vector<double>> realizations(const BandConfig& b, double duration, double dt,
                                              int n_modes, std::uint64_t seed, int count) {
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out.push_back(
        synthesize_noise(b, duration, dt, n_modes, substream_seed(seed, static_cast<std::uint64_t>(i)))
            .samples);
  return out;
}

} // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("grid length, Nyquist and mode checks") {
  const auto b = band(1.0, 0.1, 0.5, 0.0);
  const double dt = 0.5 * nyquist_dt(b);
  CHECK(nyquist_dt(b) == doctest::Approx(pi / (2.0 * 1.05)));
  const auto n = synthesize_noise(b, 10.0, 0.1, 64, 1);
  CHECK(n.samples.size() == grid_length(10.0, 0.1));
  CHECK(n.samples.size() == 101);
  CHECK(n.dt == 0.1);
  CHECK(n.seed == 1);
  CHECK(n.n_modes == 64);
  CHECK_THROWS_AS(synthesize_noise(b, 10.0, nyquist_dt(b), 64, 1), ConfigError);
  CHECK_THROWS_AS(synthesize_noise(b, 10.0, dt, 63, 1), ConfigError);
  CHECK_THROWS_AS(synthesize_noise(b, -1.0, dt, 64, 1), ConfigError);
}

TEST_CASE("same seed reproduces samples bit-exactly") {
  const auto b = band(1.0, 0.1, 0.8, 0.4);
  const auto a = synthesize_noise(b, 50.0, 0.2, 128, 42);
  const auto c = synthesize_noise(b, 50.0, 0.2, 128, 42);
  const auto d = synthesize_noise(b, 50.0, 0.2, 128, 43);
  CHECK(a.samples == c.samples);
  CHECK(a.samples != d.samples);
  CHECK(substream_seed(7, 0) != substream_seed(7, 1));
  CHECK(substream_seed(7, 0) != substream_seed(8, 0));
}

TEST_CASE("discrete kernel converges to the continuum kernel in n_modes") {
  const auto b = band(1.0, 0.2, 0.7, 0.9);
  const double pairs[][2] = {{3.0, 1.0}, {10.0, 4.0}, {0.0, 0.0}, {7.5, 7.5}};
  double prev = 0.0;
  for (int n : {64, 128, 256, 512}) {
    double err = 0.0;
    for (const auto& p : pairs)
      err = std::max(err, std::abs(discrete_noise_kernel(p[0], p[1], b, n) -
                                   continuum_kernel(p[0], p[1], b)));
    if (prev > 0.0 && prev > 1e-13) CHECK(err <= 0.5 * prev);
    prev = err;
  }
}

TEST_CASE("zero mean and two-point function at 10 random pairs") {
  const auto b = band(1.0, 0.2, 0.7, 0.9);
  const double dt = 0.25;
  const auto xs = realizations(b, 40.0, dt, 128, 2026, kRealizations);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, xs.front().size() - 1);
  for (int k = 0; k < 10; ++k) {
    const std::size_t i = pick(rng), j = pick(rng);
    const double t = i * dt, t2 = j * dt;
    const auto m = sample_stat(kRealizations, [&](int s) { return xs[s][i]; });
    CHECK(std::abs(m.mean) <= 3.0 * m.err);
    const auto c = sample_stat(kRealizations, [&](int s) { return xs[s][i] * xs[s][j]; });
    INFO("t = " << t << ", t' = " << t2);
    CHECK(std::abs(c.mean - continuum_kernel(t, t2, b)) <= 3.0 * c.err);
    CHECK(std::abs(c.mean - discrete_noise_kernel(t, t2, b, 128)) <= 3.0 * c.err);
  }
}

TEST_CASE("r = 0 reproduces the vacuum band kernel") {
  const auto b = band(2.0, 0.3, 0.0, 0.0);
  const double dt = 0.1;
  const auto xs = realizations(b, 20.0, dt, 64, 17, kRealizations);
  for (std::size_t i : {0u, 37u, 120u})
    for (std::size_t j : {0u, 80u, 199u}) {
      const auto c = sample_stat(kRealizations, [&](int s) { return xs[s][i] * xs[s][j]; });
      CHECK(std::abs(c.mean - vacuum_noise_kernel(i * dt, j * dt, b)) <= 3.0 * c.err);
    }
}

TEST_CASE("fourth moment is Gaussian") {
  const auto b = band(1.0, 0.2, 1.0, 0.3);
  const auto xs = realizations(b, 10.0, 0.25, 128, 99, kRealizations);
  for (std::size_t i : {0u, 20u, 40u}) {
    const auto m2 = sample_stat(kRealizations, [&](int s) { return xs[s][i] * xs[s][i]; });
    const auto m4 = sample_stat(kRealizations, [&](int s) { return std::pow(xs[s][i], 4); });
    // Influence function of m4 - 3 m2^2.
    const auto g = sample_stat(kRealizations, [&](int s) {
      const double x2 = xs[s][i] * xs[s][i];
      return x2 * x2 - 6.0 * m2.mean * x2;
    });
    CHECK(std::abs(m4.mean - 3.0 * m2.mean * m2.mean) <= 5.0 * g.err);
  }
}

TEST_CASE("velocity convolution: zero input, impulse and Young bound") {
  const auto osc = oscillator_from_gamma(0.02);
  const double dt = 0.1, em = std::sqrt(osc.charge2) / osc.mass;
  NoiseRealization z;
  z.dt = dt;
  z.samples.assign(500, 0.0);
  for (double v : simulate_velocity(z, osc)) CHECK(v == 0.0);

  NoiseRealization imp = z;
  imp.samples[0] = 1.0;
  const auto v = simulate_velocity(imp, osc);
  CHECK(v[0] == 0.0);
  for (std::size_t k = 1; k < v.size(); ++k)
    CHECK(v[k] == doctest::Approx(em * dt * 0.5 * response_kernel_dot(k * dt, osc)).epsilon(1e-9).scale(1e-14));

  NoiseRealization mid = z;
  mid.samples[100] = 1.0;
  const auto w = simulate_velocity(mid, osc);
  for (std::size_t k = 0; k < 100; ++k) CHECK(std::abs(w[k]) < 1e-14);
  for (std::size_t k = 101; k < w.size(); ++k)
    CHECK(w[k] == doctest::Approx(em * dt * response_kernel_dot((k - 100) * dt, osc)).epsilon(1e-9).scale(1e-14));

  const auto b = band(1.0, 0.1, 1.0, 0.0);
  const auto noise = synthesize_noise(b, 49.9, dt, 128, 5);
  const auto u = simulate_velocity(noise, osc);
  double l1 = 0.0, peak = 0.0, vmax = 0.0;
  for (std::size_t k = 0; k < noise.samples.size(); ++k) {
    l1 += std::abs(response_kernel_dot(k * dt, osc)) * dt;
    peak = std::max(peak, std::abs(noise.samples[k]));
    vmax = std::max(vmax, std::abs(u[k]));
  }
  CHECK(vmax <= em * l1 * peak * (1.0 + 1e-12));
}

TEST_CASE("convolution matches a direct trapezoid sum") {
  const auto osc = oscillator_from_gamma(0.05);
  const auto b = band(1.0, 0.3, 0.6, 1.0);
  const auto noise = synthesize_noise(b, 30.0, 0.05, 64, 8);
  const auto v = simulate_velocity(noise, osc);
  const double em = std::sqrt(osc.charge2) / osc.mass, dt = noise.dt;
  for (std::size_t k : {1u, 2u, 57u, 333u, 600u}) {
    double s = 0.0;
    for (std::size_t j = 0; j <= k; ++j) {
      const double wt = (j == 0 || j == k) ? 0.5 : 1.0;
      s += wt * response_kernel_dot((k - j) * dt, osc) * noise.samples[j];
    }
    CHECK(v[k] == doctest::Approx(em * dt * s).epsilon(1e-9).scale(1e-12));
  }
}

TEST_CASE("ensemble: contract checks") {
  const auto osc = oscillator_from_gamma(0.05);
  const auto b = band(1.0, 0.2, 0.5, 0.0);
  EnsembleConfig c;
  c.duration = 20.0;
  c.dt = 0.1;
  c.n_samples = 99;
  CHECK_THROWS_AS(ensemble_dispersion(b, osc, c), ConfigError);
  c.n_samples = 100;
  c.n_modes = 32;
  CHECK_THROWS_AS(ensemble_dispersion(b, osc, c), ConfigError);
  c.n_modes = 64;
  c.output_times = {25.0};
  CHECK_THROWS_AS(ensemble_dispersion(b, osc, c), ConfigError);
  c.output_times = {5.0, 10.0};
  const auto r = ensemble_dispersion(b, osc, c);
  REQUIRE(r.size() == 2);
  CHECK(r.times[0] == doctest::Approx(5.0));
  CHECK(r.n_samples == 100);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(r.mean_v2[i] >= 0.0);
    CHECK(r.stderr_v2[i] > 0.0);
  }
}

TEST_CASE("ensemble: bit-identical across thread counts") {
  const auto osc = oscillator_from_gamma(0.05);
  const std::vector<BandConfig> bands{band(1.0, 0.2, 0.8, 0.5), band(1.5, 0.1, 0.3, 0.0)};
  EnsembleConfig c;
  c.duration = 40.0;
  c.dt = 0.2;
  c.n_modes = 64;
  c.n_samples = 300;
  c.seed = 77;
  c.output_points = 8;
  c.split = true;
  c.threads = 1;
  const auto a = ensemble_dispersion(bands, osc, c);
  c.threads = 4;
  const auto d = ensemble_dispersion(bands, osc, c);
  CHECK(a.mean_v2 == d.mean_v2);
  CHECK(a.stderr_v2 == d.stderr_v2);
  CHECK(a.st == d.st);
  CHECK(a.ns == d.ns);
  CHECK(a.vac == d.vac);
}

TEST_CASE("ensemble: stderr halves when n_samples quadruples") {
  const auto osc = oscillator_from_gamma(0.05);
  const auto b = band(1.0, 0.2, 0.8, 0.5);
  EnsembleConfig c;
  c.duration = 40.0;
  c.dt = 0.2;
  c.n_modes = 64;
  c.n_samples = 1000;
  c.output_points = 5;
  c.threads = 2;
  const auto a = ensemble_dispersion(b, osc, c);
  c.n_samples = 4000;
  const auto d = ensemble_dispersion(b, osc, c);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(d.stderr_v2[i] / a.stderr_v2[i] == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("ensemble: vacuum state gives zero delta") {
  const auto osc = oscillator_from_gamma(0.05);
  const auto b = band(1.0, 0.2, 0.0, 0.0);
  EnsembleConfig c;
  c.duration = 60.0;
  c.dt = 0.2;
  c.n_modes = 64;
  c.n_samples = 2000;
  c.output_points = 6;
  c.split = true;
  c.threads = 2;
  const auto r = ensemble_dispersion(b, osc, c);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(std::abs(r.delta(i)) <= 3.0 * r.stderr_v2[i]);
    CHECK(std::abs(r.st[i]) <= 3.0 * r.st_stderr[i]);
    CHECK(std::abs(r.ns[i]) <= 3.0 * r.ns_stderr[i]);
  }
}

TEST_CASE("ensemble: agrees with the quadrature oracle on a short run") {
  const auto osc = oscillator_from_gamma(0.05);
  const auto b = band(1.0, 0.2, 1.0, 1.0);
  EnsembleConfig c;
  c.duration = 60.0;
  c.dt = 0.1;
  c.n_modes = 128;
  c.n_samples = 3000;
  c.output_points = 6;
  c.seed = 4;
  c.split = true;
  c.threads = 2;
  const auto r = ensemble_dispersion(b, osc, c);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto q = dispersion_quadrature(r.times[i], b, osc);
    INFO("t = " << r.times[i]);
    CHECK(std::abs(r.delta(i) - (q.st + q.ns)) <= 3.0 * r.stderr_v2[i]);
    CHECK(std::abs(r.st[i] - q.st) <= 3.0 * r.st_stderr[i]);
    CHECK(std::abs(r.ns[i] - q.ns) <= 3.0 * r.ns_stderr[i]);
    // The discrete vacuum tracks the continuum vacuum closely at 128 modes.
    CHECK(r.vac[i] == doctest::Approx(vacuum_reference(r.times[i], b, osc)).epsilon(1e-2));
  }
}

TEST_CASE("noise dump round-trip and header layout") {
  const auto b = band(1.0, 0.1, 0.5, 0.2);
  const auto n = synthesize_noise(b, 12.0, 0.3, 64, 0xDEADBEEFULL);
  const auto path = std::filesystem::temp_directory_path() / "sqnz_dump_test.bin";
  write_noise_dump(path, n);
  CHECK(std::filesystem::file_size(path) == 32 + 8 * n.samples.size());
  std::ifstream in(path, std::ios::binary);
  char head[32];
  in.read(head, 32);
  CHECK(std::string(head, 4) == "SQNZ");
  std::uint32_t version;
  double dt;
  std::uint64_t len, seed;
  std::memcpy(&version, head + 4, 4);
  std::memcpy(&dt, head + 8, 8);
  std::memcpy(&len, head + 16, 8);
  std::memcpy(&seed, head + 24, 8);
  CHECK(version == kDumpVersion);
  CHECK(dt == n.dt);
  CHECK(len == n.samples.size());
  CHECK(seed == n.seed);
  in.close();
  const auto back = read_noise_dump(path);
  CHECK(back.samples == n.samples);
  CHECK(back.dt == n.dt);
  CHECK(back.seed == n.seed);
  std::filesystem::resize_file(path, 40);
  CHECK_THROWS_AS(read_noise_dump(path), ConfigError);
  std::filesystem::remove(path);
}

} // TEST_SUITE
