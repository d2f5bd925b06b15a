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

// Squeeze-induced change of the velocity dispersion of the charged oscillator,
// split into stationary (eta^2) and nonstationary (mu eta) parts.
//
// Two independent routes are provided: direct quadrature of the double time
// integral (slow, used as the oracle) and the closed-form band integrands
// L1..L4 / J1..J3 integrated over omega.

#include "sqnz/kernels.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace sqnz {

enum class Method { quadrature, closed_form, asymptotic, monte_carlo };

std::string_view to_string(Method m);
Method method_from_string(std::string_view s); // throws ConfigError

struct QuadratureConfig {
  int omega_panels = 16;  ///< minimum number of omega panels across the band
  int time_panels = 4;    ///< tau panels per period of the fastest oscillation
  double rel_tol = 1e-10; ///< per-component error target, relative to the L1 norm
  int max_doublings = 8;  ///< omega panel doublings before giving up
};

struct DispersionValue {
  double st = 0.0;
  double ns = 0.0;
};

/// Squeeze-stripped band integrals: st = eta^2 * stationary,
/// ns = mu eta * nonstationary (theta enters through the phase), and the band
/// vacuum reference is stationary / 2.
struct BandIntegrals {
  double stationary = 0.0;
  double nonstationary = 0.0;
};

BandIntegrals band_integrals_quadrature(double t, const BandConfig& band,
                                        const OscillatorConfig& osc,
                                        const QuadratureConfig& q = {});

BandIntegrals band_integrals_closed_form(double t, const BandConfig& band,
                                         const OscillatorConfig& osc,
                                         const QuadratureConfig& q = {});

DispersionValue dispersion_quadrature(double t, const BandConfig& band,
                                      const OscillatorConfig& osc,
                                      const QuadratureConfig& q = {});

DispersionValue dispersion_closed_form(double t, const BandConfig& band,
                                       const OscillatorConfig& osc,
                                       const QuadratureConfig& q = {});

/// Pure-vacuum dispersion of the same band at time t (full closed form).
double vacuum_reference(double t, const BandConfig& band, const OscillatorConfig& osc,
                        const QuadratureConfig& q = {});

/// Early-time plateau of the band vacuum dispersion, A e^2 Xi Delta / m^2.
/// Also the natural scale for absolute tolerances.
double vacuum_plateau(const BandConfig& band, const OscillatorConfig& osc);

/// R(r, theta) = 2 eta^2 - mu eta cos theta.
double ratio_R(const SqueezeParams& sq);

struct RMinimum {
  double r_star = 0.0;
  double theta_star = 0.0; ///< wrapped to (-pi, pi]
  double R_min = 0.0;
};

/// Global minimum of R over r in [0, 10], theta in [0, 2 pi).
RMinimum find_min_R();

struct DispersionSeries {
  std::vector<double> times;
  std::vector<double> st;
  std::vector<double> ns;
  std::vector<double> vac;
  Method method = Method::closed_form;

  std::size_t size() const { return times.size(); }
  double total(std::size_t i) const { return st[i] + ns[i] + vac[i]; }
};

/// Geometric grid from t_min to t_max inclusive with per_decade points per decade.
std::vector<double> log_time_grid(double t_min, double t_max, int per_decade);

/// Sum over bands of the dispersion at each time. Only quadrature and
/// closed_form are deterministic methods handled here.
DispersionSeries dispersion_series(std::span<const double> times,
                                   std::span<const BandConfig> bands,
                                   const OscillatorConfig& osc, Method method,
                                   const QuadratureConfig& q = {}, int threads = 1);

/// Rounding guard used by positivity checks, as a fraction of the plateau scale.
inline constexpr double kPositivityGuard = 1e-14;

/// True when st + vac >= 0 and st + ns + vac >= 0 at every point, up to
/// kPositivityGuard * scale.
bool series_positive(const DispersionSeries& s, double scale);

} // namespace sqnz
