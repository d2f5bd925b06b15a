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

// Leading-order regime formulas for the squeeze-induced dispersion, each with
// the time window it claims, plus regime classification and the late-time
// effective temperature.

#include "sqnz/kernels.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>

namespace sqnz {

enum class Regime {
  very_early,
  early_plateau,
  onres_quadratic,
  onres_linear,
  onres_ns_flat,
  onres_late,
  offres_early,
  offres_late,
  crossover,
  unclassified,
};

std::string_view to_string(Regime r);

/// Parameter orderings written "a >> b" are enforced as a / b >= this.
inline constexpr double kOrderingRatio = 10.0;
/// Time windows lo << t << hi are accepted for t in [3 lo, hi / 3].
inline constexpr double kWindowRatio = 3.0;

struct RegimeEstimate {
  Regime regime = Regime::unclassified;
  double st = 0.0;
  double ns = 0.0;
  double t_min = 0.0; ///< accepted window, already shrunk by kWindowRatio
  double t_max = std::numeric_limits<double>::infinity();

  double total() const { return st + ns; }
  bool contains(double t) const { return t >= t_min && t <= t_max; }
};

// All of these throw RegimeMismatch when the parameter ordering fails or t lies
// outside the accepted window.

/// Xi^-1 << t << Delta^-1 << Omega^-1, band far above the resonance.
RegimeEstimate very_early(double t, const BandConfig& band, const OscillatorConfig& osc);

/// Delta^-1 << t << Omega^-1 with Xi >> Delta >> Omega.
RegimeEstimate early_plateau(double t, const BandConfig& band, const OscillatorConfig& osc);

/// On resonance, Omega^-1 << t << Delta^-1.
RegimeEstimate onres_quadratic(double t, const BandConfig& band, const OscillatorConfig& osc);

/// On resonance, Delta^-1 << t << Gamma^-1; stationary part only.
RegimeEstimate onres_linear_st(double t, const BandConfig& band, const OscillatorConfig& osc);

/// On resonance, Delta^-1 << t << Gamma^-1; nonstationary part only.
RegimeEstimate onres_ns_flat(double t, const BandConfig& band, const OscillatorConfig& osc);

/// On resonance, t >> Gamma^-1.
RegimeEstimate onres_late(double t, const BandConfig& band, const OscillatorConfig& osc);

/// Band above the resonance, Omega^-1 << t << Delta^-1 << Gamma^-1.
RegimeEstimate offres_early(double t, const BandConfig& band, const OscillatorConfig& osc);

/// Band above the resonance, t >> Gamma^-1 >> Delta^-1.
RegimeEstimate offres_late(double t, const BandConfig& band, const OscillatorConfig& osc);

/// Dispatches on a formula regime (not crossover / unclassified).
RegimeEstimate regime_estimate(Regime r, double t, const BandConfig& band,
                               const OscillatorConfig& osc);

/// Regime whose window contains t. Returns crossover within kWindowRatio of a
/// window boundary and unclassified when no formula applies.
Regime regime_classify(double t, const BandConfig& band, const OscillatorConfig& osc);

/// Geometric centre of a regime's accepted window for the given parameters.
/// Open-ended late windows use t = 10 / Gamma. Throws RegimeMismatch.
double regime_window_center(Regime r, const BandConfig& band, const OscillatorConfig& osc);

/// Late-time temperature shift in units of hbar Omega / k_B = Omega.
double effective_temperature(const BandConfig& band, const OscillatorConfig& osc);

/// hbar / k_B in kelvin seconds.
inline constexpr double kHbarOverKb = 7.638232577577e-12;

/// Converts effective_temperature to kelvin for a resonance of omega_per_s rad/s.
double effective_temperature_kelvin(const BandConfig& band, const OscillatorConfig& osc,
                                    double omega_per_s);

/// offres_late.st / onres_late.st = 4 Xi Delta Gamma / (pi Omega^3).
double offres_onres_ratio(double Xi, double Delta, double Omega, double Gamma);

/// Smallest Xi / Omega for which the off-resonance plateau reaches the
/// on-resonance saturation: (pi / 4) Omega^2 / (Gamma Delta).
double offres_threshold(double Delta, double Omega, double Gamma);

/// Least-squares slope of log y against log t over points with lo < t < hi and
/// y > 0. Returns NaN when fewer than two points qualify; `used` receives the
/// count.
double growth_exponent(std::span<const double> t, std::span<const double> y, double lo,
                       double hi, std::size_t* used = nullptr);

} // namespace sqnz
