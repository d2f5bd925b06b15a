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

#include "sqnz/asymptotics.hpp"

#include "sqnz/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

using std::numbers::pi;

namespace sqnz {

std::string_view to_string(Regime r) {
  switch (r) {
  case Regime::very_early: return "very_early";
  case Regime::early_plateau: return "early_plateau";
  case Regime::onres_quadratic: return "onres_quadratic";
  case Regime::onres_linear: return "onres_linear";
  case Regime::onres_ns_flat: return "onres_ns_flat";
  case Regime::onres_late: return "onres_late";
  case Regime::offres_early: return "offres_early";
  case Regime::offres_late: return "offres_late";
  case Regime::crossover: return "crossover";
  case Regime::unclassified: return "unclassified";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Window {
  double lo;
  double hi;
};

bool far_above(const BandConfig& b, const OscillatorConfig& o) {
  return b.Xi >= kOrderingRatio * b.Delta && b.Delta >= kOrderingRatio * o.Omega;
}

bool on_resonance(const BandConfig& b, const OscillatorConfig& o) {
  return b.contains(o.Omega) && b.Xi >= kOrderingRatio * b.Delta &&
         b.Delta >= kOrderingRatio * o.Gamma;
}

bool off_resonance(const BandConfig& b, const OscillatorConfig& o) {
  return b.lo() > o.Omega + 0.5 * o.Gamma && b.Delta >= kOrderingRatio * o.Gamma;
}

[[noreturn]] void mismatch(Regime r, const std::string& why) {
  throw RegimeMismatch(std::string(to_string(r)) + ": " + why);
}

// Raw window of each formula; throws when the parameter ordering fails.
Window raw_window(Regime r, const BandConfig& b, const OscillatorConfig& o) {
  switch (r) {
  case Regime::very_early:
    if (!far_above(b, o)) mismatch(r, "needs Xi >= 10 Delta and Delta >= 10 Omega");
    return {1.0 / b.Xi, 1.0 / b.Delta};
  case Regime::early_plateau:
    if (!far_above(b, o)) mismatch(r, "needs Xi >= 10 Delta and Delta >= 10 Omega");
    return {1.0 / b.Delta, 1.0 / o.Omega};
  case Regime::onres_quadratic:
    if (!on_resonance(b, o))
      mismatch(r, "needs Omega inside the band, Xi >= 10 Delta and Delta >= 10 Gamma");
    return {1.0 / o.Omega, 1.0 / b.Delta};
  case Regime::onres_linear:
  case Regime::onres_ns_flat:
    if (!on_resonance(b, o))
      mismatch(r, "needs Omega inside the band, Xi >= 10 Delta and Delta >= 10 Gamma");
    return {1.0 / b.Delta, 1.0 / o.Gamma};
  case Regime::onres_late:
    if (!on_resonance(b, o))
      mismatch(r, "needs Omega inside the band, Xi >= 10 Delta and Delta >= 10 Gamma");
    return {1.0 / o.Gamma, kInf};
  case Regime::offres_early:
    if (!off_resonance(b, o))
      mismatch(r, "needs Xi - Delta/2 > Omega + Gamma/2 and Delta >= 10 Gamma");
    return {1.0 / o.Omega, 1.0 / b.Delta};
  case Regime::offres_late:
    if (!off_resonance(b, o))
      mismatch(r, "needs Xi - Delta/2 > Omega + Gamma/2 and Delta >= 10 Gamma");
    return {1.0 / o.Gamma, kInf};
  case Regime::crossover:
  case Regime::unclassified:
    break;
  }
  mismatch(r, "no formula for this regime");
}

RegimeEstimate checked(Regime r, double t, const BandConfig& b, const OscillatorConfig& o) {
  const Window w = raw_window(r, b, o);
  RegimeEstimate e;
  e.regime = r;
  e.t_min = kWindowRatio * w.lo;
  e.t_max = w.hi / kWindowRatio;
  if (!(e.t_min < e.t_max)) mismatch(r, "empty time window");
  constexpr double slack = 1e-12;
  if (!(t >= e.t_min * (1.0 - slack) && t <= e.t_max * (1.0 + slack)))
    mismatch(r, "t = " + std::to_string(t) + " outside window [" + std::to_string(e.t_min) +
                    ", " + std::to_string(e.t_max) + "]");
  return e;
}

// A (w/m)(e^2 w/m) Z^2
double prefactor(double w, const BandConfig& b, const OscillatorConfig& o) {
  return o.Z * o.Z * b.A * o.coupling() * w * w;
}

double sq(double x) { return x * x; }

} // namespace

RegimeEstimate very_early(double t, const BandConfig& band, const OscillatorConfig& osc) {
  RegimeEstimate e = checked(Regime::very_early, t, band, osc);
  const auto& s = band.squeeze;
  const double c = 4.0 * prefactor(band.Xi, band, osc) * (band.Delta / band.Xi) *
                   sq(std::sin(0.5 * band.Xi * t));
  e.st = c * s.nbar;
  e.ns = c * s.mu * s.eta * std::cos(band.Xi * t - s.theta);
  return e;
}

RegimeEstimate early_plateau(double t, const BandConfig& band, const OscillatorConfig& osc) {
  RegimeEstimate e = checked(Regime::early_plateau, t, band, osc);
  const auto& s = band.squeeze;
  const double c = 2.0 * prefactor(band.Xi, band, osc) * (band.Delta / band.Xi);
  e.st = c * s.nbar;
  e.ns = -0.5 * c * s.mu * s.eta * std::cos(s.theta);
  return e;
}

RegimeEstimate onres_quadratic(double t, const BandConfig& band, const OscillatorConfig& osc) {
  RegimeEstimate e = checked(Regime::onres_quadratic, t, band, osc);
  const auto& s = band.squeeze;
  const double O = osc.Omega;
  const double c = prefactor(O, band, osc) * 0.25 * band.Delta * O * t * t;
  e.st = c * s.nbar;
  e.ns = c * s.mu * s.eta * std::cos(2.0 * O * t - s.theta + 2.0 * osc.alpha);
  return e;
}

RegimeEstimate onres_linear_st(double t, const BandConfig& band, const OscillatorConfig& osc) {
  RegimeEstimate e = checked(Regime::onres_linear, t, band, osc);
  const double O = osc.Omega;
  e.st = band.squeeze.nbar * prefactor(O, band, osc) * 0.5 * pi * O * t;
  return e;
}

RegimeEstimate onres_ns_flat(double t, const BandConfig& band, const OscillatorConfig& osc) {
  RegimeEstimate e = checked(Regime::onres_ns_flat, t, band, osc);
  const auto& s = band.squeeze;
  const double O = osc.Omega;
  e.ns = s.mu * s.eta * prefactor(O, band, osc) * (O / band.Delta) *
         std::cos(2.0 * O * t - s.theta + 2.0 * osc.alpha);
  return e;
}

RegimeEstimate onres_late(double t, const BandConfig& band, const OscillatorConfig& osc) {
  RegimeEstimate e = checked(Regime::onres_late, t, band, osc);
  const auto& s = band.squeeze;
  const double O = osc.Omega, D = band.Delta;
  const double p = prefactor(O, band, osc);
  e.st = s.nbar * 0.25 * pi * p * (O / osc.Gamma);
  e.ns = -s.mu * s.eta * p * (O / (D * D * t)) * std::sin(D * t) *
         std::cos(2.0 * O * t - s.theta + 2.0 * osc.alpha);
  return e;
}

RegimeEstimate offres_early(double t, const BandConfig& band, const OscillatorConfig& osc) {
  RegimeEstimate e = checked(Regime::offres_early, t, band, osc);
  const auto& s = band.squeeze;
  const double X = band.Xi, O = osc.Omega, a2 = 2.0 * osc.alpha;
  const double c = prefactor(X, band, osc) * (band.Delta / X);
  const double sm = sq(std::sin(0.5 * (X - O) * t));
  const double sp = sq(std::sin(0.5 * (X + O) * t));
  const double dc = std::cos(X * t) - std::cos(O * t);
  e.st = s.nbar * c * (sm + sp - dc * std::cos(O * t + a2));
  e.ns = s.mu * s.eta * c *
         (-dc * std::cos(X * t - s.theta) + sm * std::cos(X * t + O * t - s.theta + a2) +
          sp * std::cos(X * t - O * t - s.theta - a2));
  return e;
}

RegimeEstimate offres_late(double t, const BandConfig& band, const OscillatorConfig& osc) {
  RegimeEstimate e = checked(Regime::offres_late, t, band, osc);
  const auto& s = band.squeeze;
  const double X = band.Xi, D = band.Delta;
  const double p = prefactor(X, band, osc);
  e.st = s.nbar * p * (D / X);
  e.ns = -s.mu * s.eta * p * (std::sin(D * t) / (X * t)) * std::cos(2.0 * X * t - s.theta);
  return e;
}

RegimeEstimate regime_estimate(Regime r, double t, const BandConfig& band,
                               const OscillatorConfig& osc) {
  switch (r) {
  case Regime::very_early: return very_early(t, band, osc);
  case Regime::early_plateau: return early_plateau(t, band, osc);
  case Regime::onres_quadratic: return onres_quadratic(t, band, osc);
  case Regime::onres_linear: return onres_linear_st(t, band, osc);
  case Regime::onres_ns_flat: return onres_ns_flat(t, band, osc);
  case Regime::onres_late: return onres_late(t, band, osc);
  case Regime::offres_early: return offres_early(t, band, osc);
  case Regime::offres_late: return offres_late(t, band, osc);
  case Regime::crossover:
  case Regime::unclassified:
    break;
  }
  mismatch(r, "no formula for this regime");
}

Regime regime_classify(double t, const BandConfig& band, const OscillatorConfig& osc) {
  if (!(t > 0.0)) return Regime::unclassified;
  std::vector<Regime> family;
  if (on_resonance(band, osc)) {
    family = {Regime::onres_quadratic, Regime::onres_linear, Regime::onres_late};
  } else if (far_above(band, osc)) {
    family = {Regime::very_early, Regime::early_plateau};
    if (off_resonance(band, osc)) family.push_back(Regime::offres_late);
  } else if (off_resonance(band, osc)) {
    family = {Regime::offres_early, Regime::offres_late};
  } else {
    return Regime::unclassified;
  }

  struct Candidate {
    Regime r;
    Window w;
  };
  std::vector<Candidate> cands;
  for (Regime r : family) {
    const Window w = raw_window(r, band, osc);
    if (w.lo < w.hi) cands.push_back({r, w});
  }
  auto near = [&](double b) {
    return std::isfinite(b) && t > b / kWindowRatio && t < b * kWindowRatio;
  };
  for (const auto& c : cands)
    if (near(c.w.lo) || near(c.w.hi)) return Regime::crossover;
  for (const auto& c : cands)
    if (t > c.w.lo && t < c.w.hi) return c.r;
  return Regime::unclassified;
}

double regime_window_center(Regime r, const BandConfig& band, const OscillatorConfig& osc) {
  const Window w = raw_window(r, band, osc);
  if (!std::isfinite(w.hi)) return 10.0 * w.lo;
  const double lo = kWindowRatio * w.lo, hi = w.hi / kWindowRatio;
  if (!(lo < hi)) mismatch(r, "empty time window");
  return std::sqrt(lo * hi);
}

double effective_temperature(const BandConfig& band, const OscillatorConfig& osc) {
  return band.squeeze.nbar * 1.5 * pi * pi * band.A * osc.Omega;
}

double effective_temperature_kelvin(const BandConfig& band, const OscillatorConfig& osc,
                                    double omega_per_s) {
  return effective_temperature(band, osc) / osc.Omega * kHbarOverKb * omega_per_s;
}

double offres_onres_ratio(double Xi, double Delta, double Omega, double Gamma) {
  return 4.0 * Xi * Delta * Gamma / (pi * Omega * Omega * Omega);
}

double growth_exponent(std::span<const double> t, std::span<const double> y, double lo,
                       double hi, std::size_t* used) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < std::min(t.size(), y.size()); ++k) {
    if (!(t[k] > lo && t[k] < hi && y[k] > 0.0)) continue;
    const double x = std::log(t[k]), v = std::log(y[k]);
    sx += x;
    sy += v;
    sxx += x * x;
    sxy += x * v;
    ++n;
  }
  if (used) *used = n;
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double dn = static_cast<double>(n);
  const double den = dn * sxx - sx * sx;
  if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return (dn * sxy - sx * sy) / den;
}

double offres_threshold(double Delta, double Omega, double Gamma) {
  return 0.25 * pi * Omega * Omega / (Gamma * Delta);
}

} // namespace sqnz
