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

#include "sqnz/kernels.hpp"

#include "sqnz/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

using std::numbers::pi;

namespace sqnz {

SqueezeParams squeeze_derive(double r, double theta) {
  if (!(r >= 0.0) || !std::isfinite(r))
    throw DomainError("squeeze magnitude r must be finite and >= 0, got " + std::to_string(r));
  if (!std::isfinite(theta))
    throw DomainError("squeeze phase theta must be finite");
  SqueezeParams sq;
  sq.r = r;
  sq.theta = theta;
  sq.mu = std::cosh(r);
  sq.eta = std::sinh(r);
  sq.nbar = sq.eta * sq.eta;
  return sq;
}

OscillatorConfig resonance_params(const OscillatorInputs& in) {
  if (!(in.mass > 0.0)) throw DomainError("oscillator mass must be > 0");
  if (!(in.omega0 > 0.0)) throw DomainError("bare frequency omega0 must be > 0");
  if (!(in.charge2 >= 0.0)) throw DomainError("charge2 (e^2) must be >= 0");

  OscillatorConfig osc;
  osc.mass = in.mass;
  osc.charge2 = in.charge2;
  osc.omega0 = in.omega0;
  osc.small_alpha = in.small_alpha;

  // Re Sigma = 0 at this order, so the frequency shift vanishes and Z = 1.
  const double re_sigma = self_energy(in.omega0, osc).re;
  osc.Omega = in.omega0 + re_sigma / (2.0 * in.omega0);
  osc.Z = 1.0;

  // Im Sigma = c w^3 with c = (e^2 / 4 pi m)(2/3); d(w^3)/d(w^2) = (3/2) w.
  const double c = in.charge2 / (4.0 * pi * in.mass) * (2.0 / 3.0);
  osc.Gamma = osc.Z * self_energy(osc.Omega, osc).im / (2.0 * osc.Omega);
  osc.alpha = in.small_alpha ? 0.0 : osc.Z * c * 1.5 * osc.Omega;

  if (osc.Gamma / osc.Omega > kMaxGammaOverOmega)
    throw StrongCouplingError("Gamma/Omega = " + std::to_string(osc.Gamma / osc.Omega) +
                              " exceeds the weak-coupling limit 0.1");
  return osc;
}

OscillatorConfig oscillator_from_gamma(double gamma_over_omega, double mass, double omega0,
                                       bool small_alpha) {
  if (!(gamma_over_omega >= 0.0)) throw DomainError("Gamma/Omega must be >= 0");
  OscillatorInputs in;
  in.mass = mass;
  in.omega0 = omega0;
  in.small_alpha = small_alpha;
  // Gamma = e^2 Omega^2 / (12 pi m)
  in.charge2 = 12.0 * pi * mass * gamma_over_omega / omega0;
  return resonance_params(in);
}

BandConfig make_band(double Xi, double Delta, double A, const SqueezeParams& sq) {
  if (!(Xi > 0.0)) throw DomainError("band mean frequency Xi must be > 0");
  if (!(Delta > 0.0 && Delta < 2.0 * Xi))
    throw DomainError("bandwidth must satisfy 0 < Delta < 2 Xi");
  if (!(A > 0.0)) throw DomainError("angular weight A must be > 0");
  BandConfig b;
  b.Xi = Xi;
  b.Delta = Delta;
  b.A = A;
  b.squeeze = sq;
  return b;
}

namespace {

// Below this |w s| the integration-by-parts forms cancel badly; use the series.
constexpr double kSeriesCut = 2.0;

double moment_cos_from_zero(double w, double s) {
  s = std::abs(s);
  const double y = w * s;
  if (y <= kSeriesCut) {
    // w^4 sum (-1)^k y^{2k} / ((2k)! (2k + 4))
    double term = 1.0; // y^{2k} / (2k)!
    double sum = 0.0;
    for (int k = 0; k < 60; ++k) {
      const double add = term / (2.0 * k + 4.0);
      sum += (k % 2 == 0) ? add : -add;
      if (std::abs(add) < 1e-19 * std::abs(sum)) break;
      term *= y * y / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
    }
    return w * w * w * w * sum;
  }
  const double sn = std::sin(y), cs = std::cos(y);
  const double s2 = s * s, s4 = s2 * s2;
  return w * w * w * sn / s + 3.0 * w * w * cs / s2 - 6.0 * w * sn / (s2 * s) - 6.0 * cs / s4 +
         6.0 / s4;
}

double moment_sin_from_zero(double w, double s) {
  const double sign = s < 0.0 ? -1.0 : 1.0;
  s = std::abs(s);
  const double y = w * s;
  if (y <= kSeriesCut) {
    // w^4 sum (-1)^k y^{2k+1} / ((2k+1)! (2k + 5))
    double term = y; // y^{2k+1} / (2k+1)!
    double sum = 0.0;
    for (int k = 0; k < 60; ++k) {
      const double add = term / (2.0 * k + 5.0);
      sum += (k % 2 == 0) ? add : -add;
      if (std::abs(add) <= 1e-19 * std::abs(sum)) break;
      term *= y * y / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
    }
    return sign * w * w * w * w * sum;
  }
  const double sn = std::sin(y), cs = std::cos(y);
  const double s2 = s * s;
  return sign * (-w * w * w * cs / s + 3.0 * w * w * sn / s2 + 6.0 * w * cs / (s2 * s) -
                 6.0 * sn / (s2 * s2));
}

} // namespace

double band_moment_cos(double lo, double hi, double s) {
  return moment_cos_from_zero(hi, s) - moment_cos_from_zero(lo, s);
}

double band_moment_sin(double lo, double hi, double s) {
  return moment_sin_from_zero(hi, s) - moment_sin_from_zero(lo, s);
}

NoiseKernel noise_kernel(double t, double t2, const BandConfig& band) {
  const auto& sq = band.squeeze;
  NoiseKernel k;
  if (sq.eta == 0.0) return k;
  const double lo = band.lo(), hi = band.hi();
  k.stationary = band.A * sq.nbar * band_moment_cos(lo, hi, t - t2);
  const double sum = t + t2;
  // cos(w s - theta) = cos theta cos(w s) + sin theta sin(w s)
  k.nonstationary = band.A * sq.mu * sq.eta *
                    (std::cos(sq.theta) * band_moment_cos(lo, hi, sum) +
                     std::sin(sq.theta) * band_moment_sin(lo, hi, sum));
  return k;
}

double vacuum_noise_kernel(double t, double t2, const BandConfig& band) {
  return band.A * 0.5 * band_moment_cos(band.lo(), band.hi(), t - t2);
}

SelfEnergy self_energy(double omega, const OscillatorConfig& osc) {
  // Odd in omega: sgn(w) |w|^3 = w^3.
  const double c = osc.charge2 / (4.0 * pi * osc.mass);
  return {0.0, c * 2.0 * omega * omega * omega / 3.0};
}

double response_kernel_dot(double tau, const OscillatorConfig& osc) {
  if (tau < 0.0) throw DomainError("response kernel is causal: tau must be >= 0");
  return osc.Z * std::exp(-osc.Gamma * tau) * std::cos(osc.Omega * tau + osc.alpha);
}

double energy_density(double x_phase, double t, double omega_bar, const SqueezeParams& sq,
                      double volume) {
  if (!(omega_bar > 0.0)) throw DomainError("mode frequency must be > 0");
  if (!(volume > 0.0)) throw DomainError("quantization volume must be > 0");
  return omega_bar / volume * sq.eta *
         (sq.eta + sq.mu * std::cos(2.0 * omega_bar * t - 2.0 * x_phase - sq.theta));
}

double hadamard_st_spectrum(double omega, const BandConfig& band) {
  const double eta2 = band.contains(std::abs(omega)) ? band.squeeze.nbar : 0.0;
  return 0.5 * pi * band.A * std::abs(omega) * (2.0 * eta2 + 1.0);
}

double retarded_im(double omega, const BandConfig& band, const OscillatorConfig& osc) {
  if (osc.charge2 > 0.0 && omega != 0.0) {
    // Sigma = (e^2/m) w^2 G_R over the full solid angle, whose weight is 1/(3 pi^2).
    const double full_sphere = 1.0 / (3.0 * pi * pi);
    const double g_full = self_energy(omega, osc).im * osc.mass / (osc.charge2 * omega * omega);
    return g_full * band.A / full_sphere;
  }
  return 0.5 * pi * band.A * omega;
}

double fdr_check(double omega, const BandConfig& band, const OscillatorConfig& osc) {
  if (omega == 0.0 || !std::isfinite(omega))
    throw DomainError("fdr_check needs a finite nonzero frequency");
  const double sgn = omega > 0.0 ? 1.0 : -1.0;
  return hadamard_st_spectrum(omega, band) / (sgn * retarded_im(omega, band, osc));
}

} // namespace sqnz
