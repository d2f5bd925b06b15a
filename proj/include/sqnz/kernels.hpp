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

// Squeeze-state algebra, dipole-approximation noise and response kernels,
// self-energy and the fluctuation-dissipation identity.
//
// Units: hbar = c = 1, Lorentz-Heaviside charge. Frequencies are usually given
// as ratios to the resonance frequency, i.e. Omega = 1.

#include <complex>

namespace sqnz {

/** Squeeze parameter zeta = r e^{i theta} and its Bogoliubov coefficients. */
struct SqueezeParams {
  double r = 0.0;     ///< magnitude, >= 0
  double theta = 0.0; ///< phase (rad)
  double mu = 1.0;    ///< cosh r
  double eta = 0.0;   ///< sinh r = |nu|
  double nbar = 0.0;  ///< eta^2, mean photon number per mode

  /// nu = sinh r e^{i theta}
  std::complex<double> nu() const { return std::polar(eta, theta); }
};

SqueezeParams squeeze_derive(double r, double theta);

/// Raw oscillator inputs; resonance_params() completes them.
struct OscillatorInputs {
  double mass = 1.0;
  double charge2 = 0.0; ///< e^2
  double omega0 = 1.0;  ///< bare frequency
  bool small_alpha = false; ///< force the phase shift alpha to zero
};

struct OscillatorConfig {
  double mass = 1.0;
  double charge2 = 0.0;
  double omega0 = 1.0;
  double Omega = 1.0; ///< resonance frequency
  double Gamma = 0.0; ///< decay constant
  double Z = 1.0;     ///< amplitude renormalization
  double alpha = 0.0; ///< phase shift of the response kernel
  bool small_alpha = false;

  /// e^2 / m^2, the prefactor of every velocity dispersion.
  double coupling() const { return charge2 / (mass * mass); }
};

/// Upper bound on Gamma/Omega accepted by resonance_params.
inline constexpr double kMaxGammaOverOmega = 0.1;

OscillatorConfig resonance_params(const OscillatorInputs& in);

/// Builds an oscillator whose decay constant is gamma_over_omega * omega0,
/// i.e. e^2 = 12 pi m (Gamma/Omega) / omega0.
OscillatorConfig oscillator_from_gamma(double gamma_over_omega, double mass = 1.0,
                                       double omega0 = 1.0, bool small_alpha = false);

/// Band of squeezed modes [Xi - Delta/2, Xi + Delta/2] with a common squeeze.
struct BandConfig {
  double Xi = 1.0;    ///< mean frequency
  double Delta = 0.1; ///< bandwidth
  double A = 1.0;     ///< angular weight of the excited solid angle
  SqueezeParams squeeze;

  double lo() const { return Xi - 0.5 * Delta; }
  double hi() const { return Xi + 0.5 * Delta; }
  bool contains(double omega) const { return omega >= lo() && omega <= hi(); }
};

/// Validates Xi > 0, 0 < Delta < 2 Xi, A > 0.
BandConfig make_band(double Xi, double Delta, double A, const SqueezeParams& sq);

/// Band-integrated, vacuum-subtracted force-force kernel.
struct NoiseKernel {
  double stationary = 0.0;    ///< A eta^2 int w^3 cos w(t - t2)
  double nonstationary = 0.0; ///< A mu eta int w^3 cos(w(t + t2) - theta)
};

NoiseKernel noise_kernel(double t, double t2, const BandConfig& band);

/// Pure-vacuum force kernel of the same band: eta^2 -> 1/2, mu eta -> 0.
double vacuum_noise_kernel(double t, double t2, const BandConfig& band);

/// int_lo^hi w^3 cos(w s) dw and int_lo^hi w^3 sin(w s) dw in closed form.
double band_moment_cos(double lo, double hi, double s);
double band_moment_sin(double lo, double hi, double s);

struct SelfEnergy {
  double re = 0.0;
  double im = 0.0;
};

/// Renormalized self-energy to order e^2: Re = 0, Im = (e^2/4 pi m)(2/3) w^3.
SelfEnergy self_energy(double omega, const OscillatorConfig& osc);

/// Kdot(tau) = Z e^{-Gamma tau} cos(Omega tau + alpha), tau >= 0.
double response_kernel_dot(double tau, const OscillatorConfig& osc);

/// Renormalized single-mode energy density, (w/V) eta [eta + mu cos(2wt - 2kx - theta)].
double energy_density(double x_phase, double t, double omega_bar, const SqueezeParams& sq,
                      double volume);

/// Stationary Hadamard spectral density of the band at frequency omega.
double hadamard_st_spectrum(double omega, const BandConfig& band);

/// Im G_R(omega) for the band's solid angle, obtained from the self-energy.
double retarded_im(double omega, const BandConfig& band, const OscillatorConfig& osc);

/// G_H,st(omega) / (sgn(omega) Im G_R(omega)); equals 2 eta^2 + 1 inside the band
/// and 1 outside it.
double fdr_check(double omega, const BandConfig& band, const OscillatorConfig& osc);

} // namespace sqnz
