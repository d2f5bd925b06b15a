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
#include "sqnz/parallel.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

using std::numbers::pi;

namespace sqnz {

std::string_view to_string(Method m) {
  switch (m) {
  case Method::quadrature: return "quadrature";
  case Method::closed_form: return "closed_form";
  case Method::asymptotic: return "asymptotic";
  case Method::monte_carlo: return "monte_carlo";
  }
  return "unknown";
}

Method method_from_string(std::string_view s) {
  if (s == "quadrature") return Method::quadrature;
  if (s == "closed_form") return Method::closed_form;
  if (s == "asymptotic") return Method::asymptotic;
  if (s == "monte_carlo") return Method::monte_carlo;
  throw ConfigError("unknown method '" + std::string(s) +
                    "' (expected closed_form, quadrature, monte_carlo or asymptotic)");
}

namespace {

using cd = std::complex<double>;
using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
using Gauss15 = boost::math::quadrature::gauss<double, 15>;
using Gauss16 = boost::math::quadrature::gauss<double, 16>;

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
struct BandSum {
  Vec<N> value{};
  Vec<N> error{};
  Vec<N> l1{};
};

// Composite Gauss-Kronrod (15/31) over equal panels. The Gauss-15 result is
// the embedded lower-order rule, so |K - G| is a conservative error estimate.
template <std::size_t N, class F>
BandSum<N> integrate_panels(double lo, double hi, std::size_t panels, F& f) {
  const auto& x = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss15::weights();
  BandSum<N> out;
  const double h = (hi - lo) / static_cast<double>(panels);
  const double half = 0.5 * h;
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = lo + (static_cast<double>(p) + 0.5) * h;
    Vec<N> k{}, g{}, l1{};
    const Vec<N> f0 = f(mid);
    for (std::size_t c = 0; c < N; ++c) {
      k[c] = f0[c] * wk[0];
      g[c] = f0[c] * wg[0];
      l1[c] = std::abs(f0[c]) * wk[0];
    }
    for (std::size_t i = 1; i < x.size(); ++i) {
      const Vec<N> fp = f(mid + half * x[i]);
      const Vec<N> fm = f(mid - half * x[i]);
      for (std::size_t c = 0; c < N; ++c) {
        k[c] += (fp[c] + fm[c]) * wk[i];
        l1[c] += (std::abs(fp[c]) + std::abs(fm[c])) * wk[i];
        if (i % 2 == 0) g[c] += (fp[c] + fm[c]) * wg[i / 2];
      }
    }
    for (std::size_t c = 0; c < N; ++c) {
      out.value[c] += half * k[c];
      out.error[c] += half * std::abs(k[c] - g[c]);
      out.l1[c] += half * l1[c];
    }
  }
  return out;
}

// Panels narrow enough for both the resonance (width ~ max(1/t, Gamma)) and the
// e^{2 i omega t} oscillation of the nonstationary part.
std::size_t base_omega_panels(double t, const BandConfig& band, const QuadratureConfig& q) {
  double width = band.Delta / 16.0;
  if (t > 0.0) width = std::min(width, pi / (4.0 * t));
  const auto needed = static_cast<std::size_t>(std::ceil(band.Delta / width));
  return std::max<std::size_t>(needed, static_cast<std::size_t>(std::max(1, q.omega_panels)));
}

std::string fmt_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// Roundoff floor, in units of the integrated term magnitudes.
constexpr double kRoundoffFloor = 64.0 * std::numeric_limits<double>::epsilon();

// First two components are error-controlled; the rest ride along. If mag is
// nonzero, components mag and mag + 1 carry the magnitudes of the cancelling
// terms behind components 0 and 1, and the error target is raised to the
// roundoff floor they imply.
template <std::size_t N, class F>
BandSum<N> integrate_band(double t, const BandConfig& band, const QuadratureConfig& q, F&& f,
                          const char* what, std::size_t mag = 0) {
  std::size_t panels = base_omega_panels(t, band, q);
  for (int d = 0;; ++d) {
    BandSum<N> r = integrate_panels<N>(band.lo(), band.hi(), panels, f);
    double achieved = 0.0;
    bool ok = true;
    for (std::size_t c = 0; c < 2; ++c) {
      const double floor = mag ? kRoundoffFloor * r.value[mag + c] : 0.0;
      if (r.l1[c] > 0.0) achieved = std::max(achieved, r.error[c] / r.l1[c]);
      if (r.error[c] > q.rel_tol * r.l1[c] + floor) ok = false;
    }
    if (ok) return r;
    if (d >= q.max_doublings)
      throw ConvergenceError(std::string(what) + ": omega integration reached relative error " +
                                 fmt_g(achieved) + " after " + std::to_string(panels) +
                                 " panels at t = " + fmt_g(t) + " (target " + fmt_g(q.rel_tol) + ")",
                             r.value[0], r.value[1], achieved);
    panels *= 2;
  }
}

// Composite Gauss-Legendre rule for I(omega) = int_0^t Kdot(tau) e^{i omega tau} dtau.
class TauRule {
public:
  TauRule(double t, const BandConfig& band, const OscillatorConfig& osc,
          const QuadratureConfig& q) {
    const double fastest = band.hi() + osc.Omega;
    const double per_period = std::max(1, q.time_panels);
    const double by_phase = std::ceil(per_period * t * fastest / (2.0 * pi));
    const double by_decay = std::ceil(per_period * osc.Gamma * t);
    panels_ = static_cast<std::size_t>(std::max({4.0, by_phase, by_decay}));
    h_ = t / static_cast<double>(panels_);

    const auto& x = Gauss16::abscissa();
    const auto& w = Gauss16::weights();
    std::array<double, kNodes> node{}, weight{};
    for (std::size_t i = 0; i < x.size(); ++i) {
      node[2 * i] = -x[i];
      node[2 * i + 1] = x[i];
      weight[2 * i] = w[i];
      weight[2 * i + 1] = w[i];
    }
    for (std::size_t j = 0; j < kNodes; ++j) offset_[j] = 0.5 * h_ * (1.0 + node[j]);
    kw_.resize(panels_ * kNodes);
    for (std::size_t p = 0; p < panels_; ++p) {
      const double a = static_cast<double>(p) * h_;
      for (std::size_t j = 0; j < kNodes; ++j)
        kw_[p * kNodes + j] = 0.5 * h_ * weight[j] * response_kernel_dot(a + offset_[j], osc);
    }
  }

  cd integral(double omega) const {
    std::array<double, kNodes> er{}, ei{};
    for (std::size_t j = 0; j < kNodes; ++j) {
      er[j] = std::cos(omega * offset_[j]);
      ei[j] = std::sin(omega * offset_[j]);
    }
    const cd step = std::polar(1.0, omega * h_);
    cd phase = 1.0;
    cd sum = 0.0;
    for (std::size_t p = 0; p < panels_; ++p) {
      const double* k = &kw_[p * kNodes];
      double sr = 0.0, si = 0.0;
      for (std::size_t j = 0; j < kNodes; ++j) {
        sr += k[j] * er[j];
        si += k[j] * ei[j];
      }
      sum += phase * cd(sr, si);
      if ((p + 1) % 32 == 0)
        phase = std::polar(1.0, omega * static_cast<double>(p + 1) * h_);
      else
        phase *= step;
    }
    return sum;
  }

private:
  static constexpr std::size_t kNodes = 16;
  std::size_t panels_ = 0;
  double h_ = 0.0;
  std::array<double, kNodes> offset_{};
  std::vector<double> kw_;
};

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and >= 0");
}

} // namespace

BandIntegrals band_integrals_quadrature(double t, const BandConfig& band,
                                        const OscillatorConfig& osc,
                                        const QuadratureConfig& q) {
  require_time(t);
  if (t == 0.0) return {};
  const TauRule rule(t, band, osc, q);
  const double theta = band.squeeze.theta;
  auto f = [&](double w) -> Vec<2> {
    const cd I = rule.integral(w);
    const double w3 = w * w * w;
    const cd phase = std::polar(1.0, theta - 2.0 * w * t);
    return {w3 * std::norm(I), w3 * std::real(phase * I * I)};
  };
  const auto r = integrate_band<2>(t, band, q, f, "dispersion_quadrature");
  const double pre = osc.coupling() * band.A;
  return {pre * r.value[0], pre * r.value[1]};
}

BandIntegrals band_integrals_closed_form(double t, const BandConfig& band,
                                         const OscillatorConfig& osc,
                                         const QuadratureConfig& q) {
  require_time(t);
  if (!(osc.Gamma > 0.0))
    throw DomainError("closed form needs Gamma > 0 (nonzero coupling)");
  if (t == 0.0) return {};

  const cd i(0.0, 1.0);
  const double G = osc.Gamma, O = osc.Omega;
  const double Eg2 = std::exp(-2.0 * G * t);
  const double Eg = std::exp(-G * t);
  const cd ea = std::polar(1.0, 2.0 * osc.alpha);          // e^{2 i alpha}
  const cd eth = std::polar(1.0, band.squeeze.theta);      // e^{i theta}
  const cd e2O = Eg2 * std::polar(1.0, 2.0 * O * t);       // e^{-2 Gamma t + 2 i Omega t}

  auto f = [&](double w) -> Vec<6> {
    const cd eWmO = Eg * std::polar(1.0, (w - O) * t);    // e^{-Gamma t + i w t - i Omega t}
    const cd eWpO = Eg * std::polar(1.0, (w + O) * t);    // e^{-Gamma t + i w t + i Omega t}
    const cd e2W = std::polar(1.0, 2.0 * w * t);          // e^{2 i w t}

    const cd res_m = 1.0 + Eg2 - eWmO - std::conj(eWmO);
    const cd res_p = 1.0 + Eg2 - std::conj(eWpO) - eWpO;
    const cd sh_a = 1.0 - std::conj(eWmO) - eWpO + e2O;
    const cd sh_b = 1.0 - eWmO - std::conj(eWpO) + std::conj(e2O);

    const cd L1 = (-i * (O + i * G) * res_m + ea * G * sh_a) /
                  (2.0 * G * (O + i * G) * (w - O - i * G));
    const cd L2 = (i * (O - i * G) * res_m + std::conj(ea) * G * sh_b) /
                  (2.0 * G * (O - i * G) * (w - O + i * G));
    const cd L3 = (i * (O + i * G) * res_p - ea * G * sh_a) /
                  (2.0 * G * (O + i * G) * (w + O + i * G));
    const cd L4 = (-i * (O - i * G) * res_p - std::conj(ea) * G * sh_b) /
                  (2.0 * G * (O - i * G) * (w + O - i * G));

    const cd d1 = (w + i * G - O) * (w + i * G - O);
    const cd d1c = (w - i * G - O) * (w - i * G - O);
    const cd J1 =
        std::conj(ea) * (-std::conj(e2W) * eth / (2.0 * d1) + std::conj(eWpO) * eth / d1 -
                         std::conj(e2O) * eth / (2.0 * d1)) +
        ea * (-e2W * std::conj(eth) / (2.0 * d1c) + eWpO * std::conj(eth) / d1c -
              e2O * std::conj(eth) / (2.0 * d1c));

    const cd p = (w - i * G) * (w - i * G) - O * O;
    const cd qd = (w + i * G) * (w + i * G) - O * O;
    const cd J2 = (-Eg2 * std::conj(eth) - e2W * std::conj(eth) + eWmO * std::conj(eth) +
                   eWpO * std::conj(eth)) / p +
                  (-Eg2 * eth - std::conj(e2W) * eth + std::conj(eWpO) * eth +
                   std::conj(eWmO) * eth) / qd;

    const cd d3 = (w - i * G + O) * (w - i * G + O);
    const cd d3c = (w + i * G + O) * (w + i * G + O);
    const cd J3 =
        std::conj(ea) * (-e2W * std::conj(eth) / (2.0 * d3) + eWmO * std::conj(eth) / d3 -
                         std::conj(e2O) * std::conj(eth) / (2.0 * d3)) +
        ea * (-std::conj(e2W) * eth / (2.0 * d3c) + std::conj(eWmO) * eth / d3c -
              e2O * eth / (2.0 * d3c));

    const double w34 = 0.25 * w * w * w;
    const cd Ls = w34 * (L1 + L2 + L3 + L4);
    const cd Js = w34 * (J1 + J2 + J3);
    // Bounds on the terms before cancellation, with every exponential at 1.
    const double aO = std::abs(O + i * G);
    const double mL = 4.0 * (aO + G) / (2.0 * G * aO) *
                      (1.0 / std::abs(w - O - i * G) + 1.0 / std::abs(w + O + i * G)) * 2.0;
    const double mJ = 4.0 * (2.0 / std::abs(d1) + 1.0 / std::abs(p) + 1.0 / std::abs(qd) +
                             1.0 / std::abs(d3));
    return {Ls.real(), Js.real(), std::abs(Ls.imag()), std::abs(Js.imag()), w34 * mL, w34 * mJ};
  };

  const auto r = integrate_band<6>(t, band, q, f, "dispersion_closed_form", 4);
  // The summed integrands are real; an imaginary residue means a bad transcription.
  constexpr double kRealityTol = 1e-10;
  if (r.value[2] > kRealityTol * r.l1[0] + kRoundoffFloor * r.value[4] ||
      r.value[3] > kRealityTol * r.l1[1] + kRoundoffFloor * r.value[5])
    throw ConsistencyError("closed-form integrand is not real: |Im| / |Re| = " +
                           std::to_string(std::max(r.value[2] / r.l1[0],
                                                   r.value[3] / r.l1[1])));
  const double pre = osc.Z * osc.Z * osc.coupling() * band.A;
  return {pre * r.value[0], pre * r.value[1]};
}

DispersionValue dispersion_quadrature(double t, const BandConfig& band,
                                      const OscillatorConfig& osc, const QuadratureConfig& q) {
  const auto& sq = band.squeeze;
  if (sq.eta == 0.0) {
    require_time(t);
    return {};
  }
  const BandIntegrals b = band_integrals_quadrature(t, band, osc, q);
  return {sq.nbar * b.stationary, sq.mu * sq.eta * b.nonstationary};
}

DispersionValue dispersion_closed_form(double t, const BandConfig& band,
                                       const OscillatorConfig& osc, const QuadratureConfig& q) {
  const auto& sq = band.squeeze;
  if (sq.eta == 0.0) {
    require_time(t);
    return {};
  }
  const BandIntegrals b = band_integrals_closed_form(t, band, osc, q);
  return {sq.nbar * b.stationary, sq.mu * sq.eta * b.nonstationary};
}

double vacuum_reference(double t, const BandConfig& band, const OscillatorConfig& osc,
                        const QuadratureConfig& q) {
  return 0.5 * band_integrals_closed_form(t, band, osc, q).stationary;
}

double vacuum_plateau(const BandConfig& band, const OscillatorConfig& osc) {
  return band.A * osc.coupling() * band.Xi * band.Delta;
}

double ratio_R(const SqueezeParams& sq) {
  return 2.0 * sq.nbar - sq.mu * sq.eta * std::cos(sq.theta);
}

RMinimum find_min_R() {
  // R = cosh 2r - 1 - (1/2) sinh 2r cos theta
  auto R = [](double r, double th) {
    return std::cosh(2.0 * r) - 1.0 - 0.5 * std::sinh(2.0 * r) * std::cos(th);
  };
  constexpr double r_max = 10.0;
  constexpr int n_r = 2001, n_th = 720;
  double best_r = 0.0, best_th = 0.0, best = R(0.0, 0.0);
  for (int a = 0; a < n_r; ++a) {
    const double r = r_max * a / (n_r - 1);
    for (int b = 0; b < n_th; ++b) {
      const double th = 2.0 * pi * b / n_th;
      const double v = R(r, th);
      if (v < best) {
        best = v;
        best_r = r;
        best_th = th;
      }
    }
  }
  // Newton polish on the analytic gradient.
  double r = best_r, th = best_th;
  for (int it = 0; it < 100; ++it) {
    const double c2 = std::cosh(2.0 * r), s2 = std::sinh(2.0 * r);
    const double ct = std::cos(th), st = std::sin(th);
    const double gr = 2.0 * s2 - c2 * ct;
    const double gt = 0.5 * s2 * st;
    const double hrr = 4.0 * c2 - 2.0 * s2 * ct;
    const double hrt = c2 * st;
    const double htt = 0.5 * s2 * ct;
    const double det = hrr * htt - hrt * hrt;
    if (!(det > 0.0)) break;
    const double dr = (htt * gr - hrt * gt) / det;
    const double dt = (hrr * gt - hrt * gr) / det;
    r = std::clamp(r - dr, 0.0, r_max);
    th -= dt;
    if (std::abs(dr) < 1e-16 && std::abs(dt) < 1e-16) break;
  }
  th = std::remainder(th, 2.0 * pi);
  if (th <= -pi) th += 2.0 * pi;
  return {r, th, R(r, th)};
}

std::vector<double> log_time_grid(double t_min, double t_max, int per_decade) {
  if (!(t_min > 0.0) || !(t_max >= t_min) || per_decade < 1)
    throw DomainError("time grid needs 0 < t_min <= t_max and points_per_decade >= 1");
  const double decades = std::log10(t_max / t_min);
  const auto n = static_cast<std::size_t>(std::ceil(decades * per_decade - 1e-9)) + 1;
  std::vector<double> t(n);
  if (n == 1) {
    t[0] = t_min;
    return t;
  }
  for (std::size_t k = 0; k < n; ++k)
    t[k] = t_min * std::pow(t_max / t_min, static_cast<double>(k) / static_cast<double>(n - 1));
  t.back() = t_max;
  return t;
}

DispersionSeries dispersion_series(std::span<const double> times,
                                   std::span<const BandConfig> bands,
                                   const OscillatorConfig& osc, Method method,
                                   const QuadratureConfig& q, int threads) {
  if (method != Method::quadrature && method != Method::closed_form)
    throw ConfigError("dispersion_series handles only quadrature and closed_form");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw DomainError("time grid must be strictly increasing");

  DispersionSeries s;
  s.method = method;
  s.times.assign(times.begin(), times.end());
  const std::size_t n = times.size();
  s.st.assign(n, 0.0);
  s.ns.assign(n, 0.0);
  s.vac.assign(n, 0.0);
  parallel_for(n, threads, [&](std::size_t k) {
    for (const auto& band : bands) {
      const BandIntegrals b = method == Method::quadrature
                                  ? band_integrals_quadrature(times[k], band, osc, q)
                                  : band_integrals_closed_form(times[k], band, osc, q);
      const auto& sq = band.squeeze;
      s.st[k] += sq.nbar * b.stationary;
      s.ns[k] += sq.mu * sq.eta * b.nonstationary;
      s.vac[k] += 0.5 * b.stationary;
    }
  });
  return s;
}

bool series_positive(const DispersionSeries& s, double scale) {
  const double guard = kPositivityGuard * std::abs(scale);
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s.st[k] + s.vac[k] < -guard) return false;
    if (s.total(k) < -guard) return false;
  }
  return true;
}

} // namespace sqnz
