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

#include "sqnz/cli/commands.hpp"

#include "sqnz/asymptotics.hpp"
#include "sqnz/dispersion.hpp"
#include "sqnz/errors.hpp"
#include "sqnz/montecarlo.hpp"
#include "sqnz/parallel.hpp"
#include "sqnz/regime_tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

using std::numbers::pi;

namespace sqnz::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(const char* f, double x) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Table make_table(const char* command, const RunConfig& cfg) {
  Table t;
  t.command = command;
  t.config = config_to_json(cfg);
  t.comments.push_back(std::string("sqnz ") + command);
  return t;
}

void describe_run(Table& t, const RunConfig& cfg) {
  t.comments.push_back("Gamma/Omega = " + format_double(cfg.osc.Gamma / cfg.osc.Omega) +
                       ", alpha = " + format_double(cfg.osc.alpha) +
                       ", bands = " + std::to_string(cfg.bands.size()));
  for (std::size_t i = 0; i < cfg.band_inputs.size(); ++i) {
    const auto& b = cfg.band_inputs[i];
    t.comments.push_back("band " + std::to_string(i) + ": xi = " + format_double(b.xi) +
                         ", delta = " + format_double(b.delta) + ", A = " + format_double(b.A) +
                         ", r = " + format_double(b.r) + ", theta = " + format_double(b.theta));
  }
}

std::vector<double> internal_times(const std::vector<double>& t_out, double Omega) {
  std::vector<double> t(t_out.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = t_out[k] / Omega;
  return t;
}

double default_dt(const RunConfig& cfg) {
  double dt = std::numeric_limits<double>::infinity();
  for (const auto& b : cfg.bands) dt = std::min(dt, 0.5 * nyquist_dt(b));
  return dt;
}

EnsembleConfig ensemble_config(const RunConfig& cfg, const Options& opt, bool split) {
  EnsembleConfig e;
  const double O = cfg.Omega();
  e.duration = cfg.simulate.duration.value_or(cfg.t_max()) / O;
  e.dt = cfg.simulate.dt ? *cfg.simulate.dt / O : default_dt(cfg);
  e.n_modes = cfg.simulate.n_modes;
  e.n_samples = cfg.simulate.n_samples;
  e.seed = cfg.seed;
  e.output_points = cfg.simulate.output_points;
  e.split = split;
  e.threads = resolve_threads(opt.threads);
  return e;
}

// Deterministic delta = st + ns summed over bands.
double deterministic_delta(double t, const RunConfig& cfg) {
  double s = 0.0;
  for (const auto& b : cfg.bands) {
    const DispersionValue v = cfg.method == Method::quadrature || !(cfg.osc.Gamma > 0.0)
                                  ? dispersion_quadrature(t, b, cfg.osc, cfg.quadrature)
                                  : dispersion_closed_form(t, b, cfg.osc, cfg.quadrature);
    s += v.st + v.ns;
  }
  return s;
}

// |ns(theta = 0) + i ns(theta = pi/2)| for a band at fixed r.
template <class F>
double ns_envelope(const BandConfig& b, F&& ns_of) {
  BandConfig b0 = b, b1 = b;
  b0.squeeze = squeeze_derive(b.squeeze.r, 0.0);
  b1.squeeze = squeeze_derive(b.squeeze.r, 0.5 * pi);
  return std::hypot(ns_of(b0), ns_of(b1));
}

} // namespace

const std::vector<std::string>& verbs() {
  static const std::vector<std::string> v{"dispersion", "rmap",     "regimes", "energy",
                                          "simulate",   "fdr",      "figure2"};
  return v;
}

CommandResult cmd_dispersion(const RunConfig& cfg, const Options& opt) {
  CommandResult res;
  Table& t = res.table = make_table("dispersion", cfg);
  describe_run(t, cfg);
  t.columns = {"t", "st", "ns", "vac", "total", "method"};
  const double O = cfg.Omega();
  const std::string method(to_string(cfg.method));
  t.comments.push_back("method = " + method + "; t in 1/Omega");

  std::vector<double> t_out, st, ns, vac;
  switch (cfg.method) {
  case Method::closed_form:
  case Method::quadrature: {
    t_out = cfg.times();
    const DispersionSeries s = dispersion_series(internal_times(t_out, O), cfg.bands, cfg.osc,
                                                 cfg.method, cfg.quadrature,
                                                 resolve_threads(opt.threads));
    st = s.st;
    ns = s.ns;
    vac = s.vac;
    double scale = 0.0;
    for (const auto& b : cfg.bands) scale += vacuum_plateau(b, cfg.osc);
    t.comments.push_back(std::string("positivity (st + vac >= 0, total >= 0): ") +
                         (series_positive(s, scale) ? "ok" : "violated"));
    break;
  }
  case Method::asymptotic: {
    t_out = cfg.times();
    const auto ti = internal_times(t_out, O);
    st.assign(ti.size(), 0.0);
    ns.assign(ti.size(), 0.0);
    vac.assign(ti.size(), 0.0);
    nlohmann::json regimes = nlohmann::json::array();
    std::vector<std::string> names(ti.size());
    parallel_for(ti.size(), resolve_threads(opt.threads), [&](std::size_t k) {
      std::string label;
      for (const auto& b : cfg.bands) {
        const Regime r = regime_classify(ti[k], b, cfg.osc);
        label += (label.empty() ? "" : "+") + std::string(to_string(r));
        vac[k] += vacuum_reference(ti[k], b, cfg.osc, cfg.quadrature);
        if (r == Regime::crossover || r == Regime::unclassified) {
          st[k] = ns[k] = kNaN;
          continue;
        }
        const RegimeEstimate e = regime_estimate(r, ti[k], b, cfg.osc);
        st[k] += e.st;
        ns[k] += e.ns;
        if (r == Regime::onres_linear) ns[k] += onres_ns_flat(ti[k], b, cfg.osc).ns;
      }
      names[k] = label;
    });
    for (const auto& n : names) regimes.push_back(n);
    t.extra["regime"] = regimes;
    t.comments.push_back("st, ns are nan at crossover or unclassified times; vac is the "
                         "closed-form vacuum reference");
    break;
  }
  case Method::monte_carlo: {
    const EnsembleConfig e = ensemble_config(cfg, opt, true);
    const EnsembleResult r = ensemble_dispersion(cfg.bands, cfg.osc, e);
    for (std::size_t k = 0; k < r.size(); ++k) t_out.push_back(r.times[k] * O);
    st = r.st;
    ns = r.ns;
    vac = r.vac;
    t.extra["st_stderr"] = r.st_stderr;
    t.extra["ns_stderr"] = r.ns_stderr;
    t.comments.push_back("ensemble of " + std::to_string(r.n_samples) + " samples, seed " +
                         std::to_string(cfg.seed) + ", dt = " + format_double(e.dt * O) +
                         ", n_modes = " + std::to_string(e.n_modes) +
                         "; vac is the expected vacuum of the discretized modes");
    break;
  }
  }
  for (std::size_t k = 0; k < t_out.size(); ++k)
    t.rows.push_back({t_out[k], st[k], ns[k], vac[k], st[k] + ns[k] + vac[k], method});
  return res;
}

CommandResult cmd_rmap(const RunConfig& cfg, const Options& opt) {
  CommandResult res;
  Table& t = res.table = make_table("rmap", cfg);
  const double r_max = opt.r_max.value_or(cfg.rmap.r_max);
  const int n_r = opt.n_r.value_or(cfg.rmap.n_r);
  const int n_th = opt.n_theta.value_or(cfg.rmap.n_theta);
  if (!(r_max > 0.0) || n_r < 2 || n_th < 3)
    throw ConfigError("rmap: need r_max > 0, n_r >= 2 and n_theta >= 3");

  const RMinimum m = find_min_R();
  const SqueezeParams at = squeeze_derive(m.r_star, m.theta_star);
  t.comments.push_back("R(r, theta) = 2 eta^2 - mu eta cos theta on r in [0, r_max], theta in "
                       "[0, 2 pi)");
  t.comments.push_back("minimum: r = " + format_double(m.r_star) + ", theta = " +
                       format_double(m.theta_star) + ", R = " + format_double(m.R_min) +
                       ", eta^2 = " + format_double(at.nbar));
  t.comments.push_back("expected: R = sqrt(3)/2 - 1 = " + format_double(std::sqrt(3.0) / 2 - 1) +
                       ", eta^2 = (2 sqrt(3) - 3)/6 = " +
                       format_double((2 * std::sqrt(3.0) - 3) / 6));
  t.columns = {"r", "theta", "R"};
  nlohmann::json slices = nlohmann::json::array();
  double prev_width = std::numeric_limits<double>::infinity();
  bool shrinking = true;
  const double dth = 2.0 * pi / n_th;
  for (int i = 0; i < n_r; ++i) {
    const double r = r_max * i / (n_r - 1);
    std::vector<double> R(static_cast<std::size_t>(n_th));
    int negative = 0;
    for (int j = 0; j < n_th; ++j) {
      const double th = dth * j;
      R[static_cast<std::size_t>(j)] = ratio_R(squeeze_derive(r, th));
      if (R[static_cast<std::size_t>(j)] < 0.0) ++negative;
      t.rows.push_back({r, th, R[static_cast<std::size_t>(j)]});
    }
    int crossings = 0;
    for (int j = 0; j < n_th; ++j) {
      const double a = R[static_cast<std::size_t>(j)];
      const double b = R[static_cast<std::size_t>((j + 1) % n_th)];
      if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) ++crossings;
    }
    const double th_r = std::tanh(r);
    const double exact = (r > 0.0 && 2.0 * th_r < 1.0) ? 2.0 * std::acos(2.0 * th_r) : 0.0;
    const double grid_width = negative * dth;
    if (r >= m.r_star && exact > prev_width) shrinking = false;
    if (r >= m.r_star) prev_width = exact;
    t.comments.push_back("slice r = " + format_double(r) + ": zero crossings = " +
                         std::to_string(crossings) + ", negative-theta width = " +
                         format_double(grid_width) + " (grid), " + format_double(exact) +
                         " (exact)");
    slices.push_back({{"r", r},
                      {"zero_crossings", crossings},
                      {"negative_width_grid", grid_width},
                      {"negative_width_exact", exact}});
  }
  t.comments.push_back(std::string("negative-theta interval narrows monotonically beyond the "
                                   "minimum: ") +
                       (shrinking ? "yes" : "no"));
  t.extra["minimum"] = {{"r", m.r_star}, {"theta", m.theta_star}, {"R", m.R_min},
                        {"eta2", at.nbar}};
  t.extra["slices"] = slices;
  return res;
}

constexpr double kRegimePanelBudget = 2.0e5;

CommandResult cmd_regimes(const RunConfig& cfg, const Options&) {
  CommandResult res;
  Table& t = res.table = make_table("regimes", cfg);
  describe_run(t, cfg);
  t.comments.push_back("windows in 1/Omega; ns deviation compares phase envelopes; "
                       "tolerances are the calibrated per-regime values");
  t.columns = {"band",    "regime",   "t_min",  "t_max",  "t_center", "st_asym", "ns_asym",
               "st_closed", "ns_closed", "st_dev", "ns_dev", "st_tol", "ns_tol", "status"};
  const double O = cfg.Omega();
  const Regime all[] = {Regime::very_early,   Regime::early_plateau, Regime::onres_quadratic,
                        Regime::onres_linear, Regime::onres_ns_flat, Regime::onres_late,
                        Regime::offres_early, Regime::offres_late};
  for (std::size_t bi = 0; bi < cfg.bands.size(); ++bi) {
    const BandConfig& b = cfg.bands[bi];
    for (Regime r : all) {
      const std::string name(to_string(r));
      const RegimeTolerance* tol = regime_tolerance(r);
      double tc = 0.0;
      RegimeEstimate e;
      try {
        tc = regime_window_center(r, b, cfg.osc);
        e = regime_estimate(r, tc, b, cfg.osc);
      } catch (const RegimeMismatch& err) {
        t.rows.push_back({static_cast<long long>(bi), name, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN,
                          kNaN, kNaN, kNaN, tol->st_rel, tol->ns_rel,
                          std::string("not_applicable")});
        t.comments.push_back("band " + std::to_string(bi) + " " + err.what());
        continue;
      }
      // The reference integral needs about Delta t / (pi/4) omega panels; beyond the
      // budget one window would take minutes, so it is reported and skipped.
      const double panels = b.Delta / std::min(b.Delta / 16.0, pi / (4.0 * tc));
      if (panels > kRegimePanelBudget) {
        t.rows.push_back({static_cast<long long>(bi), name, e.t_min * O, e.t_max * O, tc * O, e.st,
                          e.ns, kNaN, kNaN, kNaN, kNaN, tol->st_rel, tol->ns_rel,
                          std::string("skipped")});
        t.comments.push_back("band " + std::to_string(bi) + " " + name +
                             ": closed-form reference needs " + format_double(std::ceil(panels)) +
                             " omega panels at t_center, above the budget of " +
                             format_double(kRegimePanelBudget));
        continue;
      }
      const DispersionValue c = dispersion_closed_form(tc, b, cfg.osc, cfg.quadrature);
      const bool has_st = tol->st_rel > 0.0, has_ns = tol->ns_rel > 0.0;
      const double st_dev = has_st ? std::abs(e.st - c.st) / std::abs(c.st) : kNaN;
      double ns_dev = kNaN;
      if (has_ns && b.squeeze.eta > 0.0) {
        const double ea = ns_envelope(b, [&](const BandConfig& x) {
          return regime_estimate(r, tc, x, cfg.osc).ns;
        });
        const double ec = ns_envelope(b, [&](const BandConfig& x) {
          return dispersion_closed_form(tc, x, cfg.osc, cfg.quadrature).ns;
        });
        ns_dev = std::abs(ea - ec) / ec;
      }
      const bool ok = (!has_st || !(st_dev > tol->st_rel)) && (!has_ns || !(ns_dev > tol->ns_rel));
      t.rows.push_back({static_cast<long long>(bi), name, e.t_min * O, e.t_max * O, tc * O, e.st,
                        e.ns, c.st, c.ns, st_dev, ns_dev, tol->st_rel, tol->ns_rel,
                        std::string(ok ? "ok" : "exceeds")});
    }
  }
  return res;
}

CommandResult cmd_energy(const RunConfig& cfg, const Options&) {
  CommandResult res;
  Table& t = res.table = make_table("energy", cfg);
  const auto bi = static_cast<std::size_t>(cfg.energy.band);
  const BandConfig& b = cfg.bands.at(bi);
  const auto& sq = b.squeeze;
  const double w = b.Xi, V = cfg.energy.volume;
  const double T = cfg.energy.periods * 2.0 * pi / w;
  const int n = cfg.energy.points;
  t.comments.push_back("single mode at the mean frequency of band " + std::to_string(bi) +
                       ": omega_bar = " + format_double(w / cfg.Omega()) +
                       ", r = " + format_double(sq.r) + ", theta = " + format_double(sq.theta) +
                       ", V = " + format_double(V) + ", x_phase = " +
                       format_double(cfg.energy.x_phase));
  t.columns = {"t", "rho", "V_rho_over_omega", "total_with_vacuum"};
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  int negative = 0;
  for (int k = 0; k < n; ++k) {
    const double tk = T * k / (n - 1);
    const double rho = energy_density(cfg.energy.x_phase, tk, w, sq, V);
    const double s = V * rho / w;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
    if (k < n - 1 && s < 0.0) ++negative;
    t.rows.push_back({tk * cfg.Omega(), rho, s, s + 0.5});
  }
  const double frac = static_cast<double>(negative) / (n - 1);
  const double exact_frac = sq.eta > 0.0 ? std::acos(std::tanh(sq.r)) / pi : 0.0;
  t.comments.push_back("min V rho / omega = " + format_double(lo) + " (exact eta^2 - mu eta = " +
                       format_double(sq.nbar - sq.mu * sq.eta) + ")");
  t.comments.push_back("max V rho / omega = " + format_double(hi) + " (exact eta^2 + mu eta = " +
                       format_double(sq.nbar + sq.mu * sq.eta) + ")");
  t.comments.push_back("negativity fraction of the period = " + format_double(frac) +
                       " (exact acos(tanh r)/pi = " + format_double(exact_frac) + ")");
  t.comments.push_back("min total with vacuum = " + format_double(lo + 0.5) +
                       " (exact e^{-2r}/2 = " + format_double(0.5 * std::exp(-2.0 * sq.r)) + ")");
  t.extra["summary"] = {{"min", lo}, {"max", hi}, {"negativity_fraction", frac},
                        {"negativity_fraction_exact", exact_frac}};
  return res;
}

CommandResult cmd_simulate(const RunConfig& cfg, const Options& opt) {
  CommandResult res;
  Table& t = res.table = make_table("simulate", cfg);
  describe_run(t, cfg);
  const EnsembleConfig e = ensemble_config(cfg, opt, false);
  const double O = cfg.Omega();
  const EnsembleResult r = ensemble_dispersion(cfg.bands, cfg.osc, e);
  t.comments.push_back("ensemble of " + std::to_string(r.n_samples) + " samples, seed " +
                       std::to_string(cfg.seed) + ", dt = " + format_double(e.dt * O) +
                       ", n_modes = " + std::to_string(e.n_modes));
  t.comments.push_back("mean_v2 is the raw ensemble <v^2>; subtract the vacuum column of the "
                       "JSON output for the squeeze-induced change");
  t.columns = {"t", "mean_v2", "stderr", "n_samples"};
  for (std::size_t k = 0; k < r.size(); ++k)
    t.rows.push_back({r.times[k] * O, r.mean_v2[k], r.stderr_v2[k],
                      static_cast<long long>(r.n_samples)});
  t.extra["vac"] = r.vac;

  if (!cfg.simulate.dump.empty()) {
    const NoiseRealization noise = synthesize_noise(cfg.bands, e.duration, e.dt, e.n_modes,
                                                    substream_seed(cfg.seed, 0));
    write_noise_dump(cfg.simulate.dump, noise);
    res.messages.push_back("wrote realization 0 to " + cfg.simulate.dump);
  }

  if (opt.validate) {
    std::vector<double> det(r.size());
    parallel_for(r.size(), e.threads,
                 [&](std::size_t k) { det[k] = deterministic_delta(r.times[k], cfg); });
    std::size_t bad = 0;
    double worst = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      const double z = std::abs(r.delta(k) - det[k]) / r.stderr_v2[k];
      worst = std::max(worst, z);
      if (!(z <= 3.0)) ++bad;
    }
    res.messages.push_back("validate: " + std::to_string(r.size() - bad) + "/" +
                           std::to_string(r.size()) +
                           " output times within 3 stderr of the deterministic value "
                           "(max |z| = " + fmt("%.3f", worst) + ")");
    if (bad > 0) res.exit_code = 1;
    t.extra["deterministic_delta"] = det;
  }
  return res;
}

CommandResult cmd_fdr(const RunConfig& cfg, const Options&) {
  CommandResult res;
  Table& t = res.table = make_table("fdr", cfg);
  describe_run(t, cfg);
  const double O = cfg.Omega();
  const double tol = cfg.fdr.tol;
  t.comments.push_back("ratio = G_H,st / |Im G_R|; expected 2 eta^2 + 1 inside the band and 1 "
                       "outside, relative tolerance " + format_double(tol));
  t.columns = {"band", "omega", "ratio", "expected", "abs_error", "pass"};
  std::size_t failed = 0;
  for (std::size_t bi = 0; bi < cfg.bands.size(); ++bi) {
    const BandConfig& b = cfg.bands[bi];
    std::vector<double> omegas;
    if (!cfg.fdr.omegas.empty()) {
      for (double w : cfg.fdr.omegas) omegas.push_back(w * O);
    } else {
      const int n = cfg.fdr.points;
      for (int k = 0; k < n; ++k)
        omegas.push_back(n == 1 ? b.Xi : b.lo() + b.Delta * k / (n - 1));
      omegas.push_back(0.5 * b.lo());
      omegas.push_back(b.hi() + b.Delta);
    }
    for (double w : omegas) {
      const double ratio = fdr_check(w, b, cfg.osc);
      const double expected = b.contains(std::abs(w)) ? 2.0 * b.squeeze.nbar + 1.0 : 1.0;
      const double err = std::abs(ratio - expected);
      const bool pass = err <= tol * expected;
      if (!pass) ++failed;
      t.rows.push_back({static_cast<long long>(bi), w / O, ratio, expected, err,
                        std::string(pass ? "pass" : "fail")});
    }
  }
  res.messages.push_back("fdr: " + std::to_string(t.rows.size() - failed) + "/" +
                         std::to_string(t.rows.size()) + " frequencies pass");
  if (failed) res.exit_code = 1;
  return res;
}

CommandResult cmd_figure2(const RunConfig& cfg, const Options& opt) {
  RunConfig fig = cfg;
  fig.charge2.reset();
  fig.gamma_over_omega = 0.004;
  fig.mass = 1.0;
  fig.omega0 = 1.0;
  BandInput bin = cfg.band_inputs.empty() ? BandInput{} : cfg.band_inputs.front();
  bin.xi = 1.0;
  bin.delta = 0.015;
  if (bin.r == 0.0) bin.r = 1.0;
  fig.band_inputs = {bin};
  fig.grid.times.clear();
  resolve(fig);

  CommandResult res;
  Table& t = res.table = make_table("figure2", fig);
  describe_run(t, fig);
  const BandConfig& b = fig.bands.front();
  const auto& osc = fig.osc;
  const double G = osc.Gamma, D = b.Delta, O = osc.Omega;

  const std::vector<double> times = fig.times();
  const DispersionSeries s = dispersion_series(times, fig.bands, osc, Method::closed_form,
                                               fig.quadrature, resolve_threads(opt.threads));
  const double st_inf =
      band_integrals_closed_form(50.0 / G, b, osc, fig.quadrature).stationary * b.squeeze.nbar;
  t.columns = {"t", "st_norm", "ns_norm", "st", "ns"};
  for (std::size_t k = 0; k < s.size(); ++k)
    t.rows.push_back({times[k], s.st[k] / st_inf, s.ns[k] / st_inf, s.st[k], s.ns[k]});

  std::size_t nq = 0, nl = 0;
  const double pq = growth_exponent(s.times, s.st, 3.0 / O, 1.0 / (3.0 * D), &nq);
  const double pl = growth_exponent(s.times, s.st, 3.0 / D, 1.0 / (3.0 * G), &nl);
  const double t10 = 10.0 / G;
  const DispersionValue v10 = dispersion_closed_form(t10, b, osc, fig.quadrature);
  const double sat = b.squeeze.nbar * 0.25 * pi * b.A * osc.coupling() * O * O * (O / G);
  t.comments.push_back("normalized by st(t = 50/Gamma) = " + format_double(st_inf));
  t.comments.push_back("log-log slope of st on (3/Omega, 1/(3 Delta)): " + format_double(pq) +
                       " from " + std::to_string(nq) + " points");
  t.comments.push_back("log-log slope of st on (3/Delta, 1/(3 Gamma)): " + format_double(pl) +
                       " from " + std::to_string(nl) + " points");
  t.comments.push_back("st(10/Gamma) / saturation formula = " + format_double(v10.st / sat));
  t.comments.push_back("|ns(10/Gamma)| / st(10/Gamma) = " + format_double(std::abs(v10.ns) / v10.st));
  t.extra["summary"] = {{"slope_quadratic", pq},     {"points_quadratic", nq},
                        {"slope_linear", pl},        {"points_linear", nl},
                        {"saturation_ratio", v10.st / sat},
                        {"ns_over_st_at_10_over_gamma", std::abs(v10.ns) / v10.st}};
  return res;
}

int run(const std::string& verb, const RunConfig& cfg, const Options& opt, std::ostream& out,
        std::ostream& err) {
  CommandResult r;
  if (verb == "dispersion")
    r = cmd_dispersion(cfg, opt);
  else if (verb == "rmap")
    r = cmd_rmap(cfg, opt);
  else if (verb == "regimes")
    r = cmd_regimes(cfg, opt);
  else if (verb == "energy")
    r = cmd_energy(cfg, opt);
  else if (verb == "simulate")
    r = cmd_simulate(cfg, opt);
  else if (verb == "fdr")
    r = cmd_fdr(cfg, opt);
  else if (verb == "figure2")
    r = cmd_figure2(cfg, opt);
  else
    throw ConfigError("unknown command '" + verb + "'");
  const OutputFormat f = opt.format.value_or(cfg.output);
  emit(opt.out, f == OutputFormat::csv ? render_csv(r.table) : render_json(r.table), out);
  for (const auto& m : r.messages) err << m << '\n';
  return r.exit_code;
}

} // namespace sqnz::cli
