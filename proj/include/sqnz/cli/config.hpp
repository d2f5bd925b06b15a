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

// Run configuration: TOML (or JSON) files with oscillator, band, grid and
// per-command blocks. Frequencies are ratios to Omega and times are in units
// of 1/Omega.

#include "sqnz/dispersion.hpp"
#include "sqnz/kernels.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sqnz::cli {

enum class OutputFormat { csv, json };

struct BandInput {
  double xi = 1.0;
  double delta = 0.1;
  double A = 1.0;
  double r = 0.0;
  double theta = 0.0;
};

struct GridConfig {
  double t_min = 1e-2;
  std::optional<double> t_max;
  std::optional<double> t_max_gamma; ///< t_max in units of 1/Gamma
  int points_per_decade = 40;
  std::vector<double> times; ///< explicit grid; overrides the log grid
};

struct SimulateConfig {
  std::optional<double> duration; ///< default: grid t_max
  std::optional<double> dt;       ///< default: half the band Nyquist step
  int n_modes = 128;
  int n_samples = 10000;
  int output_points = 100;
  std::string dump; ///< optional raw dump of realization 0
};

struct RmapConfig {
  double r_max = 3.0;
  int n_r = 61;
  int n_theta = 181;
};

struct EnergyConfig {
  int band = 0;
  double volume = 1.0;
  double x_phase = 0.0;
  double periods = 2.0;
  int points = 400;
};

struct FdrConfig {
  std::vector<double> omegas; ///< empty: `points` across each band plus outside points
  int points = 21;
  double tol = 1e-9;
};

struct RunConfig {
  // oscillator block as written
  double mass = 1.0;
  std::optional<double> charge2;
  std::optional<double> gamma_over_omega;
  double omega0 = 1.0;
  bool small_alpha = false;

  std::vector<BandInput> band_inputs;
  GridConfig grid;
  Method method = Method::closed_form;
  OutputFormat output = OutputFormat::csv;
  std::uint64_t seed = 0;
  QuadratureConfig quadrature;
  SimulateConfig simulate;
  RmapConfig rmap;
  EnergyConfig energy;
  FdrConfig fdr;

  // resolved
  OscillatorConfig osc;
  std::vector<BandConfig> bands; ///< absolute frequencies

  double Omega() const { return osc.Omega; }
  /// Grid upper end in units of 1/Omega.
  double t_max() const;
  /// Output times in units of 1/Omega.
  std::vector<double> times() const;
};

/// Loads a .toml file, a bare JSON config, or a JSON output document (its
/// "config" member). Errors are ConfigError with "file:line: key: message".
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::string& source_name);

/// A config with one band, used when no file is given.
RunConfig default_config();

/// Fully resolved config; load_config(config_to_json(c)) reproduces c.
nlohmann::json config_to_json(const RunConfig& c);

/// Rebuilds the resolved oscillator and band fields from the raw inputs.
void resolve(RunConfig& c, const std::string& source_name = "config");

} // namespace sqnz::cli
