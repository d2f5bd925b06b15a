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

// The sqnz verbs. Each builds a Table from a resolved RunConfig; run() renders
// it in the requested format and writes it out.

#include "sqnz/cli/config.hpp"
#include "sqnz/cli/output.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sqnz::cli {

struct Options {
  std::optional<std::filesystem::path> out;
  int threads = 0; ///< 0: SQNZ_THREADS, then hardware concurrency
  bool validate = false;
  std::optional<OutputFormat> format; ///< overrides the config's output key
  std::optional<double> r_max;
  std::optional<int> n_r;
  std::optional<int> n_theta;
};

struct CommandResult {
  Table table;
  int exit_code = 0;
  std::vector<std::string> messages; ///< diagnostics for stderr
};

CommandResult cmd_dispersion(const RunConfig& cfg, const Options& opt);
CommandResult cmd_rmap(const RunConfig& cfg, const Options& opt);
CommandResult cmd_regimes(const RunConfig& cfg, const Options& opt);
CommandResult cmd_energy(const RunConfig& cfg, const Options& opt);
CommandResult cmd_simulate(const RunConfig& cfg, const Options& opt);
CommandResult cmd_fdr(const RunConfig& cfg, const Options& opt);
/// On-resonance evolution at Gamma/Omega = 0.004, Delta/Omega = 0.015,
/// Xi = Omega, normalized by the late-time stationary value. Only the squeeze
/// of the config's first band is used.
CommandResult cmd_figure2(const RunConfig& cfg, const Options& opt);

const std::vector<std::string>& verbs();

/// Runs a verb and writes its output. Returns the process exit code.
int run(const std::string& verb, const RunConfig& cfg, const Options& opt, std::ostream& out,
        std::ostream& err);

} // namespace sqnz::cli
