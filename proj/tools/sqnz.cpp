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

// sqnz command-line driver.

#include "sqnz/cli/commands.hpp"
#include "sqnz/errors.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  using namespace sqnz::cli;

  CLI::App app{"Velocity dispersion of a charged oscillator in a squeezed vacuum"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_path;
  std::string format;
  Options opt;
  double r_max = 0.0;
  int n_r = 0, n_theta = 0;

  app.add_option("--config", config_path, "TOML or JSON run configuration")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "output file (written atomically); stdout if omitted");
  app.add_option("--threads", opt.threads, "worker threads (default: SQNZ_THREADS, then all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--validate", opt.validate, "simulate: check against the deterministic method");
  app.add_option("--format", format, "override the config's output format")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI::App* rmap = nullptr;
  for (const auto& v : verbs()) {
    CLI::App* sub = app.add_subcommand(v);
    if (v == "rmap") rmap = sub;
  }
  rmap->add_option("--r-max", r_max, "largest squeeze magnitude");
  rmap->add_option("--n-r", n_r, "number of r values");
  rmap->add_option("--n-theta", n_theta, "number of theta values over [0, 2 pi)");
  for (CLI::App* sub : app.get_subcommands({})) {
    const std::string name = sub->get_name();
    if (name == "dispersion") sub->description("dispersion series delta<v^2>(t) with vacuum and total");
    if (name == "rmap") sub->description("grid of R(r, theta) with its minimum");
    if (name == "regimes") sub->description("asymptotic regimes against the closed form");
    if (name == "energy") sub->description("single-mode renormalized energy density");
    if (name == "simulate") sub->description("Monte Carlo ensemble of the Langevin velocity");
    if (name == "fdr") sub->description("fluctuation-dissipation ratio per frequency");
    if (name == "figure2") sub->description("on-resonance regime structure, normalized");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::string verb = app.get_subcommands().front()->get_name();
  if (!out_path.empty()) opt.out = out_path;
  if (format == "csv") opt.format = OutputFormat::csv;
  if (format == "json") opt.format = OutputFormat::json;
  if (rmap->count("--r-max")) opt.r_max = r_max;
  if (rmap->count("--n-r")) opt.n_r = n_r;
  if (rmap->count("--n-theta")) opt.n_theta = n_theta;

  try {
    const RunConfig cfg = config_path.empty() ? default_config() : load_config(config_path);
    return run(verb, cfg, opt, std::cout, std::cerr);
  } catch (const sqnz::ConfigError& e) {
    std::cerr << "sqnz: config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "sqnz: " << verb << ": " << e.what() << '\n';
    return 3;
  }
}
