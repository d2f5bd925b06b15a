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

#include "sqnz/cli/config.hpp"

#include "sqnz/errors.hpp"

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sqnz::cli {

using nlohmann::json;

namespace {

// Converts a TOML document to JSON, remembering the source line of every key.
void toml_to_json(const toml::node& node, const std::string& path, json& out,
                  std::map<std::string, int>& lines) {
  if (node.source().begin.line > 0) lines[path] = static_cast<int>(node.source().begin.line);
  if (const auto* t = node.as_table()) {
    out = json::object();
    for (const auto& [k, v] : *t) {
      const std::string key(k.str());
      const std::string sub = path.empty() ? key : path + "." + key;
      if (k.source().begin.line > 0) lines[sub] = static_cast<int>(k.source().begin.line);
      toml_to_json(v, sub, out[key], lines);
      if (k.source().begin.line > 0) lines[sub] = static_cast<int>(k.source().begin.line);
    }
  } else if (const auto* a = node.as_array()) {
    out = json::array();
    for (std::size_t i = 0; i < a->size(); ++i) {
      json item;
      toml_to_json(*a->get(i), path + "[" + std::to_string(i) + "]", item, lines);
      out.push_back(std::move(item));
    }
  } else if (const auto* s = node.as_string()) {
    out = s->get();
  } else if (const auto* i = node.as_integer()) {
    out = i->get();
  } else if (const auto* f = node.as_floating_point()) {
    out = f->get();
  } else if (const auto* b = node.as_boolean()) {
    out = b->get();
  } else {
    throw ConfigError(path + ": unsupported TOML value type");
  }
}

class Reader {
public:
  Reader(std::string source, std::map<std::string, int> lines)
      : source_(std::move(source)), lines_(std::move(lines)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    std::string where = source_;
    // Walk up the path until a located ancestor is found.
    std::string p = path;
    for (;;) {
      if (auto it = lines_.find(p); it != lines_.end()) {
        where += ":" + std::to_string(it->second);
        break;
      }
      const auto cut = p.find_last_of(".[");
      if (cut == std::string::npos || cut == 0) break;
      p = p.substr(0, cut);
    }
    throw ConfigError(where + ": " + (path.empty() ? std::string("config") : path) + ": " + msg);
  }

  void only_keys(const json& obj, const std::string& path,
                 std::initializer_list<const char*> keys) const {
    if (!obj.is_object()) fail(path, "expected a table");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items())
      if (!allowed.count(k)) fail(join(path, k), "unknown key");
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  double number(const json& obj, const std::string& path, const char* key, double def) const {
    if (!obj.contains(key)) return def;
    return number_at(obj.at(key), join(path, key));
  }

  std::optional<double> opt_number(const json& obj, const std::string& path,
                                   const char* key) const {
    if (!obj.contains(key)) return std::nullopt;
    return number_at(obj.at(key), join(path, key));
  }

  double number_at(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
  }

  int integer(const json& obj, const std::string& path, const char* key, int def) const {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
    const auto x = v.get<long long>();
    if (x < -2147483647LL || x > 2147483647LL) fail(join(path, key), "integer out of range");
    return static_cast<int>(x);
  }

  bool boolean(const json& obj, const std::string& path, const char* key, bool def) const {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_boolean()) fail(join(path, key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const json& obj, const std::string& path, const char* key,
                     const std::string& def) const {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_string()) fail(join(path, key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const json& obj, const std::string& path, const char* key) const {
    std::vector<double> out;
    if (!obj.contains(key)) return out;
    const json& v = obj.at(key);
    const std::string p = join(path, key);
    if (!v.is_array()) fail(p, "expected an array of numbers");
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(number_at(v[i], p + "[" + std::to_string(i) + "]"));
    return out;
  }

  const std::string& source() const { return source_; }

private:
  std::string source_;
  std::map<std::string, int> lines_;
};

const json& sub(const json& root, const char* key) {
  static const json empty = json::object();
  return root.contains(key) ? root.at(key) : empty;
}

RunConfig from_json(const json& root, const Reader& rd) {
  rd.only_keys(root, "",
               {"method", "output", "seed", "oscillator", "band", "grid", "quadrature",
                "simulate", "rmap", "energy", "fdr"});
  RunConfig c;

  try {
    c.method = method_from_string(rd.string(root, "", "method", "closed_form"));
  } catch (const ConfigError& e) {
    rd.fail("method", e.what());
  }
  const std::string out = rd.string(root, "", "output", "csv");
  if (out == "csv")
    c.output = OutputFormat::csv;
  else if (out == "json")
    c.output = OutputFormat::json;
  else
    rd.fail("output", "expected \"csv\" or \"json\"");
  if (root.contains("seed")) {
    const json& s = root.at("seed");
    if (s.is_number_unsigned())
      c.seed = s.get<std::uint64_t>();
    else if (s.is_number_integer() && s.get<long long>() >= 0)
      c.seed = static_cast<std::uint64_t>(s.get<long long>());
    else
      rd.fail("seed", "expected a nonnegative integer");
  }

  const json& o = sub(root, "oscillator");
  rd.only_keys(o, "oscillator", {"mass", "charge2", "gamma_over_omega", "omega0", "small_alpha"});
  c.mass = rd.number(o, "oscillator", "mass", 1.0);
  c.charge2 = rd.opt_number(o, "oscillator", "charge2");
  c.gamma_over_omega = rd.opt_number(o, "oscillator", "gamma_over_omega");
  c.omega0 = rd.number(o, "oscillator", "omega0", 1.0);
  c.small_alpha = rd.boolean(o, "oscillator", "small_alpha", false);
  if (c.charge2 && c.gamma_over_omega)
    rd.fail("oscillator", "give either charge2 or gamma_over_omega, not both");
  if (!c.charge2 && !c.gamma_over_omega)
    rd.fail("oscillator", "one of charge2 or gamma_over_omega is required");

  if (!root.contains("band")) rd.fail("band", "at least one [[band]] block is required");
  const json& bands = root.at("band");
  if (!bands.is_array() || bands.empty())
    rd.fail("band", "at least one [[band]] block is required");
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const std::string p = "band[" + std::to_string(i) + "]";
    const json& b = bands[i];
    rd.only_keys(b, p, {"xi", "delta", "A", "r", "theta"});
    if (!b.contains("xi")) rd.fail(p, "missing key xi");
    if (!b.contains("delta")) rd.fail(p, "missing key delta");
    BandInput in;
    in.xi = rd.number(b, p, "xi", 1.0);
    in.delta = rd.number(b, p, "delta", 0.1);
    in.A = rd.number(b, p, "A", 1.0);
    in.r = rd.number(b, p, "r", 0.0);
    in.theta = rd.number(b, p, "theta", 0.0);
    c.band_inputs.push_back(in);
  }

  const json& g = sub(root, "grid");
  rd.only_keys(g, "grid", {"t_min", "t_max", "t_max_gamma", "points_per_decade", "times"});
  c.grid.t_min = rd.number(g, "grid", "t_min", 1e-2);
  c.grid.t_max = rd.opt_number(g, "grid", "t_max");
  c.grid.t_max_gamma = rd.opt_number(g, "grid", "t_max_gamma");
  c.grid.points_per_decade = rd.integer(g, "grid", "points_per_decade", 40);
  c.grid.times = rd.numbers(g, "grid", "times");
  if (c.grid.t_max && c.grid.t_max_gamma)
    rd.fail("grid", "give either t_max or t_max_gamma, not both");
  if (!(c.grid.t_min > 0.0)) rd.fail("grid.t_min", "must be > 0");
  if (c.grid.t_max && !(*c.grid.t_max >= c.grid.t_min))
    rd.fail("grid.t_max", "must be >= t_min");
  if (c.grid.t_max_gamma && !(*c.grid.t_max_gamma > 0.0))
    rd.fail("grid.t_max_gamma", "must be > 0");
  if (c.grid.points_per_decade < 1) rd.fail("grid.points_per_decade", "must be >= 1");
  for (std::size_t i = 0; i < c.grid.times.size(); ++i) {
    const std::string p = "grid.times[" + std::to_string(i) + "]";
    if (c.grid.times[i] < 0.0) rd.fail(p, "must be >= 0");
    if (i > 0 && !(c.grid.times[i] > c.grid.times[i - 1])) rd.fail(p, "times must increase");
  }

  const json& q = sub(root, "quadrature");
  rd.only_keys(q, "quadrature", {"omega_panels", "time_panels", "rel_tol", "max_doublings"});
  c.quadrature.omega_panels = rd.integer(q, "quadrature", "omega_panels", 16);
  c.quadrature.time_panels = rd.integer(q, "quadrature", "time_panels", 4);
  c.quadrature.rel_tol = rd.number(q, "quadrature", "rel_tol", 1e-10);
  c.quadrature.max_doublings = rd.integer(q, "quadrature", "max_doublings", 8);
  if (c.quadrature.omega_panels < 1) rd.fail("quadrature.omega_panels", "must be >= 1");
  if (c.quadrature.time_panels < 1) rd.fail("quadrature.time_panels", "must be >= 1");
  if (!(c.quadrature.rel_tol > 0.0)) rd.fail("quadrature.rel_tol", "must be > 0");
  if (c.quadrature.max_doublings < 0) rd.fail("quadrature.max_doublings", "must be >= 0");

  const json& s = sub(root, "simulate");
  rd.only_keys(s, "simulate",
               {"duration", "dt", "n_modes", "n_samples", "output_points", "dump"});
  c.simulate.duration = rd.opt_number(s, "simulate", "duration");
  c.simulate.dt = rd.opt_number(s, "simulate", "dt");
  c.simulate.n_modes = rd.integer(s, "simulate", "n_modes", 128);
  c.simulate.n_samples = rd.integer(s, "simulate", "n_samples", 10000);
  c.simulate.output_points = rd.integer(s, "simulate", "output_points", 100);
  c.simulate.dump = rd.string(s, "simulate", "dump", "");
  if (c.simulate.duration && !(*c.simulate.duration > 0.0))
    rd.fail("simulate.duration", "must be > 0");
  if (c.simulate.dt && !(*c.simulate.dt > 0.0)) rd.fail("simulate.dt", "must be > 0");
  if (c.simulate.n_modes < 64) rd.fail("simulate.n_modes", "must be >= 64");
  if (c.simulate.n_samples < 100) rd.fail("simulate.n_samples", "must be >= 100");
  if (c.simulate.output_points < 1) rd.fail("simulate.output_points", "must be >= 1");

  const json& rm = sub(root, "rmap");
  rd.only_keys(rm, "rmap", {"r_max", "n_r", "n_theta"});
  c.rmap.r_max = rd.number(rm, "rmap", "r_max", 3.0);
  c.rmap.n_r = rd.integer(rm, "rmap", "n_r", 61);
  c.rmap.n_theta = rd.integer(rm, "rmap", "n_theta", 181);
  if (!(c.rmap.r_max > 0.0)) rd.fail("rmap.r_max", "must be > 0");
  if (c.rmap.n_r < 2) rd.fail("rmap.n_r", "must be >= 2");
  if (c.rmap.n_theta < 3) rd.fail("rmap.n_theta", "must be >= 3");

  const json& en = sub(root, "energy");
  rd.only_keys(en, "energy", {"band", "volume", "x_phase", "periods", "points"});
  c.energy.band = rd.integer(en, "energy", "band", 0);
  c.energy.volume = rd.number(en, "energy", "volume", 1.0);
  c.energy.x_phase = rd.number(en, "energy", "x_phase", 0.0);
  c.energy.periods = rd.number(en, "energy", "periods", 2.0);
  c.energy.points = rd.integer(en, "energy", "points", 400);
  if (c.energy.band < 0 || static_cast<std::size_t>(c.energy.band) >= c.band_inputs.size())
    rd.fail("energy.band", "no such band");
  if (!(c.energy.volume > 0.0)) rd.fail("energy.volume", "must be > 0");
  if (!(c.energy.periods > 0.0)) rd.fail("energy.periods", "must be > 0");
  if (c.energy.points < 2) rd.fail("energy.points", "must be >= 2");

  const json& f = sub(root, "fdr");
  rd.only_keys(f, "fdr", {"omegas", "points", "tol"});
  c.fdr.omegas = rd.numbers(f, "fdr", "omegas");
  c.fdr.points = rd.integer(f, "fdr", "points", 21);
  c.fdr.tol = rd.number(f, "fdr", "tol", 1e-9);
  if (c.fdr.points < 1) rd.fail("fdr.points", "must be >= 1");
  if (!(c.fdr.tol > 0.0)) rd.fail("fdr.tol", "must be > 0");
  for (std::size_t i = 0; i < c.fdr.omegas.size(); ++i)
    if (c.fdr.omegas[i] == 0.0)
      rd.fail("fdr.omegas[" + std::to_string(i) + "]", "omega = 0 is excluded");

  // Module-level invariants, reported against the key that set them.
  try {
    resolve(c, rd.source());
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    const auto cut = msg.find(": ");
    rd.fail(msg.substr(0, cut), msg.substr(cut + 2));
  }
  if (!(c.osc.Gamma > 0.0)) {
    if (c.method == Method::closed_form || c.method == Method::asymptotic)
      rd.fail("method", "closed_form and asymptotic need Gamma > 0");
    if (!c.grid.t_max && c.grid.times.empty())
      rd.fail("grid", "t_max or times is required when Gamma = 0");
  }
  return c;
}

} // namespace

void resolve(RunConfig& c, const std::string&) {
  const char* osc_key = c.gamma_over_omega ? "oscillator.gamma_over_omega" : "oscillator.charge2";
  try {
    if (c.gamma_over_omega)
      c.osc = oscillator_from_gamma(*c.gamma_over_omega, c.mass, c.omega0, c.small_alpha);
    else
      c.osc = resonance_params({c.mass, c.charge2.value_or(0.0), c.omega0, c.small_alpha});
  } catch (const Error& e) {
    const std::string msg = e.what();
    std::string key = osc_key;
    if (msg.find("mass") != std::string::npos) key = "oscillator.mass";
    if (msg.find("omega0") != std::string::npos) key = "oscillator.omega0";
    throw ConfigError(key + ": " + msg);
  }
  c.bands.clear();
  const double O = c.osc.Omega;
  for (std::size_t i = 0; i < c.band_inputs.size(); ++i) {
    const auto& b = c.band_inputs[i];
    const std::string p = "band[" + std::to_string(i) + "]";
    try {
      c.bands.push_back(make_band(b.xi * O, b.delta * O, b.A, squeeze_derive(b.r, b.theta)));
    } catch (const Error& e) {
      const std::string msg = e.what();
      std::string key = p;
      if (msg.find("bandwidth") != std::string::npos) key += ".delta";
      else if (msg.find("Xi") != std::string::npos) key += ".xi";
      else if (msg.find("angular") != std::string::npos) key += ".A";
      else if (msg.find("magnitude") != std::string::npos) key += ".r";
      else if (msg.find("phase") != std::string::npos) key += ".theta";
      throw ConfigError(key + ": " + msg);
    }
  }
}

double RunConfig::t_max() const {
  if (grid.t_max) return *grid.t_max;
  const double per_gamma = grid.t_max_gamma.value_or(10.0);
  return per_gamma * osc.Omega / osc.Gamma;
}

std::vector<double> RunConfig::times() const {
  if (!grid.times.empty()) return grid.times;
  return log_time_grid(grid.t_min, std::max(grid.t_min, t_max()), grid.points_per_decade);
}

RunConfig parse_config_text(const std::string& text, const std::string& source_name) {
  std::size_t first = text.find_first_not_of(" \t\r\n");
  const bool is_json = first != std::string::npos && text[first] == '{';
  if (is_json) {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(source_name + ": invalid JSON: " + e.what());
    }
    if (doc.is_object() && doc.contains("config") && doc.contains("command"))
      doc = doc.at("config");
    return from_json(doc, Reader(source_name, {}));
  }
  toml::table tbl;
  try {
    tbl = toml::parse(text, source_name);
  } catch (const toml::parse_error& e) {
    throw ConfigError(source_name + ":" + std::to_string(e.source().begin.line) + ": " +
                      std::string(e.description()));
  }
  json doc;
  std::map<std::string, int> lines;
  toml_to_json(tbl, "", doc, lines);
  return from_json(doc, Reader(source_name, std::move(lines)));
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

RunConfig default_config() {
  return parse_config_text(
      "[oscillator]\ngamma_over_omega = 0.004\n[[band]]\nxi = 1.0\ndelta = 0.015\nr = 1.0\n",
      "default");
}

json config_to_json(const RunConfig& c) {
  json j;
  j["method"] = std::string(to_string(c.method));
  j["output"] = c.output == OutputFormat::csv ? "csv" : "json";
  j["seed"] = c.seed;
  json o;
  o["mass"] = c.mass;
  if (c.charge2) o["charge2"] = *c.charge2;
  if (c.gamma_over_omega) o["gamma_over_omega"] = *c.gamma_over_omega;
  o["omega0"] = c.omega0;
  o["small_alpha"] = c.small_alpha;
  j["oscillator"] = o;
  json bands = json::array();
  for (const auto& b : c.band_inputs)
    bands.push_back({{"xi", b.xi}, {"delta", b.delta}, {"A", b.A}, {"r", b.r}, {"theta", b.theta}});
  j["band"] = bands;
  json g;
  g["t_min"] = c.grid.t_min;
  if (c.grid.t_max) g["t_max"] = *c.grid.t_max;
  if (c.grid.t_max_gamma) g["t_max_gamma"] = *c.grid.t_max_gamma;
  g["points_per_decade"] = c.grid.points_per_decade;
  if (!c.grid.times.empty()) g["times"] = c.grid.times;
  j["grid"] = g;
  j["quadrature"] = {{"omega_panels", c.quadrature.omega_panels},
                     {"time_panels", c.quadrature.time_panels},
                     {"rel_tol", c.quadrature.rel_tol},
                     {"max_doublings", c.quadrature.max_doublings}};
  json s = {{"n_modes", c.simulate.n_modes},
            {"n_samples", c.simulate.n_samples},
            {"output_points", c.simulate.output_points}};
  if (c.simulate.duration) s["duration"] = *c.simulate.duration;
  if (c.simulate.dt) s["dt"] = *c.simulate.dt;
  if (!c.simulate.dump.empty()) s["dump"] = c.simulate.dump;
  j["simulate"] = s;
  j["rmap"] = {{"r_max", c.rmap.r_max}, {"n_r", c.rmap.n_r}, {"n_theta", c.rmap.n_theta}};
  j["energy"] = {{"band", c.energy.band},
                 {"volume", c.energy.volume},
                 {"x_phase", c.energy.x_phase},
                 {"periods", c.energy.periods},
                 {"points", c.energy.points}};
  json f = {{"points", c.fdr.points}, {"tol", c.fdr.tol}};
  if (!c.fdr.omegas.empty()) f["omegas"] = c.fdr.omegas;
  j["fdr"] = f;
  return j;
}

} // namespace sqnz::cli
