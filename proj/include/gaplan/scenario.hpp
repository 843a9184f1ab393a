// Copyright 2026 The gaplan Authors
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

#ifndef GAPLAN_SCENARIO_HPP_
#define GAPLAN_SCENARIO_HPP_

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gaplan/cost.hpp"
#include "gaplan/ga.hpp"
#include "gaplan/obstacles.hpp"
#include "gaplan/road_map.hpp"
#include "gaplan/tracks.hpp"
#include "gaplan/vehicle.hpp"

namespace gaplan
{

struct ConfigError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct RunConfig
{
  std::optional<double> duration;  // s; exactly one of duration/laps
  std::optional<int> laps;
  double dt_plant = 0.01;
  double control_period = 0.05;
  std::uint64_t seed = 1;
  double s0 = 0.0;
  double y0 = 0.0;
  std::optional<double> psi0;  // default: road heading at s0
  std::optional<double> v0;    // default: v_ref at s0
  std::string name = "scenario";

  int steps_per_cycle() const
  {
    const int k = static_cast<int>(std::lround(control_period / dt_plant));
    if (k < 1 || std::abs(k * dt_plant - control_period) > 1e-9) {
      throw ConfigError("run: control_period must be an integer multiple of dt_plant");
    }
    return k;
  }
};

struct ScenarioConfig
{
  RoadMap map;
  VehicleParams vehicle;  // planner model
  VehicleParams plant;    // simulated plant, may differ (e.g. mu)
  double ego_length = 4.0;
  double ego_width = 1.9;
  Weights weights;
  Bounds bounds;
  HorizonSpec horizon;
  GaConfig ga;
  std::vector<Obstacle> obstacles;
  RunConfig run;

  double ego_semi_major() const { return ego_length / 2.0; }
  double ego_semi_minor() const { return ego_width / 2.0; }
};

namespace ini
{

struct Entry
{
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
  mutable bool used = false;
};

class Document
{
public:
  static Document parse(std::istream & in, const std::string & origin)
  {
    Document doc;
    doc.origin_ = origin;
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find_first_of("#;");
      if (hash != std::string::npos) {
        line.erase(hash);
      }
      const auto trim = [](std::string & s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        s = (b == std::string::npos) ? std::string{} : s.substr(b, e - b + 1);
      };
      trim(line);
      if (line.empty()) {
        continue;
      }
      if (line.front() == '[') {
        if (line.back() != ']' || line.size() < 3) {
          throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
        }
        section = line.substr(1, line.size() - 2);
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
      }
      std::string key = line.substr(0, eq);
      std::string value = line.substr(eq + 1);
      trim(key);
      trim(value);
      if (section.empty() || key.empty()) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": key outside a section");
      }
      doc.entries_.push_back({section, key, value, lineno});
    }
    return doc;
  }

  /// Applies a "section.key=value" override, replacing existing entries of
  /// that key or appending a new one.
  void apply_override(const std::string & spec)
  {
    const auto eq = spec.find('=');
    const auto dot = spec.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      throw ConfigError("override must look like section.key=value: " + spec);
    }
    const std::string section = spec.substr(0, dot);
    const std::string key = spec.substr(dot + 1, eq - dot - 1);
    const std::string value = spec.substr(eq + 1);
    std::erase_if(entries_, [&](const Entry & e) { return e.section == section && e.key == key; });
    entries_.push_back({section, key, value, 0});
  }

  std::optional<std::string> get(const std::string & section, const std::string & key) const
  {
    const Entry * found = nullptr;
    for (const Entry & e : entries_) {
      if (e.section == section && e.key == key) {
        if (found) {
          throw ConfigError(origin_ + ": duplicate key " + section + "." + key);
        }
        found = &e;
        e.used = true;
      }
    }
    return found ? std::optional<std::string>(found->value) : std::nullopt;
  }

  std::vector<std::string> get_all(const std::string & section, const std::string & key) const
  {
    std::vector<std::string> out;
    for (const Entry & e : entries_) {
      if (e.section == section && e.key == key) {
        e.used = true;
        out.push_back(e.value);
      }
    }
    return out;
  }

  double get_double(const std::string & sec, const std::string & key, double fallback) const
  {
    const auto v = get(sec, key);
    if (!v) {
      return fallback;
    }
    try {
      std::size_t pos = 0;
      const double d = std::stod(*v, &pos);
      if (pos != v->size()) {
        throw std::invalid_argument("");
      }
      return d;
    } catch (const std::exception &) {
      throw ConfigError(origin_ + ": " + sec + "." + key + " is not a number: " + *v);
    }
  }

  int get_int(const std::string & sec, const std::string & key, int fallback) const
  {
    const double d = get_double(sec, key, fallback);
    const int i = static_cast<int>(std::lround(d));
    if (std::abs(d - i) > 1e-9) {
      throw ConfigError(origin_ + ": " + sec + "." + key + " must be an integer");
    }
    return i;
  }

  bool get_bool(const std::string & sec, const std::string & key, bool fallback) const
  {
    const auto v = get(sec, key);
    if (!v) {
      return fallback;
    }
    if (*v == "true" || *v == "1" || *v == "yes") {
      return true;
    }
    if (*v == "false" || *v == "0" || *v == "no") {
      return false;
    }
    throw ConfigError(origin_ + ": " + sec + "." + key + " is not a boolean: " + *v);
  }

  std::string get_string(
    const std::string & sec, const std::string & key, const std::string & fallback) const
  {
    return get(sec, key).value_or(fallback);
  }

  void ensure_all_used() const
  {
    std::string unknown;
    for (const Entry & e : entries_) {
      if (!e.used) {
        unknown += (unknown.empty() ? "" : ", ") + e.section + "." + e.key;
      }
    }
    if (!unknown.empty()) {
      throw ConfigError(origin_ + ": unknown keys: " + unknown);
    }
  }

private:
  std::string origin_;
  std::vector<Entry> entries_;
};

}  // namespace ini

namespace detail
{
inline VehicleParams read_vehicle_section(
  const ini::Document & doc, const std::string & section, const VehicleParams & base)
{
  VehicleParams p = base;
  p.M = doc.get_double(section, "mass", p.M);
  p.J = doc.get_double(section, "inertia", p.J);
  p.l_f = doc.get_double(section, "l_f", p.l_f);
  p.l_r = doc.get_double(section, "l_r", p.l_r);
  p.R_r = doc.get_double(section, "wheel_radius", p.R_r);
  p.c_aero = doc.get_double(section, "c_aero", p.c_aero);
  p.pacejka_b = doc.get_double(section, "pacejka_b", p.pacejka_b);
  p.pacejka_c = doc.get_double(section, "pacejka_c", p.pacejka_c);
  p.pacejka_e = doc.get_double(section, "pacejka_e", p.pacejka_e);
  p.mu = doc.get_double(section, "mu", p.mu);
  p.eps0 = doc.get_double(section, "eps0", p.eps0);
  return p;
}

inline void validate_vehicle(const VehicleParams & p, const std::string & which)
{
  if (!(p.M > 0.0) || !(p.J > 0.0) || !(p.l_f > 0.0) || !(p.l_r > 0.0) || !(p.R_r > 0.0)) {
    throw ConfigError(which + ": mass, inertia, axle distances and wheel radius must be positive");
  }
  if (!(p.mu > 0.0) || p.mu > 1.2) {
    throw ConfigError(which + ": mu must lie in (0, 1.2]");
  }
  if (!(p.eps0 > 0.0)) {
    throw ConfigError(which + ": eps0 must be positive");
  }
}

inline RoadMap read_map_section(const ini::Document & doc)
{
  const std::string source = doc.get_string("map", "source", "");
  if (source.empty()) {
    throw ConfigError("map: missing source (campus | circle | oval | straight | file)");
  }
  const double ds = doc.get_double("map", "ds", 4.0);
  const bool has_bounds_key =
    doc.get("map", "b_y") || doc.get("map", "b_yl") || doc.get("map", "b_yh");
  const double b_y = doc.get_double("map", "b_y", 1.75);
  FitOptions opts;
  opts.b_yl = doc.get_double("map", "b_yl", -b_y);
  opts.b_yh = doc.get_double("map", "b_yh", b_y);
  if (!(opts.b_yl < 0.0) || !(opts.b_yh > 0.0)) {
    throw ConfigError("map: need b_yl < 0 < b_yh");
  }

  if (source == "file") {
    const std::string path = doc.get_string("map", "path", "");
    if (path.empty()) {
      throw ConfigError("map: source=file requires path");
    }
    if (path.size() > 4 && path.substr(path.size() - 4) == ".map") {
      // Fitted-map dump: geometry and bounds come from the file.
      RoadMap m = load_map(path);
      m.cyclic = doc.get_bool("map", "cyclic", m.cyclic);
      if (has_bounds_key) {
        m.b_yl = opts.b_yl;
        m.b_yh = opts.b_yh;
      }
      return m;
    }
    const WaypointFile wf = load_waypoints(path);
    const bool looks_closed = (wf.points.front() - wf.points.back()).norm() < 1.0;
    opts.closed = doc.get_bool("map", "cyclic", looks_closed);
    return build_road_map(wf.points, wf.ds.value_or(ds), opts);
  }

  std::vector<Vec2> raw;
  bool default_cyclic = true;
  if (source == "campus") {
    raw = tracks::campus();
  } else if (source == "circle") {
    raw = tracks::circle(doc.get_double("map", "radius", 10.0));
  } else if (source == "oval") {
    raw = tracks::oval(
      doc.get_double("map", "radius", 10.0), doc.get_double("map", "straight_length", 80.0));
  } else if (source == "straight") {
    raw = tracks::straight(doc.get_double("map", "length", 400.0));
    default_cyclic = false;
  } else {
    throw ConfigError("map: unknown source '" + source + "'");
  }
  opts.closed = doc.get_bool("map", "cyclic", default_cyclic);
  return build_road_map(raw, ds, opts);
}
}  // namespace detail

inline ScenarioConfig parse_scenario(
  std::istream & in, const std::string & origin,
  const std::vector<std::string> & overrides = {})
{
  ini::Document doc = ini::Document::parse(in, origin);
  for (const std::string & o : overrides) {
    doc.apply_override(o);
  }

  ScenarioConfig cfg;
  cfg.map = detail::read_map_section(doc);

  cfg.vehicle = detail::read_vehicle_section(doc, "vehicle", VehicleParams{});
  cfg.ego_length = doc.get_double("vehicle", "length", 4.0);
  cfg.ego_width = doc.get_double("vehicle", "width", 1.9);
  cfg.plant = detail::read_vehicle_section(doc, "plant", cfg.vehicle);
  detail::validate_vehicle(cfg.vehicle, "vehicle");
  detail::validate_vehicle(cfg.plant, "plant");
  if (!(cfg.ego_length > 0.0) || !(cfg.ego_width > 0.0) || cfg.ego_width > cfg.ego_length) {
    throw ConfigError("vehicle: need 0 < width <= length");
  }

  Weights & w = cfg.weights;
  w.w2 = doc.get_double("weights", "w2", w.w2);
  w.w4 = doc.get_double("weights", "w4", w.w4);
  w.w5 = doc.get_double("weights", "w5", w.w5);
  w.w6 = doc.get_double("weights", "w6", w.w6);
  w.w7 = doc.get_double("weights", "w7", w.w7);
  w.w8 = doc.get_double("weights", "w8", w.w8);
  w.s1 = doc.get_double("weights", "s1", w.s1);
  w.s2 = doc.get_double("weights", "s2", w.s2);
  w.p_yl = doc.get_double("weights", "p_yl", w.p_yl);
  w.p_yh = doc.get_double("weights", "p_yh", w.p_yh);
  w.p_delta_l = doc.get_double("weights", "p_delta_l", w.p_delta_l);
  w.p_delta_h = doc.get_double("weights", "p_delta_h", w.p_delta_h);
  w.p_tau_l = doc.get_double("weights", "p_tau_l", w.p_tau_l);
  w.p_tau_h = doc.get_double("weights", "p_tau_h", w.p_tau_h);
  w.p_u1_l = doc.get_double("weights", "p_u1_l", w.p_u1_l);
  w.p_u1_h = doc.get_double("weights", "p_u1_h", w.p_u1_h);
  w.p_u2_l = doc.get_double("weights", "p_u2_l", w.p_u2_l);
  w.p_u2_h = doc.get_double("weights", "p_u2_h", w.p_u2_h);
  w.p_obs = doc.get_double("weights", "p_obs", w.p_obs);
  w.eps_obs = doc.get_double("weights", "eps_obs", w.eps_obs);
  for (double v : {w.w2, w.w4, w.w5, w.w6, w.w7, w.w8, w.s1, w.s2, w.p_yl, w.p_yh, w.p_delta_l,
                   w.p_delta_h, w.p_tau_l, w.p_tau_h, w.p_u1_l, w.p_u1_h, w.p_u2_l, w.p_u2_h,
                   w.p_obs}) {
    if (v < 0.0) {
      throw ConfigError("weights: all weights must be non-negative");
    }
  }
  if (!(w.eps_obs > 0.0)) {
    throw ConfigError("weights: eps_obs must be positive");
  }

  Bounds & b = cfg.bounds;
  b.y_low = doc.get_double("bounds", "y_low", cfg.map.b_yl);
  b.y_high = doc.get_double("bounds", "y_high", cfg.map.b_yh);
  b.delta_low = doc.get_double("bounds", "delta_low", b.delta_low);
  b.delta_high = doc.get_double("bounds", "delta_high", b.delta_high);
  b.tau_low = doc.get_double("bounds", "tau_low", b.tau_low);
  b.tau_high = doc.get_double("bounds", "tau_high", b.tau_high);
  b.u1_low = doc.get_double("bounds", "u1_low", b.u1_low);
  b.u1_high = doc.get_double("bounds", "u1_high", b.u1_high);
  b.u2_low = doc.get_double("bounds", "u2_low", b.u2_low);
  b.u2_high = doc.get_double("bounds", "u2_high", b.u2_high);
  if (!(b.y_low < b.y_high) || !(b.delta_low < b.delta_high) || !(b.tau_low < b.tau_high) ||
      !(b.u1_low < b.u1_high) || !(b.u2_low < b.u2_high)) {
    throw ConfigError("bounds: every pair needs lower < upper");
  }

  HorizonSpec & h = cfg.horizon;
  h.n = doc.get_int("horizon", "n", h.n);
  h.dt = doc.get_double("horizon", "dt", h.dt);
  h.dt_state = doc.get_double("horizon", "dt_state", h.dt_state);
  h.v_ref.base = doc.get_double("horizon", "v_ref", h.v_ref.base);
  for (const std::string & pt : doc.get_all("horizon", "v_ref_point")) {
    std::istringstream ps(pt);
    double s = 0.0;
    double v = 0.0;
    if (!(ps >> s >> v)) {
      throw ConfigError("horizon: v_ref_point must be '<s> <v>': " + pt);
    }
    h.v_ref.profile.emplace_back(s, v);
  }
  if (h.n < 1) {
    throw ConfigError("horizon: n must be >= 1");
  }
  if (h.v_ref.base < 0.0) {
    throw ConfigError("horizon: v_ref must be non-negative");
  }
  try {
    (void)h.substeps();
  } catch (const std::exception & e) {
    throw ConfigError(std::string("horizon: ") + e.what());
  }

  GaConfig & g = cfg.ga;
  g.n_pop = doc.get_int("ga", "n_pop", g.n_pop);
  g.n_gen = doc.get_int("ga", "n_gen", g.n_gen);
  g.var = doc.get_double("ga", "var", g.var);
  g.lim_u1 = doc.get_double("ga", "lim_u1", g.lim_u1);
  g.lim_u2 = doc.get_double("ga", "lim_u2", g.lim_u2);
  g.beta_th = doc.get_double("ga", "beta_th", g.beta_th);
  g.alpha_mut_low = doc.get_double("ga", "alpha_mut_low", g.alpha_mut_low);
  g.alpha_mut_high = doc.get_double("ga", "alpha_mut_high", g.alpha_mut_high);
  g.perturb_slopes = doc.get_bool("ga", "perturb_slopes", g.perturb_slopes);
  try {
    g.validate();
  } catch (const std::exception & e) {
    throw ConfigError(std::string("ga: ") + e.what());
  }

  for (const std::string & rec : doc.get_all("obstacles", "obstacle")) {
    std::istringstream os(rec);
    Obstacle o;
    if (!(os >> o.s_obs >> o.y_obs >> o.theta_obs >> o.v_s >> o.v_y >> o.semi_major >>
          o.semi_minor)) {
      throw ConfigError("obstacles: obstacle must be '<s0> <y0> <theta0> <v_s> <v_y> <a> <b>': " +
                        rec);
    }
    if (!(o.semi_minor > 0.0) || o.semi_major < o.semi_minor) {
      throw ConfigError("obstacles: need a >= b > 0: " + rec);
    }
    cfg.obstacles.push_back(o);
  }

  RunConfig & r = cfg.run;
  if (const auto d = doc.get("run", "duration")) {
    r.duration = doc.get_double("run", "duration", 0.0);
  }
  if (const auto l = doc.get("run", "laps")) {
    r.laps = doc.get_int("run", "laps", 0);
  }
  if (r.duration.has_value() == r.laps.has_value()) {
    throw ConfigError("run: set exactly one of duration or laps");
  }
  if (r.duration && *r.duration < 0.0) {
    throw ConfigError("run: duration must be >= 0");
  }
  if (r.laps) {
    if (*r.laps < 1) {
      throw ConfigError("run: laps must be >= 1");
    }
    if (!cfg.map.cyclic) {
      throw ConfigError("run: laps requires a cyclic map");
    }
  }
  r.dt_plant = doc.get_double("run", "dt_plant", r.dt_plant);
  r.control_period = doc.get_double("run", "control_period", r.control_period);
  if (!(r.dt_plant > 0.0)) {
    throw ConfigError("run: dt_plant must be positive");
  }
  (void)r.steps_per_cycle();
  const double seed_raw = doc.get_double("run", "seed", 1.0);
  if (seed_raw < 0.0) {
    throw ConfigError("run: seed must be non-negative");
  }
  r.seed = static_cast<std::uint64_t>(seed_raw);
  r.s0 = doc.get_double("run", "s0", r.s0);
  r.y0 = doc.get_double("run", "y0", r.y0);
  if (const auto p = doc.get("run", "psi0")) {
    r.psi0 = doc.get_double("run", "psi0", 0.0);
  }
  if (const auto v = doc.get("run", "v0")) {
    r.v0 = doc.get_double("run", "v0", 0.0);
  }
  r.name = doc.get_string("run", "name", r.name);
  if (!cfg.map.cyclic && (r.s0 < 0.0 || r.s0 > cfg.map.total_length)) {
    throw ConfigError("run: s0 outside the map");
  }

  doc.ensure_all_used();
  return cfg;
}

inline ScenarioConfig load_scenario(
  const std::string & path, const std::vector<std::string> & overrides = {})
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open scenario file " + path);
  }
  return parse_scenario(in, path, overrides);
}

}  // namespace gaplan

#endif  // GAPLAN_SCENARIO_HPP_
