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

#ifndef GAPLAN_SIM_HPP_
#define GAPLAN_SIM_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gaplan/cost.hpp"
#include "gaplan/ga.hpp"
#include "gaplan/obstacles.hpp"
#include "gaplan/rng.hpp"
#include "gaplan/scenario.hpp"
#include "gaplan/vehicle.hpp"

namespace gaplan
{

struct PlantRecord
{
  double t = 0.0;
  VehicleState x;
  ControlInput u;
  std::vector<double> obstacle_distances;
  double active_cost = 0.0;  // best cost of the last solve

  double min_obstacle_distance() const
  {
    double m = std::numeric_limits<double>::infinity();
    for (double d : obstacle_distances) {
      m = std::min(m, d);
    }
    return m;
  }
};

struct CycleRecord
{
  int cycle = 0;
  double t = 0.0;
  double solve_ms = 0.0;
  double best_cost = 0.0;
  int n_gen = 0;
};

struct SimLog
{
  std::vector<PlantRecord> plant;
  std::vector<CycleRecord> cycles;
};

struct SimResult
{
  SimLog log;
  bool collision = false;
  bool bound_violation = false;
  bool aborted = false;
  std::string abort_reason;
  int vx_clamp_events = 0;
  double sim_time = 0.0;
  double distance_traveled = 0.0;

  bool success() const { return !collision && !bound_violation && !aborted; }
  int exit_code() const { return success() ? 0 : 1; }

  double max_abs_y() const
  {
    double m = 0.0;
    for (const auto & r : log.plant) {
      m = std::max(m, std::abs(r.x.y));
    }
    return m;
  }

  double min_obstacle_distance() const
  {
    double m = std::numeric_limits<double>::infinity();
    for (const auto & r : log.plant) {
      m = std::min(m, r.min_obstacle_distance());
    }
    return m;
  }

  double average_speed() const
  {
    return sim_time > 0.0 ? distance_traveled / sim_time : 0.0;
  }

  double mean_solve_ms() const
  {
    if (log.cycles.empty()) {
      return 0.0;
    }
    double s = 0.0;
    for (const auto & c : log.cycles) {
      s += c.solve_ms;
    }
    return s / log.cycles.size();
  }

  double percentile_solve_ms(double q) const
  {
    if (log.cycles.empty()) {
      return 0.0;
    }
    std::vector<double> v;
    v.reserve(log.cycles.size());
    for (const auto & c : log.cycles) {
      v.push_back(c.solve_ms);
    }
    std::sort(v.begin(), v.end());
    const std::size_t idx = std::min(
      v.size() - 1, static_cast<std::size_t>(std::ceil(q * v.size())) - (q > 0.0 ? 1 : 0));
    return v[idx];
  }

  double max_solve_ms() const { return percentile_solve_ms(1.0); }
};

/// Rebases an obstacle's s next to the ego on cyclic maps so that distances
/// across the lap seam stay short.
inline Obstacle rebase_obstacle(const Obstacle & o, const RoadMap & map, double ego_s)
{
  if (!map.cyclic) {
    return o;
  }
  Obstacle r = o;
  const double l = map.total_length;
  r.s_obs = o.s_obs - std::round((o.s_obs - ego_s) / l) * l;
  return r;
}

// Receding-horizon executive: one GA solve per call, warm-started from the
// previous cycle, applying the first element of the decoded sequence.
class MpcReplanner
{
public:
  MpcReplanner(const ScenarioConfig & cfg, const RoadMap & map) : cfg_(cfg), map_(map) {}

  struct StepResult
  {
    ControlInput applied;
    GaSolution solution;
    double solve_ms = 0.0;
  };

  /// Plans from the measured state and obstacle set. Obstacle motion over the
  /// horizon is extrapolated inside the cost context; the GA seed for cycle k
  /// is derived deterministically from the run seed.
  StepResult step(const VehicleState & x, std::span<const Obstacle> measured)
  {
    if (!map_.cyclic && (x.s < 0.0 || x.s > map_.total_length)) {
      throw std::runtime_error(
        "mpc_step: vehicle state off the map (s=" + std::to_string(x.s) + ")");
    }
    std::vector<Obstacle> rebased;
    rebased.reserve(measured.size());
    for (const Obstacle & o : measured) {
      rebased.push_back(rebase_obstacle(o, map_, x.s));
    }
    const CostContext ctx = make_cost_context(
      map_, cfg_.vehicle, cfg_.weights, cfg_.bounds, cfg_.horizon, rebased,
      cfg_.ego_semi_major(), cfg_.ego_semi_minor());
    GaConfig ga = cfg_.ga;
    ga.rng_seed = mix_seed(cfg_.run.seed, static_cast<std::uint64_t>(cycle_));
    const std::optional<Candidate> warm =
      prev_ ? std::optional<Candidate>(shift_warm_start(*prev_)) : std::nullopt;

    const auto t0 = std::chrono::steady_clock::now();
    StepResult res;
    res.solution = solve(x, warm, ctx, ga);
    res.solve_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    res.applied = res.solution.input_sequence.front();
    prev_ = res.solution.best;
    ++cycle_;
    return res;
  }

  int cycles_run() const { return cycle_; }

  void reset()
  {
    prev_.reset();
    cycle_ = 0;
  }

private:
  const ScenarioConfig & cfg_;
  const RoadMap & map_;
  std::optional<Candidate> prev_;
  int cycle_ = 0;
};

/// Closed loop: plant RK4 steps at dt_plant interleaved with planner calls
/// every control period; obstacles advance at constant velocity in the plant
/// world. Stops on duration, lap completion or collision.
inline SimResult run_scenario(const ScenarioConfig & cfg)
{
  const RoadMap & map = cfg.map;
  const RunConfig & run = cfg.run;
  const int steps_per_cycle = run.steps_per_cycle();

  VehicleState x;
  x.s = run.s0;
  x.y = run.y0;
  x.psi = run.psi0.value_or(road_pose(map, run.s0).theta_c);
  x.Vx = run.v0.value_or(cfg.horizon.v_ref.at(run.s0));

  std::vector<Obstacle> world = cfg.obstacles;
  MpcReplanner planner(cfg, map);

  SimResult result;
  std::optional<long> duration_steps;
  if (run.duration) {
    duration_steps = std::lround(*run.duration / run.dt_plant);
  }
  // Guard against a stalled vehicle in lap mode.
  const long max_steps = run.laps
    ? static_cast<long>(*run.laps * map.total_length / 0.25 / run.dt_plant) + 1
    : std::numeric_limits<long>::max();

  ControlInput applied;
  double active_cost = 0.0;
  const double lap_goal = run.laps ? run.s0 + *run.laps * map.total_length : 0.0;

  for (long step = 0;; ++step) {
    const double t = step * run.dt_plant;
    if (duration_steps && step >= *duration_steps) {
      break;
    }
    if (run.laps && x.s >= lap_goal) {
      break;
    }
    if (step >= max_steps) {
      result.aborted = true;
      result.abort_reason = "lap timeout: vehicle stalled";
      break;
    }

    if (step % steps_per_cycle == 0) {
      MpcReplanner::StepResult sr;
      try {
        sr = planner.step(x, world);
      } catch (const std::exception & e) {
        result.aborted = true;
        result.abort_reason = e.what();
        break;
      }
      applied = sr.applied;
      active_cost = sr.solution.best_cost;
      result.log.cycles.push_back(
        {planner.cycles_run() - 1, t, sr.solve_ms, sr.solution.best_cost,
         static_cast<int>(sr.solution.fitness_history.size())});
    }

    PlantRecord rec;
    rec.t = t;
    rec.x = x;
    rec.u = applied;
    rec.active_cost = active_cost;
    const RoadPose pose = road_pose(map, x.s);
    const EllipsePose ego =
      ego_ellipse(x, pose.theta_c, cfg.ego_semi_major(), cfg.ego_semi_minor());
    for (const Obstacle & o : world) {
      const Obstacle reb = rebase_obstacle(o, map, x.s);
      rec.obstacle_distances.push_back(
        relative_distance(ego, predict_obstacle(reb, 0, cfg.horizon.dt)));
    }
    result.log.plant.push_back(rec);
    result.sim_time = t;
    result.distance_traveled = x.s - run.s0;

    // Constraint failure means leaving the road; the planner's soft wall in
    // cfg.bounds may sit inside the physical lane bounds as a margin.
    if (x.y < map.b_yl || x.y > map.b_yh) {
      result.bound_violation = true;
    }
    if (!rec.obstacle_distances.empty() && rec.min_obstacle_distance() <= 0.0) {
      result.collision = true;  // logged as failure, not a crash
      break;
    }

    try {
      x = integrate_plant_step(x, applied, map, cfg.plant, run.dt_plant);
    } catch (const std::exception & e) {
      result.aborted = true;
      result.abort_reason = e.what();
      break;
    }
    if (!state_is_finite(x)) {
      result.aborted = true;
      result.abort_reason = "plant state diverged";
      break;
    }
    if (x.Vx < 0.0) {
      x.Vx = 0.0;  // forward-only plant; see run summary for the event count
      ++result.vx_clamp_events;
    }
    for (Obstacle & o : world) {
      o.s_obs += o.v_s * run.dt_plant;
      o.y_obs += o.v_y * run.dt_plant;
    }
    result.sim_time = (step + 1) * run.dt_plant;
    result.distance_traveled = x.s - run.s0;
  }
  return result;
}

namespace detail
{
inline std::string csv_double(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

struct OutputPaths
{
  std::filesystem::path trajectory_csv;
  std::filesystem::path timing_csv;
  std::filesystem::path summary_txt;

  static OutputPaths in_dir(const std::filesystem::path & dir, const std::string & name)
  {
    return {dir / (name + "_trajectory.csv"), dir / (name + "_timing.csv"),
            dir / (name + "_summary.txt")};
  }
};

inline void emit_outputs(const SimResult & result, const OutputPaths & paths)
{
  const auto open = [](const std::filesystem::path & p) {
    if (p.has_parent_path()) {
      std::filesystem::create_directories(p.parent_path());
    }
    std::ofstream out(p);
    if (!out) {
      throw std::runtime_error("emit_outputs: cannot write " + p.string());
    }
    return out;
  };

  {
    std::ofstream out = open(paths.trajectory_csv);
    out << "t,s,y,psi,Vx,Vy,omega,delta,tau,u1,u2,min_obs_dist\n";
    for (const auto & r : result.log.plant) {
      const double d = r.obstacle_distances.empty()
        ? std::numeric_limits<double>::infinity()
        : r.min_obstacle_distance();
      out << detail::csv_double(r.t) << ',' << detail::csv_double(r.x.s) << ','
          << detail::csv_double(r.x.y) << ',' << detail::csv_double(r.x.psi) << ','
          << detail::csv_double(r.x.Vx) << ',' << detail::csv_double(r.x.Vy) << ','
          << detail::csv_double(r.x.omega) << ',' << detail::csv_double(r.x.delta) << ','
          << detail::csv_double(r.x.tau) << ',' << detail::csv_double(r.u.u1) << ','
          << detail::csv_double(r.u.u2) << ',' << detail::csv_double(d) << '\n';
    }
  }
  {
    std::ofstream out = open(paths.timing_csv);
    out << "cycle,t,solve_ms,best_cost,n_gen\n";
    for (const auto & c : result.log.cycles) {
      out << c.cycle << ',' << detail::csv_double(c.t) << ',' << detail::csv_double(c.solve_ms)
          << ',' << detail::csv_double(c.best_cost) << ',' << c.n_gen << '\n';
    }
  }
  {
    std::ofstream out = open(paths.summary_txt);
    if (result.log.plant.empty()) {
      out << "status no data\n";
      return;
    }
    out << "status " << (result.success() ? "ok" : "failed") << "\n";
    out << "collision " << (result.collision ? 1 : 0) << "\n";
    out << "bound_violation " << (result.bound_violation ? 1 : 0) << "\n";
    out << "aborted " << (result.aborted ? 1 : 0) << "\n";
    if (result.aborted) {
      out << "abort_reason " << result.abort_reason << "\n";
    }
    out << "sim_time " << result.sim_time << "\n";
    out << "distance_traveled " << result.distance_traveled << "\n";
    out << "average_speed " << result.average_speed() << "\n";
    out << "max_abs_y " << result.max_abs_y() << "\n";
    out << "min_obstacle_distance " << result.min_obstacle_distance() << "\n";
    out << "plant_steps " << result.log.plant.size() << "\n";
    out << "cycles " << result.log.cycles.size() << "\n";
    out << "mean_solve_ms " << result.mean_solve_ms() << "\n";
    out << "p95_solve_ms " << result.percentile_solve_ms(0.95) << "\n";
    out << "max_solve_ms " << result.max_solve_ms() << "\n";
    out << "vx_clamp_events " << result.vx_clamp_events << "\n";
  }
}

}  // namespace gaplan

#endif  // GAPLAN_SIM_HPP_
