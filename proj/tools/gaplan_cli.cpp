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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaplan/road_map.hpp"
#include "gaplan/scenario.hpp"
#include "gaplan/sim.hpp"

namespace
{

std::string cpu_descriptor()
{
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        return line.substr(colon + 2);
      }
    }
  }
  return "unknown";
}

gaplan::ScenarioConfig load_with_flags(
  const std::string & path, const std::vector<std::string> & overrides,
  const std::optional<std::uint64_t> & seed)
{
  std::vector<std::string> all = overrides;
  if (seed) {
    all.push_back("run.seed=" + std::to_string(*seed));
  }
  return gaplan::load_scenario(path, all);
}

void print_summary(const gaplan::SimResult & result)
{
  std::cout << "status: " << (result.success() ? "ok" : "failed") << "\n"
            << "  sim_time " << result.sim_time << " s, distance " << result.distance_traveled
            << " m, avg speed " << result.average_speed() << " m/s\n"
            << "  max |y| " << result.max_abs_y() << " m, min obstacle distance "
            << result.min_obstacle_distance() << " m\n"
            << "  collision " << result.collision << ", bound violation "
            << result.bound_violation << ", aborted " << result.aborted << "\n"
            << "  cycles " << result.log.cycles.size() << ", mean solve "
            << result.mean_solve_ms() << " ms, p95 " << result.percentile_solve_ms(0.95)
            << " ms\n";
  if (result.aborted) {
    std::cout << "  abort reason: " << result.abort_reason << "\n";
  }
}

int cmd_run(
  const std::string & scenario, const std::vector<std::string> & overrides,
  const std::optional<std::uint64_t> & seed, const std::string & out_dir)
{
  const gaplan::ScenarioConfig cfg = load_with_flags(scenario, overrides, seed);
  const gaplan::SimResult result = gaplan::run_scenario(cfg);
  gaplan::emit_outputs(result, gaplan::OutputPaths::in_dir(out_dir, cfg.run.name));
  print_summary(result);
  return result.exit_code();
}

int cmd_fit_map(
  const std::string & points_file, double ds_flag, const std::string & out_file, bool cyclic_flag,
  bool open_flag)
{
  const gaplan::WaypointFile wf = gaplan::load_waypoints(points_file);
  const double ds = ds_flag > 0.0 ? ds_flag : wf.ds.value_or(4.0);
  gaplan::FitOptions opts;
  if (cyclic_flag) {
    opts.closed = true;
  } else if (open_flag) {
    opts.closed = false;
  } else {
    opts.closed = (wf.points.front() - wf.points.back()).norm() < 1.0;
  }
  const gaplan::RoadMap map = gaplan::build_road_map(wf.points, ds, opts);
  const double max_dist = gaplan::max_point_to_curve_distance(map, wf.points);
  std::cout << "points " << wf.points.size() << "\n"
            << "control_points " << (map.segments.size() + (map.cyclic ? 0 : 1)) << "\n"
            << "segments " << map.segments.size() << "\n"
            << "cyclic " << map.cyclic << "\n"
            << "length " << map.total_length << " m\n"
            << "max_distance " << max_dist << " m\n";
  if (!out_file.empty()) {
    gaplan::save_map(map, out_file);
    std::cout << "written " << out_file << "\n";
  }
  return 0;
}

int cmd_solve_once(
  const std::string & scenario, const std::vector<std::string> & overrides,
  const std::optional<std::uint64_t> & seed, const std::string & out_dir)
{
  const gaplan::ScenarioConfig cfg = load_with_flags(scenario, overrides, seed);
  gaplan::VehicleState x;
  x.s = cfg.run.s0;
  x.y = cfg.run.y0;
  x.psi = cfg.run.psi0.value_or(gaplan::road_pose(cfg.map, cfg.run.s0).theta_c);
  x.Vx = cfg.run.v0.value_or(cfg.horizon.v_ref.at(cfg.run.s0));

  gaplan::MpcReplanner planner(cfg, cfg.map);
  const auto res = planner.step(x, cfg.obstacles);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path hist_path =
    std::filesystem::path(out_dir) / (cfg.run.name + "_fitness.csv");
  std::ofstream hist(hist_path);
  hist << "generation,best_cost,mean_cost\n";
  for (std::size_t g = 0; g < res.solution.fitness_history.size(); ++g) {
    hist << g << ',' << 1.0 / res.solution.fitness_history[g] << ','
         << res.solution.mean_cost_history[g] << '\n';
  }
  std::cout << "best_cost " << res.solution.best_cost << "\n"
            << "applied_u1 " << res.applied.u1 << "\n"
            << "applied_u2 " << res.applied.u2 << "\n"
            << "genes " << res.solution.best.a1 << ' ' << res.solution.best.b1 << ' '
            << res.solution.best.a2 << ' ' << res.solution.best.b2 << "\n"
            << "solve_ms " << res.solve_ms << "\n"
            << "history " << hist_path.string() << "\n";
  return 0;
}

int cmd_bench(
  const std::string & scenario, const std::vector<std::string> & overrides,
  const std::optional<std::uint64_t> & seed, const std::string & out_dir, int cycles)
{
  gaplan::ScenarioConfig cfg = load_with_flags(scenario, overrides, seed);
  cfg.run.laps.reset();
  cfg.run.duration = cycles * cfg.run.control_period;
  const gaplan::SimResult result = gaplan::run_scenario(cfg);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path report_path =
    std::filesystem::path(out_dir) / (cfg.run.name + "_bench.txt");
  std::ofstream report(report_path);
  report << "machine " << cpu_descriptor() << "\n"
         << "cycles " << result.log.cycles.size() << "\n"
         << "n_pop " << cfg.ga.n_pop << "\n"
         << "n_gen " << cfg.ga.n_gen << "\n"
         << "mean_solve_ms " << result.mean_solve_ms() << "\n"
         << "p95_solve_ms " << result.percentile_solve_ms(0.95) << "\n"
         << "max_solve_ms " << result.max_solve_ms() << "\n";

  std::cout << "machine: " << cpu_descriptor() << "\n"
            << "cycles " << result.log.cycles.size() << ", mean " << result.mean_solve_ms()
            << " ms, p95 " << result.percentile_solve_ms(0.95) << " ms, max "
            << result.max_solve_ms() << " ms\n"
            << "report " << report_path.string() << "\n";
  return result.aborted ? 1 : 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"NMPC trajectory planner with a genetic-algorithm solver"};
  app.require_subcommand(1);

  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  app.add_option("--override", overrides, "Config override, section.key=value")
    ->take_all()
    ->expected(-1);
  app.add_option("--seed", seed, "Override the run seed");
  app.add_option("--out-dir", out_dir, "Directory for output files");

  std::string scenario_path;
  auto * run = app.add_subcommand("run", "Closed-loop simulation of a scenario");
  run->fallthrough();
  run->add_option("scenario", scenario_path, "Scenario file")->required();

  std::string points_path;
  std::string map_out;
  double ds = 0.0;
  bool cyclic = false;
  bool open = false;
  auto * fit = app.add_subcommand("fit-map", "Fit a road map from waypoints");
  fit->fallthrough();
  fit->add_option("points", points_path, "Waypoint file, one 'X Y' per line")->required();
  fit->add_option("--ds", ds, "Resampling distance in m (default: file header or 4)");
  fit->add_option("--out", map_out, "Write the fitted map to this file");
  fit->add_flag("--cyclic", cyclic, "Force a closed map");
  fit->add_flag("--open", open, "Force an open map");

  auto * once = app.add_subcommand("solve-once", "Single GA solve with fitness-history dump");
  once->fallthrough();
  once->add_option("scenario", scenario_path, "Scenario file")->required();

  int cycles = 500;
  auto * bench = app.add_subcommand("bench", "Timing statistics over repeated planner cycles");
  bench->fallthrough();
  bench->add_option("scenario", scenario_path, "Scenario file")->required();
  bench->add_option("--cycles", cycles, "Number of planner cycles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(run)) {
      return cmd_run(scenario_path, overrides, seed, out_dir);
    }
    if (app.got_subcommand(fit)) {
      return cmd_fit_map(points_path, ds, map_out, cyclic, open);
    }
    if (app.got_subcommand(once)) {
      return cmd_solve_once(scenario_path, overrides, seed, out_dir);
    }
    if (app.got_subcommand(bench)) {
      return cmd_bench(scenario_path, overrides, seed, out_dir, cycles);
    }
  } catch (const gaplan::ConfigError & e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
