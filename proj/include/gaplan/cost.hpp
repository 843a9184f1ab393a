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

#ifndef GAPLAN_COST_HPP_
#define GAPLAN_COST_HPP_

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "gaplan/obstacles.hpp"
#include "gaplan/road_map.hpp"
#include "gaplan/vehicle.hpp"

namespace gaplan
{

// Stage-cost weights, input weights, penalty coefficients and the obstacle
// regularizer. Index names follow the stage-cost term order (w1 and w3 are
// unused by the formulation).
//
// The defaults were tuned in closed loop on the benchmark turns: speed
// tracking is kept weak and braking cheap so that slowing down always prices
// below running wide, and lateral margins come from the soft y-wall rather
// than a heavy centerline pull (which would make obstacle detours as
// expensive as full stops).
struct Weights
{
  double w2 = 2.0;     // y^2
  double w4 = 0.4;     // (Vx - v_ref)^2
  double w5 = 0.5;     // Vy^2
  double w6 = 0.2;     // omega^2
  double w7 = 0.2;     // delta^2
  double w8 = 1e-7;    // tau^2
  double s1 = 0.5;     // u1^2
  double s2 = 1e-8;    // u2^2
  double p_yl = 16.0;
  double p_yh = 16.0;
  double p_delta_l = 20.0;
  double p_delta_h = 20.0;
  double p_tau_l = 0.005;
  double p_tau_h = 0.005;
  double p_u1_l = 10.0;
  double p_u1_h = 10.0;
  double p_u2_l = 0.002;
  double p_u2_h = 0.002;
  double p_obs = 2.0;
  double eps_obs = 0.01;  // m
};

struct Bounds
{
  double y_low = -1.75;
  double y_high = 1.75;
  double delta_low = -0.6;
  double delta_high = 0.6;
  double tau_low = -2000.0;
  double tau_high = 2000.0;
  double u1_low = -0.5;
  double u1_high = 0.5;
  double u2_low = -5000.0;
  double u2_high = 5000.0;
};

/// Reference speed, constant or interpolated over s breakpoints.
struct SpeedRef
{
  double base = 8.0;
  std::vector<std::pair<double, double>> profile;  // (s, v), sorted by s

  double at(double s) const
  {
    if (profile.empty()) {
      return base;
    }
    if (s <= profile.front().first) {
      return profile.front().second;
    }
    if (s >= profile.back().first) {
      return profile.back().second;
    }
    for (std::size_t i = 1; i < profile.size(); ++i) {
      if (s <= profile[i].first) {
        const auto & [s0, v0] = profile[i - 1];
        const auto & [s1, v1] = profile[i];
        return v0 + (v1 - v0) * (s - s0) / (s1 - s0);
      }
    }
    return profile.back().second;
  }
};

struct HorizonSpec
{
  int n = 20;             // steps
  double dt = 0.12;       // s, horizon discretization
  double dt_state = 0.06; // s, rollout substep
  SpeedRef v_ref;

  int substeps() const
  {
    const int k = static_cast<int>(std::lround(dt / dt_state));
    if (k < 1 || std::abs(k * dt_state - dt) > 1e-9) {
      throw std::invalid_argument("HorizonSpec: dt must be an integer multiple of dt_state");
    }
    return k;
  }
};

inline double stage_state_cost(const VehicleState & x, double v_ref, const Weights & w)
{
  const double dv = x.Vx - v_ref;
  return w.w2 * x.y * x.y + w.w4 * dv * dv + w.w5 * x.Vy * x.Vy + w.w6 * x.omega * x.omega +
         w.w7 * x.delta * x.delta + w.w8 * x.tau * x.tau;
}

inline double input_cost(const ControlInput & u, const Weights & w)
{
  return w.s1 * u.u1 * u.u1 + w.s2 * u.u2 * u.u2;
}

/// The ten state/input slacks in declaration order; positive means satisfied.
inline std::array<double, 10> state_input_slacks(
  const VehicleState & x, const ControlInput & u, const Bounds & b)
{
  return {
    x.y - b.y_low,     b.y_high - x.y,     x.delta - b.delta_low, b.delta_high - x.delta,
    x.tau - b.tau_low, b.tau_high - x.tau, u.u1 - b.u1_low,       b.u1_high - u.u1,
    u.u2 - b.u2_low,   b.u2_high - u.u2};
}

/// Full slack vector: ten state/input slacks followed by one entry per
/// obstacle (its relative distance).
inline std::vector<double> slack_values(
  const VehicleState & x, const ControlInput & u, const Bounds & b,
  std::span<const double> distances)
{
  const auto su = state_input_slacks(x, u, b);
  std::vector<double> z(su.begin(), su.end());
  z.insert(z.end(), distances.begin(), distances.end());
  return z;
}

inline double obstacle_penalty(std::span<const double> distances, double p_obs, double eps_obs)
{
  double sum = 0.0;
  for (double d : distances) {
    sum += p_obs / (d + eps_obs);
  }
  return sum;
}

namespace detail
{
// exp argument cap keeps wildly infeasible rollouts finite and rankable.
inline double penalty_exp(double arg) { return std::exp(std::min(arg, 500.0)); }

inline std::array<double, 10> penalty_coefficients(const Weights & w)
{
  return {w.p_yl,    w.p_yh,    w.p_delta_l, w.p_delta_h, w.p_tau_l,
          w.p_tau_h, w.p_u1_l,  w.p_u1_h,    w.p_u2_l,    w.p_u2_h};
}
}  // namespace detail

/// Exponential penalties over the ten state/input slacks plus the reciprocal
/// obstacle terms.
inline double constraint_penalty(
  const VehicleState & x, const ControlInput & u, const Bounds & b,
  std::span<const double> distances, const Weights & w)
{
  const auto z = state_input_slacks(x, u, b);
  const auto p = detail::penalty_coefficients(w);
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    sum += detail::penalty_exp(1.0 - p[i] * z[i]);
  }
  return sum + obstacle_penalty(distances, w.p_obs, w.eps_obs);
}

/// Terminal-step penalty: state slacks and obstacle terms only (there is no
/// terminal input).
inline double terminal_constraint_penalty(
  const VehicleState & x, const Bounds & b, std::span<const double> distances, const Weights & w)
{
  const std::array<double, 6> z = {x.y - b.y_low,         b.y_high - x.y,
                                   x.delta - b.delta_low, b.delta_high - x.delta,
                                   x.tau - b.tau_low,     b.tau_high - x.tau};
  const std::array<double, 6> p = {w.p_yl, w.p_yh, w.p_delta_l, w.p_delta_h, w.p_tau_l, w.p_tau_h};
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    sum += detail::penalty_exp(1.0 - p[i] * z[i]);
  }
  return sum + obstacle_penalty(distances, w.p_obs, w.eps_obs);
}

inline EllipsePose ego_ellipse(
  const VehicleState & x, double theta_c, double semi_major, double semi_minor)
{
  EllipsePose e;
  e.center = {x.s, x.y};
  e.heading = normalize_angle(x.psi - theta_c);
  e.semi_major = semi_major;
  e.semi_minor = semi_minor;
  return e;
}

// Everything a horizon evaluation needs; obstacle poses are extrapolated once
// per problem, not per candidate. This is the GA's hot path.
struct CostContext
{
  const RoadMap * map = nullptr;
  VehicleParams params;
  Weights weights;
  Bounds bounds;
  HorizonSpec horizon;
  double ego_semi_major = 2.0;
  double ego_semi_minor = 0.95;
  double sentinel = 1e12;  // infeasible-rollout cost
  std::vector<std::vector<EllipsePose>> predicted;  // [k in 0..N][obstacle]

  int substeps = 1;
  std::size_t max_distances = 0;
};

inline CostContext make_cost_context(
  const RoadMap & map, const VehicleParams & params, const Weights & weights,
  const Bounds & bounds, const HorizonSpec & horizon, std::span<const Obstacle> obstacles,
  double ego_semi_major = 2.0, double ego_semi_minor = 0.95)
{
  CostContext ctx;
  ctx.map = &map;
  ctx.params = params;
  ctx.weights = weights;
  ctx.bounds = bounds;
  ctx.horizon = horizon;
  ctx.ego_semi_major = ego_semi_major;
  ctx.ego_semi_minor = ego_semi_minor;
  ctx.substeps = horizon.substeps();
  ctx.max_distances = obstacles.size();
  ctx.predicted.resize(horizon.n + 1);
  for (int k = 0; k <= horizon.n; ++k) {
    ctx.predicted[k].reserve(obstacles.size());
    for (const Obstacle & o : obstacles) {
      ctx.predicted[k].push_back(predict_obstacle(o, k, horizon.dt));
    }
  }
  return ctx;
}

namespace detail
{
inline void stage_distances(
  const CostContext & ctx, const VehicleState & x, double theta_c, int k,
  std::vector<double> & out)
{
  out.clear();
  const EllipsePose ego = ego_ellipse(x, theta_c, ctx.ego_semi_major, ctx.ego_semi_minor);
  for (const EllipsePose & obs : ctx.predicted[k]) {
    out.push_back(relative_distance(ego, obs));
  }
}
}  // namespace detail

/// Rolls the candidate input sequence forward and accumulates the discretized
/// objective. Rollouts that hit the curvature singularity or leave the finite
/// range return the sentinel cost instead of throwing.
inline double total_cost(
  const VehicleState & x0, std::span<const ControlInput> inputs, const CostContext & ctx)
{
  const int n = ctx.horizon.n;
  if (static_cast<int>(inputs.size()) != n) {
    throw std::invalid_argument("total_cost: input sequence length != horizon steps");
  }
  const double dt = ctx.horizon.dt;
  VehicleState x = x0;
  double cost = 0.0;
  std::vector<double> dists;
  dists.reserve(ctx.max_distances);
  try {
    for (int k = 0; k < n; ++k) {
      if (!state_is_finite(x)) {
        return ctx.sentinel;
      }
      const RoadPose pose = road_pose(*ctx.map, x.s);
      detail::stage_distances(ctx, x, pose.theta_c, k, dists);
      cost += 0.5 * stage_state_cost(x, ctx.horizon.v_ref.at(x.s), ctx.weights) * dt;
      cost += 0.5 * input_cost(inputs[k], ctx.weights) * dt;
      cost += constraint_penalty(x, inputs[k], ctx.bounds, dists, ctx.weights) * dt;
      x = integrate_planner_step(x, inputs[k], *ctx.map, ctx.params, ctx.horizon.dt_state,
                                 ctx.substeps);
    }
    if (!state_is_finite(x)) {
      return ctx.sentinel;
    }
    const RoadPose pose = road_pose(*ctx.map, x.s);
    detail::stage_distances(ctx, x, pose.theta_c, n, dists);
    cost += 0.5 * stage_state_cost(x, ctx.horizon.v_ref.at(x.s), ctx.weights) * dt;
    cost += terminal_constraint_penalty(x, ctx.bounds, dists, ctx.weights) * dt;
  } catch (const std::exception &) {
    return ctx.sentinel;  // curvature singularity or off-map rollout
  }
  return std::isfinite(cost) ? cost : ctx.sentinel;
}

/// Convenience overload that assembles the context on the fly.
inline double total_cost(
  const VehicleState & x0, std::span<const ControlInput> inputs, const RoadMap & map,
  std::span<const Obstacle> obstacles, const VehicleParams & params, const Weights & weights,
  const Bounds & bounds, const HorizonSpec & horizon)
{
  return total_cost(x0, inputs, make_cost_context(map, params, weights, bounds, horizon,
                                                  obstacles));
}

}  // namespace gaplan

#endif  // GAPLAN_COST_HPP_
