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

#ifndef GAPLAN_VEHICLE_HPP_
#define GAPLAN_VEHICLE_HPP_

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "gaplan/geometry.hpp"
#include "gaplan/road_map.hpp"

namespace gaplan
{

// State in curvilinear road coordinates: traveled distance s, lateral offset
// y, absolute heading psi, body-frame velocities, yaw rate, and the two
// actuation states (front steering angle, rear-axle torque).
struct VehicleState
{
  double s = 0.0;      // m
  double y = 0.0;      // m
  double psi = 0.0;    // rad
  double Vx = 0.0;     // m/s
  double Vy = 0.0;     // m/s
  double omega = 0.0;  // rad/s
  double delta = 0.0;  // rad
  double tau = 0.0;    // N*m
};

struct ControlInput
{
  double u1 = 0.0;  // steering rate, rad/s
  double u2 = 0.0;  // torque rate, N*m/s
};

struct VehicleParams
{
  double M = 1200.0;     // kg
  double J = 1500.0;     // kg*m^2
  double l_f = 1.0;      // m, CoG to front axle
  double l_r = 1.4;      // m, CoG to rear axle
  double R_r = 0.3;      // m, wheel radius
  double c_aero = 0.4;   // N*s^2/m^2
  double pacejka_b = 10.0;
  double pacejka_c = 1.9;
  double pacejka_e = 0.97;
  double mu = 0.7;       // friction coefficient, scales peak force
  double eps0 = 0.1;     // m/s, slip regularization floor
  double g = 9.81;
};

/// Magic Formula lateral force of one wheel. Peak force is the friction
/// coefficient times the static per-wheel load Mg/4.
inline double pacejka_lateral(double alpha, const VehicleParams & p)
{
  const double peak = p.mu * p.M * p.g / 4.0;
  const double ba = p.pacejka_b * alpha;
  return -peak * std::sin(p.pacejka_c * std::atan(ba + p.pacejka_e * (std::atan(ba) - ba)));
}

/// Front and rear slip angles with the exponential regularizer that keeps the
/// denominator finite at standstill.
inline std::pair<double, double> slip_angles(const VehicleState & x, const VehicleParams & p)
{
  const double eps = p.eps0 * std::exp(-x.Vx);
  const double inv = 1.0 / (x.Vx + eps);
  const double alpha_f = (x.Vy + p.l_f * x.omega) * inv - x.delta;
  const double alpha_r = (x.Vy - p.l_r * x.omega) * inv;
  return {alpha_f, alpha_r};
}

/// Right-hand side of the single-track model in curvilinear coordinates.
/// Forces carry a factor 2 (two wheels per axle).
inline VehicleState state_derivative(
  const VehicleState & x, const ControlInput & u, const RoadPose & pose, const VehicleParams & p)
{
  const double denom = 1.0 - pose.theta_c_prime * x.y;
  if (std::abs(denom) < 1e-6) {
    throw std::runtime_error(
      "state_derivative: curvature singularity at s=" + std::to_string(x.s) +
      " y=" + std::to_string(x.y));
  }

  const double cos_t = std::cos(pose.theta_c);
  const double sin_t = std::sin(pose.theta_c);
  const double cos_p = std::cos(x.psi);
  const double sin_p = std::sin(x.psi);
  const double vx_g = x.Vx * cos_p - x.Vy * sin_p;
  const double vy_g = x.Vx * sin_p + x.Vy * cos_p;

  const auto [alpha_f, alpha_r] = slip_angles(x, p);
  const double f_fc = pacejka_lateral(alpha_f, p);
  const double f_rc = pacejka_lateral(alpha_r, p);
  const double f_rl = x.tau / p.R_r;
  const double f_aero = p.c_aero * x.Vx * x.Vx;
  const double cos_d = std::cos(x.delta);
  const double sin_d = std::sin(x.delta);

  VehicleState d;
  d.s = (cos_t * vx_g + sin_t * vy_g) / denom;
  d.y = -sin_t * vx_g + cos_t * vy_g;
  d.psi = x.omega;
  d.Vx = x.omega * x.Vy + 2.0 * f_rl / p.M - 2.0 * f_fc * sin_d / p.M - f_aero / p.M;
  d.Vy = -x.omega * x.Vx + 2.0 * f_rc / p.M + 2.0 * f_fc * cos_d / p.M;
  d.omega = 2.0 / p.J * (-f_rc * p.l_r + f_fc * p.l_f * cos_d);
  d.delta = u.u1;
  d.tau = u.u2;
  return d;
}

namespace detail
{
inline VehicleState add_scaled(const VehicleState & x, const VehicleState & d, double h)
{
  VehicleState r;
  r.s = x.s + h * d.s;
  r.y = x.y + h * d.y;
  r.psi = x.psi + h * d.psi;
  r.Vx = x.Vx + h * d.Vx;
  r.Vy = x.Vy + h * d.Vy;
  r.omega = x.omega + h * d.omega;
  r.delta = x.delta + h * d.delta;
  r.tau = x.tau + h * d.tau;
  return r;
}
}  // namespace detail

/// Planner-side integration: explicit Euler substeps under constant input,
/// with the road pose refreshed at every substep.
inline VehicleState integrate_planner_step(
  const VehicleState & x0, const ControlInput & u, const RoadMap & map, const VehicleParams & p,
  double dt_state, int n_substeps)
{
  if (!(dt_state > 0.0)) {
    throw std::invalid_argument("integrate_planner_step: dt_state must be positive");
  }
  VehicleState x = x0;
  for (int i = 0; i < n_substeps; ++i) {
    const RoadPose pose = road_pose(map, x.s);
    x = detail::add_scaled(x, state_derivative(x, u, pose, p), dt_state);
    x.psi = normalize_angle(x.psi);
  }
  return x;
}

/// Plant-side integration: one classical RK4 step.
inline VehicleState integrate_plant_step(
  const VehicleState & x, const ControlInput & u, const RoadMap & map, const VehicleParams & p,
  double dt_plant)
{
  if (!(dt_plant > 0.0)) {
    throw std::invalid_argument("integrate_plant_step: dt_plant must be positive");
  }
  const auto f = [&](const VehicleState & xs) {
    return state_derivative(xs, u, road_pose(map, xs.s), p);
  };
  const VehicleState k1 = f(x);
  const VehicleState k2 = f(detail::add_scaled(x, k1, dt_plant / 2.0));
  const VehicleState k3 = f(detail::add_scaled(x, k2, dt_plant / 2.0));
  const VehicleState k4 = f(detail::add_scaled(x, k3, dt_plant));

  VehicleState out = x;
  out.s += dt_plant / 6.0 * (k1.s + 2 * k2.s + 2 * k3.s + k4.s);
  out.y += dt_plant / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
  out.psi += dt_plant / 6.0 * (k1.psi + 2 * k2.psi + 2 * k3.psi + k4.psi);
  out.Vx += dt_plant / 6.0 * (k1.Vx + 2 * k2.Vx + 2 * k3.Vx + k4.Vx);
  out.Vy += dt_plant / 6.0 * (k1.Vy + 2 * k2.Vy + 2 * k3.Vy + k4.Vy);
  out.omega += dt_plant / 6.0 * (k1.omega + 2 * k2.omega + 2 * k3.omega + k4.omega);
  out.delta += dt_plant / 6.0 * (k1.delta + 2 * k2.delta + 2 * k3.delta + k4.delta);
  out.tau += dt_plant / 6.0 * (k1.tau + 2 * k2.tau + 2 * k3.tau + k4.tau);
  out.psi = normalize_angle(out.psi);
  return out;
}

inline bool state_is_finite(const VehicleState & x)
{
  return std::isfinite(x.s) && std::isfinite(x.y) && std::isfinite(x.psi) &&
         std::isfinite(x.Vx) && std::isfinite(x.Vy) && std::isfinite(x.omega) &&
         std::isfinite(x.delta) && std::isfinite(x.tau);
}

}  // namespace gaplan

#endif  // GAPLAN_VEHICLE_HPP_
