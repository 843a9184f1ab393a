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

#ifndef GAPLAN_TRACKS_HPP_
#define GAPLAN_TRACKS_HPP_

#include <cmath>
#include <numbers>
#include <vector>

#include "gaplan/geometry.hpp"

namespace gaplan::tracks
{

inline std::vector<Vec2> straight(double length, double spacing = 0.5)
{
  std::vector<Vec2> pts;
  const int n = static_cast<int>(std::ceil(length / spacing));
  for (int i = 0; i <= n; ++i) {
    pts.emplace_back(std::min(i * spacing, length), 0.0);
  }
  return pts;
}

/// Full circle, counterclockwise, starting at angle 0; last point closes the
/// loop onto the first.
inline std::vector<Vec2> circle(double radius, double spacing = 0.5)
{
  std::vector<Vec2> pts;
  const double circumference = 2.0 * std::numbers::pi * radius;
  const int n = static_cast<int>(std::ceil(circumference / spacing));
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    pts.emplace_back(radius * std::cos(a), radius * std::sin(a));
  }
  pts.push_back(pts.front());
  return pts;
}

namespace detail
{
struct Turtle
{
  Vec2 pos{0.0, 0.0};
  double heading = 0.0;
  double spacing = 0.5;
  std::vector<Vec2> pts;

  void start() { pts.push_back(pos); }

  void line(double length)
  {
    const Vec2 dir{std::cos(heading), std::sin(heading)};
    const int n = static_cast<int>(std::ceil(length / spacing));
    for (int i = 1; i <= n; ++i) {
      pts.push_back(pos + dir * std::min(i * spacing, length));
    }
    pos += dir * length;
  }

  /// Left turn through `angle` with a trapezoidal curvature profile: linear
  /// ramps of length `transition` on both sides of a constant-curvature core,
  /// like a driven path rather than a hard line-arc junction.
  void turn_left(double radius, double angle, double transition)
  {
    const double kappa = 1.0 / radius;
    double core = angle * radius - transition;  // heading integral = angle
    if (core < 0.0) {
      transition = angle * radius;
      core = 0.0;
    }
    const double total = core + 2.0 * transition;
    const auto curvature_at = [&](double sigma) {
      if (sigma < transition) {
        return kappa * sigma / transition;
      }
      if (sigma < transition + core) {
        return kappa;
      }
      return kappa * (total - sigma) / transition;
    };
    const double fine = 0.02;
    double walked = 0.0;
    double next_emit = spacing;
    double sigma = 0.0;
    while (sigma < total - 1e-12) {
      const double step = std::min(fine, total - sigma);
      const double k_mid = curvature_at(sigma + step / 2.0);
      const double h_mid = heading + k_mid * step / 2.0;
      pos += step * Vec2{std::cos(h_mid), std::sin(h_mid)};
      heading += k_mid * step;
      sigma += step;
      walked += step;
      if (walked >= next_emit - 1e-9) {
        pts.push_back(pos);
        next_emit += spacing;
      }
    }
    if ((pts.back() - pos).norm() > 1e-9) {
      pts.push_back(pos);
    }
  }
};
}  // namespace detail

/// Two straights joined by two semicircular turns; closed loop.
inline std::vector<Vec2> oval(double radius, double straight_length, double spacing = 0.5)
{
  detail::Turtle t;
  t.spacing = spacing;
  t.start();
  t.line(straight_length);
  t.turn_left(radius, std::numbers::pi, 3.0);
  t.line(straight_length);
  t.turn_left(radius, std::numbers::pi, 3.0);
  t.pts.back() = t.pts.front();
  return t.pts;
}

/// Campus-style closed lap: four straights and four 90-degree turns with
/// radii 9.2 m (turns 1 and 3) and 5.3 m (turns 2 and 4); roughly 450 m.
/// Turn 1 begins at s ~ 150 m, turn 2 at s ~ 218 m.
inline std::vector<Vec2> campus(double spacing = 0.5)
{
  const double long_side = 150.0;
  const double short_side = 52.0;
  const double r1 = 9.2;
  const double r2 = 5.3;
  const double transition = 4.0;
  detail::Turtle t;
  t.spacing = spacing;
  t.start();
  t.line(long_side);
  t.turn_left(r1, std::numbers::pi / 2.0, transition);
  t.line(short_side);
  t.turn_left(r2, std::numbers::pi / 2.0, transition);
  t.line(long_side);
  t.turn_left(r1, std::numbers::pi / 2.0, transition);
  t.line(short_side);
  t.turn_left(r2, std::numbers::pi / 2.0, transition);
  t.pts.back() = t.pts.front();
  return t.pts;
}

}  // namespace gaplan::tracks

#endif  // GAPLAN_TRACKS_HPP_
