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

#ifndef GAPLAN_OBSTACLES_HPP_
#define GAPLAN_OBSTACLES_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "gaplan/geometry.hpp"

namespace gaplan
{

// Obstacle in the curvilinear frame, moving at constant velocity.
struct Obstacle
{
  double s_obs = 0.0;
  double y_obs = 0.0;
  double theta_obs = 0.0;
  double v_s = 0.0;
  double v_y = 0.0;
  double semi_major = 2.0;  // a >= b > 0
  double semi_minor = 1.0;
};

struct EllipsePose
{
  Vec2 center{0.0, 0.0};  // (s, y)
  double heading = 0.0;
  double semi_major = 1.0;
  double semi_minor = 1.0;
};

/// Constant-velocity extrapolation of an obstacle to step k.
inline EllipsePose predict_obstacle(const Obstacle & o, int k, double dt)
{
  if (k < 0) {
    throw std::invalid_argument("predict_obstacle: negative step index");
  }
  EllipsePose e;
  e.center = {o.s_obs + o.v_s * k * dt, o.y_obs + o.v_y * k * dt};
  e.heading = o.theta_obs;
  e.semi_major = o.semi_major;
  e.semi_minor = o.semi_minor;
  return e;
}

namespace detail
{
/// Parameter interval [t_lo, t_hi] where the line origin + t*dir is inside
/// the ellipse; empty when the line misses it.
inline std::optional<std::pair<double, double>> ellipse_line_interval(
  const EllipsePose & e, const Vec2 & origin, const Vec2 & dir)
{
  const Vec2 q = rotate(origin - e.center, -e.heading);
  const Vec2 w = rotate(dir, -e.heading);
  const double inv_a2 = 1.0 / (e.semi_major * e.semi_major);
  const double inv_b2 = 1.0 / (e.semi_minor * e.semi_minor);
  const double qa = w.x() * w.x() * inv_a2 + w.y() * w.y() * inv_b2;
  const double qb = 2.0 * (q.x() * w.x() * inv_a2 + q.y() * w.y() * inv_b2);
  const double qc = q.x() * q.x() * inv_a2 + q.y() * q.y() * inv_b2 - 1.0;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0 || qa <= 0.0) {
    return std::nullopt;
  }
  const double sq = std::sqrt(disc);
  const double t1 = (-qb - sq) / (2.0 * qa);
  const double t2 = (-qb + sq) / (2.0 * qa);
  return std::make_pair(std::min(t1, t2), std::max(t1, t2));
}

/// Radius of the ellipse boundary along a unit direction from its center.
inline double radius_along(const EllipsePose & e, const Vec2 & dir)
{
  const Vec2 w = rotate(dir, -e.heading);
  const double k = (w.x() / e.semi_major) * (w.x() / e.semi_major) +
                   (w.y() / e.semi_minor) * (w.y() / e.semi_minor);
  return 1.0 / std::sqrt(k);
}

/// Semi-axis length of the axis most orthogonal to the center-connecting
/// direction u (i.e. most aligned with the offset normal n).
inline double offset_axis(const EllipsePose & e, const Vec2 & n)
{
  const Vec2 major_dir{std::cos(e.heading), std::sin(e.heading)};
  const Vec2 minor_dir = perp(major_dir);
  return std::abs(major_dir.dot(n)) >= std::abs(minor_dir.dot(n)) ? e.semi_major : e.semi_minor;
}

inline bool ellipse_less(const EllipsePose & a, const EllipsePose & b)
{
  return std::tie(a.center.x(), a.center.y(), a.heading, a.semi_major, a.semi_minor) <
         std::tie(b.center.x(), b.center.y(), b.heading, b.semi_major, b.semi_minor);
}
}  // namespace detail

/// Intersection points of an infinite line with an ellipse (0, 1 or 2).
inline std::vector<Vec2> ellipse_line_intersections(
  const EllipsePose & e, const Vec2 & point, const Vec2 & direction)
{
  if (direction.squaredNorm() < 1e-24) {
    throw std::invalid_argument("ellipse_line_intersections: zero direction");
  }
  std::vector<Vec2> out;
  const auto interval = detail::ellipse_line_interval(e, point, direction);
  if (!interval) {
    return out;
  }
  out.push_back(point + interval->first * direction);
  if (interval->second - interval->first > 1e-12) {
    out.push_back(point + interval->second * direction);
  }
  return out;
}

/// Approximate distance between two ellipses: the center-connecting line plus
/// four parallels offset at 1/3 and 2/3 of the smaller relevant semi-axis,
/// taking the smallest gap between facing intersection points. Returns 0 when
/// the bodies interpenetrate along any of the lines.
inline double relative_distance(const EllipsePose & ego, const EllipsePose & obs)
{
  // Canonical argument order pins the floating-point rounding so that
  // relative_distance(A, B) == relative_distance(B, A) bitwise.
  const bool swap = detail::ellipse_less(obs, ego);
  const EllipsePose & e1 = swap ? obs : ego;
  const EllipsePose & e2 = swap ? ego : obs;

  const Vec2 d = e2.center - e1.center;
  const double dist_centers = d.norm();
  if (dist_centers < 1e-12) {
    return 0.0;
  }
  const Vec2 u = d / dist_centers;
  const Vec2 n = perp(u);

  const double base = std::min(detail::offset_axis(e1, n), detail::offset_axis(e2, n));
  const double offsets[5] = {0.0, base / 3.0, -base / 3.0, 2.0 * base / 3.0, -2.0 * base / 3.0};

  double best = std::numeric_limits<double>::max();
  for (double off : offsets) {
    const Vec2 origin = e1.center + off * n;
    const auto i1 = detail::ellipse_line_interval(e1, origin, u);
    const auto i2 = detail::ellipse_line_interval(e2, origin, u);
    if (!i1 || !i2) {
      continue;
    }
    if (i1->second >= i2->first && i2->second >= i1->first) {
      return 0.0;  // interpenetration along this line
    }
    const double gap =
      i2->first > i1->second ? i2->first - i1->second : i1->first - i2->second;
    best = std::min(best, gap);
  }
  if (best == std::numeric_limits<double>::max()) {
    // All lines missed one body (degenerate thin ellipses): fall back to the
    // center distance minus both center-line semi-diameters.
    best = std::max(
      0.0, dist_centers - detail::radius_along(e1, u) - detail::radius_along(e2, u));
  }
  return best;
}

}  // namespace gaplan

#endif  // GAPLAN_OBSTACLES_HPP_
