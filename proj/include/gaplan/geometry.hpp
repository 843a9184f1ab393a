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

#ifndef GAPLAN_GEOMETRY_HPP_
#define GAPLAN_GEOMETRY_HPP_

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace gaplan
{

using Vec2 = Eigen::Vector2d;

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a)
{
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) {
    a += two_pi;
  } else if (a > std::numbers::pi) {
    a -= two_pi;
  }
  return a;
}

inline Vec2 rotate(const Vec2 & v, double angle)
{
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

/// 90-degree counterclockwise rotation.
inline Vec2 perp(const Vec2 & v) { return {-v.y(), v.x()}; }

}  // namespace gaplan

#endif  // GAPLAN_GEOMETRY_HPP_
