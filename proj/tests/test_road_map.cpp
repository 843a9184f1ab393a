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

#include "gaplan/road_map.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include <catch2/catch_amalgamated.hpp>

#include "gaplan/tracks.hpp"

using namespace gaplan;
using Catch::Approx;

namespace
{

HermiteSegment straight_segment(double length)
{
  HermiteSegment seg;
  seg.s_start = 0.0;
  seg.s_end = length;
  seg.p0 = {0.0, 0.0};
  seg.p1 = {length, 0.0};
  seg.d0 = {length, 0.0};
  seg.d1 = {length, 0.0};
  return seg;
}

RoadMap fit_circle(double radius, double ds)
{
  // Raw spacing in the regime of a 200 Hz GPS trace at urban speed.
  return build_road_map(tracks::circle(radius, 0.1), ds, {.closed = true});
}

}  // namespace

TEST_CASE("hermite basis endpoints", "[road_map]")
{
  HermiteSegment seg;
  seg.s_start = 2.0;
  seg.s_end = 5.0;
  seg.p0 = {1.0, -2.0};
  seg.p1 = {4.0, 3.0};
  seg.d0 = {0.5, 2.0};
  seg.d1 = {-1.0, 0.3};
  CHECK(hermite_eval(seg, 2.0) == seg.p0);
  CHECK(hermite_eval(seg, 5.0) == seg.p1);
}

TEST_CASE("hermite midpoint scalar case", "[road_map]")
{
  // p0=0, p1=1, d0=d1=1 at t=0.5: H10 + H01 + H11 = 0.125 + 0.5 - 0.125.
  HermiteSegment seg;
  seg.s_start = 0.0;
  seg.s_end = 1.0;
  seg.p0 = {0.0, 0.0};
  seg.p1 = {1.0, 0.0};
  seg.d0 = {1.0, 0.0};
  seg.d1 = {1.0, 0.0};
  CHECK(hermite_eval(seg, 0.5).x() == Approx(0.5).margin(1e-15));
}

TEST_CASE("hermite rejects out-of-range s", "[road_map]")
{
  const HermiteSegment seg = straight_segment(3.0);
  CHECK_THROWS_AS(hermite_eval(seg, -0.5), std::domain_error);
  CHECK_THROWS_AS(hermite_eval(seg, 3.5), std::domain_error);
  CHECK_THROWS_AS(hermite_derivatives(seg, 4.0), std::domain_error);
  CHECK_THROWS_WITH(hermite_eval(seg, 4.0), Catch::Matchers::ContainsSubstring("segment"));
}

TEST_CASE("hermite partition of unity", "[road_map]")
{
  using namespace hermite;
  for (int i = 0; i <= 1000; ++i) {
    const double t = i / 1000.0;
    CHECK(h00(t) + h01(t) == Approx(1.0).margin(1e-12));
  }
  CHECK(h10(0.0) == 0.0);
  CHECK(h10(1.0) == 0.0);
  CHECK(h11(0.0) == 0.0);
  CHECK(h11(1.0) == 0.0);
}

TEST_CASE("straight segment derivatives", "[road_map]")
{
  const HermiteSegment seg = straight_segment(7.0);
  for (double s : {0.0, 1.3, 3.5, 7.0}) {
    const auto [d1, d2] = hermite_derivatives(seg, s);
    CHECK(d1.x() == Approx(1.0).margin(1e-12));
    CHECK(d1.y() == Approx(0.0).margin(1e-12));
    CHECK(d2.norm() == Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("quarter-circle fit second derivative magnitude", "[road_map]")
{
  // Analytic circle of radius R: |d2p/ds2| = 1/R under arc-length
  // parameterization; the chord-parameterized fit should be close.
  const double radius = 10.0;
  std::vector<Vec2> quarter;
  for (int i = 0; i <= 400; ++i) {
    const double a = 0.5 * std::numbers::pi * i / 400.0;
    quarter.emplace_back(radius * std::cos(a), radius * std::sin(a));
  }
  const RoadMap map = build_road_map(quarter, 2.0, {.closed = false});
  for (double s = 1.0; s < map.total_length - 1.0; s += 0.5) {
    const auto [d1, d2] = hermite_derivatives(segment_at(map, s), s);
    CHECK(d2.norm() == Approx(1.0 / radius).epsilon(0.03));
  }
}

TEST_CASE("road pose on straights", "[road_map]")
{
  const RoadMap along_x = build_road_map(tracks::straight(100.0), 4.0, {});
  const RoadPose px = road_pose(along_x, 37.0);
  CHECK(px.theta_c == Approx(0.0).margin(1e-9));
  CHECK(px.theta_c_prime == Approx(0.0).margin(1e-9));

  std::vector<Vec2> up;
  for (int i = 0; i <= 200; ++i) {
    up.emplace_back(0.0, 0.5 * i);
  }
  const RoadMap along_y = build_road_map(up, 4.0, {});
  CHECK(road_pose(along_y, 37.0).theta_c == Approx(std::numbers::pi / 2).margin(1e-9));
}

TEST_CASE("fitted circle curvature matches the turn radii", "[road_map]")
{
  // The two turn radii of the benchmark track.
  const RoadMap turn1 = fit_circle(9.2, 4.0);
  for (double s = 0.0; s < turn1.total_length; s += 0.1) {
    CHECK(road_pose(turn1, s).theta_c_prime == Approx(1.0 / 9.2).epsilon(0.02));
  }
  const RoadMap turn2 = fit_circle(5.3, 2.0);
  for (double s = 0.0; s < turn2.total_length; s += 0.1) {
    CHECK(road_pose(turn2, s).theta_c_prime == Approx(1.0 / 5.3).epsilon(0.02));
  }
}

TEST_CASE("road pose rejects degenerate tangents", "[road_map]")
{
  RoadMap map;
  HermiteSegment seg;
  seg.s_start = 0.0;
  seg.s_end = 1.0;
  seg.p0 = seg.p1 = {1.0, 1.0};
  seg.d0 = seg.d1 = {0.0, 0.0};
  map.segments.push_back(seg);
  map.total_length = 1.0;
  CHECK_THROWS_AS(road_pose(map, 0.5), std::runtime_error);
}

TEST_CASE("curvilinear to global", "[road_map]")
{
  const RoadMap straight = build_road_map(tracks::straight(100.0), 4.0, {});
  const Vec2 center = curvilinear_to_global(straight, 20.0, 0.0);
  CHECK(center.x() == Approx(20.0).margin(1e-9));
  CHECK(center.y() == Approx(0.0).margin(1e-9));
  const Vec2 left = curvilinear_to_global(straight, 20.0, 1.0);
  CHECK(left.x() == Approx(20.0).margin(1e-9));
  CHECK(left.y() == Approx(1.0).margin(1e-9));

  // Counterclockwise circle: positive y offsets move toward the center.
  const double radius = 10.0;
  const RoadMap circle = fit_circle(radius, 2.0);
  const Vec2 inner = curvilinear_to_global(circle, 13.0, 0.5);
  CHECK(inner.norm() == Approx(radius - 0.5).margin(0.02));
}

TEST_CASE("centerline projection identity", "[road_map]")
{
  const RoadMap map = build_road_map(tracks::campus(), 4.0, {.closed = true});
  for (double s = 0.0; s < map.total_length; s += 7.0) {
    const Vec2 p = hermite_eval(segment_at(map, s), s);
    const Vec2 q = curvilinear_to_global(map, s, 0.0);
    CHECK((p - q).norm() < 1e-6);
  }
}

TEST_CASE("resample counts on a straight line", "[road_map]")
{
  std::vector<Vec2> pts;
  for (int i = 0; i <= 1200; ++i) {
    pts.emplace_back(static_cast<double>(i), 0.0);
  }
  const auto out = resample_waypoints(pts, 4.0);
  REQUIRE(out.size() == 301);
  CHECK(out.front() == Vec2{0.0, 0.0});
  CHECK(out.back().x() == Approx(1200.0));
  for (std::size_t i = 1; i < out.size(); ++i) {
    CHECK((out[i] - out[i - 1]).norm() == Approx(4.0).margin(1e-9));
  }
}

TEST_CASE("resample rejects bad input", "[road_map]")
{
  CHECK_THROWS_AS(resample_waypoints({}, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(resample_waypoints({Vec2{0, 0}}, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(resample_waypoints({Vec2{0, 0}, Vec2{1, 0}}, 0.0), std::invalid_argument);
}

TEST_CASE("resampled circle points stay near the circle", "[road_map]")
{
  const double radius = 10.0;
  const auto raw = tracks::circle(radius, 0.5);
  const auto out = resample_waypoints(raw, 4.0);
  // Points lie on polyline chords; the worst case is the chord sag.
  const double sag = radius * (1.0 - std::cos(0.25 / radius));
  for (const Vec2 & p : out) {
    CHECK(std::abs(p.norm() - radius) <= sag + 1e-9);
  }
}

TEST_CASE("dense lap resamples to roughly the expected point count", "[road_map]")
{
  // A ~465 m lap sampled every few cm collapses to ~116 control points at
  // ds = 4 m.
  const auto raw = tracks::campus(0.05);
  CHECK(raw.size() > 9000);
  const RoadMap map = build_road_map(raw, 4.0, {.closed = true});
  CHECK(map.segments.size() >= 110);
  CHECK(map.segments.size() <= 122);
}

TEST_CASE("fit of collinear points is exact", "[road_map]")
{
  const auto raw = tracks::straight(60.0, 0.25);
  const RoadMap map = build_road_map(raw, 4.0, {});
  CHECK(max_point_to_curve_distance(map, raw) < 1e-9);
}

TEST_CASE("fit accuracy on a circle", "[road_map]")
{
  const double radius = 10.0;
  const auto raw = tracks::circle(radius, 0.25);
  const RoadMap map = build_road_map(raw, 4.0, {.closed = true});
  CHECK(max_point_to_curve_distance(map, raw) <= 0.05);
}

TEST_CASE("least-squares tangents beat finite-difference tangents", "[road_map]")
{
  // Sine-wave lane: compare against the same control points with tangents
  // from central differences.
  std::vector<Vec2> raw;
  for (int i = 0; i <= 2000; ++i) {
    const double x = 0.05 * i;
    raw.emplace_back(x, 1.5 * std::sin(2.0 * std::numbers::pi * x / 25.0));
  }
  const auto control = resample_waypoints(raw, 4.0);
  const RoadMap fitted = fit_tangents(control, raw, {});

  RoadMap fd = fitted;
  std::vector<double> knots(control.size(), 0.0);
  for (std::size_t i = 1; i < control.size(); ++i) {
    knots[i] = knots[i - 1] + (control[i] - control[i - 1]).norm();
  }
  std::vector<Vec2> m(control.size());
  for (std::size_t i = 0; i < control.size(); ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == control.size() ? i : i + 1;
    m[i] = (control[hi] - control[lo]) / (knots[hi] - knots[lo]);
  }
  for (std::size_t seg = 0; seg < fd.segments.size(); ++seg) {
    const double h = fd.segments[seg].s_end - fd.segments[seg].s_start;
    fd.segments[seg].d0 = h * m[seg];
    fd.segments[seg].d1 = h * m[seg + 1];
  }

  double fitted_sq = 0.0;
  double fd_sq = 0.0;
  for (const Vec2 & q : raw) {
    const auto dist = [&](const RoadMap & mp) {
      double best = std::numeric_limits<double>::max();
      for (const auto & sg : mp.segments) {
        for (int k = 0; k <= 32; ++k) {
          const double s = sg.s_start + (sg.s_end - sg.s_start) * k / 32.0;
          best = std::min(best, (hermite_eval(sg, s) - q).squaredNorm());
        }
      }
      return best;
    };
    fitted_sq += dist(fitted);
    fd_sq += dist(fd);
  }
  CHECK(fitted_sq < fd_sq);
}

TEST_CASE("fit rejects rank-deficient systems", "[road_map]")
{
  const std::vector<Vec2> control = {{0.0, 0.0}, {1.0, 0.0}};
  const std::vector<Vec2> raw = {{0.0, 0.0}, {1.0, 0.0}};
  CHECK_THROWS_WITH(fit_tangents(control, raw, {}),
                    Catch::Matchers::ContainsSubstring("rank-deficient"));
}

TEST_CASE("segments are contiguous and C1 across joints", "[road_map]")
{
  const RoadMap map = build_road_map(tracks::campus(), 4.0, {.closed = true});
  for (std::size_t i = 0; i + 1 < map.segments.size(); ++i) {
    CHECK(map.segments[i].s_end == map.segments[i + 1].s_start);
    const auto [left, l2] = hermite_derivatives(map.segments[i], map.segments[i].s_end);
    const auto [right, r2] =
      hermite_derivatives(map.segments[i + 1], map.segments[i + 1].s_start);
    CHECK((left - right).norm() < 1e-9);
    const Vec2 pl = hermite_eval(map.segments[i], map.segments[i].s_end);
    const Vec2 pr = hermite_eval(map.segments[i + 1], map.segments[i + 1].s_start);
    CHECK((pl - pr).norm() < 1e-9);
  }
  // Wrap joint of the closed map.
  const auto & first = map.segments.front();
  const auto & last = map.segments.back();
  const auto [dw, dw2] = hermite_derivatives(last, last.s_end);
  const auto [d0, d02] = hermite_derivatives(first, first.s_start);
  CHECK((dw - d0).norm() < 1e-9);
}

TEST_CASE("cyclic wrap of s", "[road_map]")
{
  const RoadMap map = build_road_map(tracks::circle(10.0), 4.0, {.closed = true});
  const RoadPose a = road_pose(map, 5.0);
  const RoadPose b = road_pose(map, 5.0 + map.total_length);
  CHECK(a.X == Approx(b.X).margin(1e-9));
  CHECK(a.Y == Approx(b.Y).margin(1e-9));
  const RoadPose c = road_pose(map, -3.0);
  const RoadPose d = road_pose(map, map.total_length - 3.0);
  CHECK(c.X == Approx(d.X).margin(1e-9));
}

TEST_CASE("map save and reload is bit-exact", "[road_map]")
{
  const RoadMap map = build_road_map(tracks::circle(10.0), 4.0, {.closed = true});
  const auto path = std::filesystem::temp_directory_path() / "gaplan_roundtrip.map";
  save_map(map, path.string());
  const RoadMap back = load_map(path.string());
  REQUIRE(back.segments.size() == map.segments.size());
  CHECK(back.cyclic == map.cyclic);
  CHECK(back.b_yl == map.b_yl);
  CHECK(back.b_yh == map.b_yh);
  CHECK(back.total_length == map.total_length);
  for (std::size_t i = 0; i < map.segments.size(); ++i) {
    CHECK(back.segments[i].s_start == map.segments[i].s_start);
    CHECK(back.segments[i].s_end == map.segments[i].s_end);
    CHECK(back.segments[i].p0 == map.segments[i].p0);
    CHECK(back.segments[i].p1 == map.segments[i].p1);
    CHECK(back.segments[i].d0 == map.segments[i].d0);
    CHECK(back.segments[i].d1 == map.segments[i].d1);
  }
  std::filesystem::remove(path);
}

TEST_CASE("waypoint file loading", "[road_map]")
{
  const auto path = std::filesystem::temp_directory_path() / "gaplan_waypoints.txt";
  {
    std::ofstream out(path);
    out << "# comment line\n";
    out << "ds=2.5\n";
    out << "0.0 0.0\n";
    out << "1.0 0.5  # trailing comment\n";
    out << "\n";
    out << "2.0 1.0\n";
  }
  const WaypointFile wf = load_waypoints(path.string());
  REQUIRE(wf.points.size() == 3);
  REQUIRE(wf.ds.has_value());
  CHECK(*wf.ds == Approx(2.5));
  CHECK(wf.points[1] == Vec2{1.0, 0.5});

  {
    std::ofstream out(path);
    out << "0.0 not-a-number\n";
  }
  CHECK_THROWS(load_waypoints(path.string()));
  std::filesystem::remove(path);
}
