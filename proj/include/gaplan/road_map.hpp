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

#ifndef GAPLAN_ROAD_MAP_HPP_
#define GAPLAN_ROAD_MAP_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gaplan/geometry.hpp"

namespace gaplan
{

// Piecewise cubic in Hermite form over the chord-length coordinate s.
// Tangents are derivatives w.r.t. the normalized parameter t in [0, 1].
struct HermiteSegment
{
  double s_start = 0.0;
  double s_end = 0.0;
  Vec2 p0{0.0, 0.0};
  Vec2 p1{0.0, 0.0};
  Vec2 d0{0.0, 0.0};
  Vec2 d1{0.0, 0.0};
};

struct RoadPose
{
  double theta_c = 0.0;        // centerline heading, rad
  double theta_c_prime = 0.0;  // d(theta_c)/ds, signed curvature
  double X = 0.0;
  double Y = 0.0;
};

struct RoadMap
{
  std::vector<HermiteSegment> segments;  // contiguous in s
  double b_yl = -1.75;                   // lateral bounds for the CoG
  double b_yh = 1.75;
  double total_length = 0.0;
  bool cyclic = false;
};

namespace hermite
{
inline double h00(double t) { return 2 * t * t * t - 3 * t * t + 1; }
inline double h10(double t) { return t * t * t - 2 * t * t + t; }
inline double h01(double t) { return -2 * t * t * t + 3 * t * t; }
inline double h11(double t) { return t * t * t - t * t; }

inline double h00_d(double t) { return 6 * t * t - 6 * t; }
inline double h10_d(double t) { return 3 * t * t - 4 * t + 1; }
inline double h01_d(double t) { return -6 * t * t + 6 * t; }
inline double h11_d(double t) { return 3 * t * t - 2 * t; }

inline double h00_dd(double t) { return 12 * t - 6; }
inline double h10_dd(double t) { return 6 * t - 4; }
inline double h01_dd(double t) { return -12 * t + 6; }
inline double h11_dd(double t) { return 6 * t - 2; }
}  // namespace hermite

inline Vec2 hermite_eval(const HermiteSegment & seg, double s)
{
  if (s < seg.s_start - 1e-9 || s > seg.s_end + 1e-9) {
    throw std::domain_error(
      "hermite_eval: s=" + std::to_string(s) + " outside segment [" +
      std::to_string(seg.s_start) + ", " + std::to_string(seg.s_end) + "]");
  }
  const double t = std::clamp((s - seg.s_start) / (seg.s_end - seg.s_start), 0.0, 1.0);
  using namespace hermite;
  return h00(t) * seg.p0 + h10(t) * seg.d0 + h01(t) * seg.p1 + h11(t) * seg.d1;
}

/// First and second derivatives w.r.t. s (chain rule through t).
inline std::pair<Vec2, Vec2> hermite_derivatives(const HermiteSegment & seg, double s)
{
  if (s < seg.s_start - 1e-9 || s > seg.s_end + 1e-9) {
    throw std::domain_error(
      "hermite_derivatives: s=" + std::to_string(s) + " outside segment [" +
      std::to_string(seg.s_start) + ", " + std::to_string(seg.s_end) + "]");
  }
  const double h = seg.s_end - seg.s_start;
  const double t = std::clamp((s - seg.s_start) / h, 0.0, 1.0);
  using namespace hermite;
  const Vec2 dp_dt = h00_d(t) * seg.p0 + h10_d(t) * seg.d0 + h01_d(t) * seg.p1 + h11_d(t) * seg.d1;
  const Vec2 d2p_dt2 =
    h00_dd(t) * seg.p0 + h10_dd(t) * seg.d0 + h01_dd(t) * seg.p1 + h11_dd(t) * seg.d1;
  return {dp_dt / h, d2p_dt2 / (h * h)};
}

/// Wraps s into [0, total_length) on cyclic maps; pass-through otherwise.
inline double wrap_s(const RoadMap & map, double s)
{
  if (!map.cyclic) {
    return s;
  }
  double w = std::fmod(s, map.total_length);
  if (w < 0.0) {
    w += map.total_length;
  }
  return w;
}

inline const HermiteSegment & segment_at(const RoadMap & map, double s)
{
  const double sw = wrap_s(map, s);
  if (sw < -1e-9 || sw > map.total_length + 1e-9) {
    throw std::domain_error(
      "segment_at: s=" + std::to_string(s) + " outside map [0, " +
      std::to_string(map.total_length) + "]");
  }
  // First segment whose s_end covers sw.
  auto it = std::upper_bound(
    map.segments.begin(), map.segments.end(), sw,
    [](double value, const HermiteSegment & seg) { return value < seg.s_end; });
  if (it == map.segments.end()) {
    it = std::prev(map.segments.end());
  }
  return *it;
}

inline RoadPose road_pose(const RoadMap & map, double s)
{
  const double sw = wrap_s(map, s);
  const HermiteSegment & seg = segment_at(map, sw);
  const Vec2 p = hermite_eval(seg, sw);
  const auto [d1, d2] = hermite_derivatives(seg, sw);
  const double norm2 = d1.squaredNorm();
  if (norm2 < 1e-18) {
    throw std::runtime_error("road_pose: degenerate tangent at s=" + std::to_string(s));
  }
  RoadPose pose;
  pose.X = p.x();
  pose.Y = p.y();
  pose.theta_c = std::atan2(d1.y(), d1.x());
  pose.theta_c_prime = (d1.x() * d2.y() - d1.y() * d2.x()) / (norm2 * std::sqrt(norm2));
  return pose;
}

/// (s, y) -> global position; left offsets are positive y.
inline Vec2 curvilinear_to_global(const RoadMap & map, double s, double y)
{
  const RoadPose pose = road_pose(map, s);
  return {pose.X - y * std::sin(pose.theta_c), pose.Y + y * std::cos(pose.theta_c)};
}

/// Resamples a polyline at fixed steps of cumulative chord length. The first
/// point is always retained; the endpoint is kept when it lands on the grid.
inline std::vector<Vec2> resample_waypoints(const std::vector<Vec2> & points, double ds)
{
  if (points.size() < 2) {
    throw std::invalid_argument("resample_waypoints: need at least 2 points");
  }
  if (!(ds > 0.0)) {
    throw std::invalid_argument("resample_waypoints: ds must be positive");
  }
  std::vector<Vec2> out;
  out.push_back(points.front());
  double next_s = ds;
  double walked = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Vec2 a = points[i];
    const Vec2 b = points[i + 1];
    const double len = (b - a).norm();
    while (len > 0.0 && next_s <= walked + len + 1e-9) {
      const double t = std::clamp((next_s - walked) / len, 0.0, 1.0);
      out.push_back(a + t * (b - a));
      next_s += ds;
    }
    walked += len;
  }
  return out;
}

namespace detail
{
inline std::vector<double> cumulative_chords(const std::vector<Vec2> & pts)
{
  std::vector<double> c(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    c[i] = c[i - 1] + (pts[i] - pts[i - 1]).norm();
  }
  return c;
}
}  // namespace detail

struct FitOptions
{
  bool closed = false;
  double b_yl = -1.75;
  double b_yh = 1.75;
};

/// Builds a road map from resampled control points by solving for the tangent
/// vectors that minimize the squared distance between the spline and the raw
/// points. The spline is linear in the tangents, so this is one linear
/// least-squares solve per coordinate. Raw points are associated to segments
/// by nearest cumulative-chord parameter, fixed before solving.
inline RoadMap fit_tangents(
  const std::vector<Vec2> & control_points, const std::vector<Vec2> & raw_points,
  const FitOptions & opts = {})
{
  const std::size_t m = control_points.size();
  if (m < 2) {
    throw std::invalid_argument("fit_tangents: need at least 2 control points");
  }
  if (raw_points.size() < m) {
    throw std::invalid_argument("fit_tangents: fewer raw points than control points");
  }

  // Knots: cumulative chord length of the control polygon, plus the wrap
  // segment back to the first point on closed maps.
  std::vector<double> knots = detail::cumulative_chords(control_points);
  const std::size_t n_seg = opts.closed ? m : m - 1;
  double total = knots.back();
  if (opts.closed) {
    const double wrap_len = (control_points.front() - control_points.back()).norm();
    if (wrap_len < 1e-9) {
      throw std::invalid_argument(
        "fit_tangents: closed map must not duplicate the first control point");
    }
    total += wrap_len;
    knots.push_back(total);
  }

  const std::vector<double> raw_chords = detail::cumulative_chords(raw_points);
  double raw_total = raw_chords.back();
  if (opts.closed) {
    raw_total += (raw_points.front() - raw_points.back()).norm();
  }
  if (raw_total < 1e-9) {
    throw std::runtime_error("fit_tangents: raw points are coincident");
  }

  // Recover each control point's chord position on the raw polyline by a
  // monotone projection walk; raw points are then associated to the segment
  // between adjacent cuts. This keeps the association local instead of
  // smearing the chord shrinkage of curved regions over the whole map.
  std::vector<double> cuts(m + 1, 0.0);
  {
    std::size_t walk = 0;
    for (std::size_t i = 0; i < m; ++i) {
      double best_d = std::numeric_limits<double>::max();
      double best_c = raw_chords[walk];
      std::size_t best_seg = walk;
      const double window = raw_total / static_cast<double>(m) * 4.0;
      for (std::size_t k = walk; k + 1 < raw_points.size(); ++k) {
        const Vec2 seg_vec = raw_points[k + 1] - raw_points[k];
        const double len2 = seg_vec.squaredNorm();
        const double tt = len2 > 0.0
          ? std::clamp((control_points[i] - raw_points[k]).dot(seg_vec) / len2, 0.0, 1.0)
          : 0.0;
        const double d = (raw_points[k] + tt * seg_vec - control_points[i]).norm();
        const double c = raw_chords[k] + tt * std::sqrt(len2);
        if (d < best_d) {
          best_d = d;
          best_c = c;
          best_seg = k;
        }
        if (c > best_c + window) {
          break;
        }
      }
      cuts[i] = best_c;
      walk = best_seg;
    }
    cuts[m] = raw_total;  // wrap (closed) or polyline end (open)
  }

  // Two decoupled least-squares problems (x and y) in the per-point tangents,
  // assembled as normal equations; the system is near-tridiagonal. Unknowns
  // are tangents w.r.t. s, shared across joints, so the curve is C1 in s even
  // where knot spacing is nonuniform; each segment's t-space tangent is the
  // s-tangent scaled by the segment length.
  Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd atb = Eigen::MatrixXd::Zero(m, 2);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < raw_points.size(); ++k) {
    const double ck = raw_chords[k];
    while (seg + 1 < n_seg && ck >= cuts[seg + 1]) {
      ++seg;
    }
    const std::size_t i = seg;
    const std::size_t j = (seg + 1) % m;
    const double span = cuts[seg + 1] - cuts[seg];
    const double t = span > 0.0 ? std::clamp((ck - cuts[seg]) / span, 0.0, 1.0) : 0.0;
    const double h = knots[seg + 1] - knots[seg];
    using namespace hermite;
    const double wi = h * h10(t);
    const double wj = h * h11(t);
    const Vec2 rhs = raw_points[k] - h00(t) * control_points[i] - h01(t) * control_points[j];
    ata(i, i) += wi * wi;
    ata(j, j) += wj * wj;
    ata(i, j) += wi * wj;
    ata(j, i) += wi * wj;
    atb.row(i) += wi * rhs.transpose();
    atb.row(j) += wj * rhs.transpose();
  }

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(ata);
  if (lu.rank() < static_cast<Eigen::Index>(m)) {
    throw std::runtime_error("fit_tangents: rank-deficient least-squares system");
  }
  const Eigen::MatrixXd tangents = lu.solve(atb);

  RoadMap map;
  map.cyclic = opts.closed;
  map.b_yl = opts.b_yl;
  map.b_yh = opts.b_yh;
  map.total_length = total;
  map.segments.reserve(n_seg);
  for (std::size_t seg = 0; seg < n_seg; ++seg) {
    const std::size_t i = seg;
    const std::size_t j = (seg + 1) % m;
    const double h = knots[seg + 1] - knots[seg];
    HermiteSegment hs;
    hs.s_start = knots[seg];
    hs.s_end = knots[seg + 1];
    hs.p0 = control_points[i];
    hs.p1 = control_points[j];
    hs.d0 = h * tangents.row(i).transpose();
    hs.d1 = h * tangents.row(j).transpose();
    map.segments.push_back(hs);
  }
  return map;
}

/// Resample + fit in one step, as the map loader does. On closed maps the
/// spacing is rounded so the loop divides evenly and no short remainder
/// segment is left at the seam.
inline RoadMap build_road_map(
  const std::vector<Vec2> & raw_points, double ds, const FitOptions & opts = {})
{
  double ds_eff = ds;
  if (opts.closed) {
    double loop = detail::cumulative_chords(raw_points).back() +
                  (raw_points.front() - raw_points.back()).norm();
    const double n = std::max(3.0, std::round(loop / ds));
    ds_eff = loop / n;
  }
  std::vector<Vec2> control = resample_waypoints(raw_points, ds_eff);
  if (opts.closed && control.size() > 1 && (control.back() - control.front()).norm() < 1e-6) {
    control.pop_back();
  }
  return fit_tangents(control, raw_points, opts);
}

/// Max distance from each query point to the spline, by dense sampling plus
/// parabolic refinement. Used as the Hausdorff-style fit accuracy index.
inline double max_point_to_curve_distance(
  const RoadMap & map, const std::vector<Vec2> & points, int samples_per_segment = 64)
{
  std::vector<Vec2> curve;
  curve.reserve(map.segments.size() * samples_per_segment + 1);
  std::vector<double> curve_s;
  for (const auto & seg : map.segments) {
    for (int i = 0; i < samples_per_segment; ++i) {
      const double s = seg.s_start + (seg.s_end - seg.s_start) * i / samples_per_segment;
      curve.push_back(hermite_eval(seg, s));
      curve_s.push_back(s);
    }
  }
  curve.push_back(hermite_eval(map.segments.back(), map.segments.back().s_end));
  curve_s.push_back(map.segments.back().s_end);

  double worst = 0.0;
  for (const Vec2 & q : points) {
    double best = std::numeric_limits<double>::max();
    double best_s = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      const double d = (curve[i] - q).squaredNorm();
      if (d < best) {
        best = d;
        best_s = curve_s[i];
      }
    }
    // Local refinement around the best sample.
    double lo = best_s - map.total_length / (map.segments.size() * samples_per_segment);
    double hi = best_s + map.total_length / (map.segments.size() * samples_per_segment);
    if (!map.cyclic) {
      lo = std::max(lo, 0.0);
      hi = std::min(hi, map.total_length);
    }
    for (int iter = 0; iter < 40; ++iter) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      const auto dist = [&](double s) {
        const double sw = map.cyclic ? wrap_s(map, s) : std::clamp(s, 0.0, map.total_length);
        return (hermite_eval(segment_at(map, sw), sw) - q).squaredNorm();
      };
      if (dist(m1) < dist(m2)) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    const double sw = map.cyclic ? wrap_s(map, 0.5 * (lo + hi))
                                 : std::clamp(0.5 * (lo + hi), 0.0, map.total_length);
    best = std::min(best, (hermite_eval(segment_at(map, sw), sw) - q).squaredNorm());
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

// ---------------------------------------------------------------------------
// File formats

struct WaypointFile
{
  std::vector<Vec2> points;
  std::optional<double> ds;
};

/// Plain-text waypoints: one "X Y" pair per line, optional "ds=<value>"
/// header; '#' starts a comment.
inline WaypointFile load_waypoints(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_waypoints: cannot open " + path);
  }
  WaypointFile wf;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) {
      continue;
    }
    if (first.rfind("ds=", 0) == 0) {
      wf.ds = std::stod(first.substr(3));
      continue;
    }
    double y = 0.0;
    if (!(ls >> y)) {
      throw std::runtime_error("load_waypoints: malformed line in " + path + ": " + line);
    }
    wf.points.emplace_back(std::stod(first), y);
  }
  if (wf.points.size() < 2) {
    throw std::runtime_error("load_waypoints: " + path + " holds fewer than 2 points");
  }
  return wf;
}

namespace detail
{
inline std::string fmt_double(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

/// Structured text dump of a fitted map; doubles are printed with 17
/// significant digits so a reload is bit-exact.
inline void save_map(const RoadMap & map, const std::string & path)
{
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_map: cannot open " + path);
  }
  using detail::fmt_double;
  out << "gaplan-map 1\n";
  out << "cyclic " << (map.cyclic ? 1 : 0) << "\n";
  out << "b_yl " << fmt_double(map.b_yl) << "\n";
  out << "b_yh " << fmt_double(map.b_yh) << "\n";
  out << "segments " << map.segments.size() << "\n";
  for (const auto & seg : map.segments) {
    out << fmt_double(seg.s_start) << ' ' << fmt_double(seg.s_end) << ' '
        << fmt_double(seg.p0.x()) << ' ' << fmt_double(seg.p0.y()) << ' '
        << fmt_double(seg.p1.x()) << ' ' << fmt_double(seg.p1.y()) << ' '
        << fmt_double(seg.d0.x()) << ' ' << fmt_double(seg.d0.y()) << ' '
        << fmt_double(seg.d1.x()) << ' ' << fmt_double(seg.d1.y()) << "\n";
  }
}

inline RoadMap load_map(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_map: cannot open " + path);
  }
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "gaplan-map" || version != 1) {
    throw std::runtime_error("load_map: " + path + " is not a gaplan map file");
  }
  RoadMap map;
  std::string key;
  int cyclic = 0;
  std::size_t n = 0;
  in >> key >> cyclic;
  in >> key >> map.b_yl;
  in >> key >> map.b_yh;
  in >> key >> n;
  map.cyclic = cyclic != 0;
  map.segments.resize(n);
  for (auto & seg : map.segments) {
    in >> seg.s_start >> seg.s_end >> seg.p0.x() >> seg.p0.y() >> seg.p1.x() >> seg.p1.y() >>
      seg.d0.x() >> seg.d0.y() >> seg.d1.x() >> seg.d1.y();
  }
  if (!in) {
    throw std::runtime_error("load_map: truncated map file " + path);
  }
  map.total_length = map.segments.back().s_end;
  return map;
}

}  // namespace gaplan

#endif  // GAPLAN_ROAD_MAP_HPP_
