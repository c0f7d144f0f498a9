#include "ssd/diagnostics.hpp"

#include <algorithm>
#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <cmath>
#include <future>
#include <limits>
#include <optional>

namespace ssd {

namespace bg = boost::geometry;

namespace {

using Point = bg::model::d2::point_xy<double>;
using Polygon = bg::model::polygon<Point, false, false>;  // CCW, open
using MultiPolygon = bg::model::multi_polygon<Polygon>;

double shoelace(const std::vector<Vec2>& v) {
  double a = 0.0;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % n];
    a += p.r * q.z - q.r * p.z;
  }
  return 0.5 * a;
}

double orient(Vec2 a, Vec2 b, Vec2 c) { return (b - a).r * (c - a).z - (b - a).z * (c - a).r; }

bool segments_cross(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  auto on = [](Vec2 a, Vec2 b, Vec2 c) {
    return std::min(a.r, b.r) <= c.r && c.r <= std::max(a.r, b.r) && std::min(a.z, b.z) <= c.z &&
           c.z <= std::max(a.z, b.z);
  };
  return (d1 == 0 && on(q1, q2, p1)) || (d2 == 0 && on(q1, q2, p2)) ||
         (d3 == 0 && on(p1, p2, q1)) || (d4 == 0 && on(p1, p2, q2));
}

Polygon to_polygon(const ClosedRegion& r) {
  Polygon p;
  for (const Vec2& v : r.vertices) bg::append(p.outer(), Point(v.r, v.z));
  return p;
}

}  // namespace

double ClosedRegion::area() const { return shoelace(vertices); }

ClosedRegion make_region(std::vector<Vec2> v) {
  double scale = 0.0;
  for (const Vec2& p : v) scale = std::max({scale, std::fabs(p.r), std::fabs(p.z)});
  const double weld = 1e-12 * std::max(scale, 1.0);
  std::vector<Vec2> w;
  w.reserve(v.size());
  for (const Vec2& p : v)
    if (w.empty() || (p - w.back()).norm() > weld) w.push_back(p);
  while (w.size() > 1 && (w.front() - w.back()).norm() <= weld) w.pop_back();
  if (w.size() < 3) throw Error("region needs at least 3 distinct vertices");
  if (shoelace(w) < 0.0) std::reverse(w.begin(), w.end());
  ClosedRegion out{std::move(w)};
  const Polygon poly = to_polygon(out);
  std::string reason;
  if (!bg::is_valid(poly, reason)) {
    const std::size_t n = out.vertices.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = i + 2; k < n; ++k) {
        if (i == 0 && k == n - 1) continue;  // adjacent through the closing edge
        if (segments_cross(out.vertices[i], out.vertices[(i + 1) % n], out.vertices[k],
                           out.vertices[(k + 1) % n]))
          throw Error("self-intersecting region: segments " + std::to_string(i) + " and " +
                      std::to_string(k));
      }
    throw Error("invalid region: " + reason);
  }
  if (!(out.area() > 0.0)) throw Error("region has zero area");
  return out;
}

ClosedRegion region_from_curve(const GeneratingCurve& curve) {
  std::vector<Vec2> v;
  v.reserve(curve.r.size() + 1);
  for (int j = 0; j <= curve.J(); ++j) v.push_back(curve.node(j));
  // The closing edge runs along z = 0 (and up the axis for an island).
  if (curve.topology == Topology::Island && curve.z.front() > 0.0) v.push_back({0.0, 0.0});
  return make_region(std::move(v));
}

double intersection_area(const ClosedRegion& a, const ClosedRegion& b) {
  MultiPolygon out;
  bg::intersection(to_polygon(a), to_polygon(b), out);
  return bg::area(out);
}

double manifold_distance(const ClosedRegion& a, const ClosedRegion& b) {
  // Clipping rounds differently with the argument order; a canonical order
  // makes the distance exactly symmetric.
  auto key = [](const ClosedRegion& r) {
    std::vector<double> k{r.area()};
    for (const Vec2& v : r.vertices) {
      k.push_back(v.r);
      k.push_back(v.z);
    }
    return k;
  };
  const bool swap = key(b) < key(a);
  const double inter = swap ? intersection_area(b, a) : intersection_area(a, b);
  return std::max(0.0, a.area() + b.area() - 2.0 * inter);
}

double manifold_distance(const GeneratingCurve& a, const GeneratingCurve& b) {
  return manifold_distance(region_from_curve(a), region_from_curve(b));
}

GeneratingCurve time_interpolant(const TrajectorySample& a, const TrajectorySample& b, double t) {
  if (a.curve.r.size() != b.curve.r.size()) throw Error("time_interpolant: J differs");
  const double span = b.t - a.t;
  if (!(span > 0.0)) throw Error("time_interpolant: samples not increasing");
  if (t < a.t || t > b.t) throw Error("time_interpolant: t out of range");
  if (t == a.t) return a.curve;
  if (t == b.t) return b.curve;
  const double wa = (b.t - t) / span, wb = (t - a.t) / span;
  GeneratingCurve c = a.curve;
  for (std::size_t j = 0; j < c.r.size(); ++j) {
    c.r[j] = wa * a.curve.r[j] + wb * b.curve.r[j];
    c.z[j] = wa * a.curve.z[j] + wb * b.curve.z[j];
  }
  return c;
}

GeneratingCurve time_interpolant(const std::vector<TrajectorySample>& traj, double t) {
  if (traj.empty() || t < traj.front().t || t > traj.back().t)
    throw Error("time_interpolant: t out of range");
  if (traj.size() == 1) return traj.front().curve;
  auto it = std::lower_bound(traj.begin(), traj.end(), t,
                             [](const TrajectorySample& s, double x) { return s.t < x; });
  if (it == traj.begin()) return it->curve;
  return time_interpolant(*(it - 1), *it, t);
}

ConvergenceTable convergence_harness(const ConvergenceSetup& setup) {
  if (setup.levels < 3) throw ConfigError("convergence harness needs at least 3 levels");
  if (setup.eval_times.empty()) throw ConfigError("convergence harness needs evaluation times");
  const double t_end = *std::max_element(setup.eval_times.begin(), setup.eval_times.end());
  const std::size_t nt = setup.eval_times.size();

  struct LevelOut {
    std::vector<std::optional<GeneratingCurve>> at;
    std::string failure;
  };
  auto run_level = [&setup, t_end, nt](int k) {
    LevelOut out;
    out.at.resize(nt);
    try {
      const int J = setup.J0 << k;
      RunSettings s = setup.base;
      s.physics.dt = setup.dt0 / std::pow(4.0, k);
      s.t_end = t_end;
      s.events.split = false;
      s.events.stop_on_equilibrium = false;
      std::optional<TrajectorySample> prev;
      auto obs = [&](const RunView& v, const DiagnosticsRecord&) {
        TrajectorySample cur{v.t, v.films.front().curve};
        for (std::size_t i = 0; i < nt; ++i) {
          const double te = setup.eval_times[i];
          if (out.at[i]) continue;
          if (v.t == te)
            out.at[i] = cur.curve;
          else if (prev && prev->t < te && te < v.t)
            out.at[i] = time_interpolant(*prev, cur, te);
        }
        prev = std::move(cur);
      };
      const RunResult r = run(setup.initial(J), s, obs);
      if (r.aborted) out.failure = "level " + std::to_string(k) + ": " + r.abort_reason;
      if (r.stopped_on_pinch) out.failure = "level " + std::to_string(k) + ": pinch-off";
      if (r.stopped_on_closure) out.failure = "level " + std::to_string(k) + ": axis closure";
      for (std::size_t i = 0; i < nt && out.failure.empty(); ++i)
        if (!out.at[i]) out.failure = "level " + std::to_string(k) + ": evaluation time not reached";
    } catch (const std::exception& e) {
      out.failure = "level " + std::to_string(k) + ": " + e.what();
    }
    return out;
  };

  std::vector<LevelOut> lv(setup.levels);
  if (setup.parallel) {
    std::vector<std::future<LevelOut>> fut;
    for (int k = 0; k < setup.levels; ++k) fut.push_back(std::async(std::launch::async, run_level, k));
    for (int k = 0; k < setup.levels; ++k) lv[k] = fut[k].get();
  } else {
    for (int k = 0; k < setup.levels; ++k) lv[k] = run_level(k);
  }

  ConvergenceTable tab;
  tab.eval_times = setup.eval_times;
  tab.rows.resize(nt);
  for (const auto& l : lv)
    if (!l.failure.empty()) tab.failures.push_back(l.failure);
  for (std::size_t i = 0; i < nt; ++i) {
    for (int k = 0; k + 1 < setup.levels; ++k) {
      if (!lv[k].at[i] || !lv[k + 1].at[i]) break;
      ConvergenceRow row;
      row.level = k;
      row.J = setup.J0 << k;
      row.dt = setup.dt0 / std::pow(4.0, k);
      row.error = manifold_distance(*lv[k].at[i], *lv[k + 1].at[i]);
      row.order = k == 0 ? std::numeric_limits<double>::quiet_NaN()
                         : std::log2(tab.rows[i].back().error / row.error);
      tab.rows[i].push_back(row);
    }
  }
  return tab;
}

double MeshQualitySeries::peak() const {
  return Rh.empty() ? std::numeric_limits<double>::quiet_NaN()
                    : *std::max_element(Rh.begin(), Rh.end());
}

double MeshQualitySeries::final_value() const {
  return Rh.empty() ? std::numeric_limits<double>::quiet_NaN() : Rh.back();
}

MeshQualityReport mesh_quality_study(const GeneratingCurve& initial, const RunSettings& base,
                                     const std::vector<double>& eps_values) {
  MeshQualityReport rep;
  for (double eps : eps_values) {
    MeshQualitySeries s;
    s.eps = eps;
    RunSettings rs = base;
    rs.physics.eps = eps;
    rs.events.stop_on_equilibrium = false;
    try {
      const RunResult r = run(initial, rs, [&](const RunView& v, const DiagnosticsRecord& d) {
        s.t.push_back(v.t);
        s.Rh.push_back(d.Rh);
      });
      if (r.aborted) {
        s.failed = true;
        s.failure = r.abort_reason;
      } else if (r.stopped_on_pinch) {
        s.failed = true;
        s.failure = "pinch-off";
      } else if (r.stopped_on_closure) {
        s.failed = true;
        s.failure = "axis closure";
      }
    } catch (const std::exception& e) {
      s.failed = true;
      s.failure = e.what();
    }
    for (double v : s.Rh)
      if (!std::isfinite(v)) {
        s.failed = true;
        s.failure = "non-finite mesh ratio";
        break;
      }
    rep.series.push_back(std::move(s));
  }
  const MeshQualitySeries* reg = nullptr;
  const MeshQualitySeries* unreg = nullptr;
  for (const auto& s : rep.series) {
    if (s.eps > 0.0 && !reg) reg = &s;
    if (s.eps == 0.0 && !unreg) unreg = &s;
  }
  if (reg && unreg) {
    rep.unregularized_failed = unreg->failed;
    rep.regularized_lower_peak = unreg->failed || reg->peak() < unreg->peak();
    rep.regularized_lower_final = !unreg->failed && reg->final_value() < unreg->final_value();
  }
  return rep;
}

}  // namespace ssd
