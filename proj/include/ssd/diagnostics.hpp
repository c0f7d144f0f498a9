#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ssd/evolution.hpp"

namespace ssd {

// Simple counterclockwise polygon, implicitly closed.
struct ClosedRegion {
  std::vector<Vec2> vertices;
  double area() const;  // shoelace, > 0
};

// Validates, welds points closer than 1e-12 * scale and orients CCW. Throws
// Error naming an offending segment pair for self-intersecting input.
ClosedRegion make_region(std::vector<Vec2> vertices);

// Curve nodes closed along z = 0; an island also gets the axis foot (0, 0).
ClosedRegion region_from_curve(const GeneratingCurve& curve);

double intersection_area(const ClosedRegion& a, const ClosedRegion& b);

// |A| + |B| - 2 |A n B|, clamped at 0.
double manifold_distance(const ClosedRegion& a, const ClosedRegion& b);
double manifold_distance(const GeneratingCurve& a, const GeneratingCurve& b);

struct TrajectorySample {
  double t;
  GeneratingCurve curve;
};

// Nodewise ((t_{m+1} - t) X^m + (t - t_m) X^{m+1}) / (t_{m+1} - t_m).
GeneratingCurve time_interpolant(const std::vector<TrajectorySample>& traj, double t);
GeneratingCurve time_interpolant(const TrajectorySample& a, const TrajectorySample& b, double t);

struct ConvergenceRow {
  int level = 0;
  int J = 0;
  double dt = 0.0;
  double error = 0.0;  // Md between this level and the next finer one
  double order = 0.0;  // log2(e_{k-1} / e_k); NaN for the first row
};

struct ConvergenceTable {
  std::vector<double> eval_times;
  std::vector<std::vector<ConvergenceRow>> rows;  // rows[time index][level]
  std::vector<std::string> failures;              // per failed level, empty if none
  bool complete() const { return failures.empty(); }
};

struct ConvergenceSetup {
  std::function<GeneratingCurve(int J)> initial;
  RunSettings base;  // base.physics.dt is ignored
  int J0 = 32;
  double dt0 = 1.0 / 64.0;
  int levels = 4;  // runs; levels - 1 errors
  std::vector<double> eval_times{1.0, 2.0};
  bool parallel = true;
};

// Runs level k at (J0 2^k, dt0 / 4^k) and compares successive levels at
// each evaluation time.
ConvergenceTable convergence_harness(const ConvergenceSetup& setup);

struct MeshQualitySeries {
  double eps = 0.0;
  std::vector<double> t, Rh;
  bool failed = false;
  std::string failure;
  double peak() const;
  double final_value() const;
};

struct MeshQualityReport {
  std::vector<MeshQualitySeries> series;
  // Compares the first eps > 0 series with the eps = 0 series, if both exist.
  bool regularized_lower_peak = false;
  bool regularized_lower_final = false;
  bool unregularized_failed = false;
};

MeshQualityReport mesh_quality_study(const GeneratingCurve& initial, const RunSettings& base,
                                     const std::vector<double>& eps_values);

}  // namespace ssd
