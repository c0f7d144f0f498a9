#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "ssd/diagnostics.hpp"
#include "ssd/error.hpp"

using namespace ssd;
using std::numbers::pi;

namespace {

ClosedRegion square(double x0, double y0, double s = 1.0) {
  return make_region({{x0, y0}, {x0 + s, y0}, {x0 + s, y0 + s}, {x0, y0 + s}});
}

// Star-shaped polygon around c with random radii, vertices in angle order.
ClosedRegion random_star(std::mt19937_64& rng, Vec2 c, int n, double rmin, double rmax) {
  std::uniform_real_distribution<double> u(rmin, rmax), ph(0.0, 2 * pi);
  std::vector<double> a(n);
  for (double& x : a) x = ph(rng);
  std::sort(a.begin(), a.end());
  std::vector<Vec2> v;
  for (double x : a) {
    const double r = u(rng);
    v.push_back({c.r + r * std::cos(x), c.z + r * std::sin(x)});
  }
  return make_region(v);
}

// Convex polygon: points on an ellipse in angle order.
ClosedRegion random_convex(std::mt19937_64& rng, Vec2 c, int n) {
  std::uniform_real_distribution<double> ax(0.5, 1.5), ph(0.0, 2 * pi);
  const double A = ax(rng), B = ax(rng), rot = ph(rng);
  std::vector<double> a(n);
  for (double& x : a) x = ph(rng);
  std::sort(a.begin(), a.end());
  std::vector<Vec2> v;
  for (double x : a) {
    const double px = A * std::cos(x), py = B * std::sin(x);
    v.push_back({c.r + px * std::cos(rot) - py * std::sin(rot), c.z + px * std::sin(rot) + py * std::cos(rot)});
  }
  return make_region(v);
}

bool inside_convex(const ClosedRegion& r, Vec2 p) {
  const auto& v = r.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = v[i], b = v[(i + 1) % v.size()];
    if ((b - a).r * (p - a).z - (b - a).z * (p - a).r < 0) return false;
  }
  return true;
}

GeneratingCurve torus(int J, double a = 1.0) {
  return sample_curve([a](double p) { return Vec2{10 + a * std::cos(pi * p), a * std::sin(pi * p)}; }, J,
                      Topology::TwoContactLines);
}

}  // namespace

TEST_CASE("manifold distance hand oracles") {
  CHECK(manifold_distance(square(0, 0), square(0.5, 0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(manifold_distance(square(0, 0), square(0, 0)) == 0.0);
  CHECK(manifold_distance(square(0, 0, 3), square(1, 1, 1)) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(manifold_distance(square(0, 0), square(5, 5)) == doctest::Approx(2.0).epsilon(1e-14));
  // Clockwise input is reoriented.
  const ClosedRegion cw = make_region({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  CHECK(cw.area() == doctest::Approx(1.0));
  CHECK(manifold_distance(cw, square(0, 0)) == 0.0);
}

TEST_CASE("manifold distance on curves") {
  const GeneratingCurve a = torus(64);
  CHECK(manifold_distance(a, a) == 0.0);
  const GeneratingCurve b = torus(64, 0.9);
  // Nested half discs: pi (1 - 0.81) / 2 up to the polygonal error.
  CHECK(manifold_distance(a, b) == doctest::Approx(region_from_curve(a).area() - region_from_curve(b).area()).epsilon(1e-12));
  CHECK(manifold_distance(a, b) == doctest::Approx(0.5 * pi * 0.19).epsilon(2e-3));
  CHECK(manifold_distance(a, b) == manifold_distance(b, a));
}

TEST_CASE("island regions are closed through the axis foot") {
  const GeneratingCurve c = sample_curve(
      [](double p) { return Vec2{std::cos(pi * p / 2), std::sin(pi * p / 2)}; }, 128, Topology::Island);
  const ClosedRegion r = region_from_curve(c);
  CHECK(r.vertices.size() == 130);
  CHECK(r.area() == doctest::Approx(pi / 4).epsilon(1e-3));
}

TEST_CASE("pseudometric properties on random triples") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> off(-0.5, 0.5);
  for (int t = 0; t < 100; ++t) {
    const ClosedRegion a = random_star(rng, {off(rng), off(rng)}, 12, 0.5, 1.5);
    const ClosedRegion b = random_star(rng, {off(rng), off(rng)}, 12, 0.5, 1.5);
    const ClosedRegion c = random_star(rng, {off(rng), off(rng)}, 12, 0.5, 1.5);
    const double ab = manifold_distance(a, b), bc = manifold_distance(b, c), ac = manifold_distance(a, c);
    CHECK(ab >= 0.0);
    CHECK(ab == manifold_distance(b, a));
    CHECK(manifold_distance(a, a) <= 1e-12);
    CHECK(ac <= ab + bc + 1e-10);
  }
}

TEST_CASE("clipping agrees with Monte-Carlo sampling") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> off(-0.6, 0.6);
  for (int t = 0; t < 5; ++t) {
    const ClosedRegion a = random_convex(rng, {off(rng), off(rng)}, 24);
    const ClosedRegion b = random_convex(rng, {off(rng), off(rng)}, 24);
    const double box = 2.5, boxA = (2 * box) * (2 * box);
    std::uniform_real_distribution<double> u(-box, box);
    const int n = 1000000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      const Vec2 p{u(rng), u(rng)};
      hits += inside_convex(a, p) && inside_convex(b, p);
    }
    const double p = static_cast<double>(hits) / n;
    const double est = p * boxA, sigma = std::sqrt(p * (1 - p) / n) * boxA;
    CHECK(std::fabs(intersection_area(a, b) - est) <= 3 * sigma + 1e-12);
  }
}

TEST_CASE("self-intersecting input is rejected with the segment pair") {
  bool thrown = false;
  try {
    make_region({{0, 0}, {1, 1}, {1, 0}, {0, 1}});
  } catch (const Error& e) {
    thrown = true;
    CHECK(std::string(e.what()).find("segments") != std::string::npos);
  }
  CHECK(thrown);
  CHECK_THROWS_AS(make_region({{0, 0}, {1, 0}}), Error);
}

TEST_CASE("near-duplicate vertices are welded") {
  const ClosedRegion r = make_region({{0, 0}, {1, 0}, {1, 1e-14}, {1, 1}, {0, 1}, {0, 0}});
  CHECK(r.vertices.size() == 4);
}

TEST_CASE("time interpolant") {
  const GeneratingCurve a = torus(16), b = torus(16, 0.8);
  const TrajectorySample sa{1.0, a}, sb{1.5, b};
  CHECK(time_interpolant(sa, sb, 1.0).r == a.r);
  CHECK(time_interpolant(sa, sb, 1.5).z == b.z);
  const GeneratingCurve mid = time_interpolant(sa, sb, 1.25);
  for (int j = 0; j <= 16; ++j) {
    CHECK(mid.r[j] == doctest::Approx(0.5 * (a.r[j] + b.r[j])).epsilon(1e-15));
    CHECK(mid.z[j] == doctest::Approx(0.5 * (a.z[j] + b.z[j])).epsilon(1e-15));
  }
  const double v = discrete_volume(mid);
  CHECK(v <= discrete_volume(a));
  CHECK(v >= discrete_volume(b));
  CHECK_THROWS_AS(time_interpolant(sa, sb, 1.6), Error);
  CHECK_THROWS_AS(time_interpolant(std::vector<TrajectorySample>{sa, sb}, 0.9), Error);
  CHECK(time_interpolant(std::vector<TrajectorySample>{sa, sb}, 1.5).r == b.r);
}

TEST_CASE("convergence harness bookkeeping") {
  ConvergenceSetup setup;
  setup.initial = [](int J) { return torus(J); };
  setup.base.model = AnisotropyModel::four_fold(0.07, 1);
  setup.J0 = 8;
  setup.dt0 = 1.0 / 16;
  setup.levels = 3;
  setup.eval_times = {0.125, 0.25};
  setup.parallel = false;
  const ConvergenceTable tab = convergence_harness(setup);
  CHECK(tab.complete());
  REQUIRE(tab.rows.size() == 2);
  for (const auto& rows : tab.rows) {
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].J == 8);
    CHECK(rows[1].J == 16);
    CHECK(rows[1].dt == doctest::Approx(1.0 / 64));
    CHECK(std::isnan(rows[0].order));
    CHECK(rows[1].order == doctest::Approx(std::log2(rows[0].error / rows[1].error)));
    CHECK(rows[0].error > 0.0);
  }
  setup.levels = 2;
  CHECK_THROWS_AS(convergence_harness(setup), ConfigError);
}

TEST_CASE("isotropic mesh quality stays near uniform") {
  RunSettings base;
  base.model = AnisotropyModel::isotropic(1);
  base.physics.dt = 1.0 / 64;
  base.t_end = 0.25;
  // sigma = 0 keeps the initial right contact angle in equilibrium; with
  // sigma = -0.6 the contact-angle transient alone lifts R^h to about 1.3.
  base.physics.sigma = 0.0;
  const MeshQualityReport rep = mesh_quality_study(torus(32), base, {0.01, 0.0});
  REQUIRE(rep.series.size() == 2);
  for (const auto& s : rep.series) {
    CHECK_FALSE(s.failed);
    for (double v : s.Rh) {
      CHECK(v >= 1.0);
      CHECK(v <= 1.1 * s.Rh.front());
    }
  }
}
