// Acceptance checks, one PASS/FAIL line per criterion. Tolerances are fixed
// here; pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ssd/config.hpp"
#include "ssd/curve.hpp"
#include "ssd/diagnostics.hpp"
#include "ssd/forms.hpp"

using namespace ssd;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

RunResult run_preset(const std::string& name, const std::function<void(RunConfig&)>& edit = {}) {
  RunConfig cfg = preset(name);
  if (edit) edit(cfg);
  validate(cfg);
  return run(build_initial(cfg), build_settings(cfg));
}

double max_abs_dV(const RunResult& r) {
  double m = 0.0;
  for (const auto& d : r.diagnostics) m = std::max(m, std::fabs(d.dV));
  return m;
}

// 1: volume drift within 1e-6 and shrinking >= 10x when the Newton tolerance
// drops from 1e-8 to 1e-10.
Outcome criterion1() {
  const double kDrift = 1e-6, kRatio = 10.0;
  bool ok = true;
  std::string d;
  for (const char* name : {"fig5_beta007", "fig5_beta008", "fig5_beta009", "fig5_beta01"}) {
    const RunResult loose = run_preset(name, [](RunConfig& c) { c.newton.tol = 1e-8; });
    const RunResult tight = run_preset(name, [](RunConfig& c) { c.newton.tol = 1e-10; });
    const double a = max_abs_dV(loose), b = max_abs_dV(tight);
    const double ratio = b > 0.0 ? a / b : INFINITY;
    const bool done = !loose.aborted && !tight.aborted && loose.diagnostics.back().t >= 2.0 - 1e-12;
    ok = ok && done && a <= kDrift && ratio >= kRatio;
    d += fmt("%s max|dV| %.3e (tol 1e-8) %.3e (tol 1e-10) ratio %.3g%s; ", name, a, b, ratio,
             done ? "" : " [incomplete]");
  }
  return {ok, d};
}

// 2: no step raises W by more than 1e-10 |W^0|.
Outcome criterion2() {
  bool ok = true;
  std::string d;
  for (const char* name : {"fig3", "fig3_beta01", "fig4", "fig4_beta01"}) {
    for (double dt : {1.0 / 32, 1.0 / 256}) {
      const RunResult r = run_preset(name, [dt](RunConfig& c) { c.dt = dt; });
      const double W0 = std::fabs(r.diagnostics.front().W);
      int bad = 0;
      double worst = -INFINITY;
      for (std::size_t k = 1; k < r.diagnostics.size(); ++k) {
        if (r.diagnostics[k].n_films != r.diagnostics[k - 1].n_films) continue;
        const double inc = r.diagnostics[k].W - r.diagnostics[k - 1].W;
        worst = std::max(worst, inc / W0);
        bad += inc > 1e-10 * W0;
      }
      ok = ok && bad == 0 && !r.aborted;
      d += fmt("%s dt=1/%g: %d violations, max rel increase %.2e%s; ", name, 1.0 / dt, bad, worst,
               r.aborted ? " [aborted]" : "");
    }
  }
  return {ok, d};
}

// 3: manifold-distance order >= 1.8 between the last two of 4 levels.
Outcome criterion3() {
  const double kOrder = 1.8;
  bool ok = true;
  std::string d;
  const RunConfig base = preset("ex1");
  for (double beta : {0.07, 0.1}) {
    for (double eps : {0.01, 0.02}) {
      RunConfig cfg = base;
      cfg.model.beta = beta;
      cfg.eps = eps;
      ConvergenceSetup setup;
      setup.initial = [init = cfg.initial](int J) { return build_initial(init, J); };
      setup.base = build_settings(cfg);
      setup.J0 = 32;
      setup.dt0 = cfg.dt;
      setup.levels = 4;
      setup.eval_times = {1.0, 2.0};
      setup.parallel = false;
      const ConvergenceTable tab = convergence_harness(setup);
      ok = ok && tab.complete();
      d += fmt("beta=%g eps=%g:", beta, eps);
      for (std::size_t i = 0; i < tab.eval_times.size(); ++i) {
        const auto& rows = tab.rows[i];
        const double order = rows.empty() ? NAN : rows.back().order;
        ok = ok && order >= kOrder;
        d += fmt(" t=%g errors", tab.eval_times[i]);
        for (const auto& row : rows) d += fmt(" %.3e", row.error);
        d += fmt(" order %.3f", order);
      }
      if (!tab.complete()) d += " [" + tab.failures.front() + "]";
      d += "; ";
    }
  }
  return {ok, d};
}

GeneratingCurve perturb(GeneratingCurve c, std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> u(-amp, amp);
  for (int j = 0; j <= c.J(); ++j) {
    const bool axis = c.topology == Topology::Island && j == 0;
    if (!axis) c.r[j] += u(rng);
    if (j > 0 && j < c.J()) c.z[j] += u(rng);
  }
  return c;
}

GeneratingCurve half_torus(int J) {
  return sample_curve([](double p) { return Vec2{10 + std::cos(pi * p), std::sin(pi * p)}; }, J,
                      Topology::TwoContactLines);
}

GeneratingCurve quarter(int J) {
  return sample_curve([](double p) { return Vec2{std::cos(pi * p / 2), std::sin(pi * p / 2)}; }, J,
                      Topology::Island);
}

// 4: exact volume pairing on random curve pairs.
Outcome criterion4() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const GeneratingCurve base = k % 2 ? quarter(16) : half_torus(16);
    const GeneratingCurve a = perturb(base, rng, 0.2), b = perturb(base, rng, 0.2);
    const double scale = std::max(std::fabs(discrete_volume(a)), std::fabs(discrete_volume(b)));
    const double err = std::fabs(discrete_volume(b) - discrete_volume(a) - 2 * pi * volume_pairing(a, b));
    worst = std::max(worst, err / scale);
  }
  return {worst <= 1e-12, fmt("max relative mismatch %.3e over 100 pairs", worst)};
}

// 5: the stabilized inequality holds; without stabilization it does not.
Outcome criterion5() {
  const std::size_t n = 10000;
  bool ok = true;
  std::string d;
  for (double beta : {0.07, 0.1, 0.5}) {
    for (StabilityCase c : {StabilityCase::I, StabilityCase::II}) {
      AnisotropyModel m = AnisotropyModel::four_fold(beta, c == StabilityCase::I ? 0 : 1);
      StabilityPolicy p;
      p.mode = StabilityPolicy::Mode::AutoMinimal;
      p.scase = c;
      m.set_stability(p);
      const auto rep = verify_stability_inequality(m, n, 505);
      ok = ok && rep.violations.empty();
      d += fmt("beta=%g case %s: %zu violations; ", beta, c == StabilityCase::I ? "I" : "II", rep.violations.size());
    }
  }
  AnisotropyModel m = AnisotropyModel::four_fold(0.07, 1);
  StabilityPolicy zero;
  zero.mode = StabilityPolicy::Mode::Zero;
  m.set_stability(zero);
  const auto rep = verify_stability_inequality(m, n, 505);
  ok = ok && !rep.violations.empty();
  d += fmt("beta=0.07 S=0: %zu violations", rep.violations.size());
  return {ok, d};
}

// 6: analytic Jacobian against central differences.
Outcome criterion6() {
  std::mt19937_64 rng(606);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  AnisotropyModel m = AnisotropyModel::four_fold(0.1, 1);
  m.set_stability(StabilityPolicy{});
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    SchemeState s = seed_state(perturb(k % 2 ? quarter(8) : half_torus(8), rng, 0.05));
    for (double& x : s.mu) x = g(rng);
    SchemeParams p;
    p.dt = 1.0 / 64;
    const SchemeAssembler as(s, m, p);
    Eigen::VectorXd x = as.initial_guess();
    for (int i : as.dofs().free_dofs()) x[i] += u(rng);
    worst = std::max(worst, jacobian_fd_mismatch(as, x));
  }
  return {worst <= 1e-6, fmt("max relative mismatch %.3e over 20 states", worst)};
}

const EventRecord* first_event(const RunResult& r, EventKind k) {
  for (const auto& e : r.events)
    if (e.kind == k) return &e;
  return nullptr;
}

std::string event_list(const RunResult& r) {
  std::string s;
  for (const auto& e : r.events) s += fmt(" %s@%.3f", to_string(e.kind), e.time);
  return s.empty() ? " none" : s;
}

// 7: morphology events inside their windows.
Outcome criterion7() {
  bool ok = true;
  std::string d;
  {
    const RunResult r = run_preset("fig9");
    const EventRecord* e = first_event(r, EventKind::Equilibrium);
    const bool pass = e && e->time <= 10.0;
    ok = ok && pass;
    d += fmt("fig9 Equilibrium by t<=10: %s (events:%s, final t %.3f); ", pass ? "yes" : "no",
             event_list(r).c_str(), r.diagnostics.back().t);
  }
  const struct {
    const char* name;
    double lo, hi;
  } windows[] = {{"fig10", 0.6, 0.9}, {"fig11", 0.25, 0.40}};
  for (const auto& w : windows) {
    const RunResult r = run_preset(w.name);
    const EventRecord* e = first_event(r, EventKind::PinchOff);
    const bool pass = e && e->time >= w.lo && e->time <= w.hi;
    ok = ok && pass;
    d += fmt("%s PinchOff in [%g, %g]: %s (events:%s); ", w.name, w.lo, w.hi, pass ? "yes" : "no",
             event_list(r).c_str());
  }
  return {ok, d};
}

// 8: regularization improves mesh quality under strong anisotropy.
Outcome criterion8() {
  const RunConfig cfg = preset("fig6_beta035");
  const MeshQualityReport rep = mesh_quality_study(build_initial(cfg), build_settings(cfg), {cfg.eps, 0.0});
  const MeshQualitySeries& reg = rep.series[0];
  const MeshQualitySeries& unreg = rep.series[1];
  bool bounded = !reg.failed;
  for (double v : reg.Rh) bounded = bounded && std::isfinite(v) && v < 100.0;
  const bool better = rep.unregularized_failed || rep.regularized_lower_peak || rep.regularized_lower_final;
  std::string d = fmt("eps=%g peak %.3f final %.3f%s; eps=0 ", reg.eps, reg.peak(), reg.final_value(),
                      reg.failed ? (" [failed: " + reg.failure + "]").c_str() : "");
  d += unreg.failed ? "failed: " + unreg.failure
                    : fmt("peak %.3f final %.3f", unreg.peak(), unreg.final_value());
  return {bounded && better, d};
}

// 9: curvature and volume oracles.
Outcome criterion9() {
  const GeneratingCurve q = quarter(256);
  const NodalField k = recover_kappa(q);
  double err = 0.0;
  for (int j = 1; j < q.J(); ++j) err = std::max(err, std::fabs(k[j] - (-1.0)));
  const double v = discrete_volume(half_torus(4096));
  const double rel = std::fabs(v - 10 * pi * pi) / (10 * pi * pi);
  return {err <= 5e-4 && rel <= 1e-3, fmt("kappa max error %.3e; half-torus volume rel error %.3e", err, rel)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3,
                                                          criterion4, criterion5, criterion6,
                                                          criterion7, criterion8, criterion9};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) {
    if (!only.empty() && !only.count(i)) continue;
    Outcome o;
    try {
      o = criteria[i - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", i, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
