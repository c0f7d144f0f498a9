#include "ssd/evolution.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

namespace ssd {

namespace {

bool admissible(const DofMap& dm, const Eigen::VectorXd& u) {
  if (!u.allFinite()) return false;
  for (int j = 1; j <= dm.J(); ++j) {
    const double dr = u[DofMap::index(j, kR)] - u[DofMap::index(j - 1, kR)];
    const double dz = u[DofMap::index(j, kZ)] - u[DofMap::index(j - 1, kZ)];
    if (!(std::hypot(dr, dz) > 0.0)) return false;
  }
  return true;
}

double free_norm(const DofMap& dm, const Eigen::VectorXd& F) {
  double m = 0.0;
  for (int i : dm.free_dofs()) m = std::max(m, std::fabs(F[i]));
  return m;
}

// |dX|_inf + |dmu|_inf + |dmu_S|_inf over the reduced update.
double update_norm(const DofMap& dm, const Eigen::VectorXd& d) {
  double x = 0.0, mu = 0.0, ms = 0.0;
  const auto& fr = dm.free_dofs();
  for (std::size_t i = 0; i < fr.size(); ++i) {
    const double a = std::fabs(d[static_cast<Eigen::Index>(i)]);
    switch (fr[i] % 4) {
      case kR:
      case kZ: x = std::max(x, a); break;
      case kMu: mu = std::max(mu, a); break;
      default: ms = std::max(ms, a); break;
    }
  }
  return x + mu + ms;
}

double total_energy(const std::vector<SchemeState>& films, const RunSettings& s) {
  double w = 0.0;
  for (const auto& f : films)
    w += discrete_energy(f.curve, f.mu_S, s.model, s.physics.sigma, s.physics.eps);
  return w;
}

double total_volume(const std::vector<SchemeState>& films) {
  double v = 0.0;
  for (const auto& f : films) v += discrete_volume(f.curve);
  return v;
}

}  // namespace

StepResult newton_step(const SchemeState& state_m, double dt, const AnisotropyModel& model,
                       const SchemeParams& params, const NewtonConfig& cfg,
                       const StabilitySolver* solver) {
  if (dt == 0.0) return {state_m, {}};
  if (!(dt > 0.0)) throw Error("time step must be positive");
  if (!(cfg.tol > 0.0) || cfg.max_iters < 1) throw ConfigError("invalid Newton configuration");
  SchemeParams p = params;
  p.dt = dt;
  const SchemeAssembler as(state_m, model, p, solver);
  const DofMap& dm = as.dofs();
  const auto& fr = dm.free_dofs();

  Eigen::VectorXd u = as.initial_guess();
  Eigen::VectorXd F = as.residual(u);
  double Fn = free_norm(dm, F);
  NewtonStats st;
  Eigen::VectorXd best = u;
  double bestF = Fn;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false, converged = false;

  for (int it = 1; it <= cfg.max_iters; ++it) {
    if (cfg.fd_check) st.fd_mismatch = std::max(st.fd_mismatch, jacobian_fd_mismatch(as, u, 1e-6));
    LinearSystem red = apply_boundary_masks(dm, {as.jacobian(u), -F});
    red.A.makeCompressed();
    if (!analyzed) {
      lu.analyzePattern(red.A);
      analyzed = true;
    }
    lu.factorize(red.A);
    if (lu.info() != Eigen::Success) throw DegenerateMesh("singular Newton matrix");
    const Eigen::VectorXd d = lu.solve(red.b);
    if (!d.allFinite()) throw DegenerateMesh("non-finite Newton update");

    // Stopping test on the undamped iterate difference.
    const double full = update_norm(dm, d);
    if (full <= cfg.tol) {
      Eigen::VectorXd next = u;
      for (std::size_t i = 0; i < fr.size(); ++i) next[fr[i]] += d[static_cast<Eigen::Index>(i)];
      if (admissible(dm, next)) {
        u = next;
        F = as.residual(u);
        Fn = free_norm(dm, F);
        st.updates.push_back(full);
        st.iterations = it;
        converged = true;
        break;
      }
    }

    double alpha = 1.0;
    Eigen::VectorXd trial, Ft;
    double Ftn = std::numeric_limits<double>::infinity();
    bool accepted = false, any_admissible = false;
    for (int h = 0; h <= cfg.max_halvings; ++h) {
      trial = u;
      for (std::size_t i = 0; i < fr.size(); ++i) trial[fr[i]] += alpha * d[static_cast<Eigen::Index>(i)];
      if (admissible(dm, trial)) {
        any_admissible = true;
        Ft = as.residual(trial);
        Ftn = free_norm(dm, Ft);
        if (Ftn <= (1.0 - 1e-4 * alpha) * Fn || Ftn < 1e-11) {
          accepted = true;
          break;
        }
      }
      if (h < cfg.max_halvings) alpha *= cfg.damping;
    }
    if (!accepted && !any_admissible) {
      SchemeState b = state_m;
      dm.unpack(best, b);
      throw StepFailure("Newton update leaves the admissible set", b, st);
    }
    if (!accepted && !admissible(dm, trial)) {
      SchemeState b = state_m;
      dm.unpack(best, b);
      throw StepFailure("backtracking failed", b, st);
    }
    const double upd = alpha * full;
    u = trial;
    F = Ft;
    Fn = Ftn;
    st.updates.push_back(upd);
    st.iterations = it;
    if (Fn < bestF) {
      bestF = Fn;
      best = u;
    }
  }
  st.residual_norm = Fn;
  SchemeState out = state_m;
  if (!converged) {
    dm.unpack(best, out);
    throw StepFailure("Newton did not converge in " + std::to_string(cfg.max_iters) + " iterations",
                      out, st);
  }
  dm.unpack(u, out);
  out.kappa = recover_kappa(out.curve);
  out.t = state_m.t + dt;
  return {out, st};
}

namespace {

class AdvanceFailure : public SolverAbort {
 public:
  AdvanceFailure(const std::string& what, SchemeState last_good, SchemeState best)
      : SolverAbort(what), last_good(std::move(last_good)), best(std::move(best)) {}
  SchemeState last_good, best;
};

// Node that ran into the axis during a failed step, or -1. A node counts when
// it lies within axis_segments adjacent segment lengths of the axis in the
// last converged state, or below r_close in Newton's best iterate. With two
// contact lines an eligible inner contact point takes precedence: the hole
// then closes on the substrate.
int axis_contact(const SchemeState& good, const SchemeState& best, const EventThresholds& th) {
  const GeneratingCurve& c = good.curve;
  const int J = c.J();
  const bool tcl = c.topology == Topology::TwoContactLines;
  auto near = [&](int j) {
    double reach = c.segment(j + 1).norm();
    if (j > 0) reach = std::max(reach, c.segment(j).norm());
    return c.r[j] < th.axis_segments * reach || (best.curve.J() == J && best.curve.r[j] < th.r_close);
  };
  if (tcl && near(0)) return 0;
  int node = -1;
  for (int j = 1; j < J; ++j)
    if (near(j) && (node < 0 || c.r[j] < c.r[node])) node = j;
  return node;
}

}  // namespace

EventThresholds thresholds_for(const GeneratingCurve& initial, const EventConfig& cfg) {
  EventThresholds th;
  th.z_pinch = cfg.z_pinch_rel * *std::max_element(initial.z.begin(), initial.z.end());
  th.r_close = cfg.r_close_rel * initial.r_outer();
  th.v_eq = cfg.v_eq;
  th.axis_segments = cfg.axis_segments;
  return th;
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::PinchOff: return "PinchOff";
    case EventKind::HoleClosed: return "HoleClosed";
    case EventKind::Equilibrium: return "Equilibrium";
  }
  return "?";
}

std::vector<EventRecord> detect_events(const SchemeState& prev, const SchemeState& next, double dt,
                                       const EventThresholds& th) {
  std::vector<EventRecord> out;
  const GeneratingCurve& c = next.curve;
  const int J = c.J();
  int pinch = -1;
  // A neck is an interior local minimum of z; nodes next to a contact line
  // are low without pinching.
  for (int j = 1; j < J; ++j)
    if (c.z[j] < th.z_pinch && c.z[j] < c.z[j - 1] && c.z[j] <= c.z[j + 1] &&
        (pinch < 0 || c.z[j] < c.z[pinch]))
      pinch = j;
  if (pinch > 0) {
    EventRecord e;
    e.kind = EventKind::PinchOff;
    e.time = next.t;
    e.node = pinch;
    out.push_back(e);
  }
  if (c.topology == Topology::TwoContactLines && c.r_inner() < th.r_close) {
    EventRecord e;
    e.kind = EventKind::HoleClosed;
    e.time = next.t;
    out.push_back(e);
  }
  if (dt > 0.0 && prev.curve.J() == J) {
    double v = 0.0;
    for (int j = 0; j <= J; ++j)
      v = std::max(v, (c.node(j) - prev.curve.node(j)).norm() / dt);
    if (v < th.v_eq) {
      EventRecord e;
      e.kind = EventKind::Equilibrium;
      e.time = next.t;
      out.push_back(e);
    }
  }
  return out;
}

std::optional<SplitResult> split_at_pinch(const SchemeState& state, int node) {
  const GeneratingCurve& c = state.curve;
  const int J = c.J();
  if (node < 4 || J - node < 4) return std::nullopt;
  GeneratingCurve a, b;
  a.topology = c.topology;
  b.topology = Topology::TwoContactLines;
  a.r.assign(c.r.begin(), c.r.begin() + node + 1);
  a.z.assign(c.z.begin(), c.z.begin() + node + 1);
  b.r.assign(c.r.begin() + node, c.r.end());
  b.z.assign(c.z.begin() + node, c.z.end());
  a.z.back() = 0.0;
  b.z.front() = 0.0;
  try {
    a.validate();
    b.validate();
    SplitResult s{seed_state(a, state.t), seed_state(b, state.t), 0.0};
    s.projection_loss = discrete_volume(c) - discrete_volume(a) - discrete_volume(b);
    return s;
  } catch (const Error&) {
    return std::nullopt;
  }
}

RunResult run(const GeneratingCurve& initial, const RunSettings& settings,
              const RunObserver& observer) {
  initial.validate();
  settings.model.validate();
  const double dt = settings.physics.dt;
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  if (!(settings.t_end >= 0.0)) throw ConfigError("t_end must be >= 0");

  const StabilityPolicy& pol = settings.model.stability();
  std::optional<StabilitySolver> solver;
  if (pol.mode == StabilityPolicy::Mode::AutoMinimal)
    solver.emplace(settings.model, pol.scase, pol.grid);
  const StabilitySolver* sp = solver ? &*solver : nullptr;

  RunResult res;
  res.films = {seed_state(initial, 0.0)};
  const EventThresholds th = thresholds_for(initial, settings.events);
  const double W0 = total_energy(res.films, settings);
  double Vref = total_volume(res.films);

  auto make_record = [&](double t) {
    DiagnosticsRecord r;
    r.t = t;
    r.W = total_energy(res.films, settings);
    r.W_ratio = r.W / W0;
    r.dV = (total_volume(res.films) - Vref) / Vref;
    r.Rh = 1.0;
    for (const auto& f : res.films) r.Rh = std::max(r.Rh, mesh_ratio(f.curve));
    r.r_i = res.films.front().curve.r_inner();
    r.r_o = res.films.back().curve.r_outer();
    r.n_films = static_cast<int>(res.films.size());
    return r;
  };

  {
    const DiagnosticsRecord r0 = make_record(0.0);
    res.diagnostics.push_back(r0);
    if (observer) observer(RunView{0, 0.0, res.films}, r0);
  }

  // Advances one film over [t0, t1], retrying with 2^k substeps. On failure
  // the last converged substep and Newton's best iterate are kept so a node
  // running into the axis can be told apart from a plain solver failure.
  auto advance = [&](const SchemeState& s, double t1, int& iters, double& resn) {
    const double h = t1 - s.t;
    std::string last;
    SchemeState last_good = s, best = s;
    for (int level = 0; level <= settings.max_substep_levels; ++level) {
      const int n = 1 << level;
      SchemeState cur = s;
      int it = 0;
      double rn = 0.0;
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) {
        try {
          StepResult r = newton_step(cur, h / n, settings.model, settings.physics,
                                     settings.newton, sp);
          cur = std::move(r.state);
          it += r.stats.iterations;
          rn = std::max(rn, r.stats.residual_norm);
        } catch (const ConfigError&) {
          throw;
        } catch (const StepFailure& e) {
          last = e.what();
          best = e.best();
          ok = false;
        } catch (const Error& e) {
          last = e.what();
          best = cur;
          ok = false;
        }
      }
      if (ok) {
        cur.t = t1;
        iters += it;
        resn = std::max(resn, rn);
        return cur;
      }
      last_good = std::move(cur);
    }
    throw AdvanceFailure("step to t = " + std::to_string(t1) + " failed after " +
                             std::to_string(settings.max_substep_levels) + " halvings: " + last,
                         std::move(last_good), std::move(best));
  };

  const double ratio = settings.t_end / dt;
  long nsteps = std::lround(ratio);
  if (std::fabs(ratio - static_cast<double>(nsteps)) > 1e-9 * std::max(1.0, ratio))
    nsteps = static_cast<long>(std::ceil(ratio));

  for (long k = 1; k <= nsteps; ++k) {
    const double t1 = k == nsteps ? settings.t_end : static_cast<double>(k) * dt;
    std::vector<SchemeState> next;
    next.reserve(res.films.size());
    std::vector<EventRecord> closures;  // per film, time < 0 when none
    int iters = 0;
    double resn = 0.0;
    bool failed = false;
    for (std::size_t i = 0; i < res.films.size() && !failed; ++i) {
      EventRecord none;
      none.time = -1.0;
      try {
        next.push_back(advance(res.films[i], t1, iters, resn));
        closures.push_back(none);
      } catch (const AdvanceFailure& e) {
        const int node = axis_contact(e.last_good, e.best, th);
        if (node < 0) {
          res.aborted = true;
          res.abort_reason = e.what();
          failed = true;
          break;
        }
        EventRecord rec;
        rec.kind = EventKind::HoleClosed;
        rec.time = e.last_good.t;
        rec.film = static_cast<int>(i);
        rec.node = node;
        rec.note = node == 0 ? "inner contact line reaches the axis within a step"
                             : "film wall reaches the axis above the substrate; the enclosed "
                               "void is not modeled";
        next.push_back(e.last_good);
        closures.push_back(rec);
      }
    }
    if (failed) break;

    bool pinch = false, hole = false, all_eq = true, stop = false, topo_changed = false;
    std::vector<SchemeState> films;
    for (std::size_t i = 0; i < next.size(); ++i) {
      SchemeState s = std::move(next[i]);
      if (closures[i].time >= 0.0) {
        hole = true;
        all_eq = false;
        res.events.push_back(closures[i]);
        if (closures[i].node == 0) {
          s.curve.r[0] = 0.0;
          s.curve.topology = Topology::Island;
          s = seed_state(s.curve, s.t);
          topo_changed = true;
        } else {
          res.stopped_on_closure = true;
          stop = true;
        }
        films.push_back(std::move(s));
        continue;
      }
      const auto ev = detect_events(res.films[i], s, s.t - res.films[i].t, th);
      bool eq = false;
      std::optional<EventRecord> pe;
      for (const auto& e : ev) {
        if (e.kind == EventKind::Equilibrium) eq = true;
        if (e.kind == EventKind::PinchOff) pe = e;
        if (e.kind == EventKind::HoleClosed) {
          hole = true;
          EventRecord rec = e;
          rec.film = static_cast<int>(i);
          res.events.push_back(rec);
          s.curve.r[0] = 0.0;
          s.curve.topology = Topology::Island;
          s = seed_state(s.curve, s.t);
          topo_changed = true;
        }
      }
      all_eq = all_eq && eq;
      if (pe) {
        pinch = true;
        EventRecord rec = *pe;
        rec.film = static_cast<int>(i);
        if (settings.events.split) {
          if (auto sr = split_at_pinch(s, pe->node)) {
            rec.children = {sr->inner.curve, sr->outer.curve};
            rec.projection_loss = sr->projection_loss;
            res.events.push_back(rec);
            films.push_back(std::move(sr->inner));
            films.push_back(std::move(sr->outer));
            topo_changed = true;
            continue;
          }
          rec.note = "split refused: a child would have fewer than 4 segments";
        } else {
          stop = true;
        }
        res.events.push_back(rec);
      }
      films.push_back(std::move(s));
    }
    res.films = std::move(films);
    res.steps = static_cast<int>(k);
    if (topo_changed) Vref = total_volume(res.films);

    // A closure stops a film at its last converged substep.
    double t_rec = t1;
    for (const auto& f : res.films) t_rec = std::min(t_rec, f.t);
    DiagnosticsRecord r = make_record(t_rec);
    r.newton_iters = iters;
    r.residual_norm = resn;
    r.pinch_off = pinch;
    r.hole_closed = hole;
    r.equilibrium = all_eq;
    res.diagnostics.push_back(r);
    if (observer) observer(RunView{static_cast<int>(k), t_rec, res.films}, r);

    if (all_eq) {
      EventRecord e;
      e.kind = EventKind::Equilibrium;
      e.time = t1;
      e.film = -1;
      res.events.push_back(e);
      res.reached_equilibrium = true;
      if (settings.events.stop_on_equilibrium) break;
    }
    if (stop) {
      res.stopped_on_pinch = pinch;
      break;
    }
  }
  return res;
}

}  // namespace ssd
