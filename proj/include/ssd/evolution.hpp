#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ssd/error.hpp"
#include "ssd/forms.hpp"

namespace ssd {

struct NewtonConfig {
  double tol = 1e-8;  // on |dX|_inf + |dmu|_inf + |dmu_S|_inf
  int max_iters = 50;
  double damping = 0.5;  // backtracking factor
  int max_halvings = 20;
  bool fd_check = false;  // compare the Jacobian with finite differences each iteration
};

struct NewtonStats {
  int iterations = 0;
  double residual_norm = 0.0;  // max-norm of the free rows at the returned iterate
  std::vector<double> updates;  // iterate-difference norm per iteration
  double fd_mismatch = 0.0;     // only with fd_check
};

// Newton did not converge; carries the best iterate seen.
class StepFailure : public SolverAbort {
 public:
  StepFailure(const std::string& what, SchemeState best, NewtonStats stats)
      : SolverAbort(what), best_(std::move(best)), stats_(std::move(stats)) {}
  const SchemeState& best() const { return best_; }
  const NewtonStats& stats() const { return stats_; }

 private:
  SchemeState best_;
  NewtonStats stats_;
};

struct StepResult {
  SchemeState state;
  NewtonStats stats;
};

// One implicit step. params.dt is overridden by dt. dt == 0 returns state_m.
StepResult newton_step(const SchemeState& state_m, double dt, const AnisotropyModel& model,
                       const SchemeParams& params, const NewtonConfig& cfg,
                       const StabilitySolver* solver = nullptr);

struct EventConfig {
  double z_pinch_rel = 1e-3;  // times the initial max height
  double r_close_rel = 1e-3;  // times the initial outer radius
  double v_eq = 1e-6;         // max nodal speed
  // A failed step counts as axis contact for a node within this many
  // adjacent segment lengths of the axis.
  double axis_segments = 3.0;
  bool split = false;         // false: PinchOff ends the run
  bool stop_on_equilibrium = true;
};

struct EventThresholds {
  double z_pinch = 0.0;
  double r_close = 0.0;
  double v_eq = 1e-6;
  double axis_segments = 3.0;
};
EventThresholds thresholds_for(const GeneratingCurve& initial, const EventConfig& cfg);

enum class EventKind { PinchOff, HoleClosed, Equilibrium };
const char* to_string(EventKind k);

struct EventRecord {
  EventKind kind = EventKind::Equilibrium;
  double time = 0.0;
  int film = 0;
  int node = -1;  // PinchOff: interior neck node; HoleClosed: node at the axis, if known
  std::vector<GeneratingCurve> children;  // PinchOff with a performed split
  double projection_loss = 0.0;           // parent volume minus children volume
  std::string note;
};

// Events of one film after the step prev -> next.
std::vector<EventRecord> detect_events(const SchemeState& prev, const SchemeState& next, double dt,
                                       const EventThresholds& th);

struct SplitResult {
  SchemeState inner, outer;
  double projection_loss = 0.0;
};
// Splits at interior node p projected to z = 0. Empty when a child would
// have fewer than 4 segments.
std::optional<SplitResult> split_at_pinch(const SchemeState& state, int node);

struct RunSettings {
  AnisotropyModel model = AnisotropyModel::isotropic();
  SchemeParams physics;  // physics.dt is the base step
  double t_end = 1.0;
  NewtonConfig newton;
  EventConfig events;
  int max_substep_levels = 6;
};

struct DiagnosticsRecord {
  double t = 0.0;
  double W = 0.0;
  double W_ratio = 1.0;
  double dV = 0.0;  // (V - V_ref) / V_ref, V_ref reset at topology changes
  double Rh = 1.0;
  double r_i = 0.0, r_o = 0.0;
  int newton_iters = 0;
  double residual_norm = 0.0;
  bool pinch_off = false, hole_closed = false, equilibrium = false;
  int n_films = 1;
};

struct RunView {
  int step;  // 0 for the initial record
  double t;
  const std::vector<SchemeState>& films;
};
using RunObserver = std::function<void(const RunView&, const DiagnosticsRecord&)>;

struct RunResult {
  std::vector<DiagnosticsRecord> diagnostics;
  std::vector<EventRecord> events;
  std::vector<SchemeState> films;  // final state
  int steps = 0;
  bool aborted = false;
  std::string abort_reason;
  bool reached_equilibrium = false;
  bool stopped_on_pinch = false;
  // A film wall reached the axis away from the substrate (terminal).
  bool stopped_on_closure = false;
};

// Seeds kappa and mu_S from the initial curve and advances to t_end or a
// terminal event. Failed steps are retried as 2^k substeps (k <= 6). When the
// retries fail because a node runs into the axis, the run records HoleClosed
// at the last converged substep: the inner contact line turns the film into
// an island, an interior node ends the run.
RunResult run(const GeneratingCurve& initial, const RunSettings& settings,
              const RunObserver& observer = {});

}  // namespace ssd
