#include "ssd/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <numbers>
#include <sstream>

#include "ssd/io.hpp"

namespace ssd {

namespace {

constexpr int kOk = 0, kConfig = 2, kSolver = 3, kIo = 4;

int report(const RunResult& r, const std::string& dir) {
  std::printf("%s: %d steps, t = %.6g, films = %zu\n", dir.c_str(), r.steps,
              r.diagnostics.empty() ? 0.0 : r.diagnostics.back().t, r.films.size());
  for (const auto& e : r.events)
    std::printf("  event %s at t = %.6g (film %d, node %d)%s%s\n", to_string(e.kind), e.time, e.film,
                e.node, e.note.empty() ? "" : ": ", e.note.c_str());
  if (r.aborted) {
    std::fprintf(stderr, "solver abort: %s\n", r.abort_reason.c_str());
    return kSolver;
  }
  return kOk;
}

int cmd_run(const std::string& config, const std::string& preset_name, const std::string& out) {
  if (config.empty() == preset_name.empty()) throw ConfigError("run needs exactly one of --config or --preset");
  RunConfig cfg = config.empty() ? preset(preset_name) : load_config(config);
  if (!out.empty()) cfg.output.directory = out;
  validate(cfg);
  return report(run_to_directory(cfg), cfg.output.directory);
}

int cmd_converge(const std::string& preset_name, int levels, const std::string& out, bool serial) {
  const RunConfig cfg = preset(preset_name);
  ConvergenceSetup setup;
  setup.initial = [init = cfg.initial](int J) { return build_initial(init, J); };
  setup.base = build_settings(cfg);
  setup.J0 = cfg.J;
  setup.dt0 = cfg.dt;
  setup.levels = levels;
  setup.parallel = !serial;
  setup.eval_times.clear();
  for (double t : {1.0, 2.0})
    if (t <= cfg.t_end) setup.eval_times.push_back(t);
  if (setup.eval_times.empty()) setup.eval_times.push_back(cfg.t_end);
  const ConvergenceTable tab = convergence_harness(setup);

  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out + ": " + ec.message());
  for (std::size_t i = 0; i < tab.eval_times.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "convergence_t%g.csv", tab.eval_times[i]);
    const std::string csv = convergence_csv(tab, i);
    write_text((std::filesystem::path(out) / name).string(), csv);
    std::printf("t = %g\n%s", tab.eval_times[i], csv.c_str());
  }
  write_text((std::filesystem::path(out) / "convergence.csv").string(),
             convergence_csv(tab, tab.eval_times.size() - 1));
  for (const auto& f : tab.failures) std::fprintf(stderr, "%s\n", f.c_str());
  return tab.complete() ? kOk : kSolver;
}

int cmd_sweep(const std::string& preset_name, const std::string& vary, const std::string& out) {
  const auto eq = vary.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--vary expects key=v1,v2,...");
  const std::string key = vary.substr(0, eq);
  std::vector<std::string> values;
  std::stringstream ss(vary.substr(eq + 1));
  for (std::string v; std::getline(ss, v, ',');)
    if (!v.empty()) values.push_back(v);
  if (values.empty()) throw ConfigError("--vary has no values");

  std::vector<RunConfig> cfgs;
  for (const auto& v : values) {
    RunConfig c = preset(preset_name);
    apply_override(c, key, v);
    c.output.directory = (std::filesystem::path(out) / (key + "=" + v)).string();
    cfgs.push_back(std::move(c));
  }
  // Independent runs; each writes only its own directory.
  std::vector<std::future<RunResult>> fut;
  for (const auto& c : cfgs) fut.push_back(std::async(std::launch::async, [c] { return run_to_directory(c); }));
  int code = kOk;
  for (std::size_t i = 0; i < fut.size(); ++i) code = std::max(code, report(fut[i].get(), cfgs[i].output.directory));
  return code;
}

int cmd_export(const std::string& snapshot, int segments, std::string out) {
  if (segments < 8) throw ConfigError("--segments must be >= 8");
  const SchemeState s = read_snapshot(snapshot);
  if (out.empty()) out = std::filesystem::path(snapshot).replace_extension(".obj").string();
  export_surface(s.curve, segments, out);
  std::printf("%s\n", out.c_str());
  return kOk;
}

int cmd_stability(double beta, const std::string& scase, int grid, int points) {
  StabilityPolicy pol;
  if (scase == "I")
    pol.scase = StabilityCase::I;
  else if (scase == "II")
    pol.scase = StabilityCase::II;
  else
    throw ConfigError("--case must be I or II");
  AnisotropyModel model = AnisotropyModel::four_fold(beta, pol.scase == StabilityCase::I ? 0 : 1);
  pol.grid = grid;
  model.set_stability(pol);
  model.validate();
  const StabilitySolver solver(model, pol.scase, grid);
  std::printf("theta,S0\n");
  for (int k = 0; k < points; ++k) {
    const double th = -std::numbers::pi + 2.0 * std::numbers::pi * k / points;
    std::printf("%.17g,%.17g\n", th, solver.minimal(th));
  }
  return kOk;
}

}  // namespace

int cli(int argc, char** argv) {
  CLI::App app{"Axisymmetric solid-state dewetting solver"};
  app.require_subcommand(1);

  std::string config, preset_name, out;
  auto* run = app.add_subcommand("run", "Run one configuration");
  run->add_option("--config", config, "JSON configuration file");
  run->add_option("--preset", preset_name, "Preset name");
  run->add_option("--out", out, "Output directory");

  std::string cpreset = "ex1", cout_dir = "convergence";
  int levels = 4;
  bool serial = false;
  auto* conv = app.add_subcommand("converge", "Refinement study with manifold-distance errors");
  conv->add_option("--preset", cpreset, "Preset name");
  conv->add_option("--levels", levels, "Number of runs (errors = levels - 1)")->check(CLI::Range(3, 8));
  conv->add_option("--out", cout_dir, "Output directory");
  conv->add_flag("--serial", serial, "Run levels one after another");

  std::string spreset, vary, sout = "sweep";
  auto* sweep = app.add_subcommand("sweep", "Concurrent runs over one parameter");
  sweep->add_option("--preset", spreset, "Preset name")->required();
  sweep->add_option("--vary", vary, "key=v1,v2,...")->required();
  sweep->add_option("--out", sout, "Output root directory");

  std::string snapshot, eout;
  int segments = 64;
  auto* exp = app.add_subcommand("export-surface", "Revolve a snapshot curve into an OBJ mesh");
  exp->add_option("--snapshot", snapshot, "Snapshot CSV")->required();
  exp->add_option("--segments", segments, "Azimuthal segments (>= 8)");
  exp->add_option("--out", eout, "Output OBJ path");

  double beta = 0.07;
  std::string scase = "II";
  int grid = 512, points = 360;
  auto* stab = app.add_subcommand("stability-table", "Print minimal stabilization values");
  stab->add_option("--beta", beta, "Four-fold anisotropy strength")->required();
  stab->add_option("--case", scase, "I or II");
  stab->add_option("--grid", grid, "theta-hat grid size");
  stab->add_option("--points", points, "Number of theta rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (run->parsed()) return cmd_run(config, preset_name, out);
    if (conv->parsed()) return cmd_converge(cpreset, levels, cout_dir, serial);
    if (sweep->parsed()) return cmd_sweep(spreset, vary, sout);
    if (exp->parsed()) return cmd_export(snapshot, segments, eout);
    if (stab->parsed()) return cmd_stability(beta, scase, grid, points);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kIo;
  } catch (const SolverAbort& e) {
    std::fprintf(stderr, "solver abort: %s\n", e.what());
    return kSolver;
  } catch (const DegenerateMesh& e) {
    std::fprintf(stderr, "solver abort: %s\n", e.what());
    return kSolver;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfig;
  }
  return kConfig;
}

}  // namespace ssd
