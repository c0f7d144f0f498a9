#include "ssd/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <array>
#include <sstream>

namespace ssd {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(section + " must be a JSON object");
  for (const auto& item : obj.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                [&](const char* a) { return item.key() == a; });
    if (!ok) throw ConfigError("unknown key \"" + item.key() + "\" in " + section);
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& section) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(section + "." + key + ": wrong value type");
  }
}

const char* mode_name(StabilityPolicy::Mode m) {
  switch (m) {
    case StabilityPolicy::Mode::Zero: return "zero";
    case StabilityPolicy::Mode::Constant: return "constant";
    case StabilityPolicy::Mode::AutoMinimal: return "auto_minimal";
  }
  return "?";
}

const char* case_name(StabilityCase c) {
  switch (c) {
    case StabilityCase::I: return "I";
    case StabilityCase::II: return "II";
    case StabilityCase::III: return "III";
  }
  return "?";
}

StabilityPolicy::Mode parse_mode(const std::string& s) {
  if (s == "zero") return StabilityPolicy::Mode::Zero;
  if (s == "constant") return StabilityPolicy::Mode::Constant;
  if (s == "auto_minimal") return StabilityPolicy::Mode::AutoMinimal;
  throw ConfigError("model.stability.mode: unknown mode \"" + s + "\"");
}

StabilityCase parse_case(const std::string& s) {
  if (s == "I") return StabilityCase::I;
  if (s == "II") return StabilityCase::II;
  if (s == "III") return StabilityCase::III;
  throw ConfigError("model.stability.case: unknown case \"" + s + "\"");
}

std::string topology_name(Topology t) {
  return t == Topology::Island ? "island" : "two_contact_lines";
}

Topology parse_topology(const std::string& s) {
  if (s == "island") return Topology::Island;
  if (s == "two_contact_lines") return Topology::TwoContactLines;
  throw ConfigError("initial.topology: unknown topology \"" + s + "\"");
}

}  // namespace

void validate(const RunConfig& c) {
  if (c.J < 4) throw ConfigError("discretization.J: J ≥ 4 required (got " + std::to_string(c.J) + ")");
  if (!(c.dt > 0.0)) throw ConfigError("discretization.dt: must be > 0");
  if (!(c.t_end >= 0.0)) throw ConfigError("discretization.t_end: must be >= 0");
  if (!(c.eps >= 0.0)) throw ConfigError("physics.eps: must be >= 0");
  if (!(c.eta > 0.0)) throw ConfigError("physics.eta: must be > 0");
  if (!std::isfinite(c.sigma)) throw ConfigError("physics.sigma: must be finite");
  if (!(c.newton.tol > 0.0)) throw ConfigError("newton.tol: must be > 0");
  if (c.newton.max_iters < 1) throw ConfigError("newton.max_iters: must be >= 1");
  if (!(c.newton.damping > 0.0 && c.newton.damping <= 1.0))
    throw ConfigError("newton.damping: must lie in (0, 1]");
  if (c.newton.max_halvings < 0) throw ConfigError("newton.max_halvings: must be >= 0");
  if (!(c.events.z_pinch_rel >= 0.0)) throw ConfigError("events.z_pinch_rel: must be >= 0");
  if (!(c.events.r_close_rel >= 0.0)) throw ConfigError("events.r_close_rel: must be >= 0");
  if (!(c.events.v_eq >= 0.0)) throw ConfigError("events.v_eq: must be >= 0");
  if (!(c.events.axis_segments >= 0.0)) throw ConfigError("events.axis_segments: must be >= 0");
  if (c.output.snapshot_every < 0) throw ConfigError("output.snapshot_every: must be >= 0");
  for (const auto& f : c.output.formats)
    if (f != "csv" && f != "obj") throw ConfigError("output.formats: unknown format \"" + f + "\"");
  build_model(c.model).validate();
  build_initial(c).validate();
}

RunConfig parse_config(const json& j) {
  check_keys(j, "config",
             {"preset", "model", "physics", "discretization", "initial", "newton", "events", "output"});
  RunConfig c;
  if (j.contains("preset")) {
    std::string name;
    read(j, "preset", name, "config");
    c = preset(name);
  }
  if (j.contains("model")) {
    const json& m = j["model"];
    check_keys(m, "model", {"kind", "beta", "q", "samples", "stability"});
    read(m, "kind", c.model.kind, "model");
    read(m, "beta", c.model.beta, "model");
    read(m, "q", c.model.q, "model");
    read(m, "samples", c.model.samples, "model");
    if (m.contains("stability")) {
      const json& s = m["stability"];
      check_keys(s, "model.stability",
                 {"mode", "case", "grid", "value", "allow_case_iii", "printed_case_ii_sign"});
      std::string mode, scase;
      read(s, "mode", mode, "model.stability");
      read(s, "case", scase, "model.stability");
      if (!mode.empty()) c.model.stability.mode = parse_mode(mode);
      if (!scase.empty()) c.model.stability.scase = parse_case(scase);
      read(s, "grid", c.model.stability.grid, "model.stability");
      read(s, "value", c.model.stability.value, "model.stability");
      read(s, "allow_case_iii", c.model.stability.allow_case_iii, "model.stability");
      read(s, "printed_case_ii_sign", c.model.stability.printed_case_ii_sign, "model.stability");
    }
  }
  if (j.contains("physics")) {
    const json& p = j["physics"];
    check_keys(p, "physics", {"sigma", "eta", "eps"});
    read(p, "sigma", c.sigma, "physics");
    read(p, "eta", c.eta, "physics");
    read(p, "eps", c.eps, "physics");
  }
  if (j.contains("discretization")) {
    const json& d = j["discretization"];
    check_keys(d, "discretization", {"J", "dt", "t_end"});
    read(d, "J", c.J, "discretization");
    read(d, "dt", c.dt, "discretization");
    read(d, "t_end", c.t_end, "discretization");
  }
  if (j.contains("initial")) {
    const json& i = j["initial"];
    check_keys(i, "initial", {"kind", "r0", "a", "b", "topology", "nodes"});
    read(i, "kind", c.initial.kind, "initial");
    read(i, "r0", c.initial.r0, "initial");
    read(i, "a", c.initial.a, "initial");
    read(i, "b", c.initial.b, "initial");
    if (i.contains("topology")) {
      std::string t;
      read(i, "topology", t, "initial");
      c.initial.topology = parse_topology(t);
    }
    if (i.contains("nodes")) {
      std::vector<std::array<double, 2>> nodes;
      read(i, "nodes", nodes, "initial");
      c.initial.nodes.clear();
      for (const auto& n : nodes) c.initial.nodes.push_back({n[0], n[1]});
    }
    if (c.initial.kind == "nodes" && !c.initial.nodes.empty())
      c.J = static_cast<int>(c.initial.nodes.size()) - 1;
  }
  if (j.contains("newton")) {
    const json& n = j["newton"];
    check_keys(n, "newton", {"tol", "max_iters", "damping", "max_halvings", "fd_check"});
    read(n, "tol", c.newton.tol, "newton");
    read(n, "max_iters", c.newton.max_iters, "newton");
    read(n, "damping", c.newton.damping, "newton");
    read(n, "max_halvings", c.newton.max_halvings, "newton");
    read(n, "fd_check", c.newton.fd_check, "newton");
  }
  if (j.contains("events")) {
    const json& e = j["events"];
    check_keys(e, "events", {"z_pinch_rel", "r_close_rel", "v_eq", "axis_segments", "split",
                              "stop_on_equilibrium"});
    read(e, "z_pinch_rel", c.events.z_pinch_rel, "events");
    read(e, "r_close_rel", c.events.r_close_rel, "events");
    read(e, "v_eq", c.events.v_eq, "events");
    read(e, "axis_segments", c.events.axis_segments, "events");
    read(e, "split", c.events.split, "events");
    read(e, "stop_on_equilibrium", c.events.stop_on_equilibrium, "events");
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    check_keys(o, "output", {"directory", "snapshot_every", "formats"});
    read(o, "directory", c.output.directory, "output");
    read(o, "snapshot_every", c.output.snapshot_every, "output");
    read(o, "formats", c.output.formats, "output");
  }
  validate(c);
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line and column.
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("JSON parse error at line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": " + e.what());
  }
  return parse_config(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json to_json(const RunConfig& c) {
  json j;
  if (!c.preset.empty()) j["preset"] = c.preset;
  json stab = {{"mode", mode_name(c.model.stability.mode)},
               {"case", case_name(c.model.stability.scase)},
               {"grid", c.model.stability.grid},
               {"value", c.model.stability.value},
               {"allow_case_iii", c.model.stability.allow_case_iii},
               {"printed_case_ii_sign", c.model.stability.printed_case_ii_sign}};
  j["model"] = {{"kind", c.model.kind}, {"beta", c.model.beta}, {"q", c.model.q}, {"stability", stab}};
  if (!c.model.samples.empty()) j["model"]["samples"] = c.model.samples;
  j["physics"] = {{"sigma", c.sigma}, {"eta", c.eta}, {"eps", c.eps}};
  j["discretization"] = {{"J", c.J}, {"dt", c.dt}, {"t_end", c.t_end}};
  json init = {{"kind", c.initial.kind}, {"r0", c.initial.r0}, {"a", c.initial.a}, {"b", c.initial.b}};
  if (c.initial.kind == "nodes") {
    init["topology"] = topology_name(c.initial.topology);
    json nodes = json::array();
    for (const Vec2& n : c.initial.nodes) nodes.push_back({n.r, n.z});
    init["nodes"] = nodes;
  }
  j["initial"] = init;
  j["newton"] = {{"tol", c.newton.tol},
                 {"max_iters", c.newton.max_iters},
                 {"damping", c.newton.damping},
                 {"max_halvings", c.newton.max_halvings},
                 {"fd_check", c.newton.fd_check}};
  j["events"] = {{"z_pinch_rel", c.events.z_pinch_rel},
                 {"r_close_rel", c.events.r_close_rel},
                 {"v_eq", c.events.v_eq},
                 {"axis_segments", c.events.axis_segments},
                 {"split", c.events.split},
                 {"stop_on_equilibrium", c.events.stop_on_equilibrium}};
  j["output"] = {{"directory", c.output.directory},
                 {"snapshot_every", c.output.snapshot_every},
                 {"formats", c.output.formats}};
  return j;
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
  json j = to_json(cfg);
  json* node = &j;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw ConfigError("empty override key");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!node->is_object() || !node->contains(parts[i]))
      throw ConfigError("unknown override key \"" + key + "\"");
    node = &(*node)[parts[i]];
  }
  json v;
  try {
    v = json::parse(value);
  } catch (const json::parse_error&) {
    v = value;
  }
  *node = v;
  cfg = parse_config(j);
}

AnisotropyModel build_model(const ModelConfig& m) {
  AnisotropyModel model;
  if (m.kind == "isotropic")
    model = AnisotropyModel::isotropic(m.q);
  else if (m.kind == "four_fold")
    model = AnisotropyModel::four_fold(m.beta, m.q);
  else if (m.kind == "custom")
    model = AnisotropyModel::custom(m.samples, m.q);
  else
    throw ConfigError("model.kind: unknown kind \"" + m.kind + "\"");
  model.set_stability(m.stability);
  return model;
}

GeneratingCurve build_initial(const InitialConfig& init, int J) {
  const double pi = std::numbers::pi;
  if (init.kind == "semicircle") {
    if (!(init.a > 0.0 && init.b > 0.0 && init.r0 - init.a > 0.0))
      throw ConfigError("initial: semicircle needs a > 0, b > 0 and r0 > a");
    return sample_curve(
        [&](double rho) { return Vec2{init.r0 + init.a * std::cos(pi * rho), init.b * std::sin(pi * rho)}; },
        J, Topology::TwoContactLines);
  }
  if (init.kind == "quarter") {
    if (!(init.a > 0.0 && init.b > 0.0)) throw ConfigError("initial: quarter needs a > 0 and b > 0");
    return sample_curve(
        [&](double rho) {
          return Vec2{init.a * std::cos(0.5 * pi * rho), init.b * std::sin(0.5 * pi * rho)};
        },
        J, Topology::Island);
  }
  if (init.kind == "nodes") {
    const int n = static_cast<int>(init.nodes.size()) - 1;
    if (n < 4) throw ConfigError("initial.nodes: J ≥ 4 required (got " + std::to_string(n) + ")");
    return sample_curve(
        [&](double rho) { return init.nodes[static_cast<std::size_t>(std::lround(rho * n))]; }, n,
        init.topology);
  }
  throw ConfigError("initial.kind: unknown kind \"" + init.kind + "\"");
}

GeneratingCurve build_initial(const RunConfig& cfg) { return build_initial(cfg.initial, cfg.J); }

RunSettings build_settings(const RunConfig& cfg) {
  RunSettings s;
  s.model = build_model(cfg.model);
  s.physics = SchemeParams{cfg.sigma, cfg.eta, cfg.eps, cfg.dt};
  s.t_end = cfg.t_end;
  s.newton = cfg.newton;
  s.events = cfg.events;
  return s;
}

}  // namespace ssd
