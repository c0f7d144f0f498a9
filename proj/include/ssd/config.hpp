#pragma once

#include <string>
#include <vector>

#include "ssd/evolution.hpp"
#include "json.hpp"

namespace ssd {

struct ModelConfig {
  std::string kind = "four_fold";  // isotropic | four_fold | custom
  double beta = 0.07;
  int q = 1;
  std::vector<double> samples;  // custom only
  StabilityPolicy stability;
};

struct InitialConfig {
  // semicircle: (r0 + a cos(pi rho), b sin(pi rho)), two contact lines
  // quarter:    (a cos(pi rho / 2), b sin(pi rho / 2)), island
  // nodes:      explicit node list in any orientation
  std::string kind = "semicircle";
  double r0 = 10.0, a = 1.0, b = 1.0;
  Topology topology = Topology::TwoContactLines;  // nodes only
  std::vector<Vec2> nodes;
};

struct OutputConfig {
  std::string directory = "out";
  int snapshot_every = 0;  // steps; 0 writes only the first and last state
  std::vector<std::string> formats{"csv"};  // csv, obj
};

struct RunConfig {
  std::string preset;
  ModelConfig model;
  double sigma = -0.6, eta = 100.0, eps = 0.01;
  int J = 32;
  double dt = 1.0 / 64.0;
  double t_end = 2.0;
  InitialConfig initial;
  NewtonConfig newton;
  EventConfig events;
  OutputConfig output;
};

// Throws ConfigError naming the offending field.
void validate(const RunConfig& cfg);

// Preset catalog; throws ConfigError for unknown names.
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

// Fail-closed parsing: every unknown key is rejected by name. A "preset"
// key seeds the defaults that the remaining sections override.
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& cfg);

// Sets a dotted key such as "model.beta" from its textual value.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

AnisotropyModel build_model(const ModelConfig& m);
GeneratingCurve build_initial(const RunConfig& cfg);
GeneratingCurve build_initial(const InitialConfig& init, int J);
RunSettings build_settings(const RunConfig& cfg);

}  // namespace ssd
