#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ssd/cli.hpp"
#include "ssd/curve.hpp"
#include "ssd/error.hpp"
#include "ssd/io.hpp"

using namespace ssd;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

int count_prefix(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  int n = 0;
  for (std::string line; std::getline(in, line);) n += line.rfind(prefix, 0) == 0;
  return n;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ssd_test_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int call_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ssd");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("annulus surface counts") {
  GeneratingCurve c;
  c.r = {1.0, 2.0};
  c.z = {0.0, 0.0};
  const std::string obj = surface_obj(c, 4);
  CHECK(count_prefix(obj, "v ") == 8);
  CHECK(count_prefix(obj, "f ") == 8);
  // First ring vertex sits at phi = 0.
  CHECK(obj.rfind("v 1 0 0\n", 0) == 0);
}

TEST_CASE("island surface has a single apex vertex") {
  const GeneratingCurve c = sample_curve(
      [](double p) { return Vec2{std::cos(pi * p / 2), std::sin(pi * p / 2)}; }, 8, Topology::Island);
  const int M = 16;
  const std::string obj = surface_obj(c, M);
  CHECK(count_prefix(obj, "v ") == 1 + 8 * M);
  // Apex fan plus quads on the remaining 7 segments.
  CHECK(count_prefix(obj, "f ") == M + 2 * 7 * M);
  CHECK(count_prefix(obj, "v 0 0 ") == 1);
  CHECK_THROWS_AS(export_surface(c, 4, "/nonexistent/x.obj"), ConfigError);
}

TEST_CASE("snapshot CSV round trip is byte-identical") {
  const GeneratingCurve c = sample_curve(
      [](double p) { return Vec2{10 + std::cos(pi * p), std::sin(pi * p)}; }, 17, Topology::TwoContactLines);
  const SchemeState s = seed_state(c, 0.375);
  const std::string a = snapshot_csv(s);
  const SchemeState back = parse_snapshot_csv(a);
  CHECK(snapshot_csv(back) == a);
  CHECK(back.curve.r == s.curve.r);
  CHECK(back.curve.z == s.curve.z);
  CHECK(back.mu_S == s.mu_S);
  CHECK(back.curve.topology == Topology::TwoContactLines);

  const SchemeState isl = seed_state(sample_curve(
      [](double p) { return Vec2{std::cos(pi * p / 2), std::sin(pi * p / 2)}; }, 9, Topology::Island));
  CHECK(parse_snapshot_csv(snapshot_csv(isl)).curve.topology == Topology::Island);
  CHECK_THROWS_AS(read_snapshot("/nonexistent/snap.csv"), IoError);
}

TEST_CASE("config validation names the offending field") {
  RunConfig c = preset("ex1");
  c.J = 3;
  try {
    validate(c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("J ≥ 4") != std::string::npos);
  }
  try {
    parse_config_text(R"({"discretization": {"J": 16, "jitter": 1}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("unknown key \"jitter\"") != std::string::npos);
  }
  try {
    parse_config_text("{\n  \"physics\": {\n    \"eps\": ,\n  }\n}");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(preset("fig99"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), IoError);
}

TEST_CASE("presets expand to their documented values") {
  const RunConfig a = preset("fig5_beta007");
  CHECK(a.model.beta == 0.07);
  CHECK(a.J == 128);
  CHECK(a.dt == 1.0 / 256);
  CHECK(a.t_end == 2.0);
  CHECK(a.initial.r0 == 10.0);

  const RunConfig f9 = preset("fig9");
  CHECK(f9.J == 100);
  CHECK(f9.eps == 0.001);
  CHECK(f9.dt == 1.0 / 50);
  CHECK(f9.initial.r0 == 4.0);
  CHECK(f9.sigma == -0.6);

  const RunConfig f10 = preset("fig10");
  CHECK(f10.initial.r0 == 20.0);
  CHECK(f10.initial.a == 8.0);
  CHECK(f10.initial.b == 0.14);

  const RunConfig f11 = preset("fig11");
  CHECK(f11.initial.kind == "quarter");
  CHECK(f11.initial.a == 6.0);
  CHECK(f11.initial.b == 0.2);
  CHECK(f11.model.beta == 0.1);

  for (const auto& name : preset_names()) CHECK_NOTHROW(validate(preset(name)));
}

TEST_CASE("config JSON round trip and overrides") {
  RunConfig c = preset("fig6_beta04");
  const RunConfig back = parse_config(to_json(c));
  CHECK(to_json(back) == to_json(c));

  apply_override(c, "model.beta", "0.45");
  CHECK(c.model.beta == 0.45);
  apply_override(c, "discretization.J", "40");
  CHECK(c.J == 40);
  CHECK_THROWS_AS(apply_override(c, "model.gamma", "1"), ConfigError);
}

TEST_CASE("CLI exit codes and deterministic output") {
  CHECK(call_cli({"stability-table", "--beta", "0.1", "--case", "I", "--points", "4", "--grid", "256"}) == 0);
  CHECK(call_cli({"run", "--preset", "no_such_preset"}) == 2);
  CHECK(call_cli({"export-surface", "--snapshot", "/nonexistent/snap.csv"}) == 4);
  CHECK(call_cli({"converge", "--levels", "2"}) == 2);

  const fs::path root = scratch_dir("cli");
  const std::string cfg = (root / "tiny.json").string();
  write_text(cfg, R"({"preset": "ex1", "discretization": {"J": 12, "dt": 0.0625, "t_end": 0.25}})");
  const std::string a = (root / "a").string(), b = (root / "b").string();
  REQUIRE(call_cli({"run", "--config", cfg, "--out", a}) == 0);
  REQUIRE(call_cli({"run", "--config", cfg, "--out", b}) == 0);
  for (const char* f : {"diagnostics.csv", "events.csv"})
    CHECK(read_text((fs::path(a) / f).string()) == read_text((fs::path(b) / f).string()));
  // Config echoes differ only in the output directory.
  RunConfig ca = load_config((fs::path(a) / "config.json").string());
  RunConfig cb = load_config((fs::path(b) / "config.json").string());
  CHECK(ca.output.directory == a);
  cb.output.directory = a;
  CHECK(to_json(ca) == to_json(cb));

  // The echoed config reproduces the run.
  const std::string c = (root / "c").string();
  REQUIRE(call_cli({"run", "--config", (fs::path(a) / "config.json").string(), "--out", c}) == 0);
  CHECK(read_text((fs::path(a) / "diagnostics.csv").string()) == read_text((fs::path(c) / "diagnostics.csv").string()));

  // The final snapshot exports to a surface.
  fs::path snap;
  for (const auto& e : fs::directory_iterator(fs::path(a) / "snapshots")) snap = std::max(snap, e.path());
  REQUIRE_FALSE(snap.empty());
  const std::string obj = (root / "s.obj").string();
  CHECK(call_cli({"export-surface", "--snapshot", snap.string(), "--segments", "8", "--out", obj}) == 0);
  CHECK(count_prefix(read_text(obj), "v ") == 13 * 8);
  fs::remove_all(root);
}
