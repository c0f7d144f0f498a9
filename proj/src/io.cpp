#include "ssd/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace ssd {

namespace fs = std::filesystem;

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

constexpr const char* kSnapshotHeader = "rho,r,z,mu,mu_S,kappa";

double parse_double(const std::string& s, int line) {
  const char* b = s.c_str();
  char* e = nullptr;
  const double v = std::strtod(b, &e);
  if (e == b || *e != '\0') throw IoError("snapshot line " + std::to_string(line) + ": bad number \"" + s + "\"");
  return v;
}

std::string snapshot_name(int step, std::size_t film) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "step_%06d_film%zu.csv", step, film);
  return buf;
}

}  // namespace

std::string snapshot_csv(const SchemeState& s) {
  const int J = s.curve.J();
  std::string out = std::string(kSnapshotHeader) + "\n";
  auto field = [](const NodalField& f, int j) { return j < static_cast<int>(f.size()) ? f[j] : 0.0; };
  for (int j = 0; j <= J; ++j) {
    out += g17(static_cast<double>(j) / J) + "," + g17(s.curve.r[j]) + "," + g17(s.curve.z[j]) + "," +
           g17(field(s.mu, j)) + "," + g17(field(s.mu_S, j)) + "," + g17(field(s.kappa, j)) + "\n";
  }
  return out;
}

SchemeState parse_snapshot_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSnapshotHeader)
    throw IoError(std::string("snapshot: expected header \"") + kSnapshotHeader + "\"");
  SchemeState s;
  int ln = 1;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cols.push_back(c);
    if (cols.size() != 6) throw IoError("snapshot line " + std::to_string(ln) + ": expected 6 columns");
    s.curve.r.push_back(parse_double(cols[1], ln));
    s.curve.z.push_back(parse_double(cols[2], ln));
    s.mu.push_back(parse_double(cols[3], ln));
    s.mu_S.push_back(parse_double(cols[4], ln));
    s.kappa.push_back(parse_double(cols[5], ln));
  }
  if (s.curve.r.size() < 2) throw IoError("snapshot has fewer than 2 nodes");
  s.curve.topology = s.curve.r.front() == 0.0 ? Topology::Island : Topology::TwoContactLines;
  return s;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_snapshot(const std::string& path, const SchemeState& s) { write_text(path, snapshot_csv(s)); }

SchemeState read_snapshot(const std::string& path) { return parse_snapshot_csv(read_text(path)); }

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& rows) {
  std::string out =
      "t,W,W_ratio,dV,Rh,r_i,r_o,newton_iters,residual_norm,pinch_off,hole_closed,equilibrium,n_films\n";
  for (const auto& r : rows) {
    out += g17(r.t) + "," + g17(r.W) + "," + g17(r.W_ratio) + "," + g17(r.dV) + "," + g17(r.Rh) + "," +
           g17(r.r_i) + "," + g17(r.r_o) + "," + std::to_string(r.newton_iters) + "," +
           g17(r.residual_norm) + "," + (r.pinch_off ? "1" : "0") + "," + (r.hole_closed ? "1" : "0") +
           "," + (r.equilibrium ? "1" : "0") + "," + std::to_string(r.n_films) + "\n";
  }
  return out;
}

std::string events_csv(const std::vector<EventRecord>& events) {
  std::string out = "t,kind,film,node,projection_loss,note\n";
  for (const auto& e : events)
    out += g17(e.time) + "," + to_string(e.kind) + "," + std::to_string(e.film) + "," +
           std::to_string(e.node) + "," + g17(e.projection_loss) + "," + e.note + "\n";
  return out;
}

std::string convergence_csv(const ConvergenceTable& tab, std::size_t i) {
  if (i >= tab.rows.size()) throw Error("convergence_csv: bad time index");
  std::string out = "level,J,dt,error,order\n";
  for (const auto& r : tab.rows[i])
    out += std::to_string(r.level) + "," + std::to_string(r.J) + "," + g17(r.dt) + "," + g17(r.error) +
           "," + (std::isnan(r.order) ? std::string("") : g17(r.order)) + "\n";
  return out;
}

std::string surface_obj(const GeneratingCurve& curve, int M) {
  if (M < 3) throw Error("surface export needs at least 3 segments");
  const int n = static_cast<int>(curve.r.size());
  std::vector<int> first(n);  // 1-based index of the node's first vertex
  std::string out;
  int next = 1;
  for (int j = 0; j < n; ++j) {
    first[j] = next;
    if (curve.r[j] == 0.0) {
      out += "v 0 0 " + g17(curve.z[j]) + "\n";
      next += 1;
      continue;
    }
    for (int k = 0; k < M; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / M;
      out += "v " + g17(curve.r[j] * std::cos(phi)) + " " + g17(curve.r[j] * std::sin(phi)) + " " +
             g17(curve.z[j]) + "\n";
    }
    next += M;
  }
  auto face = [&out](int a, int b, int c) {
    out += "f " + std::to_string(a) + " " + std::to_string(b) + " " + std::to_string(c) + "\n";
  };
  for (int j = 1; j < n; ++j) {
    const bool apex0 = curve.r[j - 1] == 0.0, apex1 = curve.r[j] == 0.0;
    if (apex0 && apex1) continue;
    for (int k = 0; k < M; ++k) {
      const int k1 = (k + 1) % M;
      if (apex0) {
        face(first[j - 1], first[j] + k, first[j] + k1);
      } else if (apex1) {
        face(first[j - 1] + k, first[j - 1] + k1, first[j]);
      } else {
        const int a = first[j - 1] + k, b = first[j - 1] + k1, c = first[j] + k1, d = first[j] + k;
        face(a, b, c);
        face(a, c, d);
      }
    }
  }
  return out;
}

void export_surface(const GeneratingCurve& curve, int segments, const std::string& path) {
  if (segments < 8) throw ConfigError("export-surface: segments must be >= 8");
  write_text(path, surface_obj(curve, segments));
}

RunResult run_to_directory(const RunConfig& cfg) {
  const fs::path dir(cfg.output.directory);
  std::error_code ec;
  fs::create_directories(dir / "snapshots", ec);
  if (ec) throw IoError("cannot create " + (dir / "snapshots").string() + ": " + ec.message());
  write_text((dir / "config.json").string(), to_json(cfg).dump(2) + "\n");

  const bool want_csv =
      std::find(cfg.output.formats.begin(), cfg.output.formats.end(), "csv") != cfg.output.formats.end();
  const bool want_obj =
      std::find(cfg.output.formats.begin(), cfg.output.formats.end(), "obj") != cfg.output.formats.end();
  const int every = cfg.output.snapshot_every;
  auto dump = [&](int step, const std::vector<SchemeState>& films) {
    for (std::size_t f = 0; f < films.size(); ++f) {
      if (want_csv) write_snapshot((dir / "snapshots" / snapshot_name(step, f)).string(), films[f]);
      if (want_obj) {
        std::string name = snapshot_name(step, f);
        name.replace(name.size() - 4, 4, ".obj");
        export_surface(films[f].curve, 64, (dir / "snapshots" / name).string());
      }
    }
  };
  int last_dumped = -1;
  const RunResult res =
      run(build_initial(cfg), build_settings(cfg), [&](const RunView& v, const DiagnosticsRecord&) {
        if (v.step == 0 || (every > 0 && v.step % every == 0)) {
          dump(v.step, v.films);
          last_dumped = v.step;
        }
      });
  if (last_dumped != res.steps) dump(res.steps, res.films);
  write_text((dir / "diagnostics.csv").string(), diagnostics_csv(res.diagnostics));
  write_text((dir / "events.csv").string(), events_csv(res.events));
  return res;
}

}  // namespace ssd
