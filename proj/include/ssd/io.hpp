#pragma once

#include <string>
#include <vector>

#include "ssd/config.hpp"
#include "ssd/diagnostics.hpp"

namespace ssd {

// Snapshot CSV: header "rho,r,z,mu,mu_S,kappa", one row per node, %.17g.
// The topology is implied by r_0 (0 means island).
std::string snapshot_csv(const SchemeState& s);
SchemeState parse_snapshot_csv(const std::string& text);
void write_snapshot(const std::string& path, const SchemeState& s);
SchemeState read_snapshot(const std::string& path);

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& rows);
std::string events_csv(const std::vector<EventRecord>& events);

// Rows "level,J,dt,error,order" for one evaluation time.
std::string convergence_csv(const ConvergenceTable& tab, std::size_t time_index);

// Surface of revolution as OBJ: one ring of M vertices per node with r > 0,
// a single apex vertex for an axis node, 1-based triangle indices.
std::string surface_obj(const GeneratingCurve& curve, int segments);
void export_surface(const GeneratingCurve& curve, int segments, const std::string& path);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

// Writes config.json, diagnostics.csv, events.csv and snapshots under
// cfg.output.directory. Returns the run result.
RunResult run_to_directory(const RunConfig& cfg);

}  // namespace ssd
