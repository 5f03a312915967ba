#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rse/diagnostics_record.hpp"
#include "rse/grid.hpp"
#include "rse/scenario.hpp"
#include "rse/state.hpp"

namespace rse {

using json = nlohmann::json;

// Parses and validates a scenario document. Unknown fields, wrong types and
// failed preconditions raise ValidationError with the offending field path.
ScenarioConfig parse_config(const json& doc);
ScenarioConfig load_config(const std::string& path);
// Full config with every default spelled out; parse_config(emit) round-trips.
json emit_config(const ScenarioConfig& cfg);

// Series CSV: t, norm, mean_x[, mean_y], mean_p[, mean_p_y], energy,
// I1_paper[_y], I1_cc[_y], I2_paper[_y], I2_cc[_y], hi_norm.
std::vector<std::string> series_columns(int dim);
void write_series_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records);

// Snapshot: JSON header (grid, physics, time) with flat rho and s_per arrays
// and kbar, numbers at 17 significant digits.
json snapshot_json(const Grid& g, const PhysicsParams& p, const HydroState& s);
void write_snapshot(const std::string& path, const Grid& g, const PhysicsParams& p,
                    const HydroState& s);
struct Snapshot {
    Grid grid;
    PhysicsParams physics;
    HydroState state;
};
Snapshot read_snapshot(const std::string& path);

// Serializes with 17 significant digits for doubles.
std::string dump_precise(const json& j, int indent = 2);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

json record_json(const DiagnosticsRecord& r);

}  // namespace rse
