#pragma once

#include "qcap/adaptive.hpp"
#include "qcap/mesh.hpp"
#include "qcap/sweep.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>

namespace qcap {

inline constexpr const char* tool_version = "0.1.0";

/// Provenance block embedded in every report.
struct RunManifest {
    std::string input_path;
    ParamMap parameters;      // resolved values, file units
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::string tool_version = qcap::tool_version;
    std::string timestamp;    // UTC, ISO 8601

    nlohmann::ordered_json to_json() const;
};

std::string utc_timestamp();

/// Shortest round-trippable decimal form.
std::string format_number(double v);

/// Manifest as "# key: value" lines, for CSV and text outputs.
void write_manifest_comments(std::ostream& os, const RunManifest& manifest);

void write_capacitance_csv(std::ostream& os, const CapacitanceMatrix& c);
void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace);
void write_mesh_csv(std::ostream& os, const Mesh& mesh);
void write_sweep_csv(std::ostream& os, const SweepReport& report);
void write_sweep_table(std::ostream& os, const SweepReport& report);

/// Solve summary: capacitance, mesh size, memory estimate and timings.
struct SolveSummary {
    CapacitanceMatrix capacitance;
    std::vector<std::string> conductor_names;
    std::size_t n = 0;
    double memory_bytes = 0.0;
    double assemble_s = 0.0;
    double solve_s = 0.0;
    std::string mode;  // "uniform" or "adaptive"
    std::optional<ConvergenceTrace> trace;
};

nlohmann::ordered_json solve_report_json(const SolveSummary& s, const RunManifest& manifest);
void write_solve_text(std::ostream& os, const SolveSummary& s, const RunManifest& manifest);

} // namespace qcap
