#pragma once

#include "qcap/adaptive.hpp"
#include "qcap/geometry.hpp"

#include <string>
#include <vector>

namespace qcap {

struct ReferenceResult {
    CapacitanceMatrix capacitance;
    std::size_t n = 0;
    double memory_bytes = 0.0;
    double seconds = 0.0;
};

/// Single solve on a uniform mesh with element length <= l_max (m).
ReferenceResult reference_run(const ResolvedGeometry& rg, double l_max, unsigned threads = 1);

struct SweepSpec {
    std::string parameter;
    std::vector<double> percents;
    AdaptiveConfig adaptive;
    /// Expressions in file units, evaluated on the perturbed parameters of
    /// each point. An empty initial_l keeps adaptive.initial_l_max; an empty
    /// reference_l means "t/3" and requires a parameter named t.
    std::string initial_l;
    std::string reference_l;
    /// Run points concurrently (one worker per point) when threads > 1.
    unsigned threads = 1;
};

struct SweepRow {
    double percent = 0.0;
    bool ok = false;
    std::string status;  // Converged, MaxItersReached, or "error: ..."
    double delta_c_pct = 0.0;
    double n_ratio = 0.0;
    double v_ratio = 0.0;
    double t_ratio = 0.0;
    std::size_t n_it = 0;

    std::size_t n_ref = 0;
    std::size_t n = 0;
    double control_ref = 0.0;
    double control = 0.0;
    double seconds_ref = 0.0;
    double seconds = 0.0;
};

struct SweepReport {
    std::string parameter;
    std::vector<SweepRow> rows;

    bool all_ok() const;
    bool all_converged() const;
};

/// Parse "lo:hi:step" into an inclusive list, optionally dropping 0.
std::vector<double> parse_percent_range(std::string_view text, bool skip_zero);

SweepReport run_sweep(const CrossSection& cs, const SweepSpec& spec);

} // namespace qcap
