#pragma once

#include "qcap/geometry.hpp"
#include "qcap/mesh.hpp"
#include "qcap/system.hpp"

#include <string>
#include <variant>
#include <vector>

namespace qcap {

/// Bisect every element each iteration.
struct RefineAll {};
/// Bisect the p percent of elements carrying the largest charge density.
struct RefineTopP {
    double percent = 25.0;
};
using RefineMethod = std::variant<RefineAll, RefineTopP>;

struct DiagonalElement {
    int conductor = 0;  // 0-based
};
struct FrobeniusNorm {};
using ControlQuantity = std::variant<DiagonalElement, FrobeniusNorm>;

struct AdaptiveConfig {
    RefineMethod method = RefineAll{};
    double tol = 1e-2;
    int max_iters = 30;
    double initial_l_max = 0.0;  // m
    ControlQuantity control = DiagonalElement{0};
    unsigned threads = 1;

    /// Throws Error when an invariant is violated.
    void validate() const;
};

/// Tolerance the method is tuned for: 1e-3 for RefineTopP, 1e-2 for RefineAll.
double default_tol(const RefineMethod& method);

/// Config with the tolerance matched to the method and max_iters = 30.
AdaptiveConfig default_config(const RefineMethod& method);

enum class RunStatus { Converged, MaxItersReached };
std::string_view status_name(RunStatus status);

struct IterationRecord {
    int iter = 0;
    std::size_t n = 0;
    double control = 0.0;
    double delta_rel = 0.0;  // NaN at iteration 0
    double memory_bytes = 0.0;
    double seconds = 0.0;
};

struct ConvergenceTrace {
    std::vector<IterationRecord> records;
    RunStatus status = RunStatus::MaxItersReached;
};

struct AdaptiveResult {
    CapacitanceMatrix capacitance;
    ConvergenceTrace trace;
    Mesh mesh;              // final mesh
    double assemble_s = 0.0;
    double solve_s = 0.0;

    double total_seconds() const { return assemble_s + solve_s; }
    std::size_t iterations() const { return trace.records.empty() ? 0 : trace.records.size() - 1; }
};

double control_scalar(const CapacitanceMatrix& c, const ControlQuantity& control);
std::string describe(const RefineMethod& method);
std::string describe(const ControlQuantity& control);

/// Iterate refine -> assemble -> solve -> extract until the control scalar
/// changes by at most cfg.tol (relative) or cfg.max_iters refinements ran.
AdaptiveResult run_adaptive(const ResolvedGeometry& rg, const AdaptiveConfig& cfg);

/// Same loop starting from an explicit mesh.
AdaptiveResult run_adaptive(Mesh initial, const AdaptiveConfig& cfg);

} // namespace qcap
