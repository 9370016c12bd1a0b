#include "qcap/adaptive.hpp"

#include "qcap/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace qcap {

void AdaptiveConfig::validate() const {
    if (!(tol > 0.0)) {
        throw Error("tolerance must be > 0");
    }
    if (max_iters < 1) {
        throw Error("max iterations must be >= 1");
    }
    if (const auto* top = std::get_if<RefineTopP>(&method); top && !(top->percent > 0.0 && top->percent <= 100.0)) {
        throw Error("refinement percentage must lie in (0, 100]");
    }
    if (const auto* diag = std::get_if<DiagonalElement>(&control); diag && diag->conductor < 0) {
        throw Error("control conductor index must be >= 0");
    }
}

double default_tol(const RefineMethod& method) {
    return std::holds_alternative<RefineTopP>(method) ? 1e-3 : 1e-2;
}

AdaptiveConfig default_config(const RefineMethod& method) {
    AdaptiveConfig cfg;
    cfg.method = method;
    cfg.tol = default_tol(method);
    return cfg;
}

std::string_view status_name(RunStatus status) {
    return status == RunStatus::Converged ? "Converged" : "MaxItersReached";
}

double control_scalar(const CapacitanceMatrix& c, const ControlQuantity& control) {
    if (const auto* diag = std::get_if<DiagonalElement>(&control)) {
        if (diag->conductor < 0 || static_cast<std::size_t>(diag->conductor) >= c.size()) {
            throw Error("control conductor index " + std::to_string(diag->conductor) + " out of range");
        }
        auto k = static_cast<std::size_t>(diag->conductor);
        return c(k, k);
    }
    double sum = 0.0;
    for (double v : c.values.data()) {
        sum += v * v;
    }
    return std::sqrt(sum);
}

std::string describe(const RefineMethod& method) {
    if (const auto* top = std::get_if<RefineTopP>(&method)) {
        std::ostringstream os;
        os << "top:" << top->percent;
        return os.str();
    }
    return "all";
}

std::string describe(const ControlQuantity& control) {
    if (const auto* diag = std::get_if<DiagonalElement>(&control)) {
        return "diag:" + std::to_string(diag->conductor);
    }
    return "fro";
}

AdaptiveResult run_adaptive(const ResolvedGeometry& rg, const AdaptiveConfig& cfg) {
    cfg.validate();
    return run_adaptive(build_initial_mesh(rg, cfg.initial_l_max), cfg);
}

AdaptiveResult run_adaptive(Mesh initial, const AdaptiveConfig& cfg) {
    cfg.validate();
    AdaptiveResult result;
    result.mesh = std::move(initial);

    MeshSolve current = solve_mesh(result.mesh, cfg.threads);
    double previous = control_scalar(current.capacitance, cfg.control);
    result.assemble_s += current.assemble_s;
    result.solve_s += current.solve_s;
    result.trace.records.push_back({0, result.mesh.size(), previous, std::numeric_limits<double>::quiet_NaN(),
                                    current.memory_bytes, current.assemble_s + current.solve_s});

    for (int i = 1; i <= cfg.max_iters; ++i) {
        if (previous == 0.0) {
            throw Error("control quantity vanished at iteration " + std::to_string(i - 1));
        }
        if (const auto* top = std::get_if<RefineTopP>(&cfg.method)) {
            auto score = charge_scores(current.charges);
            result.mesh = refine_top_fraction(result.mesh, score, top->percent);
        } else {
            result.mesh = refine_all(result.mesh);
        }
        current = solve_mesh(result.mesh, cfg.threads);
        double value = control_scalar(current.capacitance, cfg.control);
        double delta = std::abs(value - previous) / std::abs(previous);
        result.assemble_s += current.assemble_s;
        result.solve_s += current.solve_s;
        result.trace.records.push_back(
            {i, result.mesh.size(), value, delta, current.memory_bytes, current.assemble_s + current.solve_s});
        previous = value;
        if (delta <= cfg.tol) {
            result.trace.status = RunStatus::Converged;
            break;
        }
    }
    result.capacitance = std::move(current.capacitance);
    return result;
}

} // namespace qcap
