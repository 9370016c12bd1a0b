#include "qcap/sweep.hpp"

#include "qcap/errors.hpp"
#include "qcap/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace qcap {

ReferenceResult reference_run(const ResolvedGeometry& rg, double l_max, unsigned threads) {
    Mesh mesh = build_initial_mesh(rg, l_max);
    MeshSolve s = solve_mesh(mesh, threads);
    return {std::move(s.capacitance), mesh.size(), s.memory_bytes, s.assemble_s + s.solve_s};
}

bool SweepReport::all_ok() const {
    for (const auto& r : rows) {
        if (!r.ok) {
            return false;
        }
    }
    return true;
}

bool SweepReport::all_converged() const {
    for (const auto& r : rows) {
        if (!r.ok || r.status != status_name(RunStatus::Converged)) {
            return false;
        }
    }
    return true;
}

std::vector<double> parse_percent_range(std::string_view text, bool skip_zero) {
    auto fail = [&] { return Error("range must look like lo:hi:step, got '" + std::string(text) + "'"); };
    auto c1 = text.find(':');
    if (c1 == std::string_view::npos) {
        throw fail();
    }
    auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string_view::npos) {
        throw fail();
    }
    double lo = 0.0, hi = 0.0, step = 0.0;
    try {
        lo = eval_param_expr(text.substr(0, c1), {});
        hi = eval_param_expr(text.substr(c1 + 1, c2 - c1 - 1), {});
        step = eval_param_expr(text.substr(c2 + 1), {});
    } catch (const ExprError&) {
        throw fail();
    }
    if (!(step > 0.0) || hi < lo) {
        throw fail();
    }
    std::vector<double> out;
    auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= count; ++i) {
        double m = lo + static_cast<double>(i) * step;
        if (std::abs(m) < 1e-12 * step) {
            m = 0.0;
        }
        if (skip_zero && m == 0.0) {
            continue;
        }
        out.push_back(m);
    }
    return out;
}

namespace {

SweepRow run_point(const CrossSection& cs, const SweepSpec& spec, double percent, unsigned threads) {
    SweepRow row;
    row.percent = percent;
    try {
        const double nominal = cs.parameter(spec.parameter);
        ParamMap overrides{{spec.parameter, nominal * (1.0 + percent / 100.0)}};
        ResolvedGeometry rg = resolve_geometry(cs, overrides);

        std::string ref_expr = spec.reference_l.empty() ? "t/3" : spec.reference_l;
        ReferenceResult ref = reference_run(rg, eval_length(cs, ref_expr, overrides), threads);

        AdaptiveConfig cfg = spec.adaptive;
        cfg.threads = threads;
        if (!spec.initial_l.empty()) {
            cfg.initial_l_max = eval_length(cs, spec.initial_l, overrides);
        }
        AdaptiveResult run = run_adaptive(rg, cfg);

        row.control_ref = control_scalar(ref.capacitance, cfg.control);
        row.control = control_scalar(run.capacitance, cfg.control);
        row.delta_c_pct = 100.0 * std::abs(row.control - row.control_ref) / std::abs(row.control_ref);
        row.n_ref = ref.n;
        row.n = run.mesh.size();
        row.n_ratio = static_cast<double>(ref.n) / static_cast<double>(row.n);
        row.v_ratio = ref.memory_bytes / run.trace.records.back().memory_bytes;
        row.seconds_ref = ref.seconds;
        row.seconds = run.total_seconds();
        row.t_ratio = row.seconds > 0.0 ? row.seconds_ref / row.seconds : 0.0;
        row.n_it = run.iterations();
        row.status = std::string(status_name(run.trace.status));
        row.ok = true;
    } catch (const std::exception& e) {
        row.ok = false;
        row.status = std::string("error: ") + e.what();
    }
    return row;
}

} // namespace

SweepReport run_sweep(const CrossSection& cs, const SweepSpec& spec) {
    if (!cs.has_parameter(spec.parameter)) {
        throw GeometryError("sweep parameter '" + spec.parameter + "' is not declared");
    }
    if (spec.reference_l.empty() && !cs.has_parameter("t")) {
        throw Error("no reference element length given and no parameter 't' to default to t/3");
    }
    spec.adaptive.validate();

    SweepReport report;
    report.parameter = spec.parameter;
    report.rows.resize(spec.percents.size());
    if (spec.threads > 1) {
        parallel_for(spec.percents.size(), spec.threads,
                     [&](std::size_t i) { report.rows[i] = run_point(cs, spec, spec.percents[i], 1); });
    } else {
        for (std::size_t i = 0; i < spec.percents.size(); ++i) {
            report.rows[i] = run_point(cs, spec, spec.percents[i], std::max(1u, spec.adaptive.threads));
        }
    }
    return report;
}

} // namespace qcap
