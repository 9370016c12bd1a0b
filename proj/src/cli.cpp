#include "qcap/cli.hpp"

#include "qcap/adaptive.hpp"
#include "qcap/errors.hpp"
#include "qcap/geometry.hpp"
#include "qcap/oracle.hpp"
#include "qcap/parallel.hpp"
#include "qcap/report.hpp"
#include "qcap/sweep.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

namespace qcap::cli {

namespace {

using ojson = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AdaptiveFlags {
    std::string method = "all";
    std::optional<double> tol;
    int max_iters = 30;
    std::string initial_l;
    std::string control = "diag:0";
};

void add_adaptive_flags(CLI::App& cmd, AdaptiveFlags& f) {
    cmd.add_option("--method", f.method, "all | top:<p>")->capture_default_str();
    cmd.add_option("--tol", f.tol, "relative change threshold [1e-2 for all, 1e-3 for top:<p>]");
    cmd.add_option("--max-iters", f.max_iters, "maximum refinement iterations")->capture_default_str();
    cmd.add_option("--initial-l", f.initial_l, "initial element length, expression in file units");
    cmd.add_option("--control", f.control, "diag:<k> (0-based) | fro")->capture_default_str();
}

RefineMethod parse_method(const std::string& text) {
    if (text == "all") {
        return RefineAll{};
    }
    if (text.rfind("top:", 0) == 0) {
        try {
            std::size_t used = 0;
            double p = std::stod(text.substr(4), &used);
            if (used == text.size() - 4 && p > 0.0 && p <= 100.0) {
                return RefineTopP{p};
            }
        } catch (const std::exception&) {
        }
    }
    throw UsageError("--method must be 'all' or 'top:<p>' with 0 < p <= 100");
}

ControlQuantity parse_control(const std::string& text) {
    if (text == "fro") {
        return FrobeniusNorm{};
    }
    if (text.rfind("diag:", 0) == 0) {
        try {
            std::size_t used = 0;
            int k = std::stoi(text.substr(5), &used);
            if (used == text.size() - 5 && k >= 0) {
                return DiagonalElement{k};
            }
        } catch (const std::exception&) {
        }
    }
    throw UsageError("--control must be 'diag:<k>' or 'fro'");
}

AdaptiveConfig make_config(const AdaptiveFlags& f) {
    AdaptiveConfig cfg;
    cfg.method = parse_method(f.method);
    cfg.control = parse_control(f.control);
    cfg.tol = f.tol.value_or(default_tol(cfg.method));
    cfg.max_iters = f.max_iters;
    if (!(cfg.tol > 0.0) || cfg.max_iters < 1) {
        throw UsageError("--tol must be > 0 and --max-iters >= 1");
    }
    return cfg;
}

ojson config_json(const AdaptiveFlags& f) {
    return ojson{{"method", f.method},
                 {"tol", make_config(f).tol},
                 {"max_iters", f.max_iters},
                 {"initial_l", f.initial_l},
                 {"control", f.control}};
}

ParamMap parse_overrides(const std::vector<std::string>& sets) {
    ParamMap out;
    for (const auto& s : sets) {
        auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw UsageError("--set expects name=value, got '" + s + "'");
        }
        try {
            out[s.substr(0, eq)] = eval_param_expr(s.substr(eq + 1), {});
        } catch (const ExprError& e) {
            throw UsageError("--set " + s + ": " + e.what());
        }
    }
    return out;
}

RunManifest make_manifest(const std::string& path, const ResolvedGeometry& rg, ojson config) {
    RunManifest m;
    m.input_path = path;
    m.parameters = rg.parameters;
    m.config = std::move(config);
    m.timestamp = utc_timestamp();
    return m;
}

// Opens --out or falls back to `fallback`.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) {
                throw Error("cannot write '" + path + "'");
            }
            stream_ = &file_;
        }
    }
    std::ostream& get() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

// CLI11 reads "-5:5:1" or "-(d-s)/2" as an option name; glue such values to their flag.
std::vector<std::string> glue_negative_values(std::vector<std::string> args) {
    static const std::vector<std::string> value_flags = {"--range", "--initial-l", "--reference-l", "--uniform",
                                                         "--l",     "--set",       "--param"};
    std::vector<std::string> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i + 1 < args.size() && std::find(value_flags.begin(), value_flags.end(), args[i]) != value_flags.end() &&
            !args[i + 1].empty() && args[i + 1][0] == '-' && args[i + 1].rfind("--", 0) != 0) {
            out.push_back(args[i] + "=" + args[i + 1]);
            ++i;
        } else {
            out.push_back(args[i]);
        }
    }
    return out;
}

int cmd_solve(const std::string& path, const std::string& uniform, const AdaptiveFlags& flags,
              const std::vector<std::string>& sets, const std::string& out_path, const std::string& format,
              bool serial, std::ostream& out) {
    CrossSection cs = load_cross_section(path);
    ParamMap overrides = parse_overrides(sets);
    ResolvedGeometry rg = resolve_geometry(cs, overrides);
    unsigned threads = serial ? 1 : default_thread_count();

    SolveSummary summary;
    summary.conductor_names = rg.conductor_names;
    ojson config;
    int code = exit_ok;
    if (!uniform.empty()) {
        double l = eval_length(cs, uniform, overrides);
        Mesh mesh = build_initial_mesh(rg, l);
        MeshSolve s = solve_mesh(mesh, threads);
        summary.capacitance = std::move(s.capacitance);
        summary.n = mesh.size();
        summary.memory_bytes = s.memory_bytes;
        summary.assemble_s = s.assemble_s;
        summary.solve_s = s.solve_s;
        summary.mode = "uniform";
        config = ojson{{"mode", "uniform"}, {"uniform_l", uniform}, {"l_max_m", l}};
    } else {
        if (flags.initial_l.empty()) {
            throw UsageError("adaptive runs need --initial-l (for example \"2*w\")");
        }
        AdaptiveConfig cfg = make_config(flags);
        cfg.initial_l_max = eval_length(cs, flags.initial_l, overrides);
        cfg.threads = threads;
        AdaptiveResult run = run_adaptive(rg, cfg);
        summary.capacitance = std::move(run.capacitance);
        summary.n = run.mesh.size();
        summary.memory_bytes = run.trace.records.back().memory_bytes;
        summary.assemble_s = run.assemble_s;
        summary.solve_s = run.solve_s;
        summary.mode = "adaptive";
        summary.trace = run.trace;
        config = config_json(flags);
        config["mode"] = "adaptive";
        config["initial_l_max_m"] = cfg.initial_l_max;
        code = run.trace.status == RunStatus::Converged ? exit_ok : exit_not_converged;
    }
    RunManifest manifest = make_manifest(path, rg, std::move(config));

    if (format == "json") {
        Sink sink(out_path, out);
        sink.get() << solve_report_json(summary, manifest).dump(2) << "\n";
    } else if (format == "csv") {
        Sink sink(out_path, out);
        write_manifest_comments(sink.get(), manifest);
        write_capacitance_csv(sink.get(), summary.capacitance);
        if (summary.trace) {
            if (out_path.empty()) {
                out << "\n";
                write_trace_csv(out, *summary.trace);
            } else {
                Sink trace_sink(out_path + ".trace.csv", out);
                write_manifest_comments(trace_sink.get(), manifest);
                write_trace_csv(trace_sink.get(), *summary.trace);
            }
        }
    } else {
        Sink sink(out_path, out);
        write_solve_text(sink.get(), summary, manifest);
    }
    return code;
}

int cmd_sweep(const std::string& path, const std::string& param, const std::string& range, bool skip_zero,
              const std::string& reference_l, const AdaptiveFlags& flags, bool serial, const std::string& out_path,
              std::ostream& out) {
    CrossSection cs = load_cross_section(path);
    if (!cs.has_parameter(param)) {
        throw GeometryError("parameter '" + param + "' is not declared in " + path);
    }
    if (flags.initial_l.empty()) {
        throw UsageError("sweeps need --initial-l (for example \"2*w\")");
    }
    std::vector<double> percents;
    try {
        percents = parse_percent_range(range, skip_zero);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }

    SweepSpec spec;
    spec.parameter = param;
    spec.percents = percents;
    spec.adaptive = make_config(flags);
    spec.initial_l = flags.initial_l;
    spec.reference_l = reference_l;
    spec.threads = serial ? 1 : default_thread_count();
    SweepReport report = run_sweep(cs, spec);

    ojson config = config_json(flags);
    config["param"] = param;
    config["range"] = range;
    config["skip_zero"] = skip_zero;
    config["reference_l"] = reference_l.empty() ? "t/3" : reference_l;
    config["serial"] = serial;
    RunManifest manifest = make_manifest(path, resolve_geometry(cs), std::move(config));

    write_manifest_comments(out, manifest);
    write_sweep_table(out, report);
    if (out_path.empty()) {
        out << "\n";
        write_sweep_csv(out, report);
    } else {
        Sink sink(out_path, out);
        write_manifest_comments(sink.get(), manifest);
        write_sweep_csv(sink.get(), report);
    }
    if (!report.all_ok()) {
        return exit_failure;
    }
    return report.all_converged() ? exit_ok : exit_not_converged;
}

int cmd_mesh(const std::string& path, const std::string& l_expr, int refine_iters,
             const std::vector<std::string>& sets, const std::string& out_path, std::ostream& out) {
    CrossSection cs = load_cross_section(path);
    ParamMap overrides = parse_overrides(sets);
    ResolvedGeometry rg = resolve_geometry(cs, overrides);
    if (refine_iters < 0) {
        throw UsageError("--refine-iters must be >= 0");
    }
    Mesh mesh = build_initial_mesh(rg, eval_length(cs, l_expr, overrides));
    for (int i = 0; i < refine_iters; ++i) {
        mesh = refine_all(mesh);
    }
    RunManifest manifest = make_manifest(path, rg, ojson{{"l", l_expr}, {"refine_iters", refine_iters}});
    Sink sink(out_path, out);
    write_manifest_comments(sink.get(), manifest);
    write_mesh_csv(sink.get(), mesh);
    return exit_ok;
}

int cmd_verify(std::size_t pairs, bool skip_structures, double perturb, bool serial, std::ostream& out) {
    KernelUnderTest k = KernelUnderTest::closed_form();
    if (perturb != 0.0) {
        auto pot = k.potential;
        auto fld = k.field;
        k.potential = [pot, perturb](Vec2 a, Vec2 b, Vec2 o) { return (1.0 + perturb) * pot(a, b, o); };
        k.field = [fld, perturb](Vec2 a, Vec2 b, Vec2 o) { return (1.0 + perturb) * fld(a, b, o); };
    }
    std::vector<CheckResult> results = verify_kernels(k, pairs);
    if (!skip_structures) {
        auto more = verify_analytic_structures(serial ? 1 : default_thread_count());
        results.insert(results.end(), more.begin(), more.end());
    }
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
        out << (r.pass ? "PASS" : "FAIL") << "  " << std::left << std::setw(44) << r.name << std::right
            << " err=" << std::scientific << std::setprecision(3) << r.worst_error << " tol=" << r.tolerance
            << std::defaultfloat << "  " << r.detail << "\n";
    }
    out << (all ? "all checks passed" : "some checks FAILED") << "\n";
    return all ? exit_ok : exit_failure;
}

} // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"qcap: per-unit-length capacitance of 2D multiconductor line cross-sections"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    AdaptiveFlags solve_flags;
    std::string solve_file, uniform, solve_out, format = "text";
    std::vector<std::string> solve_sets;
    bool solve_serial = false;
    bool adaptive_flag = false;
    auto* solve = app.add_subcommand("solve", "capacitance matrix on a uniform or adaptive mesh");
    solve->add_option("geometry", solve_file, "geometry JSON file")->required();
    auto* uniform_opt = solve->add_option("--uniform", uniform, "uniform element length, expression in file units");
    auto* adaptive_opt = solve->add_flag("--adaptive", adaptive_flag, "adaptive refinement (default)");
    uniform_opt->excludes(adaptive_opt);
    add_adaptive_flags(*solve, solve_flags);
    solve->add_option("--set", solve_sets, "override a parameter, name=value");
    solve->add_option("--out", solve_out, "output path (default stdout)");
    solve->add_option("--format", format, "csv | json | text")
        ->check(CLI::IsMember({"csv", "json", "text"}))
        ->capture_default_str();
    solve->add_flag("--serial", solve_serial, "single-threaded");

    AdaptiveFlags sweep_flags;
    std::string sweep_file, param, range = "-5:5:1", reference_l, sweep_out;
    bool skip_zero = false, sweep_serial = false;
    auto* sweep = app.add_subcommand("sweep", "vary one parameter and compare against a dense uniform reference");
    sweep->add_option("geometry", sweep_file, "geometry JSON file")->required();
    sweep->add_option("--param", param, "parameter to vary")->required();
    sweep->add_option("--range", range, "lo:hi:step in percent")->capture_default_str();
    sweep->add_flag("--skip-zero", skip_zero, "drop the m = 0 point");
    sweep->add_option("--reference-l", reference_l, "reference element length expression (default t/3)");
    add_adaptive_flags(*sweep, sweep_flags);
    sweep->add_flag("--serial", sweep_serial, "run points one after another, single-threaded");
    sweep->add_option("--out", sweep_out, "CSV output path (default stdout after the table)");

    std::string mesh_file, mesh_l, mesh_out;
    int refine_iters = 0;
    std::vector<std::string> mesh_sets;
    auto* mesh = app.add_subcommand("mesh", "dump the boundary mesh as CSV");
    mesh->add_option("geometry", mesh_file, "geometry JSON file")->required();
    mesh->add_option("--l", mesh_l, "maximum element length, expression in file units")->required();
    mesh->add_option("--refine-iters", refine_iters, "number of uniform bisection passes");
    mesh->add_option("--set", mesh_sets, "override a parameter, name=value");
    mesh->add_option("--out", mesh_out, "output path (default stdout)");

    std::size_t pairs = 1000;
    bool skip_structures = false, verify_serial = false;
    double perturb = 0.0;
    auto* verify = app.add_subcommand("verify", "compare kernels and solver against independent oracles");
    verify->add_option("--pairs", pairs, "random kernel test pairs")->capture_default_str();
    verify->add_flag("--kernels-only", skip_structures, "skip the analytic structure solves");
    verify->add_flag("--serial", verify_serial, "single-threaded");
    verify->add_option("--perturb-kernel", perturb, "relative perturbation injected into the kernels")
        ->group("");

    args = glue_negative_values(std::move(args));
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_usage;
    }

    try {
        if (*solve) {
            return cmd_solve(solve_file, uniform, solve_flags, solve_sets, solve_out, format, solve_serial, out);
        }
        if (*sweep) {
            return cmd_sweep(sweep_file, param, range, skip_zero, reference_l, sweep_flags, sweep_serial, sweep_out,
                             out);
        }
        if (*mesh) {
            return cmd_mesh(mesh_file, mesh_l, refine_iters, mesh_sets, mesh_out, out);
        }
        return cmd_verify(pairs, skip_structures, perturb, verify_serial, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const GeometryError& e) {
        err << "input error: " << e.what() << "\n";
        return exit_data;
    } catch (const ExprError& e) {
        err << "input error: " << e.what() << "\n";
        return exit_data;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_failure;
    }
}

} // namespace qcap::cli
