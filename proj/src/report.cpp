#include "qcap/report.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace qcap {

using ojson = nlohmann::ordered_json;

std::string utc_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "";
    }
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

ojson RunManifest::to_json() const {
    ojson params = ojson::object();
    for (const auto& [k, v] : parameters) {
        params[k] = v;
    }
    return ojson{{"input", input_path},
                 {"parameters", params},
                 {"config", config},
                 {"tool_version", tool_version},
                 {"timestamp", timestamp}};
}

void write_manifest_comments(std::ostream& os, const RunManifest& manifest) {
    os << "# qcap " << manifest.tool_version << " " << manifest.timestamp << "\n";
    os << "# input: " << manifest.input_path << "\n";
    os << "# parameters:";
    for (const auto& [k, v] : manifest.parameters) {
        os << " " << k << "=" << format_number(v);
    }
    os << "\n# config: " << manifest.config.dump() << "\n";
}

void write_capacitance_csv(std::ostream& os, const CapacitanceMatrix& c) {
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = 0; j < c.size(); ++j) {
            os << (j ? "," : "") << format_number(c(i, j));
        }
        os << "\n";
    }
}

void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace) {
    os << "iter,N,control,delta_rel,mem_bytes,seconds,status\n";
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const auto& r = trace.records[i];
        bool last = i + 1 == trace.records.size();
        os << r.iter << "," << r.n << "," << format_number(r.control) << "," << format_number(r.delta_rel) << ","
           << format_number(r.memory_bytes) << "," << format_number(r.seconds) << ","
           << (last ? status_name(trace.status) : std::string_view("continue")) << "\n";
    }
}

void write_mesh_csv(std::ostream& os, const Mesh& mesh) {
    os << "index,ax,ay,bx,by,kind,cond_id,eps_r_pos,eps_r_neg,length\n";
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const auto& e = mesh.elements[i];
        os << i << "," << format_number(e.a.x) << "," << format_number(e.a.y) << "," << format_number(e.b.x) << ","
           << format_number(e.b.y) << ",";
        if (const auto* f = std::get_if<ConductorFace>(&e.kind)) {
            os << "conductor," << f->conductor << "," << format_number(f->eps_r) << ",";
        } else {
            const auto& d = std::get<DielectricInterface>(e.kind);
            os << "interface,," << format_number(d.eps_r_pos) << "," << format_number(d.eps_r_neg);
        }
        os << "," << format_number(e.length) << "\n";
    }
}

void write_sweep_csv(std::ostream& os, const SweepReport& report) {
    os << "m,delta_c_pct,n_ratio,v_ratio,t_ratio,n_it,status\n";
    for (const auto& r : report.rows) {
        std::string status = r.status;
        for (char& c : status) {
            if (c == ',' || c == '\n') {
                c = ';';
            }
        }
        if (r.ok) {
            os << format_number(r.percent) << "," << format_number(r.delta_c_pct) << "," << format_number(r.n_ratio)
               << "," << format_number(r.v_ratio) << "," << format_number(r.t_ratio) << "," << r.n_it << ","
               << status << "\n";
        } else {
            os << format_number(r.percent) << ",,,,,," << status << "\n";
        }
    }
}

void write_sweep_table(std::ostream& os, const SweepReport& report) {
    os << "Variation of " << report.parameter << "\n";
    os << std::setw(6) << "m,%" << std::setw(10) << "dC,%" << std::setw(10) << "Nref/N" << std::setw(10)
       << "Vref/V" << std::setw(10) << "Tref/T" << std::setw(6) << "Nit" << "  status\n";
    auto old_flags = os.flags();
    auto old_prec = os.precision();
    os << std::fixed;
    for (const auto& r : report.rows) {
        os << std::setprecision(1) << std::setw(6) << r.percent;
        if (r.ok) {
            os << std::setprecision(2) << std::setw(10) << r.delta_c_pct << std::setw(10) << r.n_ratio
               << std::setprecision(1) << std::setw(10) << r.v_ratio << std::setw(10) << r.t_ratio << std::setw(6)
               << r.n_it;
        } else {
            os << std::setw(10) << "-" << std::setw(10) << "-" << std::setw(10) << "-" << std::setw(10) << "-"
               << std::setw(6) << "-";
        }
        os << "  " << r.status << "\n";
    }
    os.flags(old_flags);
    os.precision(old_prec);
}

namespace {

ojson matrix_json(const CapacitanceMatrix& c) {
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < c.size(); ++i) {
        ojson row = ojson::array();
        for (std::size_t j = 0; j < c.size(); ++j) {
            row.push_back(c(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

ojson solve_report_json(const SolveSummary& s, const RunManifest& manifest) {
    ojson doc{{"n_cond", s.capacitance.size()},
              {"conductors", s.conductor_names},
              {"C", matrix_json(s.capacitance)},
              {"N", s.n},
              {"memory_bytes", s.memory_bytes},
              {"assemble_s", s.assemble_s},
              {"solve_s", s.solve_s},
              {"mode", s.mode}};
    if (s.trace) {
        doc["status"] = status_name(s.trace->status);
        ojson records = ojson::array();
        for (const auto& r : s.trace->records) {
            ojson rec{{"iter", r.iter}, {"N", r.n}, {"control", r.control}};
            rec["delta_rel"] = std::isnan(r.delta_rel) ? ojson(nullptr) : ojson(r.delta_rel);
            rec["mem_bytes"] = r.memory_bytes;
            rec["seconds"] = r.seconds;
            records.push_back(std::move(rec));
        }
        doc["trace"] = std::move(records);
    }
    doc["manifest"] = manifest.to_json();
    return doc;
}

void write_solve_text(std::ostream& os, const SolveSummary& s, const RunManifest& manifest) {
    write_manifest_comments(os, manifest);
    os << "Capacitance matrix, F/m (" << s.mode << ", N=" << s.n << ")\n";
    std::size_t width = 12;
    for (const auto& name : s.conductor_names) {
        width = std::max(width, name.size() + 2);
    }
    os << std::setw(static_cast<int>(width)) << "";
    for (const auto& name : s.conductor_names) {
        os << std::setw(18) << name;
    }
    os << "\n";
    auto old_flags = os.flags();
    auto old_prec = os.precision();
    os << std::scientific << std::setprecision(8);
    for (std::size_t i = 0; i < s.capacitance.size(); ++i) {
        os << std::setw(static_cast<int>(width)) << s.conductor_names[i];
        for (std::size_t j = 0; j < s.capacitance.size(); ++j) {
            os << std::setw(18) << s.capacitance(i, j);
        }
        os << "\n";
    }
    os.flags(old_flags);
    os.precision(old_prec);
    os << "memory estimate: " << format_number(s.memory_bytes) << " bytes, assemble " << s.assemble_s
       << " s, solve " << s.solve_s << " s\n";
    if (s.trace) {
        os << "\n";
        write_trace_csv(os, *s.trace);
    }
}

} // namespace qcap
