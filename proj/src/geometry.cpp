#include "qcap/geometry.hpp"

#include "qcap/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace qcap {

using ojson = nlohmann::ordered_json;

double unit_scale(LengthUnit unit) {
    return unit == LengthUnit::Millimeter ? 1e-3 : 1.0;
}

std::string_view unit_name(LengthUnit unit) {
    return unit == LengthUnit::Millimeter ? "mm" : "m";
}

ParamMap CrossSection::parameter_map() const {
    return ParamMap(parameters.begin(), parameters.end());
}

bool CrossSection::has_parameter(std::string_view name) const {
    return std::any_of(parameters.begin(), parameters.end(), [&](const auto& p) { return p.first == name; });
}

double CrossSection::parameter(std::string_view name) const {
    for (const auto& [key, value] : parameters) {
        if (key == name) {
            return value;
        }
    }
    throw GeometryError("unknown parameter '" + std::string(name) + "'");
}

Vec2 Segment::normal() const {
    Vec2 d = b - a;
    double len = norm(d);
    Vec2 t{d.x / len, d.y / len};
    return is_conductor() ? rotate_cw(t) : rotate_ccw(t);
}

namespace {

Expr parse_expr(const ojson& node, const std::string& where) {
    if (node.is_number()) {
        return node.get<double>();
    }
    if (node.is_string()) {
        return node.get<std::string>();
    }
    throw GeometryError(where + ": expected a number or an expression string");
}

std::vector<PointExpr> parse_points(const ojson& node, const std::string& where) {
    if (!node.is_array()) {
        throw GeometryError(where + ": expected an array of [x, y] pairs");
    }
    std::vector<PointExpr> points;
    points.reserve(node.size());
    for (std::size_t i = 0; i < node.size(); ++i) {
        const auto& p = node[i];
        std::string here = where + "[" + std::to_string(i) + "]";
        if (!p.is_array() || p.size() != 2) {
            throw GeometryError(here + ": expected an [x, y] pair");
        }
        points.push_back({parse_expr(p[0], here + ".x"), parse_expr(p[1], here + ".y")});
    }
    return points;
}

const ojson& require(const ojson& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw GeometryError(where + ": missing required field '" + key + "'");
    }
    return *it;
}

void check_keys(const ojson& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw GeometryError(where + ": unknown field '" + key + "'");
        }
    }
}

double eval(const Expr& e, const ParamMap& params, const std::string& where) {
    if (const double* v = std::get_if<double>(&e)) {
        return *v;
    }
    try {
        return eval_param_expr(std::get<std::string>(e), params);
    } catch (const ExprError& err) {
        throw GeometryError(where + ": " + err.what());
    }
}

Vec2 eval_point(const PointExpr& p, const ParamMap& params, double scale, const std::string& where) {
    return {scale * eval(p.x, params, where + ".x"), scale * eval(p.y, params, where + ".y")};
}

} // namespace

CrossSection parse_cross_section(std::string_view text) {
    // Duplicate keys are silently collapsed by the DOM, so catch them while parsing.
    std::string current_top;
    std::set<std::string> seen_params;
    std::string duplicate;
    auto callback = [&](int depth, ojson::parse_event_t event, ojson& parsed) {
        if (event == ojson::parse_event_t::key) {
            const auto& key = parsed.get_ref<const std::string&>();
            if (depth == 1) {
                current_top = key;
            } else if (depth == 2 && current_top == "parameters" && !seen_params.insert(key).second) {
                duplicate = key;
            }
        }
        return true;
    };

    ojson doc;
    try {
        doc = ojson::parse(text.begin(), text.end(), callback);
    } catch (const ojson::parse_error& e) {
        throw GeometryError(std::string("malformed geometry document: ") + e.what());
    }
    if (!duplicate.empty()) {
        throw GeometryError("duplicate parameter name '" + duplicate + "'");
    }
    if (!doc.is_object()) {
        throw GeometryError("geometry document must be a JSON object");
    }
    check_keys(doc, {"unit", "parameters", "ground_plane", "conductors", "dielectric_interfaces", "name", "description"},
               "geometry");

    CrossSection cs;
    const auto& unit = require(doc, "unit", "geometry");
    if (unit == "mm") {
        cs.unit = LengthUnit::Millimeter;
    } else if (unit == "m") {
        cs.unit = LengthUnit::Meter;
    } else {
        throw GeometryError("geometry: 'unit' must be \"mm\" or \"m\"");
    }

    const auto& ground = require(doc, "ground_plane", "geometry");
    if (!ground.is_boolean()) {
        throw GeometryError("geometry: 'ground_plane' must be a boolean");
    }
    cs.ground_plane = ground.get<bool>();

    if (auto it = doc.find("parameters"); it != doc.end()) {
        if (!it->is_object()) {
            throw GeometryError("geometry: 'parameters' must be an object");
        }
        for (const auto& [name, value] : it->items()) {
            if (!is_identifier(name)) {
                throw GeometryError("parameter name '" + name + "' is not an identifier");
            }
            if (!value.is_number()) {
                throw GeometryError("parameter '" + name + "' must be a number");
            }
            cs.parameters.emplace_back(name, value.get<double>());
        }
    }

    const auto& conductors = require(doc, "conductors", "geometry");
    if (!conductors.is_array()) {
        throw GeometryError("geometry: 'conductors' must be an array");
    }
    for (std::size_t i = 0; i < conductors.size(); ++i) {
        const auto& c = conductors[i];
        std::string where = "conductors[" + std::to_string(i) + "]";
        if (!c.is_object()) {
            throw GeometryError(where + ": expected an object");
        }
        check_keys(c, {"name", "loop", "face_eps_r"}, where);
        ConductorSpec spec;
        const auto& name = require(c, "name", where);
        if (!name.is_string()) {
            throw GeometryError(where + ": 'name' must be a string");
        }
        spec.name = name.get<std::string>();
        spec.loop = parse_points(require(c, "loop", where), where + ".loop");
        if (spec.loop.size() < 3) {
            throw GeometryError(where + ": loop needs at least 3 vertices");
        }
        const auto& eps = require(c, "face_eps_r", where);
        if (!eps.is_array() || eps.size() != spec.loop.size()) {
            throw GeometryError(where + ": 'face_eps_r' must be an array with one entry per loop edge");
        }
        for (std::size_t k = 0; k < eps.size(); ++k) {
            spec.face_eps_r.push_back(parse_expr(eps[k], where + ".face_eps_r[" + std::to_string(k) + "]"));
        }
        cs.conductors.push_back(std::move(spec));
    }
    if (cs.conductors.empty()) {
        throw GeometryError("geometry: at least one conductor is required");
    }
    if (!cs.ground_plane && cs.conductors.size() < 2) {
        throw GeometryError("geometry: without a ground plane at least two conductors are required");
    }

    if (auto it = doc.find("dielectric_interfaces"); it != doc.end()) {
        if (!it->is_array()) {
            throw GeometryError("geometry: 'dielectric_interfaces' must be an array");
        }
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto& d = (*it)[i];
            std::string where = "dielectric_interfaces[" + std::to_string(i) + "]";
            if (!d.is_object()) {
                throw GeometryError(where + ": expected an object");
            }
            check_keys(d, {"polyline", "eps_r_pos", "eps_r_neg", "name"}, where);
            InterfaceSpec spec;
            spec.polyline = parse_points(require(d, "polyline", where), where + ".polyline");
            if (spec.polyline.size() < 2) {
                throw GeometryError(where + ": polyline needs at least 2 vertices");
            }
            spec.eps_r_pos = parse_expr(require(d, "eps_r_pos", where), where + ".eps_r_pos");
            spec.eps_r_neg = parse_expr(require(d, "eps_r_neg", where), where + ".eps_r_neg");
            cs.interfaces.push_back(std::move(spec));
        }
    }
    return cs;
}

CrossSection load_cross_section(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw GeometryError("cannot open geometry file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_cross_section(buf.str());
}

ResolvedGeometry resolve_geometry(const CrossSection& cs, const ParamMap& overrides) {
    ParamMap params = cs.parameter_map();
    for (const auto& [name, value] : overrides) {
        auto it = params.find(name);
        if (it == params.end()) {
            throw GeometryError("override of undeclared parameter '" + name + "'");
        }
        it->second = value;
    }

    const double scale = unit_scale(cs.unit);
    ResolvedGeometry rg;
    rg.ground_plane = cs.ground_plane;
    rg.n_cond = static_cast<int>(cs.conductors.size());
    rg.parameters = params;
    rg.unit = cs.unit;

    for (std::size_t ci = 0; ci < cs.conductors.size(); ++ci) {
        const auto& c = cs.conductors[ci];
        std::string where = "conductor '" + c.name + "'";
        rg.conductor_names.push_back(c.name);
        std::vector<Vec2> loop;
        for (std::size_t k = 0; k < c.loop.size(); ++k) {
            loop.push_back(eval_point(c.loop[k], params, scale, where + " vertex " + std::to_string(k)));
        }
        for (std::size_t k = 0; k < loop.size(); ++k) {
            double eps = eval(c.face_eps_r[k], params, where + " face_eps_r[" + std::to_string(k) + "]");
            rg.segments.push_back({loop[k], loop[(k + 1) % loop.size()], ConductorFace{static_cast<int>(ci), eps}});
        }
    }

    for (std::size_t ii = 0; ii < cs.interfaces.size(); ++ii) {
        const auto& f = cs.interfaces[ii];
        std::string where = "dielectric_interfaces[" + std::to_string(ii) + "]";
        DielectricInterface kind{eval(f.eps_r_pos, params, where + ".eps_r_pos"),
                                 eval(f.eps_r_neg, params, where + ".eps_r_neg")};
        Vec2 prev = eval_point(f.polyline[0], params, scale, where + " vertex 0");
        for (std::size_t k = 1; k < f.polyline.size(); ++k) {
            Vec2 next = eval_point(f.polyline[k], params, scale, where + " vertex " + std::to_string(k));
            rg.segments.push_back({prev, next, kind});
            prev = next;
        }
    }

    auto problems = validate_geometry(rg);
    if (!problems.empty()) {
        std::string msg = "invalid geometry:";
        for (const auto& p : problems) {
            msg += "\n  " + p;
        }
        throw GeometryError(msg);
    }
    return rg;
}

std::vector<std::string> validate_geometry(const ResolvedGeometry& rg) {
    std::vector<std::string> out;
    auto describe = [&](std::size_t i) {
        const auto& s = rg.segments[i];
        std::ostringstream os;
        os << "segment " << i;
        if (const auto* f = std::get_if<ConductorFace>(&s.kind)) {
            os << " (conductor " << f->conductor << ")";
        } else {
            os << " (interface)";
        }
        os << " (" << s.a.x << ", " << s.a.y << ")-(" << s.b.x << ", " << s.b.y << ")";
        return os.str();
    };

    if (rg.n_cond < 1) {
        out.push_back("at least one conductor is required");
    } else if (!rg.ground_plane && rg.n_cond < 2) {
        out.push_back("without a ground plane at least two conductors are required");
    }

    std::vector<double> twice_area(static_cast<std::size_t>(std::max(rg.n_cond, 0)), 0.0);
    std::vector<int> owned(twice_area.size(), 0);

    for (std::size_t i = 0; i < rg.segments.size(); ++i) {
        const auto& s = rg.segments[i];
        if (!std::isfinite(s.a.x) || !std::isfinite(s.a.y) || !std::isfinite(s.b.x) || !std::isfinite(s.b.y)) {
            out.push_back(describe(i) + ": non-finite coordinate");
            continue;
        }
        if (!(s.length() > 0.0)) {
            out.push_back(describe(i) + ": zero length");
        }
        if (const auto* f = std::get_if<ConductorFace>(&s.kind)) {
            if (f->conductor < 0 || f->conductor >= rg.n_cond) {
                out.push_back(describe(i) + ": conductor index out of range");
            } else {
                twice_area[f->conductor] += cross(s.a, s.b);
                ++owned[f->conductor];
            }
            if (!(f->eps_r > 0.0)) {
                out.push_back(describe(i) + ": face permittivity must be > 0");
            }
            if (rg.ground_plane && (s.a.y <= 0.0 || s.b.y <= 0.0)) {
                out.push_back(describe(i) + ": conductor must lie strictly above the ground plane (y > 0)");
            }
        } else {
            const auto& d = std::get<DielectricInterface>(s.kind);
            if (!(d.eps_r_pos > 0.0) || !(d.eps_r_neg > 0.0)) {
                out.push_back(describe(i) + ": permittivities must be > 0");
            } else if (d.eps_r_pos == d.eps_r_neg) {
                out.push_back(describe(i) + ": eps_r_pos equals eps_r_neg, not a physical interface");
            }
            // Substrates may rest on the plane, so an interface may touch y = 0 but not run along it.
            if (rg.ground_plane && (s.a.y < 0.0 || s.b.y < 0.0 || (s.a.y == 0.0 && s.b.y == 0.0))) {
                out.push_back(describe(i) + ": interface must lie above the ground plane");
            }
        }
    }
    for (std::size_t c = 0; c < twice_area.size(); ++c) {
        if (owned[c] == 0) {
            out.push_back("conductor " + std::to_string(c) + " owns no segments");
        } else if (!(twice_area[c] > 0.0)) {
            out.push_back("conductor " + std::to_string(c) + " loop is not counter-clockwise (signed area <= 0)");
        }
    }
    return out;
}

double eval_length(const CrossSection& cs, std::string_view expr, const ParamMap& overrides) {
    ParamMap params = cs.parameter_map();
    for (const auto& [name, value] : overrides) {
        params[name] = value;
    }
    return unit_scale(cs.unit) * eval_param_expr(expr, params);
}

ResolvedGeometry scaled(const ResolvedGeometry& rg, double factor) {
    ResolvedGeometry out = rg;
    for (auto& s : out.segments) {
        s.a = factor * s.a;
        s.b = factor * s.b;
    }
    return out;
}

} // namespace qcap
