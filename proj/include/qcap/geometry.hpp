#pragma once

#include "qcap/expr.hpp"
#include "qcap/vec2.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace qcap {

/// A coordinate or permittivity as written in a geometry file: either a
/// plain number or an expression over the named parameters.
using Expr = std::variant<double, std::string>;

struct PointExpr {
    Expr x;
    Expr y;
};

enum class LengthUnit { Millimeter, Meter };

double unit_scale(LengthUnit unit);
std::string_view unit_name(LengthUnit unit);

struct ConductorSpec {
    std::string name;
    std::vector<PointExpr> loop;   // closed implicitly, counter-clockwise
    std::vector<Expr> face_eps_r;  // one per loop edge; edge i runs loop[i] -> loop[i+1]
};

/// Dielectric-dielectric boundary. The normal of every edge is the edge
/// direction turned 90 degrees counter-clockwise and points into eps_r_pos.
struct InterfaceSpec {
    std::vector<PointExpr> polyline;
    Expr eps_r_pos;
    Expr eps_r_neg;
};

struct CrossSection {
    LengthUnit unit = LengthUnit::Meter;
    std::vector<std::pair<std::string, double>> parameters;  // declaration order
    bool ground_plane = false;
    std::vector<ConductorSpec> conductors;
    std::vector<InterfaceSpec> interfaces;

    ParamMap parameter_map() const;
    bool has_parameter(std::string_view name) const;
    double parameter(std::string_view name) const;
};

struct ConductorFace {
    int conductor = 0;
    double eps_r = 1.0;  // medium adjacent to the face
};

struct DielectricInterface {
    double eps_r_pos = 1.0;
    double eps_r_neg = 1.0;
};

using BoundaryKind = std::variant<ConductorFace, DielectricInterface>;

/// Straight boundary piece in meters.
struct Segment {
    Vec2 a;
    Vec2 b;
    BoundaryKind kind;

    double length() const { return norm(b - a); }
    /// Conductor faces: outward normal. Interfaces: normal into eps_r_pos.
    Vec2 normal() const;
    bool is_conductor() const { return std::holds_alternative<ConductorFace>(kind); }
};

struct ResolvedGeometry {
    std::vector<Segment> segments;
    int n_cond = 0;
    bool ground_plane = false;
    std::vector<std::string> conductor_names;
    ParamMap parameters;  // values actually used, in file units
    LengthUnit unit = LengthUnit::Meter;
};

/// Parse the JSON geometry document. Expressions are kept unevaluated.
CrossSection parse_cross_section(std::string_view text);
CrossSection load_cross_section(const std::string& path);

/// Evaluate all expressions with `overrides` applied on top of the declared
/// parameters and convert to meters. Throws GeometryError.
ResolvedGeometry resolve_geometry(const CrossSection& cs, const ParamMap& overrides = {});

/// Human-readable invariant violations; empty when the geometry is valid.
std::vector<std::string> validate_geometry(const ResolvedGeometry& rg);

/// Evaluate an expression against the declared parameters (plus overrides)
/// and convert the result from file units to meters.
double eval_length(const CrossSection& cs, std::string_view expr, const ParamMap& overrides = {});

/// All coordinates multiplied by `factor` (> 0).
ResolvedGeometry scaled(const ResolvedGeometry& rg, double factor);

} // namespace qcap
