#pragma once

#include "qcap/geometry.hpp"

#include <span>
#include <vector>

namespace qcap {

/// Straight boundary element carrying a constant charge density.
struct Element {
    Vec2 a;
    Vec2 b;
    double length = 0.0;
    Vec2 mid;
    Vec2 normal;  // same orientation rule as the parent segment
    BoundaryKind kind;
    int parent = 0;  // index into ResolvedGeometry::segments

    bool is_conductor() const { return std::holds_alternative<ConductorFace>(kind); }
};

Element make_element(Vec2 a, Vec2 b, const BoundaryKind& kind, int parent);

struct Mesh {
    std::vector<Element> elements;
    int n_cond = 0;
    bool ground_plane = false;

    std::size_t size() const { return elements.size(); }
    double total_length() const;
};

/// Split each segment of length L into ceil(L / l_max) equal elements.
Mesh build_initial_mesh(const ResolvedGeometry& rg, double l_max);

/// Bisect every element.
Mesh refine_all(const Mesh& mesh);

/// Bisect the max(1, ceil(p/100 * N)) elements with the largest score.
/// Ties go to the longer element, then to the lower index.
Mesh refine_top_fraction(const Mesh& mesh, std::span<const double> charge_score, double percent);

} // namespace qcap
