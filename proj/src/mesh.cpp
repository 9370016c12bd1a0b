#include "qcap/mesh.hpp"

#include "qcap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qcap {

Element make_element(Vec2 a, Vec2 b, const BoundaryKind& kind, int parent) {
    Element e;
    e.a = a;
    e.b = b;
    e.length = norm(b - a);
    e.mid = midpoint(a, b);
    Vec2 t = (1.0 / e.length) * (b - a);
    e.normal = std::holds_alternative<ConductorFace>(kind) ? rotate_cw(t) : rotate_ccw(t);
    e.kind = kind;
    e.parent = parent;
    return e;
}

double Mesh::total_length() const {
    return std::accumulate(elements.begin(), elements.end(), 0.0,
                           [](double acc, const Element& e) { return acc + e.length; });
}

Mesh build_initial_mesh(const ResolvedGeometry& rg, double l_max) {
    if (!(l_max > 0.0) || !std::isfinite(l_max)) {
        throw GeometryError("initial element length must be positive and finite");
    }
    Mesh mesh;
    mesh.n_cond = rg.n_cond;
    mesh.ground_plane = rg.ground_plane;
    for (std::size_t i = 0; i < rg.segments.size(); ++i) {
        const auto& s = rg.segments[i];
        auto pieces = static_cast<long>(std::ceil(s.length() / l_max));
        pieces = std::max(pieces, 1L);
        Vec2 d = s.b - s.a;
        Vec2 prev = s.a;
        for (long k = 1; k <= pieces; ++k) {
            Vec2 next = k == pieces ? s.b : s.a + (static_cast<double>(k) / static_cast<double>(pieces)) * d;
            mesh.elements.push_back(make_element(prev, next, s.kind, static_cast<int>(i)));
            prev = next;
        }
    }
    return mesh;
}

namespace {

void push_halves(std::vector<Element>& out, const Element& e) {
    out.push_back(make_element(e.a, e.mid, e.kind, e.parent));
    out.push_back(make_element(e.mid, e.b, e.kind, e.parent));
}

} // namespace

Mesh refine_all(const Mesh& mesh) {
    Mesh out;
    out.n_cond = mesh.n_cond;
    out.ground_plane = mesh.ground_plane;
    out.elements.reserve(2 * mesh.size());
    for (const auto& e : mesh.elements) {
        push_halves(out.elements, e);
    }
    return out;
}

Mesh refine_top_fraction(const Mesh& mesh, std::span<const double> charge_score, double percent) {
    const std::size_t n = mesh.size();
    if (charge_score.size() != n) {
        throw Error("charge score length " + std::to_string(charge_score.size()) + " does not match mesh size " +
                    std::to_string(n));
    }
    if (!(percent > 0.0 && percent <= 100.0)) {
        throw Error("refinement percentage must lie in (0, 100]");
    }
    if (n == 0) {
        return mesh;
    }
    auto k = static_cast<std::size_t>(std::ceil(percent * static_cast<double>(n) / 100.0));
    k = std::clamp<std::size_t>(k, 1, n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (charge_score[i] != charge_score[j]) {
            return charge_score[i] > charge_score[j];
        }
        if (mesh.elements[i].length != mesh.elements[j].length) {
            return mesh.elements[i].length > mesh.elements[j].length;
        }
        return i < j;
    });
    std::vector<bool> split(n, false);
    for (std::size_t r = 0; r < k; ++r) {
        split[order[r]] = true;
    }

    Mesh out;
    out.n_cond = mesh.n_cond;
    out.ground_plane = mesh.ground_plane;
    out.elements.reserve(n + k);
    for (std::size_t i = 0; i < n; ++i) {
        if (split[i]) {
            push_halves(out.elements, mesh.elements[i]);
        } else {
            out.elements.push_back(mesh.elements[i]);
        }
    }
    return out;
}

} // namespace qcap
