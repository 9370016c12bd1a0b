#include "qcap/kernel.hpp"

#include "qcap/errors.hpp"

#include <cmath>
#include <numbers>

namespace qcap {

namespace {

constexpr double inv_two_pi = 0.5 / std::numbers::pi;

// Relative distance below which a point counts as lying on the element's line.
constexpr double on_line_tol = 1e-12;

struct LocalFrame {
    Vec2 t;      // unit tangent a -> b
    double len;
    double u;    // along t, measured from a
    double v;    // across, positive to the left of a -> b
};

LocalFrame local_frame(Vec2 a, Vec2 b, Vec2 obs) {
    Vec2 d = b - a;
    double len = norm(d);
    Vec2 t{d.x / len, d.y / len};
    Vec2 r = obs - a;
    return {t, len, dot(r, t), cross(t, r)};
}

// Antiderivative of ln(sqrt(s^2 + v^2)) in s.
double log_antiderivative(double s, double v) {
    double value = -s;
    if (s != 0.0) {
        value += 0.5 * s * std::log(s * s + v * v);
    }
    if (v != 0.0) {
        value += v * std::atan(s / v);
    }
    return value;
}

} // namespace

double segment_potential(Vec2 a, Vec2 b, KernelPoint obs) {
    LocalFrame f = local_frame(a, b, obs);
    return -inv_two_pi * (log_antiderivative(f.u, f.v) - log_antiderivative(f.u - f.len, f.v));
}

Vec2 segment_field(Vec2 a, Vec2 b, KernelPoint obs) {
    LocalFrame f = local_frame(a, b, obs);
    double ra = norm(obs - a);
    double rb = norm(obs - b);
    if (ra <= on_line_tol * f.len || rb <= on_line_tol * f.len) {
        throw SingularKernelError("field kernel evaluated at an element endpoint");
    }
    bool on_line = std::abs(f.v) <= on_line_tol * f.len;
    if (on_line && std::abs(f.u - 0.5 * f.len) <= on_line_tol * f.len) {
        return {0.0, 0.0};
    }
    double tangential = inv_two_pi * std::log(ra / rb);
    double normal = 0.0;
    if (!(on_line && f.u > 0.0 && f.u < f.len)) {
        // Signed angle subtended by the element at obs.
        normal = inv_two_pi * std::atan2(f.v * f.len, f.u * (f.u - f.len) + f.v * f.v);
    }
    Vec2 n = rotate_ccw(f.t);
    return tangential * f.t + normal * n;
}

double grounded_potential(Vec2 a, Vec2 b, KernelPoint obs) {
    return segment_potential(a, b, obs) - segment_potential(mirror_y(a), mirror_y(b), obs);
}

Vec2 grounded_field(Vec2 a, Vec2 b, KernelPoint obs) {
    return segment_field(a, b, obs) - segment_field(mirror_y(a), mirror_y(b), obs);
}

} // namespace qcap
