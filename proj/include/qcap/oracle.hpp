#pragma once

#include "qcap/adaptive.hpp"
#include "qcap/geometry.hpp"
#include "qcap/vec2.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qcap {

struct QuadratureSettings {
    double abs_tol = 1e-300;
    double rel_tol = 1e-13;
    unsigned max_subdivisions = 5000;
};

/// Adaptive Gauss-Kronrod quadrature of -ln|obs - r'| / (2 pi) over the element.
/// Requires obs at least 1e-6 * L away from the element.
double quad_potential(Vec2 a, Vec2 b, Vec2 obs, const QuadratureSettings& qs = {});

/// Adaptive quadrature of (obs - r') / (2 pi |obs - r'|^2) over the element.
Vec2 quad_field(Vec2 a, Vec2 b, Vec2 obs, const QuadratureSettings& qs = {});

double distance_to_segment(Vec2 a, Vec2 b, Vec2 p);

// Closed-form capacitances per unit length, F/m. Lengths in any consistent unit.
double analytic_coax(double a, double b, double eps_r);
double analytic_two_layer_coax(double a, double b, double c, double eps_r1, double eps_r2);
double analytic_wire_over_ground(double h, double r0);

// Polygonized test structures (unit mm). Conductor 0 is the inner/wire conductor.
// Shields are keyhole polygons: a closed ring of thickness `shield_t` with a
// radial slit of width `slit` at angle 0 so the loop stays simple.
CrossSection coax_cross_section(double a, double b, double eps_r, int sides = 64);
CrossSection two_layer_coax_cross_section(double a, double b, double c, double eps_r1, double eps_r2,
                                          int sides = 64);
CrossSection wire_over_ground_cross_section(double h, double r0, int sides = 64);

/// Kernel entry points under verification; defaults to the closed forms.
struct KernelUnderTest {
    std::function<double(Vec2, Vec2, Vec2)> potential;
    std::function<Vec2(Vec2, Vec2, Vec2)> field;

    static KernelUnderTest closed_form();
};

struct CheckResult {
    std::string name;
    double worst_error = 0.0;  // relative
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

struct RandomPair {
    Vec2 a;
    Vec2 b;
    Vec2 obs;
};

/// Deterministic element/observation pairs (meters) with obs >= 0.01 L off the element.
std::vector<RandomPair> random_kernel_pairs(std::size_t count, unsigned long long seed);

/// Closed-form vs quadrature on `count` random pairs (1e-10 relative).
std::vector<CheckResult> verify_kernels(const KernelUnderTest& k, std::size_t count = 1000,
                                        unsigned long long seed = 20240601ULL);

/// Coax, two-layer coax and wire-over-ground against their closed forms.
std::vector<CheckResult> verify_analytic_structures(unsigned threads = 1);

} // namespace qcap
