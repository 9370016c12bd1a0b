#include "qcap/oracle.hpp"

#include "qcap/errors.hpp"
#include "qcap/kernel.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <random>
#include <sstream>

namespace qcap {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double guard_fraction = 1e-6;

struct Panel {
    double lo;
    double hi;
    double value;
    double error;
    double l1;
    bool operator<(const Panel& other) const { return error < other.error; }
};

// 15-point Kronrod rule with the embedded 7-point Gauss rule as error estimate.
template <class F>
Panel kronrod_panel(F& f, double lo, double hi) {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    static const auto& x = gauss_kronrod<double, 15>::abscissa();
    static const auto& wk = gauss_kronrod<double, 15>::weights();
    static const auto& wg = gauss<double, 7>::weights();
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double fc = f(mid);
    double kronrod = wk[0] * fc;
    double gauss_sum = wg[0] * fc;
    double l1 = wk[0] * std::abs(fc);
    for (std::size_t i = 1; i < x.size(); ++i) {
        double f1 = f(mid - half * x[i]);
        double f2 = f(mid + half * x[i]);
        kronrod += wk[i] * (f1 + f2);
        l1 += wk[i] * (std::abs(f1) + std::abs(f2));
        if (i % 2 == 0) {
            gauss_sum += wg[i / 2] * (f1 + f2);
        }
    }
    return {lo, hi, half * kronrod, half * std::abs(kronrod - gauss_sum), half * l1};
}

// Globally adaptive: keep bisecting the panel with the largest error estimate
// until the total error is below max(abs_tol, rel_tol * integral of |f|).
template <class F>
double adaptive_integrate(F& f, double lo, double hi, const QuadratureSettings& qs) {
    std::priority_queue<Panel> panels;
    Panel first = kronrod_panel(f, lo, hi);
    double value = first.value, error = first.error, l1 = first.l1;
    panels.push(first);
    for (unsigned count = 1;; ++count) {
        if (error <= std::max(qs.abs_tol, qs.rel_tol * l1)) {
            return value;
        }
        if (count >= qs.max_subdivisions) {
            std::ostringstream os;
            os << "quadrature did not reach tolerance after " << count << " subdivisions: estimated error "
               << error << " vs scale " << l1;
            throw QuadratureError(os.str());
        }
        Panel worst = panels.top();
        panels.pop();
        double mid = 0.5 * (worst.lo + worst.hi);
        Panel left = kronrod_panel(f, worst.lo, mid);
        Panel right = kronrod_panel(f, mid, worst.hi);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        panels.push(left);
        panels.push(right);
    }
}

// Integrate f(s) for s in [0, len], split at `split` when it lies strictly inside.
template <class F>
double integrate_split(F f, double len, double split, const QuadratureSettings& qs) {
    if (split > 0.0 && split < len) {
        return adaptive_integrate(f, 0.0, split, qs) + adaptive_integrate(f, split, len, qs);
    }
    return adaptive_integrate(f, 0.0, len, qs);
}

void guard(Vec2 a, Vec2 b, Vec2 obs) {
    double len = norm(b - a);
    if (!(len > 0.0)) {
        throw QuadratureError("degenerate element");
    }
    if (distance_to_segment(a, b, obs) < guard_fraction * len) {
        throw QuadratureError("observation point lies on or too close to the element");
    }
}

double foot_parameter(Vec2 a, Vec2 b, Vec2 obs) {
    Vec2 d = b - a;
    double len = norm(d);
    return dot(obs - a, d) / len;
}

} // namespace

double distance_to_segment(Vec2 a, Vec2 b, Vec2 p) {
    Vec2 d = b - a;
    double len2 = dot(d, d);
    double t = len2 > 0.0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
    return norm(p - (a + t * d));
}

double quad_potential(Vec2 a, Vec2 b, Vec2 obs, const QuadratureSettings& qs) {
    guard(a, b, obs);
    Vec2 d = b - a;
    double len = norm(d);
    Vec2 dir = (1.0 / len) * d;
    auto f = [&](double s) {
        Vec2 r = obs - (a + s * dir);
        return -std::log(dot(r, r)) / (2.0 * two_pi);
    };
    return integrate_split(f, len, foot_parameter(a, b, obs), qs);
}

Vec2 quad_field(Vec2 a, Vec2 b, Vec2 obs, const QuadratureSettings& qs) {
    guard(a, b, obs);
    Vec2 d = b - a;
    double len = norm(d);
    Vec2 dir = (1.0 / len) * d;
    double split = foot_parameter(a, b, obs);
    auto component = [&](bool want_x) {
        auto f = [&](double s) {
            Vec2 r = obs - (a + s * dir);
            return (want_x ? r.x : r.y) / (two_pi * dot(r, r));
        };
        return integrate_split(f, len, split, qs);
    };
    return {component(true), component(false)};
}

double analytic_coax(double a, double b, double eps_r) {
    if (!(a > 0.0 && a < b) || !(eps_r > 0.0)) {
        throw Error("analytic_coax requires 0 < a < b and eps_r > 0");
    }
    return two_pi * eps0 * eps_r / std::log(b / a);
}

double analytic_two_layer_coax(double a, double b, double c, double eps_r1, double eps_r2) {
    if (!(a > 0.0 && a < b && b < c) || !(eps_r1 > 0.0 && eps_r2 > 0.0)) {
        throw Error("analytic_two_layer_coax requires 0 < a < b < c and positive permittivities");
    }
    return two_pi * eps0 / (std::log(b / a) / eps_r1 + std::log(c / b) / eps_r2);
}

double analytic_wire_over_ground(double h, double r0) {
    if (!(r0 > 0.0 && r0 < h)) {
        throw Error("analytic_wire_over_ground requires 0 < r0 < h");
    }
    return two_pi * eps0 / std::acosh(h / r0);
}

namespace {

std::vector<PointExpr> circle(double cx, double cy, double r, int sides) {
    std::vector<PointExpr> pts;
    for (int k = 0; k < sides; ++k) {
        double th = two_pi * k / sides;
        pts.push_back({cx + r * std::cos(th), cy + r * std::sin(th)});
    }
    return pts;
}

// Ring between radii `inner` and `outer` with a slit of width `slit` along +x.
ConductorSpec keyhole_shield(double inner, double outer, double slit, int sides, double eps_inner) {
    const double half = 0.5 * slit;
    ConductorSpec shield;
    shield.name = "shield";
    shield.loop.push_back({std::sqrt(outer * outer - half * half), half});
    for (int k = 1; k < sides; ++k) {
        double th = two_pi * k / sides;
        shield.loop.push_back({outer * std::cos(th), outer * std::sin(th)});
    }
    shield.loop.push_back({std::sqrt(outer * outer - half * half), -half});
    shield.loop.push_back({std::sqrt(inner * inner - half * half), -half});
    for (int k = sides - 1; k >= 1; --k) {
        double th = two_pi * k / sides;
        shield.loop.push_back({inner * std::cos(th), inner * std::sin(th)});
    }
    shield.loop.push_back({std::sqrt(inner * inner - half * half), half});

    // Edges: outer arc (sides), slit bottom, inner arc (sides), slit top.
    for (int k = 0; k < sides; ++k) {
        shield.face_eps_r.emplace_back(1.0);
    }
    shield.face_eps_r.emplace_back(1.0);
    for (int k = 0; k < sides; ++k) {
        shield.face_eps_r.emplace_back(eps_inner);
    }
    shield.face_eps_r.emplace_back(1.0);
    return shield;
}

ConductorSpec round_conductor(std::string name, double cx, double cy, double r, int sides, double eps) {
    ConductorSpec c;
    c.name = std::move(name);
    c.loop = circle(cx, cy, r, sides);
    c.face_eps_r.assign(static_cast<std::size_t>(sides), Expr{eps});
    return c;
}

} // namespace

CrossSection coax_cross_section(double a, double b, double eps_r, int sides) {
    CrossSection cs;
    cs.unit = LengthUnit::Millimeter;
    cs.parameters = {{"a", a}, {"b", b}};
    cs.ground_plane = false;
    cs.conductors.push_back(round_conductor("inner", 0.0, 0.0, a, sides, eps_r));
    cs.conductors.push_back(keyhole_shield(b, 1.25 * b, 0.01 * b, sides, eps_r));
    return cs;
}

CrossSection two_layer_coax_cross_section(double a, double b, double c, double eps_r1, double eps_r2, int sides) {
    CrossSection cs;
    cs.unit = LengthUnit::Millimeter;
    cs.parameters = {{"a", a}, {"b", b}, {"c", c}};
    cs.ground_plane = false;
    cs.conductors.push_back(round_conductor("inner", 0.0, 0.0, a, sides, eps_r1));
    cs.conductors.push_back(keyhole_shield(c, 1.25 * c, 0.01 * c, sides, eps_r2));
    // Counter-clockwise circle: the left normal points inward, into eps_r1.
    InterfaceSpec layer;
    layer.polyline = circle(0.0, 0.0, b, sides);
    layer.polyline.push_back(layer.polyline.front());
    layer.eps_r_pos = eps_r1;
    layer.eps_r_neg = eps_r2;
    cs.interfaces.push_back(std::move(layer));
    return cs;
}

CrossSection wire_over_ground_cross_section(double h, double r0, int sides) {
    CrossSection cs;
    cs.unit = LengthUnit::Millimeter;
    cs.parameters = {{"h", h}, {"r0", r0}};
    cs.ground_plane = true;
    cs.conductors.push_back(round_conductor("wire", 0.0, h, r0, sides, 1.0));
    return cs;
}

KernelUnderTest KernelUnderTest::closed_form() {
    return {[](Vec2 a, Vec2 b, Vec2 o) { return segment_potential(a, b, o); },
            [](Vec2 a, Vec2 b, Vec2 o) { return segment_field(a, b, o); }};
}

std::vector<RandomPair> random_kernel_pairs(std::size_t count, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uni = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    std::vector<RandomPair> pairs;
    pairs.reserve(count);
    while (pairs.size() < count) {
        Vec2 a{uni(-5e-3, 5e-3), uni(-5e-3, 5e-3)};
        double len = std::exp(uni(std::log(1e-5), std::log(3e-3)));
        double angle = uni(0.0, two_pi);
        Vec2 t{std::cos(angle), std::sin(angle)};
        Vec2 b = a + len * t;
        Vec2 obs;
        if (pairs.size() % 2 == 0) {
            // Near field: within a fraction of an element length.
            double s = uni(-0.2, 1.2) * len;
            double off = std::exp(uni(std::log(0.01), std::log(0.5))) * len;
            double side = unit(rng) < 0.5 ? -1.0 : 1.0;
            obs = a + s * t + side * off * rotate_ccw(t);
        } else {
            obs = {uni(-8e-3, 8e-3), uni(-8e-3, 8e-3)};
        }
        if (distance_to_segment(a, b, obs) < 0.01 * len) {
            continue;
        }
        pairs.push_back({a, b, obs});
    }
    return pairs;
}

std::vector<CheckResult> verify_kernels(const KernelUnderTest& k, std::size_t count, unsigned long long seed) {
    constexpr double tol = 1e-10;
    CheckResult pot{"kernel potential vs quadrature", 0.0, tol, false, ""};
    CheckResult fld{"kernel field vs quadrature", 0.0, tol, false, ""};
    for (const auto& p : random_kernel_pairs(count, seed)) {
        double qp = quad_potential(p.a, p.b, p.obs);
        double cp = k.potential(p.a, p.b, p.obs);
        pot.worst_error = std::max(pot.worst_error, std::abs(cp - qp) / std::abs(qp));
        Vec2 qf = quad_field(p.a, p.b, p.obs);
        Vec2 cf = k.field(p.a, p.b, p.obs);
        fld.worst_error = std::max(fld.worst_error, norm(cf - qf) / norm(qf));
    }
    for (auto* r : {&pot, &fld}) {
        r->pass = r->worst_error <= r->tolerance;
        r->detail = std::to_string(count) + " random pairs";
    }
    return {pot, fld};
}

std::vector<CheckResult> verify_analytic_structures(unsigned threads) {
    std::vector<CheckResult> out;
    auto check = [&](const std::string& name, const CrossSection& cs, double initial_l_mm, double exact,
                     double tol) {
        CheckResult r{name, 0.0, tol, false, ""};
        try {
            AdaptiveConfig cfg;
            cfg.method = RefineAll{};
            cfg.tol = 1e-2;
            cfg.initial_l_max = initial_l_mm * 1e-3;
            cfg.threads = threads;
            AdaptiveResult run = run_adaptive(resolve_geometry(cs), cfg);
            double c11 = run.capacitance(0, 0);
            r.worst_error = std::abs(c11 - exact) / exact;
            r.pass = run.trace.status == RunStatus::Converged && r.worst_error <= tol;
            std::ostringstream os;
            os << "C11=" << c11 << " F/m, exact=" << exact << " F/m, N=" << run.mesh.size()
               << ", iterations=" << run.iterations() << ", " << status_name(run.trace.status);
            r.detail = os.str();
        } catch (const std::exception& e) {
            r.detail = std::string("error: ") + e.what();
        }
        out.push_back(std::move(r));
    };
    check("coax a=1 b=2 mm eps_r=1", coax_cross_section(1.0, 2.0, 1.0), 0.1, analytic_coax(1.0, 2.0, 1.0), 5e-3);
    check("two-layer coax a=1 b=1.5 c=2 mm eps_r=2/1", two_layer_coax_cross_section(1.0, 1.5, 2.0, 2.0, 1.0), 0.1,
          analytic_two_layer_coax(1.0, 1.5, 2.0, 2.0, 1.0), 1e-2);
    check("wire over ground h=10 r0=1 mm", wire_over_ground_cross_section(10.0, 1.0), 0.1,
          analytic_wire_over_ground(10.0, 1.0), 1e-2);
    return out;
}

} // namespace qcap
