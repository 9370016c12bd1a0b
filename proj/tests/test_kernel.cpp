#include "qcap/errors.hpp"
#include "qcap/kernel.hpp"
#include "qcap/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qcap;

TEST_CASE("potential at the element midpoint") {
    CHECK(segment_potential({0, 0}, {2, 0}, {1, 0}) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
    double L = 0.3;
    double expected = L / (2 * std::numbers::pi) * (1.0 - std::log(L / 2));
    CHECK(segment_potential({0.1, 0.2}, {0.4, 0.2}, {0.25, 0.2}) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("far-field potential") {
    double v = segment_potential({0, 0}, {0.01, 0}, {0.005, 100});
    double point_charge = -(0.01 / (2 * std::numbers::pi)) * std::log(100.0);
    CHECK(point_charge == doctest::Approx(-7.32929e-3).epsilon(1e-5));
    CHECK(std::abs(v - point_charge) / std::abs(point_charge) <= 1e-6);
    double q = quad_potential({0, 0}, {0.01, 0}, {0.005, 100});
    CHECK(std::abs(v - q) / std::abs(q) <= 1e-10);
}

TEST_CASE("field examples") {
    Vec2 f = segment_field({-1, 0}, {1, 0}, {0, 1});
    CHECK(std::abs(f.x) < 1e-15);
    CHECK(f.y == doctest::Approx(0.25).epsilon(1e-14));

    Vec2 own = segment_field({0.3, 0.1}, {0.7, 0.4}, {0.5, 0.25});
    CHECK(own.x == 0.0);
    CHECK(own.y == 0.0);

    CHECK_THROWS_AS(segment_field({0, 0}, {1, 0}, {0, 0}), SingularKernelError);
    CHECK_THROWS_AS(segment_field({0, 0}, {1, 0}, {1, 0}), SingularKernelError);

    // on the element's line outside the element: purely tangential
    Vec2 ext = segment_field({0, 0}, {1, 0}, {2, 0});
    CHECK(ext.y == 0.0);
    CHECK(ext.x == doctest::Approx(std::log(2.0) / (2 * std::numbers::pi)));
}

TEST_CASE("closed forms agree with quadrature") {
    for (const auto& p : random_kernel_pairs(200, 7)) {
        double cf = segment_potential(p.a, p.b, p.obs);
        double q = quad_potential(p.a, p.b, p.obs);
        CHECK(std::abs(cf - q) <= 1e-10 * std::abs(q) + 1e-16 * norm(p.b - p.a));
        Vec2 fc = segment_field(p.a, p.b, p.obs);
        Vec2 fq = quad_field(p.a, p.b, p.obs);
        CHECK(norm(fc - fq) <= 1e-10 * norm(fq));
    }
}

TEST_CASE("image kernels") {
    Vec2 a{0.2, 0.5}, b{0.6, 0.9};
    for (double x : {-3.0, 0.0, 0.4, 7.5}) {
        CHECK(grounded_potential(a, b, {x, 0.0}) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
        Vec2 f = grounded_field(a, b, {x, 0.0});
        CHECK(std::abs(f.x) <= 1e-15 * std::abs(f.y));
    }
    SUBCASE("plane receding: difference tends to the image term") {
        Vec2 ea{0, 0}, eb{0.01, 0}, obs{0.005, 0.02};
        for (double h : {1.0, 10.0, 100.0}) {
            Vec2 up{0, h};
            double diff = grounded_potential(ea + up, eb + up, obs + up) - segment_potential(ea + up, eb + up, obs + up);
            double image = -quad_potential(mirror_y(ea + up), mirror_y(eb + up), obs + up);
            CHECK(diff == doctest::Approx(image).epsilon(1e-10));
            double approx = 0.01 / (2 * std::numbers::pi) * std::log(2 * h + 0.02);
            CHECK(diff == doctest::Approx(approx).epsilon(1e-2));
        }
    }
}

TEST_CASE("additivity and translation invariance") {
    Vec2 a{0.1, 0.3}, b{0.9, 0.6}, obs{0.4, 1.1};
    Vec2 m = midpoint(a, b);
    CHECK(segment_potential(a, b, obs) ==
          doctest::Approx(segment_potential(a, m, obs) + segment_potential(m, b, obs)).epsilon(1e-13));
    Vec2 whole = segment_field(a, b, obs);
    Vec2 parts = segment_field(a, m, obs) + segment_field(m, b, obs);
    CHECK(norm(whole - parts) <= 1e-13 * norm(whole));

    Vec2 shift{3.5, -2.25};
    CHECK(segment_potential(a + shift, b + shift, obs + shift) ==
          doctest::Approx(segment_potential(a, b, obs)).epsilon(1e-13));
    CHECK(norm(segment_field(a + shift, b + shift, obs + shift) - whole) <= 1e-13 * norm(whole));
}
