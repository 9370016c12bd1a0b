#include "qcap/errors.hpp"
#include "qcap/geometry.hpp"
#include "qcap/mesh.hpp"

#include <doctest.h>

#include <vector>

using namespace qcap;

namespace {

ResolvedGeometry one_segment(double length) {
    ResolvedGeometry rg;
    rg.n_cond = 1;
    rg.ground_plane = true;
    rg.segments.push_back(Segment{{0.0, 1.0}, {length, 1.0}, ConductorFace{0, 1.0}});
    return rg;
}

Mesh uniform_line(std::size_t n) {
    return build_initial_mesh(one_segment(1.0), 1.0 / static_cast<double>(n));
}

} // namespace

TEST_CASE("initial mesh") {
    SUBCASE("ceil(L / l_max) equal pieces") {
        auto m = build_initial_mesh(one_segment(1.0), 0.3);
        REQUIRE(m.size() == 4);
        for (const auto& e : m.elements) {
            CHECK(e.length == doctest::Approx(0.25));
            CHECK(e.parent == 0);
        }
        CHECK(m.elements.front().a.x == 0.0);
        CHECK(m.elements.back().b.x == 1.0);
    }
    SUBCASE("one element per segment when l_max covers everything") {
        auto rg = resolve_geometry(load_cross_section(QCAP_DATA_DIR "/mtl2_like.json"));
        auto m = build_initial_mesh(rg, 1.0);
        CHECK(m.size() == rg.segments.size());
    }
    SUBCASE("coupled microstrip at l = 2w") {
        auto cs = load_cross_section(QCAP_DATA_DIR "/mtl2_like.json");
        auto rg = resolve_geometry(cs);
        double l = eval_length(cs, "2*w");
        auto m = build_initial_mesh(rg, l);
        for (const auto& e : m.elements) {
            CHECK(e.length <= l * (1.0 + 1e-12));
        }
        CHECK(m.n_cond == 2);
        CHECK(m.ground_plane);
    }
    CHECK_THROWS_AS(build_initial_mesh(one_segment(1.0), 0.0), Error);
    CHECK_THROWS_AS(build_initial_mesh(one_segment(1.0), -1.0), Error);
}

TEST_CASE("refine_all bisects every element") {
    auto m = uniform_line(10);
    auto r = refine_all(m);
    CHECK(r.size() == 20);
    CHECK(r.total_length() == doctest::Approx(m.total_length()).epsilon(1e-14));
    CHECK(refine_all(r).size() == 40);

    auto single = build_initial_mesh(one_segment(1.0), 2.0);
    auto halves = refine_all(single);
    REQUIRE(halves.size() == 2);
    CHECK(norm(halves.elements[0].a - Vec2{0, 1}) == 0.0);
    CHECK(norm(halves.elements[0].b - Vec2{0.5, 1}) == 0.0);
    CHECK(norm(halves.elements[1].b - Vec2{1, 1}) == 0.0);
    auto quarters = refine_all(halves);
    CHECK(quarters.size() == 4);
    for (const auto& e : quarters.elements) {
        CHECK(e.length == doctest::Approx(0.25));
        CHECK(norm(e.normal - single.elements[0].normal) < 1e-15);
    }
}

TEST_CASE("refine_top_fraction") {
    SUBCASE("N = 8, p = 25 splits two elements") {
        auto m = uniform_line(8);
        std::vector<double> score{0.1, 0.9, 0.2, 0.3, 0.8, 0.1, 0.0, 0.2};
        auto r = refine_top_fraction(m, score, 25.0);
        CHECK(r.size() == 10);
        // elements 1 and 4 split in place
        CHECK(r.elements[1].length == doctest::Approx(0.0625));
        CHECK(r.elements[2].length == doctest::Approx(0.0625));
        CHECK(r.elements[6].length == doctest::Approx(0.0625));
        CHECK(r.elements[0].length == doctest::Approx(0.125));
    }
    SUBCASE("p = 100 matches refine_all") {
        auto cs = load_cross_section(QCAP_DATA_DIR "/mtl2_like.json");
        auto m = build_initial_mesh(resolve_geometry(cs), eval_length(cs, "2*w"));
        std::vector<double> score(m.size());
        for (std::size_t i = 0; i < score.size(); ++i) {
            score[i] = static_cast<double>((i * 7919) % 13);
        }
        auto a = refine_top_fraction(m, score, 100.0);
        auto b = refine_all(m);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a.elements[i].a.x == b.elements[i].a.x);
            CHECK(a.elements[i].a.y == b.elements[i].a.y);
            CHECK(a.elements[i].b.x == b.elements[i].b.x);
            CHECK(a.elements[i].b.y == b.elements[i].b.y);
        }
    }
    SUBCASE("equal scores: one split, the lowest index wins") {
        auto m = uniform_line(4);
        std::vector<double> score(4, 1.0);
        auto r = refine_top_fraction(m, score, 25.0);
        REQUIRE(r.size() == 5);
        CHECK(r.elements[0].length == doctest::Approx(0.125));
        CHECK(r.elements[1].length == doctest::Approx(0.125));
        CHECK(r.elements[2].length == doctest::Approx(0.25));
    }
    SUBCASE("equal scores: the longer element wins") {
        auto m = refine_top_fraction(uniform_line(4), std::vector<double>(4, 1.0), 25.0);
        auto r = refine_top_fraction(m, std::vector<double>(5, 1.0), 1.0);
        REQUIRE(r.size() == 6);
        CHECK(r.elements[2].length == doctest::Approx(0.125));
        CHECK(r.elements[3].length == doctest::Approx(0.125));
    }
    SUBCASE("tiny p still splits one element") {
        auto r = refine_top_fraction(uniform_line(8), std::vector<double>(8, 0.0), 0.001);
        CHECK(r.size() == 9);
    }
    SUBCASE("length is conserved") {
        auto m = uniform_line(16);
        std::vector<double> score(16);
        for (std::size_t i = 0; i < 16; ++i) {
            score[i] = static_cast<double>(i % 5);
        }
        auto r = refine_top_fraction(m, score, 15.0);
        CHECK(r.total_length() == doctest::Approx(m.total_length()).epsilon(1e-14));
    }
    SUBCASE("argument checks") {
        auto m = uniform_line(4);
        CHECK_THROWS_AS(refine_top_fraction(m, std::vector<double>(3, 1.0), 25.0), Error);
        CHECK_THROWS_AS(refine_top_fraction(m, std::vector<double>(4, 1.0), 0.0), Error);
        CHECK_THROWS_AS(refine_top_fraction(m, std::vector<double>(4, 1.0), 101.0), Error);
    }
}
