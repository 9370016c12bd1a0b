#include "qcap/errors.hpp"
#include "qcap/geometry.hpp"

#include <doctest.h>

#include <algorithm>
#include <string>

using namespace qcap;

namespace {

const std::string data_dir = QCAP_DATA_DIR;

const char* square_doc = R"({
  "unit": "m",
  "ground_plane": true,
  "conductors": [
    {"name": "sq", "loop": [[0, 1], [1, 1], [1, 2], [0, 2]], "face_eps_r": [1, 1, 1, 1]}
  ]
})";

std::string with_interface(const std::string& pos, const std::string& neg) {
    return R"({
  "unit": "m", "ground_plane": true,
  "conductors": [{"name": "c", "loop": [[0, 1], [1, 1], [1, 2], [0, 2]], "face_eps_r": [1, 1, 1, 1]}],
  "dielectric_interfaces": [{"polyline": [[-2, 0.5], [3, 0.5]], "eps_r_pos": )" +
           pos + ", \"eps_r_neg\": " + neg + "}]}";
}

bool near(Vec2 a, Vec2 b) { return norm(a - b) < 1e-14; }

} // namespace

TEST_CASE("minimal conductor over ground") {
    auto cs = parse_cross_section(square_doc);
    CHECK(cs.ground_plane);
    CHECK(cs.conductors.size() == 1);
    CHECK(cs.unit == LengthUnit::Meter);
}

TEST_CASE("unit square normals point outward") {
    auto rg = resolve_geometry(parse_cross_section(square_doc));
    REQUIRE(rg.segments.size() == 4);
    CHECK(near(rg.segments[0].normal(), {0, -1}));
    CHECK(near(rg.segments[1].normal(), {1, 0}));
    CHECK(near(rg.segments[2].normal(), {0, 1}));
    CHECK(near(rg.segments[3].normal(), {-1, 0}));
    for (const auto& s : rg.segments) {
        CHECK(s.is_conductor());
        CHECK(s.length() == doctest::Approx(1.0));
    }
    CHECK(validate_geometry(rg).empty());
}

TEST_CASE("coupled microstrip example file") {
    auto cs = load_cross_section(data_dir + "/mtl2_like.json");
    CHECK(cs.conductors.size() == 2);
    CHECK(cs.unit == LengthUnit::Millimeter);
    CHECK(cs.ground_plane);
    const std::pair<const char*, double> expected[] = {{"t", 0.005}, {"w", 0.05},  {"s", 0.05},  {"d", 0.15},
                                                       {"h1", 0.05}, {"h2", 0.05}, {"h3", 0.05}, {"er1", 3.8},
                                                       {"er2", 2.0}, {"er3", 3.8}};
    for (auto [name, value] : expected) {
        CAPTURE(name);
        CHECK(cs.parameter(name) == value);
    }
    auto rg = resolve_geometry(cs);
    CHECK(validate_geometry(rg).empty());
    CHECK(rg.n_cond == 2);

    SUBCASE("segment count equals loop vertices plus polyline edges") {
        std::size_t expected_count = 0;
        for (const auto& c : cs.conductors) {
            expected_count += c.loop.size();
        }
        for (const auto& i : cs.interfaces) {
            expected_count += i.polyline.size() - 1;
        }
        CHECK(rg.segments.size() == expected_count);
    }

    SUBCASE("w override moves w-dependent coordinates") {
        auto base = resolve_geometry(cs);
        auto moved = resolve_geometry(cs, {{"w", 0.0525}});
        // conductor I starts at x = -s/2 - w (mm) and conductor II ends at s/2 + w
        CHECK(base.segments[0].a.x == doctest::Approx(-0.075e-3));
        CHECK(moved.segments[0].a.x == doctest::Approx(-0.0775e-3));
        CHECK(moved.segments[5].a.x == doctest::Approx(0.0775e-3));
        CHECK(moved.segments[0].b.x == doctest::Approx(base.segments[0].b.x));
        CHECK(moved.parameters.at("w") == 0.0525);
    }
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_cross_section("{"), GeometryError);
    CHECK_THROWS_AS(parse_cross_section(R"({"unit": "m", "conductors": []})"), GeometryError);
    CHECK_THROWS_AS(parse_cross_section(R"({"unit": "inch", "ground_plane": true,
        "conductors": [{"name": "c", "loop": [[0,1],[1,1],[1,2]], "face_eps_r": [1,1,1]}]})"),
                    GeometryError);
    // duplicate parameter name
    CHECK_THROWS_AS(parse_cross_section(R"({"unit": "m", "parameters": {"a": 1, "a": 2}, "ground_plane": true,
        "conductors": [{"name": "c", "loop": [[0,1],[1,1],[1,2]], "face_eps_r": [1,1,1]}]})"),
                    GeometryError);
    // face_eps_r length mismatch
    CHECK_THROWS_AS(parse_cross_section(R"({"unit": "m", "ground_plane": true,
        "conductors": [{"name": "c", "loop": [[0,1],[1,1],[1,2]], "face_eps_r": [1,1]}]})"),
                    GeometryError);
    // missing field
    CHECK_THROWS_AS(parse_cross_section(R"({"unit": "m", "ground_plane": true,
        "conductors": [{"name": "c", "loop": [[0,1],[1,1],[1,2]]}]})"),
                    GeometryError);
    // unknown field
    CHECK_THROWS_AS(parse_cross_section(R"({"unit": "m", "ground_plane": true, "colour": 1,
        "conductors": [{"name": "c", "loop": [[0,1],[1,1],[1,2]], "face_eps_r": [1,1,1]}]})"),
                    GeometryError);
    // one conductor and no ground plane
    CHECK_THROWS_AS(parse_cross_section(R"({"unit": "m", "ground_plane": false,
        "conductors": [{"name": "c", "loop": [[0,1],[1,1],[1,2]], "face_eps_r": [1,1,1]}]})"),
                    GeometryError);
    CHECK_THROWS_AS(load_cross_section(data_dir + "/does_not_exist.json"), GeometryError);
}

TEST_CASE("resolve-time errors") {
    CHECK_NOTHROW(resolve_geometry(parse_cross_section(with_interface("2", "1"))));
    CHECK_THROWS_AS(resolve_geometry(parse_cross_section(with_interface("2", "2"))), GeometryError);
    CHECK_THROWS_AS(resolve_geometry(parse_cross_section(with_interface("0", "2"))), GeometryError);
    CHECK_THROWS_AS(resolve_geometry(parse_cross_section(square_doc), {{"bogus", 1.0}}), GeometryError);
    CHECK_THROWS_AS(resolve_geometry(parse_cross_section(with_interface("\"er\"", "1"))), GeometryError);
}

TEST_CASE("validation diagnostics") {
    auto rg = resolve_geometry(parse_cross_section(square_doc));

    SUBCASE("segment below the ground plane") {
        auto bad = rg;
        bad.segments[0].a.y = -0.5;
        CHECK(validate_geometry(bad).size() >= 1);
    }
    SUBCASE("clockwise loop") {
        auto bad = rg;
        for (auto& s : bad.segments) {
            std::swap(s.a, s.b);
        }
        auto diags = validate_geometry(bad);
        REQUIRE(diags.size() == 1);
        CHECK(diags[0].find("counter-clockwise") != std::string::npos);
    }
    SUBCASE("zero-length segment") {
        auto bad = rg;
        bad.segments[1].b = bad.segments[1].a;
        CHECK_FALSE(validate_geometry(bad).empty());
    }
    SUBCASE("clockwise loop in a document") {
        const char* cw = R"({"unit": "m", "ground_plane": true,
            "conductors": [{"name": "c", "loop": [[0,1],[0,2],[1,2],[1,1]], "face_eps_r": [1,1,1,1]}]})";
        CHECK_THROWS_AS(resolve_geometry(parse_cross_section(cw)), GeometryError);
    }
}

TEST_CASE("lengths and scaling") {
    auto cs = load_cross_section(data_dir + "/mtl2_like.json");
    CHECK(eval_length(cs, "2*w") == doctest::Approx(1e-4));
    CHECK(eval_length(cs, "t/3", {{"t", 0.006}}) == doctest::Approx(2e-6));
    auto rg = resolve_geometry(cs);
    auto big = scaled(rg, 10.0);
    REQUIRE(big.segments.size() == rg.segments.size());
    for (std::size_t i = 0; i < rg.segments.size(); ++i) {
        CHECK(big.segments[i].length() == doctest::Approx(10.0 * rg.segments[i].length()));
    }
}
