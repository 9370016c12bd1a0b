#include "qcap/errors.hpp"
#include "qcap/expr.hpp"

#include <doctest.h>

using namespace qcap;

TEST_CASE("parameter expressions") {
    ParamMap p{{"w", 0.05}, {"t", 0.005}, {"d", 0.15}, {"s", 0.05}};
    CHECK(eval_param_expr("w", p) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(eval_param_expr("2*w + t", p) == doctest::Approx(0.105).epsilon(1e-15));
    CHECK(eval_param_expr("-(d - s)/2", p) == doctest::Approx(-0.05).epsilon(1e-15));
    CHECK(eval_param_expr("1.5e-3", {}) == 1.5e-3);
    CHECK(eval_param_expr("2 * (3 + 4) / 7 - -1", {}) == doctest::Approx(3.0));
    CHECK(eval_param_expr("  +w ", p) == doctest::Approx(0.05));
}

TEST_CASE("malformed expressions carry a position") {
    ParamMap p{{"w", 0.05}};
    CHECK_THROWS_AS(eval_param_expr("", p), ExprError);
    CHECK_THROWS_AS(eval_param_expr("w +", p), ExprError);
    CHECK_THROWS_AS(eval_param_expr("(w", p), ExprError);
    CHECK_THROWS_AS(eval_param_expr("w w", p), ExprError);
    CHECK_THROWS_AS(eval_param_expr("1/0", p), ExprError);
    try {
        eval_param_expr("w + q", p);
        FAIL("unknown identifier accepted");
    } catch (const ExprError& e) {
        CHECK(e.position() == 4);
    }
}

TEST_CASE("identifiers") {
    CHECK(is_identifier("h1"));
    CHECK(is_identifier("_x"));
    CHECK_FALSE(is_identifier("1h"));
    CHECK_FALSE(is_identifier(""));
    CHECK_FALSE(is_identifier("a-b"));
}
