#include <doctest.h>

#include "qkdsim/core.hpp"

using namespace qkdsim;

TEST_CASE("efficiency curve rejects malformed samples") {
    CHECK_THROWS_AS(EfficiencyCurve(std::vector<EfficiencyCurve::Sample>{}),
                    ValidationError);
    CHECK_THROWS_AS(EfficiencyCurve({{0.0, 0.5}, {0.0, 0.6}}), ValidationError);
    CHECK_THROWS_AS(EfficiencyCurve({{1.0, 0.5}, {0.0, 0.6}}), ValidationError);
    CHECK_THROWS_AS(EfficiencyCurve({{0.0, 1.5}}), ValidationError);
    CHECK_THROWS_AS(EfficiencyCurve({{0.0, -0.1}}), ValidationError);
}

TEST_CASE("efficiency curve interpolates linearly and is zero outside") {
    const EfficiencyCurve c({{-1.0, 0.0}, {0.0, 0.8}, {2.0, 0.2}});
    CHECK(c.evaluate(-1.0) == doctest::Approx(0.0));
    CHECK(c.evaluate(-0.5) == doctest::Approx(0.4));
    CHECK(c.evaluate(0.0) == doctest::Approx(0.8));
    CHECK(c.evaluate(1.0) == doctest::Approx(0.5));
    CHECK(c.evaluate(2.0) == doctest::Approx(0.2));
    CHECK(c.evaluate(-1.0001) == 0.0);
    CHECK(c.evaluate(2.0001) == 0.0);
    CHECK(c.span_begin() == -1.0);
    CHECK(c.span_end() == 2.0);
}

TEST_CASE("peak picks the first maximum on ties") {
    const EfficiencyCurve c({{0.0, 0.3}, {1.0, 0.9}, {2.0, 0.9}, {3.0, 0.1}});
    CHECK(c.peak_time() == 1.0);
    CHECK(c.peak_value() == doctest::Approx(0.9));
}

TEST_CASE("bit and basis helpers") {
    CHECK(flip(Bit::Zero) == Bit::One);
    CHECK(flip(Bit::One) == Bit::Zero);
    CHECK(other(Basis::Z) == Basis::X);
    CHECK(other(Basis::X) == Basis::Z);
    CHECK(bit_index(Bit::One) == 1);
    CHECK(bit_from_index(0) == Bit::Zero);
}
