#include <doctest.h>

#include <cmath>

#include "qkdsim/analysis.hpp"
#include "qkdsim/random.hpp"

using namespace qkdsim;

TEST_CASE("binary entropy basics") {
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.11) ==
          doctest::Approx(binary_entropy(0.89)).epsilon(1e-12));
    CHECK(binary_entropy(2.0 / 3.0) == doctest::Approx(0.9183).epsilon(1e-4));
    CHECK_THROWS_AS(binary_entropy(-0.1), std::domain_error);
    CHECK_THROWS_AS(binary_entropy(1.1), std::domain_error);
}

TEST_CASE("symmetric faked-state closed form matches the general formula") {
    for (double r : {0.0, 0.05, 0.2, 0.5, 0.8, 1.0}) {
        for (double p : {0.1, 0.6, 1.0}) {
            const EfficiencyQuadruple q{p, r * p, r * p, p};
            CHECK(faked_state_qber(q) ==
                  doctest::Approx(faked_state_qber_symmetric(r)).epsilon(1e-12));
        }
    }
    CHECK(faked_state_qber_symmetric(0.2) == doctest::Approx(0.25));
}

TEST_CASE("mismatch ratio requires symmetry and reports both ratios") {
    CHECK(mismatch_ratio({1.0, 0.5, 0.5, 1.0}).r == doctest::Approx(0.5));
    try {
        mismatch_ratio({1.0, 0.9, 0.2, 1.0});
        FAIL("expected AsymmetricQuadrupleError");
    } catch (const AsymmetricQuadrupleError& e) {
        CHECK(e.ratio_at_t0 == doctest::Approx(0.2));
        CHECK(e.ratio_at_t1 == doctest::Approx(0.9));
    }
    CHECK_THROWS_AS(mismatch_ratio({0.0, 0.5, 0.5, 1.0}), std::domain_error);
}

TEST_CASE("eve information and the key-rate bound partition one bit") {
    for (double r : {0.0, 0.2, 0.5, 1.0, 2.0}) {
        const MismatchRatio m{r};
        CHECK(eve_information(m) + key_rate_upper_bound(m) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(eve_information(MismatchRatio{0.0}) == doctest::Approx(1.0));
    CHECK(key_rate_upper_bound(MismatchRatio{1.0}) == doctest::Approx(1.0));
}

TEST_CASE("assessment verdicts") {
    // Strong mismatch: naive rate 1 exceeds h(2/3).
    const SecurityAssessment bad = assess(MismatchRatio{2.0}, 1.0);
    CHECK(bad.insecure);
    CHECK(bad.key_rate_upper_bound == doctest::Approx(0.9183).epsilon(1e-4));
    // No mismatch: the bound reaches 1 and the naive rate does not exceed it.
    CHECK_FALSE(assess(MismatchRatio{1.0}, 1.0).insecure);
    // A party aware of the mismatch can stay below the bound.
    CHECK_FALSE(assess(MismatchRatio{2.0}, 0.9).insecure);
}

TEST_CASE("empirical eve information") {
    std::vector<SiftedPair> pairs;
    for (int i = 0; i < 10; ++i) {
        SiftedPair p;
        p.pulse_index = i;
        p.bob_bit = Bit::One;
        p.eve_guess = Bit::One;
        pairs.push_back(p);
    }
    CHECK(empirical_eve_information(pairs) == doctest::Approx(1.0));
    for (int i = 0; i < 5; ++i) pairs[i].eve_guess = Bit::Zero;
    CHECK(empirical_eve_information(pairs) == doctest::Approx(0.0));

    pairs[0].eve_guess.reset();
    CHECK_THROWS_AS(empirical_eve_information(pairs), EstimationError);
    CHECK_THROWS_AS(empirical_eve_information({}), EstimationError);
}

TEST_CASE("enumeration oracle agrees with Eq. 2 on random quadruples") {
    RandomStream rng(2024, 0);
    for (int i = 0; i < 20; ++i) {
        const EfficiencyQuadruple q{
            rng.uniform_in(0.05, 1.0), rng.uniform_in(0.05, 1.0),
            rng.uniform_in(0.05, 1.0), rng.uniform_in(0.05, 1.0)};
        CHECK(brute_force_qber_oracle(q, FakedState{}) ==
              doctest::Approx(faked_state_qber(q)).epsilon(1e-12));
    }
}

TEST_CASE("time-shift enumeration: zero errors, rate set by the shifted times") {
    const EfficiencyQuadruple q{1.0, 0.3, 0.5, 0.9};
    const OracleResult res = enumerate_attack_outcomes(q, TimeShift{0.5});
    CHECK(res.qber == doctest::Approx(0.0));
    // Every pulse arrives at t0 or t1 with a uniformly routed detector.
    const double expected =
        0.5 * 0.5 * (q.eta0_t0 + q.eta1_t0) + 0.5 * 0.5 * (q.eta0_t1 + q.eta1_t1);
    CHECK(res.detection_prob == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("non-wrapping shift-and-flip enumeration introduces no errors") {
    const OracleResult res = enumerate_attack_outcomes(
        {0.8, 0.4, 0.4, 0.8}, ShiftAndFlip{2.0});
    CHECK(res.qber == doctest::Approx(0.0));
    CHECK(res.detection_prob == doctest::Approx(0.5 * 0.8).epsilon(1e-12));
}

TEST_CASE("enumeration rejects attacks it cannot model") {
    const EfficiencyQuadruple q{1.0, 0.5, 0.5, 1.0};
    CHECK_THROWS_AS(brute_force_qber_oracle(q, NoAttack{}),
                    UnsupportedAttackError);
    CHECK_THROWS_AS(brute_force_qber_oracle(q, Probe{0.1, {0.0}, 10}),
                    UnsupportedAttackError);
}

TEST_CASE("finite-key naive rate") {
    CHECK(finite_key_naive_rate(0.0) == doctest::Approx(1.0));
    CHECK(finite_key_naive_rate(0.5) == doctest::Approx(0.0));
}
