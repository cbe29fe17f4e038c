#include <doctest.h>

#include <cmath>

#include "qkdsim/engine.hpp"

using namespace qkdsim;

namespace {

Scenario symmetric(double r, double peak, AttackStrategy attack,
                   std::uint64_t n, std::uint64_t seed) {
    Scenario s;
    SymmetricReceiverSpec spec;
    spec.r = r;
    spec.peak = peak;
    s.symmetric_recipe = spec;
    s.receiver = build_receiver(spec);
    s.attack = std::move(attack);
    s.n_pulses = n;
    s.seed = seed;
    return s;
}

TimeMuxConfig mux(double peak, TimeNs period) {
    TimeMuxConfig cfg;
    cfg.curve = EfficiencyCurve({{-0.4, 0.0}, {0.0, peak}, {0.4, 0.0}});
    cfg.gate0_offset = -1.0;
    cfg.gate1_offset = 1.0;
    cfg.pulse_period = period;
    return cfg;
}

} // namespace

TEST_CASE("symmetric receiver realizes the mismatch quadruple exactly") {
    for (double r : {0.0, 0.2, 0.5, 1.0}) {
        const TwoDetectorConfig cfg =
            build_symmetric_receiver(MismatchRatio{r}, 0.8, -1.0, 1.0, 0.5);
        CHECK(cfg.curve_bit0.evaluate(-1.0) == doctest::Approx(0.8));
        CHECK(cfg.curve_bit0.evaluate(1.0) == doctest::Approx(r * 0.8));
        CHECK(cfg.curve_bit1.evaluate(-1.0) == doctest::Approx(r * 0.8));
        CHECK(cfg.curve_bit1.evaluate(1.0) == doctest::Approx(0.8));
        CHECK(cfg.gate_center_offset == doctest::Approx(0.0));
        if (r < 1.0) {
            CHECK(cfg.curve_bit0.peak_time() == doctest::Approx(-1.0));
            CHECK(cfg.curve_bit1.peak_time() == doctest::Approx(1.0));
        }
        const EfficiencyQuadruple q = receiver_quadruple(cfg);
        CHECK(mismatch_ratio(q).r == doctest::Approx(r));
    }
}

TEST_CASE("symmetric receiver rejects unbuildable parameters") {
    CHECK_THROWS_AS(build_symmetric_receiver({-0.1}, 0.5, -1, 1, 0.5),
                    ValidationError);
    CHECK_THROWS_AS(build_symmetric_receiver({0.5}, 0.0, -1, 1, 0.5),
                    ValidationError);
    CHECK_THROWS_AS(build_symmetric_receiver({0.5}, 1.1, -1, 1, 0.5),
                    ValidationError);
    CHECK_THROWS_AS(build_symmetric_receiver({2.0}, 0.5, -1, 1, 0.5),
                    ValidationError); // r > 1: build with 1/r and swap roles
    CHECK_THROWS_AS(build_symmetric_receiver({0.5}, 0.5, 1, -1, 0.5),
                    ValidationError);
    CHECK_THROWS_AS(build_symmetric_receiver({0.5}, 0.5, -1, 1, 0.0),
                    ValidationError);
}

TEST_CASE("scenario validation enforces attack/receiver compatibility") {
    Scenario s = symmetric(0.5, 0.5, ShiftAndFlip{2.0}, 100, 1);
    CHECK_THROWS_AS(s.validate(), ValidationError);

    Scenario m;
    m.receiver = mux(0.5, 10.0);
    m.attack = TimeShift{};
    m.n_pulses = 100;
    CHECK_THROWS_AS(m.validate(), ValidationError);
    m.attack = ShiftAndFlip{2.0};
    CHECK_NOTHROW(m.validate());

    Scenario bad = symmetric(0.5, 0.5, NoAttack{}, 100, 1);
    bad.channel_transmittance = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = symmetric(0.5, 0.5, NoAttack{}, 100, 1);
    bad.n_pulses = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("undisturbed protocol: no errors, expected sifted rate") {
    const Scenario s = symmetric(0.5, 1.0, NoAttack{}, 50000, 11);
    const SimResult res = run_scenario(s);
    CHECK(res.emitted == 50000);
    REQUIRE(res.qber.has_value());
    CHECK(*res.qber == 0.0);
    // Nominal arrival sees 0.9*peak on either detector; half the slots sift.
    CHECK(res.sifted_rate == doctest::Approx(0.45).epsilon(0.03));
    CHECK_FALSE(res.empirical_eve_info.has_value());
    CHECK_FALSE(res.assessment.has_value());
}

TEST_CASE("runs are reproducible and seeds matter") {
    const Scenario s = symmetric(0.2, 1.0, FakedState{}, 20000, 42);
    const SimResult a = run_scenario(s);
    const SimResult b = run_scenario(s);
    CHECK(a.qber == b.qber);
    CHECK(a.detected == b.detected);
    CHECK(a.sifted == b.sifted);

    Scenario other = s;
    other.seed = 43;
    const SimResult c = run_scenario(other);
    CHECK(c.detected != a.detected); // overwhelmingly likely
}

TEST_CASE("sharded run is statistically equivalent") {
    const Scenario s = symmetric(0.2, 1.0, FakedState{}, 100000, 17);
    const SimResult whole = run_scenario(s);
    const SimResult parts = run_scenario_sharded(s, 4);
    CHECK(parts.emitted == whole.emitted);
    const double analytic = faked_state_qber_symmetric(0.2);
    const double sigma = std::sqrt(analytic * (1 - analytic) / parts.sifted);
    CHECK(std::abs(*parts.qber - analytic) < 4 * sigma);
    CHECK(std::abs(*whole.qber - analytic) < 4 * sigma);
}

TEST_CASE("faked-state simulation matches the enumeration oracle") {
    const Scenario s = symmetric(0.5, 1.0, FakedState{}, 100000, 23);
    const SimResult res = run_scenario(s);
    const OracleResult oracle =
        enumerate_attack_outcomes(receiver_quadruple(s.receiver), FakedState{});
    const double sigma =
        std::sqrt(oracle.qber * (1 - oracle.qber) / res.sifted);
    CHECK(std::abs(*res.qber - oracle.qber) < 4 * sigma);
    const double dsigma = std::sqrt(oracle.detection_prob *
                                    (1 - oracle.detection_prob) / res.emitted);
    CHECK(std::abs(static_cast<double>(res.detected) / res.emitted -
                   oracle.detection_prob) < 4 * dsigma);
}

TEST_CASE("time-shift run carries the analytic assessment") {
    const Scenario s = symmetric(0.5, 1.0, TimeShift{}, 50000, 31);
    const SimResult res = run_scenario(s);
    CHECK(*res.qber == 0.0);
    REQUIRE(res.assessment.has_value());
    CHECK(res.assessment->eve_info ==
          doctest::Approx(eve_information(MismatchRatio{0.5})));
    CHECK(res.assessment->insecure);
    REQUIRE(res.empirical_eve_info.has_value());
    // Guess-error 1/3 at r = 0.5.
    CHECK(*res.empirical_eve_info ==
          doctest::Approx(1.0 - binary_entropy(1.0 / 3.0)).epsilon(0.05));
}

TEST_CASE("channel loss thins detections but not the error rate") {
    Scenario s = symmetric(0.2, 1.0, FakedState{}, 100000, 37);
    s.channel_transmittance = 0.5;
    const SimResult res = run_scenario(s);
    const Scenario full = symmetric(0.2, 1.0, FakedState{}, 100000, 37);
    const SimResult ref = run_scenario(full);
    CHECK(res.detected < ref.detected * 0.6);
    const double analytic = faked_state_qber_symmetric(0.2);
    const double sigma = std::sqrt(analytic * (1 - analytic) / res.sifted);
    CHECK(std::abs(*res.qber - analytic) < 4 * sigma);
}

TEST_CASE("monitors: quiet runs stay silent, masking hides the rate drop") {
    Scenario quiet = symmetric(0.5, 0.5, NoAttack{}, 50000, 41);
    quiet.countermeasures.monitors = true;
    const SimResult q = run_scenario(quiet);
    REQUIRE(q.monitor.has_value());
    CHECK_FALSE(q.monitor->rate_alarm);
    CHECK_FALSE(q.monitor->window_alarm);

    Scenario attacked = symmetric(0.5, 0.5, TimeShift{}, 50000, 41);
    attacked.countermeasures.monitors = true;
    const SimResult a = run_scenario(attacked);
    REQUIRE(a.monitor.has_value());
    CHECK(a.monitor->rate_alarm); // 0.75*peak vs 0.9*peak baseline

    Scenario masked = attacked;
    masked.eve_loss_mask = 0.8; // Eve reports extra line loss
    const SimResult m = run_scenario(masked);
    REQUIRE(m.monitor.has_value());
    CHECK_FALSE(m.monitor->rate_alarm);
}

TEST_CASE("gate jitter keeps the protocol working and the windows quiet") {
    Scenario s = symmetric(0.5, 1.0, NoAttack{}, 20000, 47);
    s.countermeasures.monitors = true;
    s.countermeasures.gate_jitter_halfwidth = 0.2;
    const SimResult res = run_scenario(s);
    CHECK(*res.qber == 0.0);
    REQUIRE(res.monitor.has_value());
    CHECK_FALSE(res.monitor->window_alarm);
}

TEST_CASE("sweep rebuilds the receiver per r value with derived seeds") {
    const Scenario base = symmetric(0.5, 1.0, FakedState{}, 20000, 53);
    const auto results = sweep(base, "r", {0.0, 0.5, 1.0});
    REQUIRE(results.size() == 3);
    CHECK(results[0].first == 0.0);
    CHECK(*results[0].second.qber == 0.0);
    CHECK(*results[2].second.qber ==
          doctest::Approx(0.5).epsilon(0.05));

    const Scenario s0 = apply_sweep_value(base, "r", 0.0, 0);
    const Scenario s1 = apply_sweep_value(base, "r", 0.0, 1);
    CHECK(s0.seed != s1.seed); // value index feeds the derived seed
}

TEST_CASE("sweep validates parameter applicability") {
    Scenario base = symmetric(0.5, 1.0, FakedState{}, 1000, 1);
    CHECK_THROWS_AS(sweep(base, "delta", {1.0}), ValidationError);
    CHECK_THROWS_AS(sweep(base, "block_fraction", {0.1}), ValidationError);
    CHECK_THROWS_AS(sweep(base, "unknown", {0.1}), ValidationError);

    base.symmetric_recipe.reset();
    CHECK_THROWS_AS(sweep(base, "r", {0.5}), ValidationError);

    Scenario m;
    m.receiver = mux(0.5, 10.0);
    m.attack = ShiftAndFlip{2.0};
    m.n_pulses = 1000;
    CHECK_NOTHROW(sweep(m, "delta", {2.0}));
}

TEST_CASE("analytic qber column values") {
    Scenario fs = symmetric(0.5, 1.0, FakedState{}, 100, 1);
    CHECK(analytic_qber_for(fs) == doctest::Approx(0.4));
    Scenario ts = symmetric(0.5, 1.0, TimeShift{}, 100, 1);
    CHECK(analytic_qber_for(ts) == 0.0);

    Scenario wrap;
    wrap.receiver = mux(0.1, 4.0);
    wrap.attack = ShiftAndFlip{2.0};
    CHECK(analytic_qber_for(wrap) == doctest::Approx(0.25));
    Scenario clean;
    clean.receiver = mux(0.9, 10.0);
    clean.attack = ShiftAndFlip{2.0};
    CHECK(analytic_qber_for(clean) == 0.0);
    clean.attack = ShiftAndFlip{1.3};
    CHECK(std::isnan(analytic_qber_for(clean)));
}

TEST_CASE("wraparound shift-and-flip lands near 25% errors") {
    Scenario s;
    s.receiver = mux(0.1, 4.0);
    s.attack = ShiftAndFlip{2.0};
    s.n_pulses = 100000;
    s.seed = 59;
    const SimResult res = run_scenario(s);
    const double sigma = std::sqrt(0.25 * 0.75 / res.sifted);
    CHECK(std::abs(*res.qber - 0.25) < 4 * sigma);
}
