#include <doctest.h>

#include "qkdsim/protocol.hpp"

using namespace qkdsim;

namespace {

TwoDetectorConfig unit_receiver() {
    TwoDetectorConfig cfg;
    cfg.curve_bit0 = EfficiencyCurve({{-1.0, 1.0}, {1.0, 1.0}});
    cfg.curve_bit1 = cfg.curve_bit0;
    return cfg;
}

Pulse make_pulse(Basis basis, Bit bit, std::uint64_t idx = 0) {
    Pulse p;
    p.basis = basis;
    p.bit = bit;
    p.pulse_index = idx;
    return p;
}

} // namespace

TEST_CASE("alice_emit indexes pulses and mirrors the record") {
    RandomStream rng(1, 0);
    const auto pulses = alice_emit(500, rng);
    REQUIRE(pulses.size() == 500);
    int z = 0, zero = 0;
    for (std::size_t i = 0; i < pulses.size(); ++i) {
        const auto& [rec, p] = pulses[i];
        CHECK(rec.pulse_index == i);
        CHECK(p.pulse_index == i);
        CHECK(rec.basis == p.basis);
        CHECK(rec.bit == p.bit);
        CHECK(p.arrival_offset == 0.0);
        if (rec.basis == Basis::Z) ++z;
        if (rec.bit == Bit::Zero) ++zero;
    }
    CHECK(z > 180);    // uniform within ~6 sigma
    CHECK(z < 320);
    CHECK(zero > 180);
    CHECK(zero < 320);
}

TEST_CASE("matched basis routes the encoded bit, four-value swaps it") {
    RandomStream rng(2, 0);
    const Pulse p = make_pulse(Basis::Z, Bit::One);
    for (int i = 0; i < 200; ++i) {
        const BobDraw d = draw_bob_routing(p, rng, {});
        CHECK_FALSE(d.swapped.has_value());
        if (d.basis == Basis::Z) CHECK(d.routed == Bit::One);
    }
    BobOptions four;
    four.four_value = true;
    for (int i = 0; i < 200; ++i) {
        const BobDraw d = draw_bob_routing(p, rng, four);
        REQUIRE(d.swapped.has_value());
        if (d.basis == Basis::Z) {
            CHECK(d.routed == (*d.swapped ? Bit::Zero : Bit::One));
        }
    }
}

TEST_CASE("blocked pulses are never routed") {
    RandomStream rng(3, 0);
    Pulse p = make_pulse(Basis::Z, Bit::One);
    p.blocked = true;
    for (int i = 0; i < 50; ++i) {
        CHECK_FALSE(draw_bob_routing(p, rng, {}).routed.has_value());
    }
}

TEST_CASE("sift keeps matched-basis detections and decodes the swap") {
    std::vector<AliceRecord> alice;
    std::vector<BobRecord> bob;

    auto push = [&](std::uint64_t idx, Basis ab, Bit av, Basis bb,
                    std::optional<Bit> resolved, std::optional<bool> swapped) {
        alice.push_back({idx, ab, av});
        BobRecord rec;
        rec.pulse_index = idx;
        rec.basis = bb;
        rec.click.resolved_bit = resolved;
        rec.click.clicked_bit0 = resolved == Bit::Zero;
        rec.click.clicked_bit1 = resolved == Bit::One;
        rec.assignment_swapped = swapped;
        bob.push_back(rec);
    };

    push(0, Basis::Z, Bit::One, Basis::Z, Bit::One, std::nullopt);  // kept
    push(1, Basis::Z, Bit::One, Basis::X, Bit::One, std::nullopt);  // basis drop
    push(2, Basis::X, Bit::Zero, Basis::X, std::nullopt, std::nullopt); // no click
    push(3, Basis::X, Bit::Zero, Basis::X, Bit::One, true);         // swap -> Zero

    std::map<std::uint64_t, Bit> guesses{{0, Bit::One}};
    const auto pairs = sift(alice, bob, guesses);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].pulse_index == 0);
    CHECK(pairs[0].bob_bit == Bit::One);
    CHECK(pairs[0].eve_guess == Bit::One);
    CHECK(pairs[1].pulse_index == 3);
    CHECK(pairs[1].bob_bit == Bit::Zero); // decoded through the swap
    CHECK_FALSE(pairs[1].eve_guess.has_value());

    CHECK(compute_qber(pairs) == doctest::Approx(0.0));
}

TEST_CASE("sift refuses misaligned inputs") {
    std::vector<AliceRecord> alice(2);
    std::vector<BobRecord> bob(1);
    CHECK_THROWS_AS(sift(alice, bob, {}), AlignmentError);

    bob.resize(2);
    alice[0].pulse_index = 0;
    alice[1].pulse_index = 1;
    bob[0].pulse_index = 0;
    bob[1].pulse_index = 5;
    CHECK_THROWS_AS(sift(alice, bob, {}), AlignmentError);
}

TEST_CASE("qber of an empty sample is undefined, not zero") {
    CHECK_THROWS_AS(compute_qber({}), EstimationError);
}

TEST_CASE("bob_measure_two_spd with unit efficiency reproduces matched bits") {
    const TwoDetectorConfig cfg = unit_receiver();
    RandomStream rng(4, 0);
    for (int i = 0; i < 200; ++i) {
        const Pulse p = make_pulse(Basis::X, Bit::Zero);
        const BobRecord rec = bob_measure_two_spd(cfg, p, rng);
        REQUIRE(rec.click.clicked());
        if (rec.basis == Basis::X) CHECK(rec.decoded_bit() == Bit::Zero);
    }
}

TEST_CASE("monitors flag rate drops and out-of-window clicks") {
    const ReceiverConfig cfg = unit_receiver();
    std::vector<BobRecord> bob(100);
    for (std::size_t i = 0; i < bob.size(); ++i) {
        bob[i].pulse_index = i;
        if (i < 80) { // 80% click rate, all in-window
            bob[i].click.clicked_bit0 = true;
            bob[i].click.resolved_bit = Bit::Zero;
            bob[i].click.detection_offset = 0.0;
        }
    }

    MonitorReport rep = run_monitors(bob, cfg, 0.8, {});
    CHECK_FALSE(rep.rate_alarm);
    CHECK_FALSE(rep.window_alarm);
    CHECK(rep.detection_rate == doctest::Approx(0.8));

    rep = run_monitors(bob, cfg, 0.95, {0.1, 0.1});
    CHECK(rep.rate_alarm); // 0.8 < 0.95 * 0.9

    bob[0].click.detection_offset = 5.0; // outside the gate span + guard
    rep = run_monitors(bob, cfg, 0.8, {});
    CHECK(rep.window_alarm);
    CHECK(rep.out_of_window_count == 1);
}
