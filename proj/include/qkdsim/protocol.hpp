#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "qkdsim/detector.hpp"

namespace qkdsim {

struct AliceRecord {
    std::uint64_t pulse_index = 0;
    Basis basis = Basis::Z;
    Bit bit = Bit::Zero;
};

/// Bob's per-slot state. assignment_swapped is present only under the
/// four-value countermeasure: whether the detector/gate-to-bit mapping is
/// inverted for this pulse. It never leaves Bob's side.
struct BobRecord {
    std::uint64_t pulse_index = 0;
    Basis basis = Basis::Z;
    ClickRecord click;
    std::optional<bool> assignment_swapped;

    /// Bob's bit after decoding through the secret assignment.
    std::optional<Bit> decoded_bit() const {
        if (!click.resolved_bit) return std::nullopt;
        if (assignment_swapped && *assignment_swapped) return flip(*click.resolved_bit);
        return *click.resolved_bit;
    }
};

struct SiftedPair {
    std::uint64_t pulse_index = 0;
    Bit alice_bit = Bit::Zero;
    Bit bob_bit = Bit::Zero;
    std::optional<Bit> eve_guess;
};

struct MonitorReport {
    double detection_rate = 0.0;
    double baseline_rate = 0.0;
    std::int64_t out_of_window_count = 0;
    bool rate_alarm = false;
    bool window_alarm = false;
};

struct BobOptions {
    bool four_value = false;
    TimeNs gate_jitter_halfwidth = 0.0; // random gating shift countermeasure
};

/// Bob's per-pulse random choices plus the resulting detector/gate routing
/// (absent for blocked pulses). Draw order: basis, secret assignment, jitter,
/// then the routing coin when the bases mismatch.
struct BobDraw {
    Basis basis = Basis::Z;
    std::optional<bool> swapped;
    TimeNs jitter = 0.0;
    std::optional<Bit> routed;
};

BobDraw draw_bob_routing(const Pulse& pulse, RandomStream& rng,
                         const BobOptions& opts);

/// n pulses with uniform independent basis and bit, nominal timing.
std::vector<std::pair<AliceRecord, Pulse>> alice_emit(std::uint64_t n,
                                                      RandomStream& rng);

/// Bob with two SPDs. The pulse may carry Eve's modified state; routing
/// follows the pulse's basis/bit against Bob's random basis choice.
BobRecord bob_measure_two_spd(const TwoDetectorConfig& cfg, const Pulse& pulse,
                              RandomStream& rng, const BobOptions& opts = {});

/// Bob with a time-multiplexed SPD. Wrap-around clicks belonging to a
/// neighboring slot are dropped in this single-pulse view; the engine uses
/// time_mux_signal_hit directly to attribute them.
BobRecord bob_measure_time_mux(const TimeMuxConfig& cfg, const Pulse& pulse,
                               RandomStream& rng, const BobOptions& opts = {});

/// Keep matched-basis detections; bob_bit decoded through the secret
/// assignment when present. Basis comparison uses Alice's original basis.
std::vector<SiftedPair> sift(const std::vector<AliceRecord>& alice,
                             const std::vector<BobRecord>& bob,
                             const std::map<std::uint64_t, Bit>& eve_guesses);

/// Fraction of sifted pairs where Alice and Bob disagree.
/// Throws EstimationError on an empty list (undefined, not zero).
double compute_qber(const std::vector<SiftedPair>& pairs);

using ReceiverConfig = std::variant<TwoDetectorConfig, TimeMuxConfig>;

struct MonitorOptions {
    double rate_tolerance = 0.1;
    TimeNs window_guard_band = 0.1;
};

/// Detection-rate and out-of-window checks against an attack-free baseline.
MonitorReport run_monitors(const std::vector<BobRecord>& bob,
                           const ReceiverConfig& cfg, double baseline_rate,
                           const MonitorOptions& opts = {});

} // namespace qkdsim
