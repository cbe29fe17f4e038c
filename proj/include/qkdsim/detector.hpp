#pragma once

#include <cstdint>
#include <optional>

#include "qkdsim/core.hpp"
#include "qkdsim/random.hpp"

namespace qkdsim {

/// Standard BB84 receiver: two gated SPDs, one per bit value. Curves live on
/// the absolute in-slot time axis; gate_center_offset is the nominal signal
/// arrival ("center of the open window").
struct TwoDetectorConfig {
    EfficiencyCurve curve_bit0; // SPD0
    EfficiencyCurve curve_bit1; // SPD1
    TimeNs gate_center_offset = 0.0;
    double dark_count_prob = 0.0; // per gate per detector

    void validate() const;
    const EfficiencyCurve& curve_of(Bit b) const {
        return b == Bit::Zero ? curve_bit0 : curve_bit1;
    }
};

/// Time-multiplexed receiver: one SPD gated twice per slot. `curve` is the
/// gate response relative to the gate center (time 0 = center), applied at
/// both openings.
struct TimeMuxConfig {
    EfficiencyCurve curve;
    TimeNs gate0_offset = 0.0; // expected arrival of bit 0
    TimeNs gate1_offset = 0.0; // expected arrival of bit 1, > gate0_offset
    TimeNs pulse_period = 0.0; // laser pulse period
    double dark_count_prob = 0.0; // per gate

    void validate() const;
    TimeNs gate_offset(Bit b) const {
        return b == Bit::Zero ? gate0_offset : gate1_offset;
    }
    TimeNs gate_separation() const { return gate1_offset - gate0_offset; }
};

/// Outcome of one detection slot. resolved_bit is present iff any channel
/// clicked; a double click resolves to a fair random bit. detection_offset is
/// the click time relative to the slot's sync reference (gate center for pure
/// dark clicks).
struct ClickRecord {
    std::uint64_t pulse_index = 0;
    bool clicked_bit0 = false;
    bool clicked_bit1 = false;
    std::optional<Bit> resolved_bit;
    TimeNs detection_offset = 0.0;

    bool clicked() const { return clicked_bit0 || clicked_bit1; }
};

/// Detect a photon routed to `routed_bit`'s SPD arriving at absolute in-slot
/// time `arrival`. Absent routed_bit means blocked/vacuum (dark counts may
/// still fire). `gate_shift` moves both gates (random-gating countermeasure).
ClickRecord detect_two_spd(const TwoDetectorConfig& cfg,
                           std::optional<Bit> routed_bit, TimeNs arrival,
                           RandomStream& rng, TimeNs gate_shift = 0.0);

/// A signal photon landing in some gate, possibly one belonging to a
/// neighboring slot (Delta t = period/2 wraparound).
struct GateHit {
    int slot_delta = 0;        // -1, 0 or +1
    Bit gate = Bit::Zero;      // which gate opening fired
    TimeNs offset_in_slot = 0; // click time in the attributed slot's frame
};

/// Core time-mux signal test: the photon nominally travels the path of
/// `encoded_bit` and is shifted by `arrival_shift`; gates of the previous,
/// current and next slot are tried in time order and the first that fires
/// consumes the photon. Returns nothing if no gate fires.
std::optional<GateHit> time_mux_signal_hit(const TimeMuxConfig& cfg,
                                           Bit encoded_bit,
                                           TimeNs arrival_shift,
                                           RandomStream& rng,
                                           TimeNs gate_shift = 0.0);

/// Single-pulse time-mux detection. `current` carries this slot's clicks
/// (in-slot signal plus dark counts); if the signal wrapped into a neighbor
/// slot the click is reported in `carried` with the slot delta.
struct TimeMuxDetection {
    ClickRecord current;
    std::optional<ClickRecord> carried;
    int carried_slot_delta = 0;
};

TimeMuxDetection detect_time_mux(const TimeMuxConfig& cfg,
                                 std::optional<Bit> encoded_bit,
                                 TimeNs arrival_shift, RandomStream& rng,
                                 TimeNs gate_shift = 0.0);

/// Combine per-gate click flags into a resolved record. offset0/offset1 are
/// the click times to report for the respective gates.
ClickRecord resolve_clicks(bool clicked0, bool clicked1, TimeNs offset0,
                           TimeNs offset1, RandomStream& rng);

} // namespace qkdsim
