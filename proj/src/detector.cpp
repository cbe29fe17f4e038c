#include "qkdsim/detector.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace qkdsim {

void TwoDetectorConfig::validate() const {
    if (curve_bit0.empty() || curve_bit1.empty()) {
        throw ValidationError("TwoDetectorConfig: both efficiency curves required");
    }
    if (!(dark_count_prob >= 0.0 && dark_count_prob <= 1.0)) {
        throw ValidationError("TwoDetectorConfig: dark_count_prob outside [0,1]");
    }
    if (!std::isfinite(gate_center_offset)) {
        throw ValidationError("TwoDetectorConfig: gate_center_offset not finite");
    }
}

void TimeMuxConfig::validate() const {
    if (curve.empty()) {
        throw ValidationError("TimeMuxConfig: efficiency curve required");
    }
    if (!(dark_count_prob >= 0.0 && dark_count_prob <= 1.0)) {
        throw ValidationError("TimeMuxConfig: dark_count_prob outside [0,1]");
    }
    if (!(gate1_offset > gate0_offset)) {
        throw ValidationError("TimeMuxConfig: gate1_offset must exceed gate0_offset");
    }
    if (!(pulse_period > 0.0) || !(gate1_offset - gate0_offset < pulse_period)) {
        throw ValidationError("TimeMuxConfig: need 0 < gate separation < pulse_period");
    }
}

ClickRecord resolve_clicks(bool clicked0, bool clicked1, TimeNs offset0,
                           TimeNs offset1, RandomStream& rng) {
    ClickRecord rec;
    rec.clicked_bit0 = clicked0;
    rec.clicked_bit1 = clicked1;
    if (clicked0 && clicked1) {
        rec.resolved_bit = rng.random_bit();
    } else if (clicked0) {
        rec.resolved_bit = Bit::Zero;
    } else if (clicked1) {
        rec.resolved_bit = Bit::One;
    }
    if (rec.resolved_bit) {
        rec.detection_offset = *rec.resolved_bit == Bit::Zero ? offset0 : offset1;
    }
    return rec;
}

ClickRecord detect_two_spd(const TwoDetectorConfig& cfg,
                           std::optional<Bit> routed_bit, TimeNs arrival,
                           RandomStream& rng, TimeNs gate_shift) {
    bool signal0 = false;
    bool signal1 = false;
    if (routed_bit) {
        // Gates shifted by +gate_shift: efficiency seen at `arrival` is the
        // curve evaluated that much earlier.
        const double eta = cfg.curve_of(*routed_bit).evaluate(arrival - gate_shift);
        const bool click = eta > 0.0 && rng.bernoulli(eta);
        (*routed_bit == Bit::Zero ? signal0 : signal1) = click;
    }
    const bool dark0 = cfg.dark_count_prob > 0.0 && rng.bernoulli(cfg.dark_count_prob);
    const bool dark1 = cfg.dark_count_prob > 0.0 && rng.bernoulli(cfg.dark_count_prob);

    const TimeNs dark_offset = cfg.gate_center_offset + gate_shift;
    const TimeNs offset0 = signal0 ? arrival : dark_offset;
    const TimeNs offset1 = signal1 ? arrival : dark_offset;
    return resolve_clicks(signal0 || dark0, signal1 || dark1, offset0, offset1, rng);
}

std::optional<GateHit> time_mux_signal_hit(const TimeMuxConfig& cfg,
                                           Bit encoded_bit,
                                           TimeNs arrival_shift,
                                           RandomStream& rng,
                                           TimeNs gate_shift) {
    const TimeNs arrival = cfg.gate_offset(encoded_bit) + arrival_shift;

    struct Candidate {
        TimeNs gate_time;
        int slot_delta;
        Bit gate;
    };
    std::array<Candidate, 6> candidates{};
    int n = 0;
    for (int delta = -1; delta <= 1; ++delta) {
        for (Bit g : {Bit::Zero, Bit::One}) {
            const TimeNs gt =
                cfg.gate_offset(g) + gate_shift + delta * cfg.pulse_period;
            candidates[n++] = {gt, delta, g};
        }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) {
                  return a.gate_time < b.gate_time;
              });
    // The earlier gate consumes the photon if it fires.
    for (const Candidate& c : candidates) {
        const double eta = cfg.curve.evaluate(arrival - c.gate_time);
        if (eta > 0.0 && rng.bernoulli(eta)) {
            return GateHit{c.slot_delta, c.gate,
                           arrival - c.slot_delta * cfg.pulse_period};
        }
    }
    return std::nullopt;
}

TimeMuxDetection detect_time_mux(const TimeMuxConfig& cfg,
                                 std::optional<Bit> encoded_bit,
                                 TimeNs arrival_shift, RandomStream& rng,
                                 TimeNs gate_shift) {
    std::optional<GateHit> hit;
    if (encoded_bit) {
        hit = time_mux_signal_hit(cfg, *encoded_bit, arrival_shift, rng, gate_shift);
    }

    bool signal0 = false;
    bool signal1 = false;
    TimeNs sig_offset0 = cfg.gate0_offset + gate_shift;
    TimeNs sig_offset1 = cfg.gate1_offset + gate_shift;
    if (hit && hit->slot_delta == 0) {
        if (hit->gate == Bit::Zero) {
            signal0 = true;
            sig_offset0 = hit->offset_in_slot;
        } else {
            signal1 = true;
            sig_offset1 = hit->offset_in_slot;
        }
    }
    const bool dark0 = cfg.dark_count_prob > 0.0 && rng.bernoulli(cfg.dark_count_prob);
    const bool dark1 = cfg.dark_count_prob > 0.0 && rng.bernoulli(cfg.dark_count_prob);

    TimeMuxDetection out;
    out.current = resolve_clicks(signal0 || dark0, signal1 || dark1, sig_offset0,
                                 sig_offset1, rng);
    if (hit && hit->slot_delta != 0) {
        ClickRecord carried;
        carried.clicked_bit0 = hit->gate == Bit::Zero;
        carried.clicked_bit1 = hit->gate == Bit::One;
        carried.resolved_bit = hit->gate;
        carried.detection_offset = hit->offset_in_slot;
        out.carried = carried;
        out.carried_slot_delta = hit->slot_delta;
    }
    return out;
}

} // namespace qkdsim
