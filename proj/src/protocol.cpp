#include "qkdsim/protocol.hpp"

#include <algorithm>
#include <cmath>

namespace qkdsim {

std::vector<std::pair<AliceRecord, Pulse>> alice_emit(std::uint64_t n,
                                                      RandomStream& rng) {
    std::vector<std::pair<AliceRecord, Pulse>> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        AliceRecord rec;
        rec.pulse_index = i;
        rec.basis = rng.random_basis();
        rec.bit = rng.random_bit();
        Pulse p;
        p.basis = rec.basis;
        p.bit = rec.bit;
        p.arrival_offset = 0.0;
        p.pulse_index = i;
        p.blocked = false;
        out.emplace_back(rec, p);
    }
    return out;
}

BobDraw draw_bob_routing(const Pulse& pulse, RandomStream& rng,
                         const BobOptions& opts) {
    BobDraw c;
    c.basis = rng.random_basis();
    if (opts.four_value) c.swapped = rng.bernoulli(0.5);
    c.jitter = opts.gate_jitter_halfwidth > 0.0
                   ? rng.uniform_in(-opts.gate_jitter_halfwidth,
                                    opts.gate_jitter_halfwidth)
                   : 0.0;
    if (pulse.blocked) return c;
    // Matched basis routes by the pulse's bit (through the secret assignment
    // when active); mismatched basis collapses to a uniform channel.
    Bit channel;
    if (c.basis == pulse.basis) {
        channel = pulse.bit;
        if (c.swapped && *c.swapped) channel = flip(channel);
    } else {
        channel = rng.random_bit();
    }
    c.routed = channel;
    return c;
}

BobRecord bob_measure_two_spd(const TwoDetectorConfig& cfg, const Pulse& pulse,
                              RandomStream& rng, const BobOptions& opts) {
    const BobDraw c = draw_bob_routing(pulse, rng, opts);
    const TimeNs arrival = cfg.gate_center_offset + pulse.arrival_offset;

    BobRecord rec;
    rec.pulse_index = pulse.pulse_index;
    rec.basis = c.basis;
    rec.assignment_swapped = c.swapped;
    rec.click = detect_two_spd(cfg, c.routed, arrival, rng, c.jitter);
    rec.click.pulse_index = pulse.pulse_index;
    return rec;
}

BobRecord bob_measure_time_mux(const TimeMuxConfig& cfg, const Pulse& pulse,
                               RandomStream& rng, const BobOptions& opts) {
    const BobDraw c = draw_bob_routing(pulse, rng, opts);
    const std::optional<Bit> gate = c.routed;

    BobRecord rec;
    rec.pulse_index = pulse.pulse_index;
    rec.basis = c.basis;
    rec.assignment_swapped = c.swapped;
    rec.click = detect_time_mux(cfg, gate, pulse.arrival_offset, rng, c.jitter)
                    .current;
    rec.click.pulse_index = pulse.pulse_index;
    return rec;
}

std::vector<SiftedPair> sift(const std::vector<AliceRecord>& alice,
                             const std::vector<BobRecord>& bob,
                             const std::map<std::uint64_t, Bit>& eve_guesses) {
    if (alice.size() != bob.size()) {
        throw AlignmentError("sift: Alice and Bob record counts differ");
    }
    std::vector<SiftedPair> pairs;
    for (std::size_t i = 0; i < alice.size(); ++i) {
        const AliceRecord& a = alice[i];
        const BobRecord& b = bob[i];
        if (a.pulse_index != b.pulse_index) {
            throw AlignmentError("sift: pulse index mismatch at position " +
                                 std::to_string(i));
        }
        const std::optional<Bit> bob_bit = b.decoded_bit();
        if (!bob_bit || a.basis != b.basis) continue;
        SiftedPair pair;
        pair.pulse_index = a.pulse_index;
        pair.alice_bit = a.bit;
        pair.bob_bit = *bob_bit;
        if (auto it = eve_guesses.find(a.pulse_index); it != eve_guesses.end()) {
            pair.eve_guess = it->second;
        }
        pairs.push_back(pair);
    }
    return pairs;
}

double compute_qber(const std::vector<SiftedPair>& pairs) {
    if (pairs.empty()) {
        throw EstimationError("compute_qber: no sifted pairs (QBER undefined)");
    }
    std::size_t errors = 0;
    for (const SiftedPair& p : pairs) {
        if (p.alice_bit != p.bob_bit) ++errors;
    }
    return static_cast<double>(errors) / static_cast<double>(pairs.size());
}

namespace {

struct Window {
    TimeNs lo, hi;
    bool contains(TimeNs t) const { return t >= lo && t <= hi; }
};

std::vector<Window> gate_windows(const ReceiverConfig& cfg, TimeNs guard) {
    std::vector<Window> w;
    if (const auto* two = std::get_if<TwoDetectorConfig>(&cfg)) {
        w.push_back({two->curve_bit0.span_begin() - guard,
                     two->curve_bit0.span_end() + guard});
        w.push_back({two->curve_bit1.span_begin() - guard,
                     two->curve_bit1.span_end() + guard});
    } else {
        const auto& mux = std::get<TimeMuxConfig>(cfg);
        for (TimeNs g : {mux.gate0_offset, mux.gate1_offset}) {
            w.push_back({g + mux.curve.span_begin() - guard,
                         g + mux.curve.span_end() + guard});
        }
    }
    return w;
}

} // namespace

MonitorReport run_monitors(const std::vector<BobRecord>& bob,
                           const ReceiverConfig& cfg, double baseline_rate,
                           const MonitorOptions& opts) {
    MonitorReport rep;
    rep.baseline_rate = baseline_rate;

    std::size_t clicks = 0;
    const auto windows = gate_windows(cfg, opts.window_guard_band);
    for (const BobRecord& rec : bob) {
        if (!rec.click.clicked()) continue;
        ++clicks;
        const bool inside =
            std::any_of(windows.begin(), windows.end(), [&](const Window& w) {
                return w.contains(rec.click.detection_offset);
            });
        if (!inside) ++rep.out_of_window_count;
    }
    rep.detection_rate = bob.empty()
                             ? 0.0
                             : static_cast<double>(clicks) /
                                   static_cast<double>(bob.size());
    rep.rate_alarm =
        rep.detection_rate < baseline_rate * (1.0 - opts.rate_tolerance);
    rep.window_alarm = rep.out_of_window_count > 0;
    return rep;
}

} // namespace qkdsim
