#pragma once

#include <cstdint>
#include <vector>

#include "qkdsim/errors.hpp"

namespace qkdsim {

/// BB84 measurement basis.
enum class Basis : std::uint8_t { Z, X };

/// One key bit.
enum class Bit : std::uint8_t { Zero, One };

inline Bit flip(Bit b) { return b == Bit::Zero ? Bit::One : Bit::Zero; }
inline Basis other(Basis b) { return b == Basis::Z ? Basis::X : Basis::Z; }
inline int bit_index(Bit b) { return b == Bit::Zero ? 0 : 1; }
inline Bit bit_from_index(int i) { return i == 0 ? Bit::Zero : Bit::One; }

/// Real-valued time in nanoseconds.
using TimeNs = double;

/// One BB84 signal slot. arrival_offset is relative to the slot's
/// synchronization reference (0 = nominal arrival); Eve may shift it in
/// either direction. A blocked pulse carries no photon, but keeps its
/// index so Alice/Eve/Bob logs stay aligned.
struct Pulse {
    Basis basis = Basis::Z;
    Bit bit = Bit::Zero;
    TimeNs arrival_offset = 0.0;
    std::uint64_t pulse_index = 0;
    bool blocked = false;
};

/// Time-resolved detection efficiency of one gated detector channel.
/// Piecewise linear between samples, zero strictly outside the sampled span.
class EfficiencyCurve {
public:
    struct Sample {
        TimeNs time;
        double efficiency;
    };

    EfficiencyCurve() = default;
    explicit EfficiencyCurve(std::vector<Sample> samples);

    double evaluate(TimeNs t) const;

    TimeNs span_begin() const { return samples_.front().time; }
    TimeNs span_end() const { return samples_.back().time; }

    /// Time of the highest sample (first one on ties).
    TimeNs peak_time() const;
    double peak_value() const;

    const std::vector<Sample>& samples() const { return samples_; }
    bool empty() const { return samples_.empty(); }

private:
    std::vector<Sample> samples_;
};

/// Free-function form of EfficiencyCurve::evaluate.
inline double evaluate_efficiency(const EfficiencyCurve& curve, TimeNs t) {
    return curve.evaluate(t);
}

} // namespace qkdsim
