#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <variant>
#include <vector>

#include "qkdsim/core.hpp"
#include "qkdsim/random.hpp"

namespace qkdsim {

struct NoAttack {};

/// Shift the pulse so it arrives at the time favoring one detector; Eve never
/// measures the state.
struct TimeShift {
    double shift_to_t0_prob = 0.5;
};

/// Intercept, measure in a random basis, resend opposite basis / opposite bit
/// timed by the measurement result.
struct FakedState {};

/// Time-multiplexed receivers: flip the bit, then shift by +/- delta.
struct ShiftAndFlip {
    TimeNs delta = 0.0;
};

/// Efficiency probing: block a small fraction of pulses and substitute faked
/// BB84 pulses at tuned delays to map out both detector channels.
struct Probe {
    double block_fraction = 0.01;
    std::vector<TimeNs> delay_grid;
    std::uint64_t pulses_per_point = 0;
};

using AttackStrategy =
    std::variant<NoAttack, TimeShift, FakedState, ShiftAndFlip, Probe>;

void validate_attack(const AttackStrategy& attack);

struct ProbeStat {
    TimeNs delay = 0.0;
    bool announced_basis_match = false;
    Bit faked_bit = Bit::Zero;
    bool detected = false;
};

struct EveLog {
    std::map<std::uint64_t, Bit> guesses;
    std::map<std::uint64_t, std::pair<Basis, Bit>> measured; // faked-state only
    std::vector<ProbeStat> probe_stats;
};

/// Detector efficiency mismatch ratio (nonnegative; values > 1 label the same
/// physical mismatch with bit roles exchanged).
struct MismatchRatio {
    double r = 0.0;
};

/// Shift the pulse to arrive at t0 or t1 (offsets relative to the nominal
/// arrival). Returns Eve's key guess: the bit whose detector is favored at
/// the chosen time.
Bit apply_time_shift(const TimeShift& strategy, Pulse& pulse, TimeNs t0,
                     TimeNs t1, RandomStream& rng);

struct FakedStateResult {
    Basis measured_basis;
    Bit measured_bit; // also Eve's key guess
};

/// Measure in a uniform basis, then resend the opposite basis with the
/// opposite bit, timed to t0/t1 by the result.
FakedStateResult apply_faked_state(Pulse& pulse, TimeNs t0, TimeNs t1,
                                   RandomStream& rng);

/// Flip the bit and shift +/- delta with equal probability. Guess One for
/// +delta (only gate 1 reachable), Zero for -delta.
Bit apply_shift_and_flip(const ShiftAndFlip& strategy, Pulse& pulse,
                         RandomStream& rng);

/// What the public reconciliation phase reveals to Eve per faked pulse.
struct ProbeResponse {
    bool detected = false;
    Basis bob_basis = Basis::Z;
};

using ReceiverOracle = std::function<ProbeResponse(const Pulse&)>;

struct ProbeEstimate {
    EfficiencyCurve eta0_hat;
    EfficiencyCurve eta1_hat;
    MismatchRatio r_hat;
    std::vector<ProbeStat> stats;
};

/// Drive the receiver oracle with faked pulses over the delay grid and
/// estimate both channel efficiencies and the mismatch ratio at the curve
/// peaks. Throws EstimationError if a grid point gets no basis-matched
/// samples for some bit value.
ProbeEstimate run_probe(const Probe& strategy, const ReceiverOracle& oracle,
                        RandomStream& rng);

} // namespace qkdsim
