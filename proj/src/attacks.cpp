#include "qkdsim/attacks.hpp"

#include <array>
#include <cmath>
#include <string>

namespace qkdsim {

void validate_attack(const AttackStrategy& attack) {
    if (const auto* ts = std::get_if<TimeShift>(&attack)) {
        if (!(ts->shift_to_t0_prob >= 0.0 && ts->shift_to_t0_prob <= 1.0)) {
            throw ValidationError("TimeShift: shift_to_t0_prob outside [0,1]");
        }
    } else if (const auto* sf = std::get_if<ShiftAndFlip>(&attack)) {
        if (!std::isfinite(sf->delta)) {
            throw ValidationError("ShiftAndFlip: delta not finite");
        }
    } else if (const auto* pr = std::get_if<Probe>(&attack)) {
        if (!(pr->block_fraction > 0.0 && pr->block_fraction <= 1.0)) {
            throw ValidationError("Probe: block_fraction outside (0,1]");
        }
        if (pr->delay_grid.empty()) {
            throw ValidationError("Probe: delay_grid must be nonempty");
        }
        for (std::size_t i = 1; i < pr->delay_grid.size(); ++i) {
            if (!(pr->delay_grid[i - 1] < pr->delay_grid[i])) {
                throw ValidationError("Probe: delay_grid must be strictly increasing");
            }
        }
    }
}

Bit apply_time_shift(const TimeShift& strategy, Pulse& pulse, TimeNs t0,
                     TimeNs t1, RandomStream& rng) {
    if (rng.bernoulli(strategy.shift_to_t0_prob)) {
        pulse.arrival_offset = t0;
        return Bit::Zero;
    }
    pulse.arrival_offset = t1;
    return Bit::One;
}

FakedStateResult apply_faked_state(Pulse& pulse, TimeNs t0, TimeNs t1,
                                   RandomStream& rng) {
    const Basis measure_basis = rng.random_basis();
    const Bit result =
        measure_basis == pulse.basis ? pulse.bit : rng.random_bit();
    pulse.basis = other(measure_basis);
    pulse.bit = flip(result);
    pulse.arrival_offset = result == Bit::Zero ? t0 : t1;
    return FakedStateResult{measure_basis, result};
}

Bit apply_shift_and_flip(const ShiftAndFlip& strategy, Pulse& pulse,
                         RandomStream& rng) {
    pulse.bit = flip(pulse.bit);
    if (rng.bernoulli(0.5)) {
        pulse.arrival_offset += strategy.delta;
        return Bit::One;
    }
    pulse.arrival_offset -= strategy.delta;
    return Bit::Zero;
}

ProbeEstimate run_probe(const Probe& strategy, const ReceiverOracle& oracle,
                        RandomStream& rng) {
    validate_attack(AttackStrategy{strategy});
    if (strategy.pulses_per_point == 0) {
        throw ValidationError("run_probe: pulses_per_point must be positive");
    }

    const std::size_t points = strategy.delay_grid.size();
    std::vector<std::array<std::uint64_t, 2>> matched(points, {0, 0});
    std::vector<std::array<std::uint64_t, 2>> clicks(points, {0, 0});
    std::vector<ProbeStat> stats;

    for (std::size_t pi = 0; pi < points; ++pi) {
        const TimeNs delay = strategy.delay_grid[pi];
        for (std::uint64_t i = 0; i < strategy.pulses_per_point; ++i) {
            Pulse faked;
            faked.basis = rng.random_basis();
            faked.bit = rng.random_bit();
            faked.arrival_offset = delay;
            const ProbeResponse resp = oracle(faked);
            const bool match = resp.bob_basis == faked.basis;
            stats.push_back({delay, match, faked.bit, resp.detected});
            if (!match) continue; // Eve only trusts matched-basis statistics
            const int b = bit_index(faked.bit);
            ++matched[pi][b];
            if (resp.detected) ++clicks[pi][b];
        }
    }

    std::vector<EfficiencyCurve::Sample> s0, s1;
    for (std::size_t pi = 0; pi < points; ++pi) {
        for (int b = 0; b < 2; ++b) {
            if (matched[pi][b] == 0) {
                throw EstimationError(
                    "run_probe: no basis-matched samples for bit " +
                    std::to_string(b) + " at delay " +
                    std::to_string(strategy.delay_grid[pi]));
            }
        }
        const double eta0 = static_cast<double>(clicks[pi][0]) /
                            static_cast<double>(matched[pi][0]);
        const double eta1 = static_cast<double>(clicks[pi][1]) /
                            static_cast<double>(matched[pi][1]);
        s0.push_back({strategy.delay_grid[pi], eta0});
        s1.push_back({strategy.delay_grid[pi], eta1});
    }

    ProbeEstimate est;
    est.eta0_hat = EfficiencyCurve(std::move(s0));
    est.eta1_hat = EfficiencyCurve(std::move(s1));
    est.stats = std::move(stats);

    const TimeNs t0_hat = est.eta0_hat.peak_time();
    const TimeNs t1_hat = est.eta1_hat.peak_time();
    const double d0 = est.eta0_hat.evaluate(t0_hat);
    const double d1 = est.eta1_hat.evaluate(t1_hat);
    if (d0 <= 0.0 || d1 <= 0.0) {
        throw EstimationError("run_probe: estimated peak efficiency is zero");
    }
    // Average the two defining ratios; they coincide for a symmetric receiver.
    const double ra = est.eta1_hat.evaluate(t0_hat) / d0;
    const double rb = est.eta0_hat.evaluate(t1_hat) / d1;
    est.r_hat = MismatchRatio{0.5 * (ra + rb)};
    return est;
}

} // namespace qkdsim
