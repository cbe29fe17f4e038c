#include "qkdsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <tuple>

namespace qkdsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::uint64_t kCalibrationSalt = 0xCA11B;

// Per-shard stream roles.
enum StreamRole : std::uint64_t {
    kAliceStream = 0,
    kChannelStream = 1,
    kEveStream = 2,
    kBobStream = 3,
    kDarkStream = 4,
};

} // namespace

TwoDetectorConfig build_symmetric_receiver(MismatchRatio r, double peak,
                                           TimeNs t0, TimeNs t1,
                                           TimeNs gate_halfwidth) {
    if (!(r.r >= 0.0)) throw ValidationError("build_symmetric_receiver: r < 0");
    if (!(peak > 0.0 && peak <= 1.0)) {
        throw ValidationError("build_symmetric_receiver: peak outside (0,1]");
    }
    if (!(r.r * peak <= 1.0)) {
        throw ValidationError("build_symmetric_receiver: r*peak exceeds 1");
    }
    if (!(t1 > t0)) {
        throw ValidationError("build_symmetric_receiver: need t1 > t0");
    }
    if (!(gate_halfwidth > 0.0)) {
        throw ValidationError("build_symmetric_receiver: gate_halfwidth must be positive");
    }
    if (r.r > 1.0) {
        throw ValidationError(
            "build_symmetric_receiver: r > 1 labels the same mismatch with bit "
            "roles exchanged; build with 1/r instead");
    }
    if (r.r == 0.0 && gate_halfwidth > t1 - t0) {
        throw ValidationError(
            "build_symmetric_receiver: r = 0 requires disjoint gate supports "
            "(gate_halfwidth <= t1 - t0)");
    }

    const TimeNs mid = 0.5 * (t0 + t1);
    const double low = r.r * peak;
    // Both channels stay near full efficiency at the nominal arrival
    // (midpoint) and diverge in the tails, so a shift toward either tail
    // lowers the total rate for r < 1. The midpoint sits slightly below the
    // peaks so each channel's favored time stays unique.
    const double mid_eff = 0.9 * peak;
    TwoDetectorConfig cfg;
    cfg.curve_bit0 = EfficiencyCurve({{t0 - gate_halfwidth, 0.0},
                                      {t0, peak},
                                      {mid, mid_eff},
                                      {t1, low},
                                      {t1 + gate_halfwidth, 0.0}});
    cfg.curve_bit1 = EfficiencyCurve({{t0 - gate_halfwidth, 0.0},
                                      {t0, low},
                                      {mid, mid_eff},
                                      {t1, peak},
                                      {t1 + gate_halfwidth, 0.0}});
    cfg.gate_center_offset = mid;
    cfg.dark_count_prob = 0.0;
    return cfg;
}

TwoDetectorConfig build_receiver(const SymmetricReceiverSpec& spec) {
    TwoDetectorConfig cfg =
        build_symmetric_receiver(MismatchRatio{spec.r}, spec.peak, spec.t0,
                                 spec.t1, spec.gate_halfwidth);
    cfg.dark_count_prob = spec.dark_count_prob;
    return cfg;
}

void Scenario::validate() const {
    std::visit([](const auto& cfg) { cfg.validate(); }, receiver);
    validate_attack(attack);
    if (n_pulses < 1) throw ValidationError("Scenario: n_pulses must be >= 1");
    if (!(channel_transmittance > 0.0 && channel_transmittance <= 1.0)) {
        throw ValidationError("Scenario: channel_transmittance outside (0,1]");
    }
    if (!(eve_loss_mask > 0.0 && eve_loss_mask <= 1.0)) {
        throw ValidationError("Scenario: eve_loss_mask outside (0,1]");
    }
    if (!(countermeasures.gate_jitter_halfwidth >= 0.0)) {
        throw ValidationError("Scenario: gate_jitter_halfwidth must be >= 0");
    }
    if (!(countermeasures.rate_tolerance >= 0.0 &&
          countermeasures.rate_tolerance < 1.0)) {
        throw ValidationError("Scenario: rate_tolerance outside [0,1)");
    }

    const bool two_spd = std::holds_alternative<TwoDetectorConfig>(receiver);
    const bool needs_two =
        std::holds_alternative<TimeShift>(attack) ||
        std::holds_alternative<FakedState>(attack) ||
        std::holds_alternative<Probe>(attack);
    if (needs_two && !two_spd) {
        throw ValidationError(
            "Scenario: this attack targets a two-detector receiver");
    }
    if (std::holds_alternative<ShiftAndFlip>(attack) && two_spd) {
        throw ValidationError(
            "Scenario: shift-and-flip targets a time-multiplexed receiver");
    }
}

EfficiencyQuadruple receiver_quadruple(const ReceiverConfig& cfg) {
    EfficiencyQuadruple q;
    if (const auto* two = std::get_if<TwoDetectorConfig>(&cfg)) {
        const TimeNs t0 = two->curve_bit0.peak_time();
        const TimeNs t1 = two->curve_bit1.peak_time();
        q.eta0_t0 = two->curve_bit0.evaluate(t0);
        q.eta0_t1 = two->curve_bit0.evaluate(t1);
        q.eta1_t0 = two->curve_bit1.evaluate(t0);
        q.eta1_t1 = two->curve_bit1.evaluate(t1);
    } else {
        const auto& mux = std::get<TimeMuxConfig>(cfg);
        const TimeNs sep = mux.gate_separation();
        q.eta0_t0 = mux.curve.evaluate(0.0);
        q.eta0_t1 = mux.curve.evaluate(sep);
        q.eta1_t0 = mux.curve.evaluate(-sep);
        q.eta1_t1 = mux.curve.evaluate(0.0);
    }
    return q;
}

namespace {

// Eve's shift targets relative to the nominal arrival: where each SPD peaks.
std::pair<TimeNs, TimeNs> shift_targets(const TwoDetectorConfig& cfg) {
    return {cfg.curve_bit0.peak_time() - cfg.gate_center_offset,
            cfg.curve_bit1.peak_time() - cfg.gate_center_offset};
}

struct ShardData {
    std::vector<AliceRecord> alice;
    std::vector<BobRecord> bob;
    EveLog eve;
};

struct FakedPulseInfo {
    std::size_t position; // index into the shard's record vectors
    TimeNs delay;
    Basis basis;
    Bit bit;
};

void apply_attack(const Scenario& s,
                  std::vector<std::pair<AliceRecord, Pulse>>& pulses,
                  EveLog& eve, std::vector<FakedPulseInfo>& faked,
                  RandomStream& eve_rng) {
    std::visit(
        overloaded{
            [&](const NoAttack&) {},
            [&](const TimeShift& ts) {
                const auto [t0, t1] =
                    shift_targets(std::get<TwoDetectorConfig>(s.receiver));
                for (auto& [rec, pulse] : pulses) {
                    eve.guesses[pulse.pulse_index] =
                        apply_time_shift(ts, pulse, t0, t1, eve_rng);
                }
            },
            [&](const FakedState&) {
                const auto [t0, t1] =
                    shift_targets(std::get<TwoDetectorConfig>(s.receiver));
                for (auto& [rec, pulse] : pulses) {
                    if (pulse.blocked) continue; // Eve saw nothing
                    const FakedStateResult res =
                        apply_faked_state(pulse, t0, t1, eve_rng);
                    eve.guesses[pulse.pulse_index] = res.measured_bit;
                    eve.measured[pulse.pulse_index] = {res.measured_basis,
                                                       res.measured_bit};
                }
            },
            [&](const ShiftAndFlip& sf) {
                for (auto& [rec, pulse] : pulses) {
                    eve.guesses[pulse.pulse_index] =
                        apply_shift_and_flip(sf, pulse, eve_rng);
                }
            },
            [&](const Probe& pr) {
                std::size_t cycle = 0;
                for (std::size_t i = 0; i < pulses.size(); ++i) {
                    auto& pulse = pulses[i].second;
                    if (!eve_rng.bernoulli(pr.block_fraction)) continue;
                    // Replace Alice's photon with a faked pulse at a tuned
                    // delay; the slot index is preserved.
                    pulse.basis = eve_rng.random_basis();
                    pulse.bit = eve_rng.random_bit();
                    pulse.arrival_offset =
                        pr.delay_grid[cycle++ % pr.delay_grid.size()];
                    pulse.blocked = false;
                    faked.push_back(
                        {i, pulse.arrival_offset, pulse.basis, pulse.bit});
                }
            },
        },
        s.attack);
}

void measure_time_mux(const TimeMuxConfig& cfg, const Scenario& s,
                      const std::vector<std::pair<AliceRecord, Pulse>>& pulses,
                      ShardData& out, RandomStream& bob_rng,
                      RandomStream& dark_rng) {
    const BobOptions opts{s.countermeasures.four_value,
                          s.countermeasures.gate_jitter_halfwidth};
    const std::size_t n = pulses.size();

    struct SlotState {
        Basis basis = Basis::Z;
        std::optional<bool> swapped;
        TimeNs jitter = 0.0;
        bool gate0 = false;
        bool gate1 = false;
        TimeNs off0 = 0.0;
        TimeNs off1 = 0.0;
    };
    std::vector<SlotState> slots(n);

    // Pass 1: route every photon and attribute gate hits to slots, including
    // wrap-around hits landing in a neighbor slot.
    for (std::size_t i = 0; i < n; ++i) {
        const Pulse& pulse = pulses[i].second;
        const BobDraw draw = draw_bob_routing(pulse, bob_rng, opts);
        slots[i].basis = draw.basis;
        slots[i].swapped = draw.swapped;
        slots[i].jitter = draw.jitter;
        if (!draw.routed) continue;
        const auto hit = time_mux_signal_hit(cfg, *draw.routed,
                                             pulse.arrival_offset, bob_rng,
                                             draw.jitter);
        if (!hit) continue;
        const std::int64_t j =
            static_cast<std::int64_t>(i) + hit->slot_delta;
        if (j < 0 || j >= static_cast<std::int64_t>(n)) continue;
        SlotState& target = slots[static_cast<std::size_t>(j)];
        if (hit->gate == Bit::Zero) {
            if (!target.gate0) {
                target.gate0 = true;
                target.off0 = hit->offset_in_slot;
            }
        } else if (!target.gate1) {
            target.gate1 = true;
            target.off1 = hit->offset_in_slot;
        }
    }

    // Pass 2: dark counts per gate and click resolution per slot.
    for (std::size_t i = 0; i < n; ++i) {
        SlotState& st = slots[i];
        const bool dark0 =
            cfg.dark_count_prob > 0.0 && dark_rng.bernoulli(cfg.dark_count_prob);
        const bool dark1 =
            cfg.dark_count_prob > 0.0 && dark_rng.bernoulli(cfg.dark_count_prob);
        const TimeNs off0 =
            st.gate0 ? st.off0 : cfg.gate0_offset + st.jitter;
        const TimeNs off1 =
            st.gate1 ? st.off1 : cfg.gate1_offset + st.jitter;
        BobRecord rec;
        rec.pulse_index = pulses[i].first.pulse_index;
        rec.basis = st.basis;
        rec.assignment_swapped = st.swapped;
        rec.click = resolve_clicks(st.gate0 || dark0, st.gate1 || dark1, off0,
                                   off1, dark_rng);
        rec.click.pulse_index = rec.pulse_index;
        out.bob.push_back(rec);
    }
}

ShardData run_shard(const Scenario& s, std::uint64_t shard_seed,
                    std::uint64_t index_offset, std::uint64_t n) {
    RandomStream alice_rng(shard_seed, kAliceStream);
    RandomStream channel_rng(shard_seed, kChannelStream);
    RandomStream eve_rng(shard_seed, kEveStream);
    RandomStream bob_rng(shard_seed, kBobStream);
    RandomStream dark_rng(shard_seed, kDarkStream);

    auto pulses = alice_emit(n, alice_rng);
    for (auto& [rec, pulse] : pulses) {
        rec.pulse_index += index_offset;
        pulse.pulse_index += index_offset;
    }

    if (s.channel_transmittance < 1.0) {
        for (auto& [rec, pulse] : pulses) {
            if (!channel_rng.bernoulli(s.channel_transmittance)) {
                pulse.blocked = true;
            }
        }
    }

    ShardData data;
    std::vector<FakedPulseInfo> faked;
    apply_attack(s, pulses, data.eve, faked, eve_rng);

    data.alice.reserve(n);
    for (const auto& [rec, pulse] : pulses) data.alice.push_back(rec);

    if (const auto* two = std::get_if<TwoDetectorConfig>(&s.receiver)) {
        const BobOptions opts{s.countermeasures.four_value,
                              s.countermeasures.gate_jitter_halfwidth};
        data.bob.reserve(n);
        for (const auto& [rec, pulse] : pulses) {
            data.bob.push_back(bob_measure_two_spd(*two, pulse, bob_rng, opts));
        }
    } else {
        measure_time_mux(std::get<TimeMuxConfig>(s.receiver), s, pulses, data,
                         bob_rng, dark_rng);
    }

    for (const FakedPulseInfo& f : faked) {
        const BobRecord& b = data.bob[f.position];
        data.eve.probe_stats.push_back(
            {f.delay, b.basis == f.basis, f.bit, b.click.clicked()});
    }
    return data;
}

} // namespace

SimResult run_scenario_sharded(const Scenario& s, unsigned shards) {
    s.validate();
    if (shards == 0) throw ValidationError("run_scenario: shards must be >= 1");

    std::vector<AliceRecord> alice;
    std::vector<BobRecord> bob;
    EveLog eve;

    const std::uint64_t per = s.n_pulses / shards;
    std::uint64_t offset = 0;
    for (unsigned i = 0; i < shards; ++i) {
        const std::uint64_t count =
            i + 1 == shards ? s.n_pulses - offset : per;
        if (count == 0) continue;
        const std::uint64_t shard_seed =
            shards == 1 ? s.seed : RandomStream::derive_seed(s.seed, i);
        ShardData d = run_shard(s, shard_seed, offset, count);
        alice.insert(alice.end(), d.alice.begin(), d.alice.end());
        bob.insert(bob.end(), d.bob.begin(), d.bob.end());
        eve.guesses.merge(d.eve.guesses);
        eve.measured.merge(d.eve.measured);
        eve.probe_stats.insert(eve.probe_stats.end(), d.eve.probe_stats.begin(),
                               d.eve.probe_stats.end());
        offset += count;
    }

    SimResult res;
    res.emitted = s.n_pulses;
    for (const BobRecord& rec : bob) {
        if (rec.click.clicked()) ++res.detected;
    }

    const auto pairs = sift(alice, bob, eve.guesses);
    res.sifted = pairs.size();
    res.sifted_rate =
        static_cast<double>(res.sifted) / static_cast<double>(res.emitted);
    if (!pairs.empty()) {
        const double q = compute_qber(pairs);
        res.qber = q;
        res.stderr_qber =
            std::sqrt(q * (1.0 - q) / static_cast<double>(pairs.size()));
        const bool all_guessed =
            std::all_of(pairs.begin(), pairs.end(),
                        [](const SiftedPair& p) { return p.eve_guess.has_value(); });
        if (all_guessed) {
            res.empirical_eve_info = empirical_eve_information(pairs);
        }
    }

    if (std::holds_alternative<TimeShift>(s.attack) ||
        std::holds_alternative<ShiftAndFlip>(s.attack)) {
        try {
            const MismatchRatio r =
                mismatch_ratio(receiver_quadruple(s.receiver));
            res.assessment = assess(r, kDefaultNaiveRate);
        } catch (const std::exception&) {
            // No well-defined r for this receiver; leave the assessment out.
        }
    }

    if (s.countermeasures.monitors) {
        Scenario calib = s;
        calib.attack = NoAttack{};
        calib.countermeasures.monitors = false;
        calib.seed = RandomStream::derive_seed(s.seed, kCalibrationSalt);
        const SimResult calib_res = run_scenario(calib);
        const double baseline = s.eve_loss_mask *
                                static_cast<double>(calib_res.detected) /
                                static_cast<double>(calib_res.emitted);
        res.monitor = run_monitors(
            bob, s.receiver, baseline,
            MonitorOptions{s.countermeasures.rate_tolerance,
                           s.countermeasures.window_guard_band +
                               s.countermeasures.gate_jitter_halfwidth});
    }
    return res;
}

SimResult run_scenario(const Scenario& s) { return run_scenario_sharded(s, 1); }

ReceiverOracle make_two_spd_oracle(const TwoDetectorConfig& cfg,
                                   std::uint64_t seed) {
    auto rng = std::make_shared<RandomStream>(seed, kBobStream);
    return [cfg, rng](const Pulse& pulse) {
        BobRecord rec = bob_measure_two_spd(cfg, pulse, *rng);
        return ProbeResponse{rec.click.clicked(), rec.basis};
    };
}

double analytic_qber_for(const Scenario& s) {
    if (std::holds_alternative<FakedState>(s.attack)) {
        try {
            return faked_state_qber(receiver_quadruple(s.receiver));
        } catch (const std::exception&) {
            return std::nan("");
        }
    }
    if (std::holds_alternative<NoAttack>(s.attack) ||
        std::holds_alternative<TimeShift>(s.attack)) {
        return 0.0;
    }
    if (const auto* sf = std::get_if<ShiftAndFlip>(&s.attack)) {
        const auto& mux = std::get<TimeMuxConfig>(s.receiver);
        if (std::abs(sf->delta - 0.5 * mux.pulse_period) < 1e-12) {
            return 0.25; // half-period wraparound
        }
        if (std::abs(sf->delta - mux.gate_separation()) < 1e-12) {
            return 0.0; // clean gate-to-gate shift
        }
        return std::nan("");
    }
    return std::nan("");
}

Scenario apply_sweep_value(const Scenario& base, const std::string& parameter,
                           double v, std::uint64_t value_index) {
    Scenario s = base;
    {
        if (parameter == "r") {
            if (!s.symmetric_recipe) {
                throw ValidationError(
                    "sweep: parameter 'r' needs a symmetric receiver recipe");
            }
            s.symmetric_recipe->r = v;
            s.receiver = build_receiver(*s.symmetric_recipe);
        } else if (parameter == "delta") {
            auto* sf = std::get_if<ShiftAndFlip>(&s.attack);
            if (!sf) {
                throw ValidationError(
                    "sweep: parameter 'delta' needs a shift_and_flip attack");
            }
            sf->delta = v;
        } else if (parameter == "dark_count_prob") {
            std::visit([&](auto& cfg) { cfg.dark_count_prob = v; }, s.receiver);
            if (s.symmetric_recipe) s.symmetric_recipe->dark_count_prob = v;
        } else if (parameter == "n_pulses") {
            if (!(v >= 1.0)) throw ValidationError("sweep: n_pulses must be >= 1");
            s.n_pulses = static_cast<std::uint64_t>(v);
        } else if (parameter == "block_fraction") {
            auto* pr = std::get_if<Probe>(&s.attack);
            if (!pr) {
                throw ValidationError(
                    "sweep: parameter 'block_fraction' needs a probe attack");
            }
            pr->block_fraction = v;
        } else {
            throw ValidationError("sweep: unknown parameter '" + parameter + "'");
        }
    }
    s.seed = RandomStream::derive_seed(base.seed, value_index);
    return s;
}

std::vector<std::pair<double, SimResult>> sweep(
    const Scenario& base, const std::string& parameter,
    const std::vector<double>& values) {
    std::vector<std::pair<double, SimResult>> out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const Scenario s = apply_sweep_value(base, parameter, values[i], i);
        out.emplace_back(values[i], run_scenario(s));
    }
    return out;
}

} // namespace qkdsim
