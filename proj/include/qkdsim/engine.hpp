#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qkdsim/analysis.hpp"
#include "qkdsim/attacks.hpp"
#include "qkdsim/protocol.hpp"

namespace qkdsim {

/// Recipe for a symmetric-mismatch two-detector receiver. Kept alongside the
/// built receiver so sweeps can rebuild it for other r values.
struct SymmetricReceiverSpec {
    double r = 1.0;
    double peak = 0.1;
    TimeNs t0 = -1.0;
    TimeNs t1 = 1.0;
    TimeNs gate_halfwidth = 0.5;
    double dark_count_prob = 0.0;
};

/// Two gated SPDs realizing mismatch ratio r exactly: each channel is at full
/// efficiency `peak` from its favored time through the gate midpoint and
/// falls linearly to r*peak at the other channel's time (mirrored for SPD1).
/// The nominal arrival is the midpoint, where both channels sit at `peak`.
TwoDetectorConfig build_symmetric_receiver(MismatchRatio r, double peak,
                                           TimeNs t0, TimeNs t1,
                                           TimeNs gate_halfwidth);

TwoDetectorConfig build_receiver(const SymmetricReceiverSpec& spec);

struct Countermeasures {
    bool four_value = false;
    bool monitors = false;
    TimeNs gate_jitter_halfwidth = 0.0;
    double rate_tolerance = 0.1;
    TimeNs window_guard_band = 0.1;
};

struct Scenario {
    ReceiverConfig receiver;
    std::optional<SymmetricReceiverSpec> symmetric_recipe;
    AttackStrategy attack;
    Countermeasures countermeasures;
    std::uint64_t n_pulses = 1;
    std::uint64_t seed = 0;
    double channel_transmittance = 1.0;
    double eve_loss_mask = 1.0;

    void validate() const;
};

struct SimResult {
    std::uint64_t emitted = 0;
    std::uint64_t detected = 0;
    std::uint64_t sifted = 0;
    std::optional<double> qber;
    double sifted_rate = 0.0;
    double stderr_qber = 0.0; // binomial standard error of the QBER
    std::optional<double> empirical_eve_info;
    std::optional<SecurityAssessment> assessment;
    std::optional<MonitorReport> monitor;
};

/// Full deterministic Monte Carlo run: emit, channel loss, attack, measure,
/// sift, analyze, monitor.
SimResult run_scenario(const Scenario& s);

/// Same scenario split over `shards` independently seeded contiguous ranges.
/// Statistically equivalent to the single-shard run, not bit-identical.
SimResult run_scenario_sharded(const Scenario& s, unsigned shards);

/// The four efficiencies of the receiver at its favored detection times.
EfficiencyQuadruple receiver_quadruple(const ReceiverConfig& cfg);

/// Black-box receiver for run_probe: a two-SPD Bob answering faked pulses
/// with (detected, announced basis).
ReceiverOracle make_two_spd_oracle(const TwoDetectorConfig& cfg,
                                   std::uint64_t seed);

/// Base scenario with one sweepable parameter (r, delta, dark_count_prob,
/// n_pulses, block_fraction) set to `value` and the seed derived from
/// (base.seed, value_index).
Scenario apply_sweep_value(const Scenario& base, const std::string& parameter,
                           double value, std::uint64_t value_index);

/// Re-run the base scenario once per parameter value.
std::vector<std::pair<double, SimResult>> sweep(
    const Scenario& base, const std::string& parameter,
    const std::vector<double>& values);

/// Analytic QBER for the swept scenario, when one exists (NaN otherwise).
double analytic_qber_for(const Scenario& s);

} // namespace qkdsim
