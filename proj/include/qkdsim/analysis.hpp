#pragma once

#include <vector>

#include "qkdsim/attacks.hpp"
#include "qkdsim/protocol.hpp"

namespace qkdsim {

/// Binary Shannon entropy in bits, with h(0) = h(1) = 0 by continuity.
/// Throws std::domain_error outside [0,1].
double binary_entropy(double x);

/// Rate Alice and Bob believe they can key at when they see no errors.
inline constexpr double kDefaultNaiveRate = 1.0;

/// Finite-key variant of the naive rate, 1 - h(epsilon).
double finite_key_naive_rate(double epsilon);

/// The four efficiencies entering the faked-state QBER formula.
struct EfficiencyQuadruple {
    double eta0_t0 = 0.0;
    double eta0_t1 = 0.0;
    double eta1_t0 = 0.0;
    double eta1_t1 = 0.0;
};

class AsymmetricQuadrupleError : public ValidationError {
public:
    AsymmetricQuadrupleError(double ratio_at_t0, double ratio_at_t1);
    double ratio_at_t0;
    double ratio_at_t1;
};

/// r = eta1(t0)/eta0(t0), checked against the mirrored ratio within
/// symmetry_tol (relative).
MismatchRatio mismatch_ratio(const EfficiencyQuadruple& q,
                             double symmetry_tol = 1e-6);

/// QBER of the faked-state intercept-resend attack,
/// (2 eta0(t1) + 2 eta1(t0)) / (eta0(t0) + 3 eta0(t1) + 3 eta1(t0) + eta1(t1)).
double faked_state_qber(const EfficiencyQuadruple& q);

/// Closed form of the above on a symmetric quadruple: 2r / (1 + 3r).
double faked_state_qber_symmetric(double r);

/// Eve's information about the key under the time-shift attack,
/// I(B:E) = 1 - h(r/(r+1)).
double eve_information(MismatchRatio r);

/// Key-rate upper bound I(A:B|E) = h(r/(r+1)).
double key_rate_upper_bound(MismatchRatio r);

struct SecurityAssessment {
    double qber = 0.0;
    double eve_info = 0.0;
    double key_rate_upper_bound = 0.0;
    double naive_key_rate = 0.0;
    bool insecure = false;
};

/// insecure iff the unaware parties' rate exceeds the bound.
SecurityAssessment assess(MismatchRatio r,
                          double naive_rate = kDefaultNaiveRate);

/// 1 - h(observed guess-error fraction) over sifted pairs; every pair must
/// carry an Eve guess.
double empirical_eve_information(const std::vector<SiftedPair>& pairs);

struct OracleResult {
    double qber = 0.0;           // over sifted detections
    double detection_prob = 0.0; // clicks per emitted pulse
};

/// Exact QBER and detection probability by enumerating the full outcome tree
/// (no sampling). Supports FakedState, TimeShift and non-wrapping
/// ShiftAndFlip; independent of the Monte Carlo path.
OracleResult enumerate_attack_outcomes(const EfficiencyQuadruple& q,
                                       const AttackStrategy& attack);

double brute_force_qber_oracle(const EfficiencyQuadruple& q,
                               const AttackStrategy& attack);

} // namespace qkdsim
