#include "qkdsim/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace qkdsim {

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("binary_entropy: argument outside [0,1]");
    }
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double finite_key_naive_rate(double epsilon) {
    return 1.0 - binary_entropy(epsilon);
}

AsymmetricQuadrupleError::AsymmetricQuadrupleError(double r0, double r1)
    : ValidationError("mismatch_ratio: asymmetric quadruple, ratio at t0 = " +
                      std::to_string(r0) + ", ratio at t1 = " +
                      std::to_string(r1)),
      ratio_at_t0(r0),
      ratio_at_t1(r1) {}

MismatchRatio mismatch_ratio(const EfficiencyQuadruple& q, double symmetry_tol) {
    if (!(q.eta0_t0 > 0.0) || !(q.eta1_t1 > 0.0)) {
        throw std::domain_error("mismatch_ratio: eta0(t0) and eta1(t1) must be positive");
    }
    const double ra = q.eta1_t0 / q.eta0_t0;
    const double rb = q.eta0_t1 / q.eta1_t1;
    const double scale = std::max({std::abs(ra), std::abs(rb), 1.0});
    if (std::abs(ra - rb) > symmetry_tol * scale) {
        throw AsymmetricQuadrupleError(ra, rb);
    }
    return MismatchRatio{ra};
}

double faked_state_qber(const EfficiencyQuadruple& q) {
    const double denom =
        q.eta0_t0 + 3.0 * q.eta0_t1 + 3.0 * q.eta1_t0 + q.eta1_t1;
    if (!(denom > 0.0)) {
        throw std::domain_error("faked_state_qber: zero denominator");
    }
    return (2.0 * q.eta0_t1 + 2.0 * q.eta1_t0) / denom;
}

double faked_state_qber_symmetric(double r) {
    if (!(r >= 0.0)) throw std::domain_error("faked_state_qber_symmetric: r < 0");
    return 2.0 * r / (1.0 + 3.0 * r);
}

double eve_information(MismatchRatio r) {
    if (!(r.r >= 0.0)) throw std::domain_error("eve_information: r < 0");
    return 1.0 - binary_entropy(r.r / (r.r + 1.0));
}

double key_rate_upper_bound(MismatchRatio r) {
    if (!(r.r >= 0.0)) throw std::domain_error("key_rate_upper_bound: r < 0");
    return binary_entropy(r.r / (r.r + 1.0));
}

SecurityAssessment assess(MismatchRatio r, double naive_rate) {
    SecurityAssessment a;
    a.qber = 0.0; // the time-shift attack introduces no errors
    a.eve_info = eve_information(r);
    a.key_rate_upper_bound = qkdsim::key_rate_upper_bound(r);
    a.naive_key_rate = naive_rate;
    a.insecure = naive_rate > a.key_rate_upper_bound;
    return a;
}

double empirical_eve_information(const std::vector<SiftedPair>& pairs) {
    if (pairs.empty()) {
        throw EstimationError("empirical_eve_information: no sifted pairs");
    }
    std::size_t wrong = 0;
    for (const SiftedPair& p : pairs) {
        if (!p.eve_guess) {
            throw EstimationError(
                "empirical_eve_information: pulse " +
                std::to_string(p.pulse_index) + " has no Eve guess");
        }
        if (*p.eve_guess != p.bob_bit) ++wrong;
    }
    double frac = static_cast<double>(wrong) / static_cast<double>(pairs.size());
    frac = std::min(1.0, std::max(0.0, frac));
    return 1.0 - binary_entropy(frac);
}

namespace {

// eta of detector/gate d at arrival slot t (0 -> t0, 1 -> t1).
double eta_at(const EfficiencyQuadruple& q, int detector, int t) {
    if (detector == 0) return t == 0 ? q.eta0_t0 : q.eta0_t1;
    return t == 0 ? q.eta1_t0 : q.eta1_t1;
}

struct Accumulator {
    double p_click = 0.0;
    double p_sift_click = 0.0;
    double p_sift_error = 0.0;

    void add(double w, bool sifted, int bob_bit, int alice_bit, double eta) {
        p_click += w * eta;
        if (sifted) {
            p_sift_click += w * eta;
            if (bob_bit != alice_bit) p_sift_error += w * eta;
        }
    }

    OracleResult finish() const {
        if (!(p_sift_click > 0.0)) {
            throw EstimationError("oracle: no sifted detections, QBER undefined");
        }
        return OracleResult{p_sift_error / p_sift_click, p_click};
    }
};

// Branch over Bob's basis and routing given the pulse state arriving at
// slot-time `t`; matched basis routes deterministically to `matched_route`.
void bob_branches(Accumulator& acc, double w, int alice_basis, int alice_bit,
                  int pulse_basis, int matched_route, int t,
                  const EfficiencyQuadruple& q) {
    for (int bob_basis = 0; bob_basis < 2; ++bob_basis) {
        const double wb = w * 0.5;
        const bool sifted = bob_basis == alice_basis;
        if (bob_basis == pulse_basis) {
            acc.add(wb, sifted, matched_route, alice_bit,
                    eta_at(q, matched_route, t));
        } else {
            for (int route = 0; route < 2; ++route) {
                acc.add(wb * 0.5, sifted, route, alice_bit, eta_at(q, route, t));
            }
        }
    }
}

OracleResult enumerate_faked_state(const EfficiencyQuadruple& q) {
    Accumulator acc;
    for (int ab = 0; ab < 2; ++ab) {         // Alice basis
        for (int av = 0; av < 2; ++av) {     // Alice bit
            const double wa = 0.25;
            for (int eb = 0; eb < 2; ++eb) { // Eve's measurement basis
                const double we = wa * 0.5;
                if (eb == ab) {
                    // Matched measurement reproduces Alice's bit.
                    bob_branches(acc, we, ab, av, 1 - eb, 1 - av, av, q);
                } else {
                    for (int result = 0; result < 2; ++result) {
                        bob_branches(acc, we * 0.5, ab, av, 1 - eb, 1 - result,
                                     result, q);
                    }
                }
            }
        }
    }
    return acc.finish();
}

OracleResult enumerate_time_shift(const EfficiencyQuadruple& q,
                                  const TimeShift& ts) {
    Accumulator acc;
    for (int ab = 0; ab < 2; ++ab) {
        for (int av = 0; av < 2; ++av) {
            const double wa = 0.25;
            for (int t = 0; t < 2; ++t) { // Eve's chosen arrival slot
                const double wt =
                    wa * (t == 0 ? ts.shift_to_t0_prob : 1.0 - ts.shift_to_t0_prob);
                if (wt == 0.0) continue;
                // The pulse state is untouched: routing by Alice's state.
                bob_branches(acc, wt, ab, av, ab, av, t, q);
            }
        }
    }
    return acc.finish();
}

// Non-wrapping shift-and-flip on a time-multiplexed receiver with disjoint
// gates: a photon shifted off both gates is lost.
OracleResult enumerate_shift_and_flip(const EfficiencyQuadruple& q) {
    Accumulator acc;
    for (int ab = 0; ab < 2; ++ab) {
        for (int av = 0; av < 2; ++av) {
            const double wa = 0.25;
            const int encoded = 1 - av; // Eve flips the bit first
            for (int s = 0; s < 2; ++s) { // 0 -> -delta, 1 -> +delta
                const double ws = wa * 0.5;
                for (int bob_basis = 0; bob_basis < 2; ++bob_basis) {
                    const double wb = ws * 0.5;
                    const bool sifted = bob_basis == ab;
                    auto land = [&](double w, int path) {
                        // +delta moves path 0 into gate 1; -delta moves path 1
                        // into gate 0; the other combinations are lost.
                        if (s == 1 && path == 0) {
                            acc.add(w, sifted, 1, av, eta_at(q, 1, 1));
                        } else if (s == 0 && path == 1) {
                            acc.add(w, sifted, 0, av, eta_at(q, 0, 0));
                        }
                    };
                    if (bob_basis == ab) {
                        land(wb, encoded);
                    } else {
                        land(wb * 0.5, 0);
                        land(wb * 0.5, 1);
                    }
                }
            }
        }
    }
    return acc.finish();
}

} // namespace

OracleResult enumerate_attack_outcomes(const EfficiencyQuadruple& q,
                                       const AttackStrategy& attack) {
    if (std::holds_alternative<FakedState>(attack)) {
        return enumerate_faked_state(q);
    }
    if (const auto* ts = std::get_if<TimeShift>(&attack)) {
        return enumerate_time_shift(q, *ts);
    }
    if (std::holds_alternative<ShiftAndFlip>(attack)) {
        return enumerate_shift_and_flip(q);
    }
    throw UnsupportedAttackError(
        "brute_force_qber_oracle: attack not supported by the enumeration");
}

double brute_force_qber_oracle(const EfficiencyQuadruple& q,
                               const AttackStrategy& attack) {
    return enumerate_attack_outcomes(q, attack).qber;
}

} // namespace qkdsim
