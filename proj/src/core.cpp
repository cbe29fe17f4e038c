#include "qkdsim/core.hpp"

#include <algorithm>
#include <cmath>

namespace qkdsim {

EfficiencyCurve::EfficiencyCurve(std::vector<Sample> samples)
    : samples_(std::move(samples)) {
    if (samples_.empty()) {
        throw ValidationError("EfficiencyCurve: at least one sample required");
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& s = samples_[i];
        if (!std::isfinite(s.time)) {
            throw ValidationError("EfficiencyCurve: non-finite sample time");
        }
        if (!(s.efficiency >= 0.0 && s.efficiency <= 1.0)) {
            throw ValidationError("EfficiencyCurve: efficiency outside [0,1]");
        }
        if (i > 0 && !(samples_[i - 1].time < s.time)) {
            throw ValidationError("EfficiencyCurve: sample times must be strictly increasing");
        }
    }
}

double EfficiencyCurve::evaluate(TimeNs t) const {
    if (samples_.empty()) return 0.0;
    if (t < samples_.front().time || t > samples_.back().time) return 0.0;
    auto it = std::lower_bound(samples_.begin(), samples_.end(), t,
                               [](const Sample& s, TimeNs v) { return s.time < v; });
    if (it->time == t) return it->efficiency;
    const Sample& hi = *it;
    const Sample& lo = *(it - 1);
    const double f = (t - lo.time) / (hi.time - lo.time);
    return lo.efficiency + f * (hi.efficiency - lo.efficiency);
}

TimeNs EfficiencyCurve::peak_time() const {
    auto it = std::max_element(samples_.begin(), samples_.end(),
                               [](const Sample& a, const Sample& b) {
                                   return a.efficiency < b.efficiency;
                               });
    return it->time;
}

double EfficiencyCurve::peak_value() const {
    auto it = std::max_element(samples_.begin(), samples_.end(),
                               [](const Sample& a, const Sample& b) {
                                   return a.efficiency < b.efficiency;
                               });
    return it->efficiency;
}

} // namespace qkdsim
