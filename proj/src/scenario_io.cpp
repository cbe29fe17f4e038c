#include "qkdsim/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qkdsim {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) {
            if (key == a) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ValidationError("scenario: unknown key '" + key + "' in " +
                                  where);
        }
    }
}

double require_number(const json& obj, const std::string& where,
                      const char* key) {
    if (!obj.contains(key)) {
        throw ValidationError("scenario: missing key '" + std::string(key) +
                              "' in " + where);
    }
    if (!obj[key].is_number()) {
        throw ValidationError("scenario: key '" + std::string(key) + "' in " +
                              where + " must be a number");
    }
    return obj[key].get<double>();
}

double number_or(const json& obj, const char* key, double fallback) {
    return obj.contains(key) ? obj[key].get<double>() : fallback;
}

bool bool_or(const json& obj, const std::string& where, const char* key,
             bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean()) {
        throw ValidationError("scenario: key '" + std::string(key) + "' in " +
                              where + " must be a boolean");
    }
    return obj[key].get<bool>();
}

EfficiencyCurve parse_curve(const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.empty()) {
        throw ValidationError("scenario: " + where +
                              " must be a nonempty array of [time, efficiency]");
    }
    std::vector<EfficiencyCurve::Sample> samples;
    for (const auto& entry : arr) {
        if (!entry.is_array() || entry.size() != 2) {
            throw ValidationError("scenario: " + where +
                                  " entries must be [time, efficiency] pairs");
        }
        samples.push_back({entry[0].get<double>(), entry[1].get<double>()});
    }
    return EfficiencyCurve(std::move(samples));
}

json curve_json(const EfficiencyCurve& curve) {
    json arr = json::array();
    for (const auto& s : curve.samples()) {
        arr.push_back(json::array({s.time, s.efficiency}));
    }
    return arr;
}

void parse_receiver(const json& rec, Scenario& out) {
    if (!rec.is_object() || !rec.contains("type")) {
        throw ValidationError("scenario: receiver must be an object with a 'type'");
    }
    const std::string type = rec["type"].get<std::string>();
    if (type == "symmetric_two_detector") {
        reject_unknown_keys(rec, "receiver",
                            {"type", "r", "peak", "t0", "t1", "gate_halfwidth",
                             "dark_count_prob"});
        SymmetricReceiverSpec spec;
        spec.r = require_number(rec, "receiver", "r");
        spec.peak = require_number(rec, "receiver", "peak");
        spec.t0 = require_number(rec, "receiver", "t0");
        spec.t1 = require_number(rec, "receiver", "t1");
        spec.gate_halfwidth = require_number(rec, "receiver", "gate_halfwidth");
        spec.dark_count_prob = number_or(rec, "dark_count_prob", 0.0);
        out.symmetric_recipe = spec;
        out.receiver = build_receiver(spec);
    } else if (type == "two_detector") {
        reject_unknown_keys(rec, "receiver",
                            {"type", "curve_bit0", "curve_bit1",
                             "gate_center_offset", "dark_count_prob"});
        TwoDetectorConfig cfg;
        cfg.curve_bit0 = parse_curve(rec.at("curve_bit0"), "receiver.curve_bit0");
        cfg.curve_bit1 = parse_curve(rec.at("curve_bit1"), "receiver.curve_bit1");
        cfg.gate_center_offset = number_or(rec, "gate_center_offset", 0.0);
        cfg.dark_count_prob = number_or(rec, "dark_count_prob", 0.0);
        out.receiver = cfg;
    } else if (type == "time_mux") {
        reject_unknown_keys(rec, "receiver",
                            {"type", "curve", "gate0_offset", "gate1_offset",
                             "pulse_period", "dark_count_prob"});
        TimeMuxConfig cfg;
        cfg.curve = parse_curve(rec.at("curve"), "receiver.curve");
        cfg.gate0_offset = require_number(rec, "receiver", "gate0_offset");
        cfg.gate1_offset = require_number(rec, "receiver", "gate1_offset");
        cfg.pulse_period = require_number(rec, "receiver", "pulse_period");
        cfg.dark_count_prob = number_or(rec, "dark_count_prob", 0.0);
        out.receiver = cfg;
    } else {
        throw ValidationError("scenario: unknown receiver type '" + type + "'");
    }
}

AttackStrategy parse_attack(const json& atk) {
    if (!atk.is_object() || !atk.contains("type")) {
        throw ValidationError("scenario: attack must be an object with a 'type'");
    }
    const std::string type = atk["type"].get<std::string>();
    if (type == "none") {
        reject_unknown_keys(atk, "attack", {"type"});
        return NoAttack{};
    }
    if (type == "time_shift") {
        reject_unknown_keys(atk, "attack", {"type", "shift_to_t0_prob"});
        return TimeShift{number_or(atk, "shift_to_t0_prob", 0.5)};
    }
    if (type == "faked_state") {
        reject_unknown_keys(atk, "attack", {"type"});
        return FakedState{};
    }
    if (type == "shift_and_flip") {
        reject_unknown_keys(atk, "attack", {"type", "delta"});
        return ShiftAndFlip{require_number(atk, "attack", "delta")};
    }
    if (type == "probe") {
        reject_unknown_keys(
            atk, "attack",
            {"type", "block_fraction", "delay_grid", "pulses_per_point"});
        Probe pr;
        pr.block_fraction = require_number(atk, "attack", "block_fraction");
        if (!atk.contains("delay_grid") || !atk["delay_grid"].is_array()) {
            throw ValidationError("scenario: probe attack needs a delay_grid array");
        }
        for (const auto& v : atk["delay_grid"]) {
            pr.delay_grid.push_back(v.get<double>());
        }
        pr.pulses_per_point = static_cast<std::uint64_t>(
            number_or(atk, "pulses_per_point", 0.0));
        return pr;
    }
    throw ValidationError("scenario: unknown attack type '" + type + "'");
}

} // namespace

Scenario parse_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("scenario: JSON parse error: ") +
                              e.what());
    }
    if (!doc.is_object()) {
        throw ValidationError("scenario: top level must be an object");
    }
    reject_unknown_keys(doc, "scenario",
                        {"schema_version", "receiver", "attack",
                         "countermeasures", "n_pulses", "seed",
                         "channel_transmittance", "eve_loss_mask"});
    if (!doc.contains("schema_version") ||
        doc["schema_version"].get<std::string>() != kScenarioSchemaVersion) {
        throw ValidationError(
            "scenario: schema_version missing or unsupported (expected \"" +
            std::string(kScenarioSchemaVersion) + "\")");
    }

    Scenario s;
    if (!doc.contains("receiver")) {
        throw ValidationError("scenario: missing key 'receiver'");
    }
    parse_receiver(doc["receiver"], s);
    if (!doc.contains("attack")) {
        throw ValidationError("scenario: missing key 'attack'");
    }
    s.attack = parse_attack(doc["attack"]);

    if (doc.contains("countermeasures")) {
        const json& cm = doc["countermeasures"];
        reject_unknown_keys(cm, "countermeasures",
                            {"four_value", "monitors", "gate_jitter_halfwidth",
                             "rate_tolerance", "window_guard_band"});
        s.countermeasures.four_value =
            bool_or(cm, "countermeasures", "four_value", false);
        s.countermeasures.monitors =
            bool_or(cm, "countermeasures", "monitors", false);
        s.countermeasures.gate_jitter_halfwidth =
            number_or(cm, "gate_jitter_halfwidth", 0.0);
        s.countermeasures.rate_tolerance = number_or(cm, "rate_tolerance", 0.1);
        s.countermeasures.window_guard_band =
            number_or(cm, "window_guard_band", 0.1);
    }

    s.n_pulses = static_cast<std::uint64_t>(
        require_number(doc, "scenario", "n_pulses"));
    s.seed = doc.contains("seed") ? doc["seed"].get<std::uint64_t>() : 0;
    s.channel_transmittance = number_or(doc, "channel_transmittance", 1.0);
    s.eve_loss_mask = number_or(doc, "eve_loss_mask", 1.0);

    s.validate();
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("scenario: cannot open file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& s) {
    json doc;
    doc["schema_version"] = kScenarioSchemaVersion;

    json rec;
    if (s.symmetric_recipe) {
        const auto& spec = *s.symmetric_recipe;
        rec["type"] = "symmetric_two_detector";
        rec["r"] = spec.r;
        rec["peak"] = spec.peak;
        rec["t0"] = spec.t0;
        rec["t1"] = spec.t1;
        rec["gate_halfwidth"] = spec.gate_halfwidth;
        rec["dark_count_prob"] = spec.dark_count_prob;
    } else if (const auto* two = std::get_if<TwoDetectorConfig>(&s.receiver)) {
        rec["type"] = "two_detector";
        rec["curve_bit0"] = curve_json(two->curve_bit0);
        rec["curve_bit1"] = curve_json(two->curve_bit1);
        rec["gate_center_offset"] = two->gate_center_offset;
        rec["dark_count_prob"] = two->dark_count_prob;
    } else {
        const auto& mux = std::get<TimeMuxConfig>(s.receiver);
        rec["type"] = "time_mux";
        rec["curve"] = curve_json(mux.curve);
        rec["gate0_offset"] = mux.gate0_offset;
        rec["gate1_offset"] = mux.gate1_offset;
        rec["pulse_period"] = mux.pulse_period;
        rec["dark_count_prob"] = mux.dark_count_prob;
    }
    doc["receiver"] = rec;

    json atk;
    std::visit(
        [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, NoAttack>) {
                atk["type"] = "none";
            } else if constexpr (std::is_same_v<T, TimeShift>) {
                atk["type"] = "time_shift";
                atk["shift_to_t0_prob"] = a.shift_to_t0_prob;
            } else if constexpr (std::is_same_v<T, FakedState>) {
                atk["type"] = "faked_state";
            } else if constexpr (std::is_same_v<T, ShiftAndFlip>) {
                atk["type"] = "shift_and_flip";
                atk["delta"] = a.delta;
            } else {
                atk["type"] = "probe";
                atk["block_fraction"] = a.block_fraction;
                atk["delay_grid"] = a.delay_grid;
                atk["pulses_per_point"] = a.pulses_per_point;
            }
        },
        s.attack);
    doc["attack"] = atk;

    doc["countermeasures"] = {
        {"four_value", s.countermeasures.four_value},
        {"monitors", s.countermeasures.monitors},
        {"gate_jitter_halfwidth", s.countermeasures.gate_jitter_halfwidth},
        {"rate_tolerance", s.countermeasures.rate_tolerance},
        {"window_guard_band", s.countermeasures.window_guard_band},
    };
    doc["n_pulses"] = s.n_pulses;
    doc["seed"] = s.seed;
    doc["channel_transmittance"] = s.channel_transmittance;
    doc["eve_loss_mask"] = s.eve_loss_mask;
    return doc.dump(2) + "\n";
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string CsvReport::to_string() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    }
    return out.str();
}

void CsvReport::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open output file '" + path + "'");
    }
    out << to_string();
}

namespace {

std::string opt_number(const std::optional<double>& v) {
    return v ? format_number(*v) : "nan";
}

} // namespace

CsvReport run_result_csv(const SimResult& res) {
    CsvReport csv;
    csv.header = {"emitted",     "detected",    "sifted",
                  "qber",        "qber_stderr", "sifted_rate",
                  "eve_info",    "key_rate_bound", "insecure_flag"};
    const std::optional<double> eve_info =
        res.empirical_eve_info
            ? res.empirical_eve_info
            : (res.assessment ? std::optional<double>(res.assessment->eve_info)
                              : std::nullopt);
    csv.rows.push_back({
        std::to_string(res.emitted),
        std::to_string(res.detected),
        std::to_string(res.sifted),
        opt_number(res.qber),
        format_number(res.stderr_qber),
        format_number(res.sifted_rate),
        opt_number(eve_info),
        res.assessment ? format_number(res.assessment->key_rate_upper_bound)
                       : "nan",
        res.assessment ? (res.assessment->insecure ? "1" : "0") : "nan",
    });
    return csv;
}

CsvReport sweep_csv(const Scenario& base, const std::string& parameter,
                    const std::vector<std::pair<double, SimResult>>& results) {
    CsvReport csv;
    csv.header = {"parameter_value", "qber",          "qber_stderr",
                  "sifted_rate",     "eve_info",      "key_rate_bound",
                  "insecure_flag",   "analytic_qber"};
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& [value, res] = results[i];
        const Scenario s = apply_sweep_value(base, parameter, value, i);
        const std::optional<double> eve_info =
            res.empirical_eve_info
                ? res.empirical_eve_info
                : (res.assessment
                       ? std::optional<double>(res.assessment->eve_info)
                       : std::nullopt);
        csv.rows.push_back({
            format_number(value),
            opt_number(res.qber),
            format_number(res.stderr_qber),
            format_number(res.sifted_rate),
            opt_number(eve_info),
            res.assessment ? format_number(res.assessment->key_rate_upper_bound)
                           : "nan",
            res.assessment ? (res.assessment->insecure ? "1" : "0") : "nan",
            format_number(analytic_qber_for(s)),
        });
    }
    return csv;
}

} // namespace qkdsim
