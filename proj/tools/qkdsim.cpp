#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qkdsim/paper_checks.hpp"
#include "qkdsim/scenario_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFail = 1;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

// Scenario lookup: literal path first, then the repo's scenarios/ directory
// (relative to cwd and to the binary), with or without .json.
std::string resolve_scenario(const std::string& name) {
    namespace fs = std::filesystem;
    std::vector<fs::path> candidates = {name, name + ".json"};
    for (const fs::path base : {fs::path("scenarios"), fs::path("../scenarios")}) {
        candidates.push_back(base / name);
        candidates.push_back(base / (name + ".json"));
    }
    for (const auto& c : candidates) {
        if (fs::exists(c) && fs::is_regular_file(c)) return c.string();
    }
    return name; // let the loader produce the error message
}

std::optional<std::uint64_t> env_seed() {
    const char* v = std::getenv("QKDSIM_SEED");
    if (!v || !*v) return std::nullopt;
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw qkdsim::ValidationError("QKDSIM_SEED is not a valid unsigned integer");
    }
}

qkdsim::Scenario load(const std::string& name, bool seed_given,
                      std::uint64_t seed) {
    qkdsim::Scenario s = qkdsim::load_scenario_file(resolve_scenario(name));
    // Precedence: --seed, then QKDSIM_SEED, then the scenario file.
    if (seed_given) {
        s.seed = seed;
    } else if (const auto env = env_seed()) {
        s.seed = *env;
    }
    return s;
}

void emit(const qkdsim::CsvReport& csv, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << csv.to_string();
    } else {
        csv.write_file(out_path);
    }
}

void print_summary(const qkdsim::SimResult& res) {
    std::printf("emitted %llu, detected %llu, sifted %llu (rate %.4g)\n",
                static_cast<unsigned long long>(res.emitted),
                static_cast<unsigned long long>(res.detected),
                static_cast<unsigned long long>(res.sifted), res.sifted_rate);
    if (res.qber) {
        std::printf("QBER %.6g (stderr %.3g)\n", *res.qber, res.stderr_qber);
    } else {
        std::printf("QBER undefined (no sifted pairs)\n");
    }
    if (res.empirical_eve_info) {
        std::printf("Eve information (empirical) %.6g bits\n",
                    *res.empirical_eve_info);
    }
    if (res.assessment) {
        std::printf("assessment: Eve info %.6g, key-rate bound %.6g -> %s\n",
                    res.assessment->eve_info,
                    res.assessment->key_rate_upper_bound,
                    res.assessment->insecure ? "INSECURE" : "within bound");
    }
    if (res.monitor) {
        std::printf("monitors: rate %.4g vs baseline %.4g, rate_alarm=%s, "
                    "window_alarm=%s (%lld out-of-window)\n",
                    res.monitor->detection_rate, res.monitor->baseline_rate,
                    res.monitor->rate_alarm ? "yes" : "no",
                    res.monitor->window_alarm ? "yes" : "no",
                    static_cast<long long>(res.monitor->out_of_window_count));
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"BB84 detector-efficiency-mismatch attack simulator"};
    app.require_subcommand(1);

    std::string scenario_name;
    std::string out_path;
    std::uint64_t seed = 0;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "Run one scenario and emit a CSV row");
    run->add_option("scenario", scenario_name,
                    "Scenario file or canned scenario name")
        ->required();
    auto* run_seed = run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--out", out_path, "Write the CSV here instead of stdout");
    run->add_flag("--quiet", quiet, "Suppress the human summary");

    std::string param;
    std::string values_csv;
    auto* sweep_cmd =
        app.add_subcommand("sweep", "Re-run a scenario over a parameter grid");
    sweep_cmd->add_option("scenario", scenario_name,
                          "Scenario file or canned scenario name")
        ->required();
    sweep_cmd->add_option("--param", param, "Swept parameter name")->required();
    sweep_cmd->add_option("--values", values_csv, "Comma-separated values")
        ->required();
    auto* sweep_seed =
        sweep_cmd->add_option("--seed", seed, "Override the scenario seed");
    sweep_cmd->add_option("--out", out_path, "Write the CSV here instead of stdout");
    sweep_cmd->add_flag("--quiet", quiet, "Suppress the human summary");

    auto* check =
        app.add_subcommand("paper-check", "Run every reproduction check");
    check->add_option("--out", out_path, "Write the check CSV here too");
    check->add_flag("--quiet", quiet, "Print only failures");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (run->parsed()) {
            const qkdsim::Scenario s =
                load(scenario_name, run_seed->count() > 0, seed);
            const qkdsim::SimResult res = qkdsim::run_scenario(s);
            emit(qkdsim::run_result_csv(res), out_path);
            if (!quiet) print_summary(res);
            return kExitOk;
        }

        if (sweep_cmd->parsed()) {
            const qkdsim::Scenario s =
                load(scenario_name, sweep_seed->count() > 0, seed);
            std::vector<double> values;
            std::stringstream ss(values_csv);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                if (tok.empty()) continue;
                values.push_back(std::stod(tok));
            }
            if (values.empty()) {
                throw qkdsim::ValidationError("sweep: empty values list");
            }
            const auto results = qkdsim::sweep(s, param, values);
            emit(qkdsim::sweep_csv(s, param, results), out_path);
            return kExitOk;
        }

        // paper-check
        const auto checks = qkdsim::run_paper_checks();
        bool all_pass = true;
        for (const auto& c : checks) {
            all_pass = all_pass && c.pass;
            if (quiet && c.pass) continue;
            std::printf("%s %-20s expected %-12s observed %-12s tol %-12s %s\n",
                        c.pass ? "PASS" : "FAIL", c.name.c_str(),
                        qkdsim::format_number(c.expected).c_str(),
                        qkdsim::format_number(c.observed).c_str(),
                        qkdsim::format_number(c.tolerance).c_str(),
                        c.detail.c_str());
        }
        if (!out_path.empty()) {
            qkdsim::paper_check_csv(checks).write_file(out_path);
        }
        return all_pass ? kExitOk : kExitCheckFail;
    } catch (const qkdsim::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
}
