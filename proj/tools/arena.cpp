#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "arena/arena.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kConfigFault = 2;
constexpr int kDivergence = 3;

void print_record(const arena::MatchRecord& r) {
    std::cout << "seed " << r.seed << ": " << r.outcome;
    if (r.outcome == "win") std::cout << " team " << r.winner;
    std::cout << " after " << r.ticks << " ticks\n";
    for (const auto& [team, m] : r.teams) {
        std::cout << "  team " << team << " (" << arena::strategy_name(m.strategy) << "): goals " << m.goals_satisfied
                  << ", latency samples " << m.latency_count << ", mean latency " << m.mean_latency()
                  << ", cnp " << m.cnp_completed << "/" << m.cnp_issued << ", lost " << m.agents_lost
                  << ", idle ticks " << m.goal_idle_ticks << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bomberman arena: ACMAS vs OCMAS match runner"};
    app.require_subcommand(1);

    std::string config_path, log_path, csv_path, seeds_text, replay_path, spec_path;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 0;

    auto* run = app.add_subcommand("run", "Run one match");
    run->add_option("--config", config_path, "Scenario config (JSON)")->required();
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--log", log_path, "Write the JSONL event log here");

    auto* batch = app.add_subcommand("batch", "Run one match per seed and aggregate");
    batch->add_option("--config", config_path, "Scenario config (JSON)")->required();
    batch->add_option("--seeds", seeds_text, "Seed list: 1..20 or 1,2,3")->required();
    batch->add_option("--csv", csv_path, "Write per-seed CSV here");
    batch->add_option("--jobs", jobs, "Parallel matches (0 = all cores)");

    auto* rep = app.add_subcommand("replay", "Re-simulate a log and compare it line by line");
    rep->add_option("log", replay_path, "JSONL log")->required();

    auto* val = app.add_subcommand("validate-spec", "Check an organization spec");
    val->add_option("file", spec_path, "Org spec (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*run) {
            auto config = arena::load_config(config_path);
            if (seed) config.seed = *seed;
            const auto result = arena::run_match(config);
            if (!log_path.empty()) arena::write_log(log_path, result.log);
            print_record(result.record);
            return kOk;
        }
        if (*batch) {
            const auto config = arena::load_config(config_path);
            const auto summary = arena::run_batch(config, arena::parse_seeds(seeds_text), jobs);
            if (!csv_path.empty()) {
                std::ofstream out(csv_path);
                if (!out) {
                    std::cerr << "cannot write " << csv_path << "\n";
                    return kUsage;
                }
                out << arena::to_csv(summary);
            }
            std::cout << arena::to_table(summary);
            return kOk;
        }
        if (*rep) {
            const auto verdict = arena::replay(std::filesystem::path(replay_path));
            if (verdict.ok) {
                std::cout << "OK\n";
                return kOk;
            }
            std::cout << "DIVERGED at line " << verdict.line << "\n  expected: " << verdict.expected
                      << "\n  found:    " << verdict.actual << "\n";
            return kDivergence;
        }
        if (*val) {
            const auto report = arena::validate_spec(std::filesystem::path(spec_path));
            if (report.ok) {
                std::cout << "OK\n" << report.summary;
                return kOk;
            }
            std::cout << "INVALID\n";
            for (const auto& f : report.faults) std::cout << "  - " << f << "\n";
            return kConfigFault;
        }
    } catch (const arena::VersionMismatch& e) {
        std::cerr << "version mismatch: " << e.what() << "\n";
        return kDivergence;
    } catch (const arena::LogParseError& e) {
        std::cerr << "log error: " << e.what() << "\n";
        return kDivergence;
    } catch (const arena::SpecError& e) {
        std::cerr << e.what() << "\n";
        return kConfigFault;
    } catch (const arena::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigFault;
    } catch (const arena::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigFault;
    }
    return kUsage;
}
