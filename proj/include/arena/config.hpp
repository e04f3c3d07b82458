#pragma once

// Scenario configuration: map, world rules, team bindings and tuning knobs.
// Files referenced by path are resolved relative to the config file and
// inlined, so a resolved config is self-contained.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arena/agents.hpp"
#include "arena/orgmodel.hpp"
#include "arena/world.hpp"

namespace arena {

class ConfigError : public Error {
public:
    using Error::Error;
};

struct TeamBinding {
    int id = 0;
    Strategy strategy = Strategy::Acmas;
    std::optional<nlohmann::json> org_spec; // OCMAS only
    std::optional<int> mediation_delay;
};

struct ScenarioConfig {
    std::vector<std::string> map_rows;
    WorldRules rules;
    int max_ticks = 500;
    std::uint64_t seed = 0;
    std::vector<TeamBinding> teams;
    int box_punishment = 5;
    int danger_weight = 10;
    int explosion_punishment = 50;
    int mediation_delay = 1;
    int bid_window = 2;
    int backoff = 5;

    std::string map_text() const {
        std::string s;
        for (const auto& r : map_rows) s += r + "\n";
        return s;
    }

    const TeamBinding& team(int id) const {
        for (const auto& t : teams)
            if (t.id == id) return t;
        throw ConfigError("no binding for team " + std::to_string(id));
    }

    int delay_for(int team_id) const { return team(team_id).mediation_delay.value_or(mediation_delay); }

    AgentParams agent_params() const {
        AgentParams p;
        p.box_punishment = box_punishment;
        p.weights = {danger_weight, explosion_punishment};
        p.cnp = {bid_window, backoff, p.weights, box_punishment};
        return p;
    }
};

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<std::string> split_rows(const std::string& text) {
    std::vector<std::string> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) rows.push_back(line);
    }
    return rows;
}

/// Parses a config document; relative file references resolve against
/// `base_dir`. Throws ConfigError.
inline ScenarioConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".") {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ScenarioConfig c;
    try {
        if (j.contains("map")) {
            for (const auto& r : j.at("map")) c.map_rows.push_back(r.get<std::string>());
        } else if (j.contains("map_file")) {
            c.map_rows = split_rows(read_text_file(base_dir / j.at("map_file").get<std::string>()));
        } else {
            throw ConfigError("config needs 'map' or 'map_file'");
        }
        c.rules.fuse_ticks = j.value("fuse_ticks", c.rules.fuse_ticks);
        c.rules.blast_range = j.value("blast_range", c.rules.blast_range);
        c.rules.explosion_linger = j.value("explosion_linger", c.rules.explosion_linger);
        c.rules.bombs_capacity = j.value("bombs_capacity", c.rules.bombs_capacity);
        c.max_ticks = j.value("max_ticks", c.max_ticks);
        c.seed = j.value("seed", c.seed);
        c.box_punishment = j.value("box_punishment", c.box_punishment);
        c.danger_weight = j.value("danger_weight", c.danger_weight);
        c.explosion_punishment = j.value("explosion_punishment", c.explosion_punishment);
        c.mediation_delay = j.value("mediation_delay", c.mediation_delay);
        c.bid_window = j.value("bid_window", c.bid_window);
        c.backoff = j.value("backoff", c.backoff);
        if (!j.contains("teams") || !j.at("teams").is_array()) throw ConfigError("config needs a 'teams' array");
        for (const auto& t : j.at("teams")) {
            TeamBinding b;
            b.id = t.at("id").get<int>();
            const std::string s = t.value("strategy", "acmas");
            if (s == "acmas" || s == "ACMAS") b.strategy = Strategy::Acmas;
            else if (s == "ocmas" || s == "OCMAS") b.strategy = Strategy::Ocmas;
            else throw ConfigError("team " + std::to_string(b.id) + ": unknown strategy '" + s + "'");
            if (t.contains("org_spec")) {
                b.org_spec = t.at("org_spec");
            } else if (t.contains("org_spec_file")) {
                b.org_spec = nlohmann::json::parse(read_text_file(base_dir / t.at("org_spec_file").get<std::string>()));
            }
            if (t.contains("mediation_delay")) b.mediation_delay = t.at("mediation_delay").get<int>();
            c.teams.push_back(std::move(b));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }

    if (c.teams.size() != 2 || c.team(1).id != 1 || c.team(2).id != 2)
        throw ConfigError("config needs exactly teams 1 and 2");
    for (const auto& t : c.teams) {
        if (t.strategy == Strategy::Ocmas && !t.org_spec)
            throw ConfigError("team " + std::to_string(t.id) + ": OCMAS binding requires an org spec");
        if (t.strategy == Strategy::Acmas && t.org_spec)
            throw ConfigError("team " + std::to_string(t.id) + ": ACMAS binding must not reference an org spec");
        if (t.org_spec) load_org_spec(*t.org_spec); // SpecError propagates
        if (t.mediation_delay && *t.mediation_delay < 0) throw ConfigError("mediation_delay must be >= 0");
    }
    if (c.mediation_delay < 0) throw ConfigError("mediation_delay must be >= 0");
    if (c.max_ticks < 1) throw ConfigError("max_ticks must be >= 1");
    if (c.rules.fuse_ticks < 1 || c.rules.blast_range < 0 || c.rules.explosion_linger < 1 || c.rules.bombs_capacity < 0)
        throw ConfigError("world rules out of range");
    if (c.bid_window < 0 || c.backoff < 0) throw ConfigError("bid_window and backoff must be >= 0");
    try {
        parse_map(c.map_text());
    } catch (const Error& e) {
        throw ConfigError(std::string("map: ") + e.what());
    }
    return c;
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

/// Fully resolved form: map rows and org specs inline.
inline nlohmann::json to_json(const ScenarioConfig& c) {
    nlohmann::json teams = nlohmann::json::array();
    for (const auto& t : c.teams) {
        nlohmann::json b{{"id", t.id}, {"strategy", strategy_name(t.strategy)}};
        if (t.org_spec) b["org_spec"] = *t.org_spec;
        if (t.mediation_delay) b["mediation_delay"] = *t.mediation_delay;
        teams.push_back(std::move(b));
    }
    return {
        {"map", c.map_rows},
        {"fuse_ticks", c.rules.fuse_ticks},
        {"blast_range", c.rules.blast_range},
        {"explosion_linger", c.rules.explosion_linger},
        {"bombs_capacity", c.rules.bombs_capacity},
        {"max_ticks", c.max_ticks},
        {"seed", c.seed},
        {"teams", teams},
        {"box_punishment", c.box_punishment},
        {"danger_weight", c.danger_weight},
        {"explosion_punishment", c.explosion_punishment},
        {"mediation_delay", c.mediation_delay},
        {"bid_window", c.bid_window},
        {"backoff", c.backoff},
    };
}

inline WorldState new_world(const ScenarioConfig& c) {
    return new_world(parse_map(c.map_text()), c.rules, c.seed);
}

} // namespace arena
