#pragma once

// Match runner, batch bench, JSONL event log and replay verification.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "arena/agents.hpp"
#include "arena/config.hpp"
#include "arena/contract_net.hpp"
#include "arena/orgmodel.hpp"
#include "arena/world.hpp"

namespace arena {

inline constexpr const char* kLogVersion = "arena-log/1";

class LogParseError : public Error {
public:
    using Error::Error;
};

class VersionMismatch : public Error {
public:
    using Error::Error;
};

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

inline std::string config_hash(const ScenarioConfig& c) { return hex64(fnv1a64(to_json(c).dump())); }

struct TeamMetrics {
    int team = 0;
    Strategy strategy = Strategy::Acmas;
    int goals_satisfied = 0;
    std::map<int, int> latency_histogram; // latency ticks -> count
    long latency_sum = 0;
    int latency_count = 0;
    int cnp_issued = 0;
    int cnp_completed = 0;
    int agents_lost = 0;
    int goal_idle_ticks = 0;

    void add_latency(int ticks) {
        ++latency_histogram[ticks];
        latency_sum += ticks;
        ++latency_count;
    }
    double mean_latency() const { return latency_count ? static_cast<double>(latency_sum) / latency_count : 0.0; }
};

struct MatchRecord {
    std::uint64_t seed = 0;
    std::string outcome; // "win", "draw" or "timeout"
    int winner = 0;
    int ticks = 0;
    std::map<int, TeamMetrics> teams;
};

struct TimedMessage {
    int tick = 0;
    CnpMessage message;
};

struct MatchRun {
    MatchRecord record;
    std::vector<std::string> log;
    std::vector<TimedMessage> messages;
    std::vector<WorldEvent> world_events;
    WorldState final_state;

    std::vector<std::string> transcript() const {
        std::vector<std::string> out;
        for (const auto& m : messages) out.push_back(transcript_line(m.tick, m.message));
        return out;
    }
};

struct RunOptions {
    /// Called with the state at the start of every tick.
    std::function<void(const WorldState&)> observer;
};

namespace detail {

inline std::string log_line(int tick, const char* source, const std::string& kind, nlohmann::json payload) {
    return nlohmann::json{{"tick", tick}, {"source", source}, {"kind", kind}, {"payload", std::move(payload)}}.dump();
}

inline nlohmann::json cell_json(Cell c) { return {c.x, c.y}; }

inline nlohmann::json org_event_payload(const OrgEvent& e, int team) {
    nlohmann::json p{{"team", team}, {"recipient", e.recipient}, {"requester", e.requester}};
    switch (e.kind) {
    case OrgEvent::Kind::GroupCreated:
        p["group"] = e.group_id;
        p["spec"] = e.spec;
        p["creator"] = e.creator;
        break;
    case OrgEvent::Kind::RoleAdopted:
        p["group"] = e.group_id;
        p["agent"] = e.agent;
        p["role"] = e.role;
        break;
    case OrgEvent::Kind::SchemeCreated:
        p["scheme"] = e.scheme_id;
        p["spec"] = e.spec;
        p["group"] = e.group_id;
        p["creator"] = e.creator;
        break;
    case OrgEvent::Kind::GoalAddition:
        p["scheme"] = e.scheme_id;
        p["goal"] = e.goal;
        break;
    case OrgEvent::Kind::SchemeFinished:
        p["scheme"] = e.scheme_id;
        p["spec"] = e.spec;
        break;
    case OrgEvent::Kind::OrgError:
        p["code"] = e.code;
        p["debug_cause"] = e.debug_cause;
        break;
    }
    if (e.cause) p["cause"] = {{"goal", e.cause->goal}, {"agent", e.cause->agent}, {"tick", e.cause->tick}};
    return p;
}

inline std::string term_text(const Term& t) { return t.is_int() ? std::to_string(t.value()) : t.name(); }

class Match {
public:
    Match(const ScenarioConfig& config, RunOptions options) : config_(config), options_(std::move(options)) {
        state_ = new_world(config_);
        const auto resolved = to_json(config_);
        log_.push_back(nlohmann::json{{"kind", "header"},
                                      {"version", kLogVersion},
                                      {"config_hash", hex64(fnv1a64(resolved.dump()))},
                                      {"config", resolved}}
                           .dump());

        for (const auto& binding : config_.teams) {
            auto& m = metrics_[binding.id];
            m.team = binding.id;
            m.strategy = binding.strategy;
            if (binding.strategy == Strategy::Ocmas) {
                std::vector<int> members;
                for (const auto& a : state_.agents)
                    if (a.team == binding.id) members.push_back(a.id);
                specs_[binding.id] = std::make_unique<OrgSpec>(load_org_spec(*binding.org_spec));
                kernels_.emplace(binding.id, OrgKernel(*specs_[binding.id], members, config_.delay_for(binding.id)));
            }
        }

        std::map<int, std::size_t> index_in_team;
        for (const auto& body : state_.agents) {
            const std::size_t idx = index_in_team[body.team]++;
            ArenaAgent::Setup s;
            s.id = body.id;
            s.team = body.team;
            s.role = role_for_index(idx);
            s.strategy = config_.team(body.team).strategy;
            s.leader = idx == 0;
            s.home = body.position;
            s.seed = config_.seed;
            s.params = config_.agent_params();
            if (s.strategy == Strategy::Ocmas) s.org = specs_.at(body.team).get();
            auto agent = std::make_unique<ArenaAgent>(s);
            const int id = body.id;
            agent->hooks().log = [this](const char* source, const std::string& kind, nlohmann::json payload) {
                log(source, kind, std::move(payload));
            };
            if (s.strategy == Strategy::Ocmas)
                agent->hooks().org = [this, team = body.team](int who, const BeliefAtom& d) {
                    return org_request(team, who, d);
                };
            agents_.emplace(id, std::move(agent));
        }
    }

    MatchRun run() {
        while (!is_terminal(state_) && state_.tick < config_.max_ticks) tick();

        MatchRun out;
        auto& rec = out.record;
        rec.seed = config_.seed;
        rec.ticks = state_.tick;
        if (auto outcome = is_terminal(state_)) {
            rec.outcome = outcome->draw() ? "draw" : "win";
            rec.winner = outcome->winner;
        } else {
            rec.outcome = "timeout";
        }
        for (auto& [team, kernel] : kernels_) {
            for (const auto& e : kernel.pending())
                if (e.cause && seen_causes_[team].insert(e.cause->serial).second)
                    metrics_[team].add_latency(e.deliver_at - e.cause->tick);
        }
        for (const auto& [id, agent] : agents_) {
            auto& m = metrics_[agent->team()];
            const auto& am = agent->metrics();
            if (agent->strategy() == Strategy::Acmas) {
                m.goals_satisfied += am.goals_satisfied;
                for (int l : am.latencies) m.add_latency(l);
            }
            m.goal_idle_ticks += am.idle_ticks;
            m.cnp_issued += agent->initiator().issued;
            m.cnp_completed += agent->initiator().completed;
        }
        rec.teams = metrics_;
        out.log = std::move(log_);
        out.messages = std::move(messages_);
        out.world_events = std::move(world_events_);
        out.final_state = state_;
        return out;
    }

private:
    void log(const char* source, const std::string& kind, nlohmann::json payload) {
        log_.push_back(log_line(now_, source, kind, std::move(payload)));
    }

    void tick() {
        now_ = state_.tick;
        if (options_.observer) options_.observer(state_);
        for (auto& [team, kernel] : kernels_) dispatch(team, kernel.deliver(now_));
        auto inboxes = mailbox_.deliver(now_);

        const auto snapshot = std::make_shared<const WorldState>(state_);
        std::map<int, ActionIntent> intents;
        nlohmann::json intent_log = nlohmann::json::object();
        for (auto& [id, agent] : agents_) {
            if (!snapshot->agent(id).alive) continue;
            const Percept percept = percept_for(snapshot, id);
            auto decision = agent->decide(percept, inboxes[id]);
            for (auto& m : decision.outbox) {
                log("cnp", message_name(m.kind), to_json(m));
                messages_.push_back({now_, m});
                mailbox_.send(std::move(m), now_);
            }
            intents[id] = decision.intent;
            intent_log[std::to_string(id)] = to_string(decision.intent) + "/" + decision.source;
        }
        log("agent", "intents", std::move(intent_log));

        auto result = apply_actions(state_, intents);
        for (const auto& e : result.events) {
            nlohmann::json p{{"cell", cell_json(e.cell)}, {"agent", e.agent}, {"phase", e.phase}};
            if (e.kind == WorldEventKind::MatchWon) p["winner"] = e.winner;
            if (e.kind == WorldEventKind::AgentDied) ++metrics_[state_.agent(e.agent).team].agents_lost;
            log_.push_back(log_line(e.tick, "world", event_name(e.kind), std::move(p)));
            world_events_.push_back(e);
        }
        for (const auto& [id, intent] : intents) {
            const AgentBody& before = state_.agent(id);
            const AgentBody& after = result.state.agent(id);
            bool refused = false;
            if (intent.kind == ActionIntent::Kind::Move) refused = after.alive && after.position == before.position;
            if (intent.kind == ActionIntent::Kind::PlaceBomb) {
                refused = std::none_of(result.events.begin(), result.events.end(), [id = id](const WorldEvent& e) {
                    return e.kind == WorldEventKind::BombPlaced && e.agent == id;
                });
            }
            if (refused) agents_.at(id)->action_refused(intent);
        }
        state_ = std::move(result.state);
    }

    void dispatch(int team, const std::vector<OrgEvent>& events) {
        for (const auto& e : events) {
            log("org", event_name(e.kind), org_event_payload(e, team));
            if (e.cause && seen_causes_[team].insert(e.cause->serial).second)
                metrics_[team].add_latency(now_ - e.cause->tick);
            const AgentBody* body = state_.find_agent(e.recipient);
            if (body && body->alive) agents_.at(e.recipient)->receive(e);
        }
    }

    bool org_request(int team, int agent, const BeliefAtom& d) {
        OrgKernel& k = kernels_.at(team);
        nlohmann::json args = nlohmann::json::array();
        for (const auto& t : d.args) args.push_back(term_text(t));
        log("org", d.predicate, {{"team", team}, {"agent", agent}, {"args", args}});
        auto text = [&](std::size_t i) { return i < d.args.size() ? term_text(d.args[i]) : std::string(); };
        auto number = [&](std::size_t i) {
            return i < d.args.size() && d.args[i].is_int() ? static_cast<int>(d.args[i].value()) : -1;
        };
        try {
            if (d.predicate == "create_group") {
                k.create_group(agent, text(0), now_);
            } else if (d.predicate == "adopt_role") {
                k.adopt_role(agent, text(0), number(1), now_);
            } else if (d.predicate == "create_scheme") {
                k.create_scheme(agent, text(0), number(1), now_);
            } else if (d.predicate == "commit_mission") {
                k.commit_mission(agent, text(0), number(1), now_);
            } else if (d.predicate == "set_goal_state") {
                const int sid = number(0);
                const std::string goal = text(1);
                auto satisfied_by_agent = [&] {
                    if (!k.schemes().contains(sid)) return false;
                    const auto& sat = k.scheme(sid).satisfiers;
                    auto it = sat.find(goal);
                    return it != sat.end() && it->second.contains(agent);
                };
                const bool before = satisfied_by_agent();
                k.set_goal_state(sid, goal, agent, now_);
                if (!before && satisfied_by_agent()) ++metrics_[team].goals_satisfied;
            } else {
                return false;
            }
        } catch (const Error& e) {
            log("org", "request_failed", {{"team", team}, {"agent", agent}, {"error", e.what()}});
            return false;
        }
        dispatch(team, k.deliver(now_));
        return true;
    }

    ScenarioConfig config_;
    RunOptions options_;
    WorldState state_;
    int now_ = 0;
    std::map<int, std::unique_ptr<ArenaAgent>> agents_;
    std::map<int, std::unique_ptr<OrgSpec>> specs_;
    std::map<int, OrgKernel> kernels_;
    std::map<int, std::set<int>> seen_causes_;
    std::map<int, TeamMetrics> metrics_;
    CnpMailbox mailbox_;
    std::vector<std::string> log_;
    std::vector<TimedMessage> messages_;
    std::vector<WorldEvent> world_events_;
};

} // namespace detail

/// Runs one match to MatchWon, Draw or max_ticks.
inline MatchRun run_match(const ScenarioConfig& config, RunOptions options = {}) {
    return detail::Match(config, std::move(options)).run();
}

inline void write_log(const std::filesystem::path& path, const std::vector<std::string>& lines) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& l : lines) out << l << '\n';
}

inline std::vector<std::string> read_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LogParseError("cannot read " + path.string());
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);)
        if (!l.empty()) lines.push_back(l);
    return lines;
}

struct ReplayVerdict {
    bool ok = true;
    std::size_t line = 0; // 1-based index of the first divergent line
    std::string expected; // as re-simulated
    std::string actual;   // as found in the log
};

/// Validates a log header line and returns the embedded config.
inline ScenarioConfig parse_log_header(const std::string& line) {
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw LogParseError(std::string("header: ") + e.what());
    }
    if (!header.is_object() || header.value("kind", "") != "header" || !header.contains("config"))
        throw LogParseError("first line is not a log header");
    if (header.value("version", "") != kLogVersion)
        throw VersionMismatch("log version '" + header.value("version", "") + "' is not " + kLogVersion);
    if (header.value("config_hash", "") != hex64(fnv1a64(header["config"].dump())))
        throw VersionMismatch("config hash does not match the embedded config");
    try {
        return config_from_json(header["config"]);
    } catch (const Error& e) {
        throw LogParseError(std::string("embedded config: ") + e.what());
    }
}

/// First line where `actual` departs from `expected`.
inline ReplayVerdict compare_logs(const std::vector<std::string>& expected, const std::vector<std::string>& actual) {
    const std::size_t n = std::max(expected.size(), actual.size());
    for (std::size_t i = 0; i < n; ++i) {
        const std::string want = i < expected.size() ? expected[i] : "<end of log>";
        const std::string got = i < actual.size() ? actual[i] : "<end of log>";
        if (want != got) return {false, i + 1, want, got};
    }
    return {};
}

/// Re-simulates from the embedded config and compares every line.
inline ReplayVerdict replay(const std::vector<std::string>& lines) {
    if (lines.empty()) throw LogParseError("empty log");
    const ScenarioConfig config = parse_log_header(lines.front());
    return compare_logs(run_match(config).log, lines);
}

inline ReplayVerdict replay(const std::filesystem::path& path) { return replay(read_log(path)); }

// ------------------------------------------------------------------ batch

struct TeamSummary {
    int team = 0;
    Strategy strategy = Strategy::Acmas;
    int matches = 0;
    int wins = 0;
    int draws = 0;
    int timeouts = 0;
    double win_rate = 0;
    double mean_ticks = 0;
    double mean_latency = 0;
    long latency_samples = 0;
    double mean_goals = 0;
    int cnp_issued = 0;
    int cnp_completed = 0;
};

struct BatchSummary {
    std::vector<MatchRecord> records; // sorted by seed
    std::map<int, TeamSummary> teams;
};

/// "1..20", "3" or "1,4,9".
inline std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> out;
    try {
        if (auto dots = text.find(".."); dots != std::string::npos) {
            const auto lo = std::stoull(text.substr(0, dots));
            const auto hi = std::stoull(text.substr(dots + 2));
            for (auto s = lo; s <= hi; ++s) out.push_back(s);
        } else {
            std::istringstream in(text);
            for (std::string part; std::getline(in, part, ',');) out.push_back(std::stoull(part));
        }
    } catch (const std::exception&) {
        throw ConfigError("bad seed list '" + text + "'");
    }
    if (out.empty()) throw ConfigError("bad seed list '" + text + "'");
    return out;
}

inline BatchSummary summarize(std::vector<MatchRecord> records) {
    std::sort(records.begin(), records.end(),
              [](const MatchRecord& a, const MatchRecord& b) { return a.seed < b.seed; });
    BatchSummary out;
    std::map<int, long> latency_sum, ticks_sum, goals_sum;
    for (const auto& r : records) {
        for (const auto& [team, m] : r.teams) {
            auto& s = out.teams[team];
            s.team = team;
            s.strategy = m.strategy;
            ++s.matches;
            if (r.outcome == "win" && r.winner == team) ++s.wins;
            if (r.outcome == "draw") ++s.draws;
            if (r.outcome == "timeout") ++s.timeouts;
            ticks_sum[team] += r.ticks;
            latency_sum[team] += m.latency_sum;
            s.latency_samples += m.latency_count;
            goals_sum[team] += m.goals_satisfied;
            s.cnp_issued += m.cnp_issued;
            s.cnp_completed += m.cnp_completed;
        }
    }
    for (auto& [team, s] : out.teams) {
        s.win_rate = static_cast<double>(s.wins) / s.matches;
        s.mean_ticks = static_cast<double>(ticks_sum[team]) / s.matches;
        s.mean_goals = static_cast<double>(goals_sum[team]) / s.matches;
        s.mean_latency = s.latency_samples ? static_cast<double>(latency_sum[team]) / s.latency_samples : 0.0;
    }
    out.records = std::move(records);
    return out;
}

/// Runs one match per seed, `jobs` at a time (0 = hardware concurrency).
inline BatchSummary run_batch(const ScenarioConfig& config, const std::vector<std::uint64_t>& seeds,
                              unsigned jobs = 0) {
    if (seeds.empty()) throw ConfigError("run_batch needs at least one seed");
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    std::vector<MatchRecord> records;
    for (std::size_t start = 0; start < seeds.size(); start += jobs) {
        std::vector<std::future<MatchRecord>> running;
        for (std::size_t i = start; i < std::min(seeds.size(), start + jobs); ++i) {
            ScenarioConfig c = config;
            c.seed = seeds[i];
            running.push_back(std::async(std::launch::async, [c] { return run_match(c).record; }));
        }
        for (auto& f : running) records.push_back(f.get());
    }
    return summarize(std::move(records));
}

inline std::string to_csv(const BatchSummary& b) {
    std::ostringstream os;
    os << "seed,outcome,winner,ticks,team,strategy,goals_satisfied,latency_samples,mean_latency,"
          "cnp_issued,cnp_completed,agents_lost,goal_idle_ticks\n";
    os << std::fixed << std::setprecision(4);
    for (const auto& r : b.records)
        for (const auto& [team, m] : r.teams)
            os << r.seed << ',' << r.outcome << ',' << r.winner << ',' << r.ticks << ',' << team << ','
               << strategy_name(m.strategy) << ',' << m.goals_satisfied << ',' << m.latency_count << ','
               << m.mean_latency() << ',' << m.cnp_issued << ',' << m.cnp_completed << ',' << m.agents_lost << ','
               << m.goal_idle_ticks << '\n';
    return os.str();
}

inline std::string to_table(const BatchSummary& b) {
    std::ostringstream os;
    os << std::left << std::setw(6) << "team" << std::setw(10) << "strategy" << std::right << std::setw(9)
       << "matches" << std::setw(6) << "wins" << std::setw(7) << "draws" << std::setw(10) << "timeouts"
       << std::setw(10) << "win_rate" << std::setw(12) << "mean_ticks" << std::setw(14) << "mean_latency"
       << std::setw(12) << "mean_goals" << std::setw(12) << "cnp_issued" << std::setw(14) << "cnp_completed"
       << '\n';
    os << std::fixed;
    for (const auto& [team, s] : b.teams) {
        os << std::left << std::setw(6) << team << std::setw(10) << strategy_name(s.strategy) << std::right
           << std::setw(9) << s.matches << std::setw(6) << s.wins << std::setw(7) << s.draws << std::setw(10)
           << s.timeouts << std::setw(10) << std::setprecision(3) << s.win_rate << std::setw(12)
           << std::setprecision(1) << s.mean_ticks << std::setw(14) << std::setprecision(3) << s.mean_latency
           << std::setw(12) << std::setprecision(1) << s.mean_goals << std::setw(12) << s.cnp_issued
           << std::setw(14) << s.cnp_completed << '\n';
    }
    return os.str();
}

// -------------------------------------------------------- spec validation

struct SpecReport {
    bool ok = false;
    std::vector<std::string> faults;
    std::string summary;
};

namespace detail {

inline int count_goals(const GoalNode& n) {
    int c = 1;
    for (const auto& ch : n.children) c += count_goals(ch);
    return c;
}

inline const char* op_name(GoalOperator op) {
    switch (op) {
    case GoalOperator::Sequence: return "seq";
    case GoalOperator::Choice: return "choice";
    case GoalOperator::Parallel: return "par";
    case GoalOperator::Leaf: return "leaf";
    }
    return "?";
}

inline void print_tree(std::ostringstream& os, const GoalNode& n, int depth) {
    os << std::string(static_cast<std::size_t>(4 + 2 * depth), ' ') << n.id << " [" << op_name(n.op);
    if (n.cardinality != 1) os << ", card " << n.cardinality;
    os << "]\n";
    for (const auto& c : n.children) print_tree(os, c, depth + 1);
}

} // namespace detail

inline SpecReport validate_spec(const nlohmann::json& doc) {
    SpecReport r;
    OrgSpec spec;
    try {
        spec = load_org_spec(doc);
    } catch (const SpecError& e) {
        r.faults = e.faults;
        return r;
    }
    r.ok = true;
    std::ostringstream os;
    int goals = 0, missions = 0;
    for (const auto& s : spec.schemes) {
        goals += detail::count_goals(s.root);
        missions += static_cast<int>(s.missions.size());
    }
    os << "roles: " << spec.structural.roles.size() << ", groups: " << spec.structural.groups.size()
       << ", schemes: " << spec.schemes.size() << ", goals: " << goals << ", missions: " << missions
       << ", deontic relations: " << spec.deontics.size() << "\n";
    for (const auto& g : spec.structural.groups) {
        os << "group " << g.name << ":";
        for (const auto& [role, card] : g.role_cardinalities)
            os << " " << role << "[" << card.first << "," << card.second << "]";
        os << "\n";
    }
    for (const auto& s : spec.schemes) {
        os << "scheme " << s.name << ":\n";
        detail::print_tree(os, s.root, 0);
        for (const auto& [m, gs] : s.missions) {
            os << "  mission " << m << ":";
            for (const auto& g : gs) os << " " << g;
            os << "\n";
        }
    }
    for (const auto& d : spec.deontics) {
        os << (d.modality == Modality::Obligation ? "obligation " : "permission ") << d.role << " -> " << d.mission;
        switch (d.tc.kind) {
        case TimeConstraint::Kind::Anytime: os << " (anytime)"; break;
        case TimeConstraint::Kind::Before: os << " (before " << d.tc.end << ")"; break;
        case TimeConstraint::Kind::During: os << " (during " << d.tc.start << ".." << d.tc.end << ")"; break;
        }
        os << "\n";
    }
    r.summary = os.str();
    return r;
}

inline SpecReport validate_spec(const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        return {false, {std::string("not valid JSON: ") + e.what()}, {}};
    } catch (const ConfigError& e) {
        return {false, {e.what()}, {}};
    }
    return validate_spec(doc);
}

} // namespace arena
