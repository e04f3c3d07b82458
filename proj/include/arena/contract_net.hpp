#pragma once

// Contract net for freeing a boxed-in agent: the stuck agent (initiator)
// calls for proposals, teammates (participants) bid their augmented path cost
// to a bomb cell next to the blocking box, and the cheapest bidder is awarded.

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arena/pathfinder.hpp"
#include "arena/world.hpp"

namespace arena {

struct FreeBoxTask {
    Cell box_cell;
    int requester = 0;

    friend bool operator==(const FreeBoxTask&, const FreeBoxTask&) = default;
};

struct CnpMessage {
    enum class Kind { Cfp, Propose, Refuse, Award, Reject, InformDone, InformFailure };
    Kind kind = Kind::Cfp;
    std::string task_id;
    int sender = 0;
    int receiver = 0;
    FreeBoxTask task;   // Cfp
    int deadline = 0;   // Cfp
    int bid = 0;        // Propose
    int winner = 0;     // Award
    std::string reason; // InformFailure

    friend bool operator==(const CnpMessage&, const CnpMessage&) = default;
};

inline const char* message_name(CnpMessage::Kind k) {
    switch (k) {
    case CnpMessage::Kind::Cfp: return "cfp";
    case CnpMessage::Kind::Propose: return "propose";
    case CnpMessage::Kind::Refuse: return "refuse";
    case CnpMessage::Kind::Award: return "award";
    case CnpMessage::Kind::Reject: return "reject";
    case CnpMessage::Kind::InformDone: return "inform_done";
    case CnpMessage::Kind::InformFailure: return "inform_failure";
    }
    return "?";
}

inline nlohmann::json to_json(const CnpMessage& m) {
    nlohmann::json j{{"task_id", m.task_id}, {"from", m.sender}, {"to", m.receiver}};
    switch (m.kind) {
    case CnpMessage::Kind::Cfp:
        j["box"] = {m.task.box_cell.x, m.task.box_cell.y};
        j["requester"] = m.task.requester;
        j["deadline"] = m.deadline;
        break;
    case CnpMessage::Kind::Propose: j["bid"] = m.bid; break;
    case CnpMessage::Kind::Award: j["winner"] = m.winner; break;
    case CnpMessage::Kind::InformFailure: j["reason"] = m.reason; break;
    default: break;
    }
    return j;
}

/// One line of a human-readable transcript, e.g. "t0 cfp 1->2 task=1.1 box=(2,1) deadline=2".
inline std::string transcript_line(int tick, const CnpMessage& m) {
    std::string s = "t" + std::to_string(tick) + " " + message_name(m.kind) + " " + std::to_string(m.sender) +
                    "->" + std::to_string(m.receiver) + " task=" + m.task_id;
    switch (m.kind) {
    case CnpMessage::Kind::Cfp:
        s += " box=" + to_string(m.task.box_cell) + " deadline=" + std::to_string(m.deadline);
        break;
    case CnpMessage::Kind::Propose: s += " bid=" + std::to_string(m.bid); break;
    case CnpMessage::Kind::Award: s += " winner=" + std::to_string(m.winner); break;
    case CnpMessage::Kind::InformFailure: s += " reason=" + m.reason; break;
    default: break;
    }
    return s;
}

/// Messages sent at tick t arrive at tick t+1, in send order.
class CnpMailbox {
public:
    void send(CnpMessage m, int now) { queue_.push_back({now + 1, std::move(m)}); }

    std::map<int, std::vector<CnpMessage>> deliver(int now) {
        std::map<int, std::vector<CnpMessage>> out;
        std::deque<Entry> later;
        for (auto& e : queue_) {
            if (e.deliver_at <= now) out[e.message.receiver].push_back(std::move(e.message));
            else later.push_back(std::move(e));
        }
        queue_ = std::move(later);
        return out;
    }

    bool empty() const { return queue_.empty(); }

private:
    struct Entry {
        int deliver_at;
        CnpMessage message;
    };
    std::deque<Entry> queue_;
};

struct CnpParams {
    int bid_window = 2;
    int backoff = 5;
    DangerWeights weights;
    int box_punishment = 5;
};

/// Non-Solid, non-Box cells 4-connected to `from`, sorted.
inline std::vector<Cell> open_region(const GridMap& grid, Cell from) {
    std::set<Cell> seen{from};
    std::deque<Cell> queue{from};
    while (!queue.empty()) {
        const Cell c = queue.front();
        queue.pop_front();
        for (Cell nb : neighbors(c))
            if (grid.passable(nb) && seen.insert(nb).second) queue.push_back(nb);
    }
    return {seen.begin(), seen.end()};
}

/// A FreeBoxTask when the agent's open region is fenced by at least one Box
/// and it cannot survive a bomb of its own placed where it stands. Only
/// terrain counts: live bombs and explosions are transient.
inline std::optional<FreeBoxTask> detect_stuck(const Percept& percept) {
    if (!percept.alive) return std::nullopt;
    WorldState w = percept.state();
    w.bombs.clear();
    w.explosions.clear();
    const auto region = open_region(w.grid, percept.position);
    std::set<Cell> boxes;
    for (Cell c : region)
        for (Cell nb : neighbors(c))
            if (w.grid.at(nb) == CellKind::Box) boxes.insert(nb);
    if (boxes.empty()) return std::nullopt;

    const BombState own{percept.self, percept.position, w.rules.fuse_ticks, w.rules.blast_range};
    if (is_safe_retreat(w, percept.position, own)) return std::nullopt;

    std::optional<std::pair<int, Cell>> best;
    for (Cell b : boxes) {
        int d = 0;
        bool any = false;
        for (const auto& a : w.agents) {
            if (!a.alive || a.team != percept.team || a.id == percept.self) continue;
            const int m = manhattan(a.position, b);
            d = any ? std::min(d, m) : m;
            any = true;
        }
        const std::pair<int, Cell> key{any ? d : 0, b};
        if (!best || key < *best) best = key;
    }
    return FreeBoxTask{best->second, percept.self};
}

inline std::vector<int> alive_teammates(const WorldState& w, int self) {
    const int team = w.agent(self).team;
    std::vector<int> out;
    for (const auto& a : w.agents)
        if (a.alive && a.team == team && a.id != self) out.push_back(a.id);
    return out;
}

// ---------------------------------------------------------------- initiator

struct InitiatorState {
    enum class Phase { Idle, Collecting, Awarded, Done, Failed };
    Phase phase = Phase::Idle;
    int self = 0;
    int seq = 0;
    std::string task_id;
    FreeBoxTask task;
    int deadline = 0;
    std::map<int, int> bids; // agent -> bid
    int winner = 0;
    int retry_at = 0;
    int issued = 0;
    int completed = 0;
};

inline const char* phase_name(InitiatorState::Phase p) {
    switch (p) {
    case InitiatorState::Phase::Idle: return "idle";
    case InitiatorState::Phase::Collecting: return "collecting";
    case InitiatorState::Phase::Awarded: return "awarded";
    case InitiatorState::Phase::Done: return "done";
    case InitiatorState::Phase::Failed: return "failed";
    }
    return "?";
}

struct InitiatorStep {
    InitiatorState state;
    std::vector<CnpMessage> outbox;
};

/// Advances the initiator one tick. `need` is the current detect_stuck result
/// and `teammates` the alive teammates.
inline InitiatorStep initiator_step(InitiatorState s, const std::vector<CnpMessage>& inbox, int now,
                                    const std::optional<FreeBoxTask>& need, const std::vector<int>& teammates,
                                    const CnpParams& params = {}) {
    using Phase = InitiatorState::Phase;
    std::vector<CnpMessage> out;
    auto msg = [&](CnpMessage::Kind k, int to) {
        CnpMessage m;
        m.kind = k;
        m.task_id = s.task_id;
        m.sender = s.self;
        m.receiver = to;
        return m;
    };

    for (const auto& m : inbox) {
        if (m.task_id != s.task_id || m.receiver != s.self) continue;
        switch (m.kind) {
        case CnpMessage::Kind::Propose:
            if (s.phase == Phase::Collecting && now <= s.deadline && m.sender != s.self) s.bids[m.sender] = m.bid;
            break;
        case CnpMessage::Kind::InformDone:
            if (s.phase == Phase::Awarded && m.sender == s.winner) {
                s.phase = Phase::Done;
                ++s.completed;
            }
            break;
        case CnpMessage::Kind::InformFailure:
            if (s.phase == Phase::Awarded && m.sender == s.winner) {
                s.phase = Phase::Failed;
                s.retry_at = now;
            }
            break;
        default: break;
        }
    }

    if (s.phase == Phase::Collecting && !need) {
        for (const auto& [agent, bid] : s.bids) out.push_back(msg(CnpMessage::Kind::Reject, agent));
        s.bids.clear();
        s.phase = Phase::Idle;
    }

    if (s.phase == Phase::Collecting && now >= s.deadline) {
        if (s.bids.empty()) {
            s.phase = Phase::Failed;
            s.retry_at = now + params.backoff;
        } else {
            std::pair<int, int> best{s.bids.begin()->second, s.bids.begin()->first};
            for (const auto& [agent, bid] : s.bids) best = std::min(best, {bid, agent});
            s.winner = best.second;
            CnpMessage award = msg(CnpMessage::Kind::Award, s.winner);
            award.winner = s.winner;
            out.push_back(award);
            for (const auto& [agent, bid] : s.bids)
                if (agent != s.winner) out.push_back(msg(CnpMessage::Kind::Reject, agent));
            s.phase = Phase::Awarded;
        }
    }

    if (s.phase == Phase::Awarded &&
        std::find(teammates.begin(), teammates.end(), s.winner) == teammates.end()) {
        s.phase = Phase::Failed;
        s.retry_at = now;
    }

    const bool may_issue = s.phase == Phase::Idle || s.phase == Phase::Done ||
                           (s.phase == Phase::Failed && now >= s.retry_at);
    if (need && may_issue) {
        s.task_id = std::to_string(s.self) + "." + std::to_string(++s.seq);
        s.task = *need;
        s.deadline = now + params.bid_window;
        s.bids.clear();
        s.winner = 0;
        s.phase = Phase::Collecting;
        ++s.issued;
        for (int t : teammates) {
            CnpMessage cfp = msg(CnpMessage::Kind::Cfp, t);
            cfp.task = s.task;
            cfp.deadline = s.deadline;
            out.push_back(cfp);
        }
    }
    return {std::move(s), std::move(out)};
}

// -------------------------------------------------------------- participant

struct AwardedTask {
    std::string task_id;
    FreeBoxTask task;
    Cell bomb_cell;
    bool bomb_placed = false;
};

struct ParticipantState {
    int self = 0;
    std::map<std::string, AwardedTask> proposals; // answered with Propose, awaiting verdict
    std::optional<AwardedTask> active;
    int completed = 0;
};

struct ParticipantStep {
    ParticipantState state;
    std::vector<CnpMessage> outbox;
    std::optional<AwardedTask> adopted;
};

/// Cheapest bomb cell next to the task's box, with its augmented cost. A
/// candidate must be Empty and bomb-free, lie outside the requester's region,
/// keep the requester out of the blast, and allow a safe retreat.
inline std::optional<std::pair<Cell, int>> best_bomb_cell(const WorldState& w, int self, const FreeBoxTask& task,
                                                          const CnpParams& params = {}) {
    const AgentBody& me = w.agent(self);
    const AgentBody* requester = w.find_agent(task.requester);
    std::vector<Cell> pocket;
    if (requester && requester->alive) pocket = open_region(w.grid, requester->position);
    const PunishmentMap danger =
        danger_punishments(w, base_punishments(w.grid, params.box_punishment), params.weights);

    std::optional<std::pair<int, Cell>> best;
    for (Cell c : neighbors(task.box_cell)) {
        if (w.grid.at(c) != CellKind::Empty || w.bomb_at(c)) continue;
        if (std::binary_search(pocket.begin(), pocket.end(), c)) continue;
        const BombState hypo{self, c, w.rules.fuse_ticks, w.rules.blast_range};
        if (requester && requester->alive) {
            const auto fp = blast_footprint(w.grid, hypo);
            if (std::binary_search(fp.begin(), fp.end(), requester->position)) continue;
        }
        if (!is_safe_retreat(w, c, hypo)) continue;
        const auto plan = plan_path(w.grid, me.position, c, danger);
        if (!plan) continue;
        const std::pair<int, Cell> key{plan->augmented_cost, c};
        if (!best || key < *best) best = key;
    }
    if (!best) return std::nullopt;
    return std::pair{best->second, best->first};
}

/// Handles the participant's inbox and progress on an awarded task.
inline ParticipantStep participant_step(ParticipantState s, const std::vector<CnpMessage>& inbox,
                                        const Percept& percept, const CnpParams& params = {}) {
    std::vector<CnpMessage> out;
    std::optional<AwardedTask> adopted;
    const WorldState& w = percept.state();
    auto reply = [&](CnpMessage::Kind k, const std::string& task_id, int to) {
        CnpMessage m;
        m.kind = k;
        m.task_id = task_id;
        m.sender = s.self;
        m.receiver = to;
        return m;
    };

    for (const auto& m : inbox) {
        if (m.receiver != s.self || m.sender == s.self) continue;
        switch (m.kind) {
        case CnpMessage::Kind::Cfp: {
            std::optional<std::pair<Cell, int>> offer;
            if (percept.alive && !s.active && !detect_stuck(percept))
                offer = best_bomb_cell(w, s.self, m.task, params);
            if (!offer) {
                out.push_back(reply(CnpMessage::Kind::Refuse, m.task_id, m.sender));
                break;
            }
            s.proposals[m.task_id] = AwardedTask{m.task_id, m.task, offer->first, false};
            CnpMessage p = reply(CnpMessage::Kind::Propose, m.task_id, m.sender);
            p.bid = offer->second;
            out.push_back(p);
            break;
        }
        case CnpMessage::Kind::Award: {
            auto it = s.proposals.find(m.task_id);
            if (it == s.proposals.end() || m.winner != s.self) break;
            if (s.active) {
                CnpMessage f = reply(CnpMessage::Kind::InformFailure, m.task_id, m.sender);
                f.reason = "busy";
                out.push_back(f);
            } else {
                s.active = it->second;
                adopted = it->second;
            }
            s.proposals.erase(it);
            break;
        }
        case CnpMessage::Kind::Reject: s.proposals.erase(m.task_id); break;
        default: break;
        }
    }

    if (s.active) {
        AwardedTask& t = *s.active;
        if (w.grid.at(t.task.box_cell) != CellKind::Box) {
            out.push_back(reply(CnpMessage::Kind::InformDone, t.task_id, t.task.requester));
            ++s.completed;
            s.active.reset();
        } else if (!percept.alive) {
            CnpMessage f = reply(CnpMessage::Kind::InformFailure, t.task_id, t.task.requester);
            f.reason = "dead";
            out.push_back(f);
            s.active.reset();
        } else if (!t.bomb_placed && w.live_bombs_owned(s.self) == 0) {
            const PunishmentMap danger =
                danger_punishments(w, base_punishments(w.grid, params.box_punishment), params.weights);
            if (percept.position != t.bomb_cell && !plan_path(w.grid, percept.position, t.bomb_cell, danger)) {
                CnpMessage f = reply(CnpMessage::Kind::InformFailure, t.task_id, t.task.requester);
                f.reason = "no_path";
                out.push_back(f);
                s.active.reset();
            }
        }
    }
    return {std::move(s), std::move(out), adopted};
}

/// World action that advances the active task: walk to the bomb cell, place
/// the bomb, then leave the retreat to the threat reflex (nullopt).
inline std::optional<ActionIntent> award_action(ParticipantState& s, const Percept& percept,
                                                const CnpParams& params = {}) {
    if (!s.active || !percept.alive) return std::nullopt;
    AwardedTask& t = *s.active;
    const WorldState& w = percept.state();
    if (t.bomb_placed || w.live_bombs_owned(s.self) > 0) return std::nullopt;
    if (percept.position == t.bomb_cell) {
        if (percept.bombs_available == 0) return ActionIntent::wait();
        t.bomb_placed = true;
        return ActionIntent::place_bomb();
    }
    const PunishmentMap danger = danger_punishments(w, base_punishments(w.grid, params.box_punishment), params.weights);
    const auto plan = plan_path(w.grid, percept.position, t.bomb_cell, danger);
    if (!plan) return std::nullopt;
    return next_step(*plan, percept.position, w.grid);
}

} // namespace arena
