#pragma once

// Bomberman agents. ACMAS agents run a self-contained plan library; OCMAS
// agents run goal plans triggered by organizational events and report goal
// completion back to the organization. Both share the same internal actions,
// safety reflexes and contract-net behaviour.

#include <climits>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arena/beliefs.hpp"
#include "arena/contract_net.hpp"
#include "arena/orgmodel.hpp"
#include "arena/pathfinder.hpp"
#include "arena/world.hpp"

namespace arena {

enum class Strategy { Acmas, Ocmas };

inline const char* strategy_name(Strategy s) { return s == Strategy::Acmas ? "acmas" : "ocmas"; }

enum class AgentRole { Explorer, Attacker, Defender };

inline const char* role_name(AgentRole r) {
    switch (r) {
    case AgentRole::Explorer: return "explorer";
    case AgentRole::Attacker: return "attacker";
    case AgentRole::Defender: return "defender";
    }
    return "?";
}

/// Role by position within the team (ids ascending): first explorer, fourth
/// defender, the rest attackers.
inline AgentRole role_for_index(std::size_t index) {
    if (index == 0) return AgentRole::Explorer;
    if (index == 3) return AgentRole::Defender;
    return AgentRole::Attacker;
}

struct AgentParams {
    int box_punishment = 5;
    DangerWeights weights;
    CnpParams cnp;
    int defend_radius = 6;
};

struct AgentMetrics {
    int goals_satisfied = 0;
    std::vector<int> latencies;
    int idle_ticks = 0;
};

namespace plans {

inline Term v(const char* name) { return Term::var(name); }
inline Term a(const char* name) { return Term::atom(name); }
inline BeliefAtom g(const char* name, std::vector<Term> args = {}) { return atom(name, std::move(args)); }

inline Trigger achieve(const char* goal, Annotations ann = {}) {
    return {EventKind::GoalAddition, g(goal), std::move(ann)};
}
inline Trigger added(BeliefAtom pattern, Annotations ann = {}) {
    return {EventKind::BeliefAddition, std::move(pattern), std::move(ann)};
}

/// Agent-centered library: each goal loops by re-posting itself.
inline std::vector<PlanRule> acmas_library() {
    using S = Step;
    return {
        {"explore", achieve("exploreMap"), {},
         {S::subgoal(g("findUnexploredArea")), S::subgoal(g("moveToUnexploredArea")), S::subgoal(g("exploreMap"))}},
        {"find", achieve("findUnexploredArea"), {}, {S::action(g("choose_unexplored"))}},
        {"move", achieve("moveToUnexploredArea"), {Literal::pos(g("explore_target", {v("X"), v("Y")}))},
         {S::action(g("travel", {v("X"), v("Y")})), S::del(g("explore_target", {v("X"), v("Y")}))}},
        {"attack", achieve("attack"), {},
         {S::subgoal(g("selectEnemy")), S::subgoal(g("approachEnemy")), S::subgoal(g("bombEnemy")),
          S::subgoal(g("attack"))}},
        {"defend", achieve("defend"), {},
         {S::subgoal(g("selectEnemy")), S::subgoal(g("approachEnemy")), S::subgoal(g("bombEnemy")),
          S::subgoal(g("defend"))}},
        {"select_near", achieve("selectEnemy"), {Literal::pos(g("myrole", {a("defender")}))},
         {S::action(g("select_enemy", {Term::integer(1)}))}},
        {"select", achieve("selectEnemy"), {}, {S::action(g("select_enemy", {Term::integer(0)}))}},
        {"approach", achieve("approachEnemy"), {Literal::pos(g("enemy", {v("E")}))},
         {S::action(g("approach_enemy", {v("E")}))}},
        {"bomb", achieve("bombEnemy"), {Literal::pos(g("enemy", {v("E")}))}, {S::action(g("bomb_enemy", {v("E")}))}},
    };
}

/// Organization-centered library: goals arrive from the organization and
/// each plan ends by reporting the goal satisfied.
inline std::vector<PlanRule> ocmas_library() {
    using S = Step;
    auto report = [](const char* goal) { return S::org(g("set_goal_state", {v("S"), a(goal)})); };
    const Annotations in_scheme{{"scheme", v("S")}};
    return {
        {"setup_leader", achieve("setup"),
         {Literal::pos(g("me", {v("Me")})), Literal::pos(g("leader", {v("Me")})),
          Literal::pos(g("group_spec", {v("GS")}))},
         {S::org(g("create_group", {v("GS")}))}},
        {"setup", achieve("setup"), {}, {}},
        {"join", added(g("group", {v("GS"), v("G")})), {Literal::pos(g("myrole", {v("R")}))},
         {S::org(g("adopt_role", {v("R"), v("G")}))}},
        {"open_scheme", added(g("play", {v("Me"), v("R"), v("G")})),
         {Literal::pos(g("me", {v("Me")})), Literal::pos(g("role_scheme", {v("R"), v("Spec")}))},
         {S::org(g("create_scheme", {v("Spec"), v("G")}))}},
        {"commit", added(g("scheme", {v("Spec"), v("S"), v("G")}), {{"creator", v("Me")}}),
         {Literal::pos(g("me", {v("Me")})), Literal::pos(g("myrole", {v("R")})),
          Literal::pos(g("role_mission", {v("R"), v("Spec"), v("M")}))},
         {S::org(g("commit_mission", {v("M"), v("S")}))}},
        {"restart", added(g("schemeFinished", {v("Spec"), v("S")}), {{"creator", v("Me")}}),
         {Literal::pos(g("me", {v("Me")})), Literal::pos(g("scheme", {v("Spec"), v("S"), v("G")}))},
         {S::org(g("create_scheme", {v("Spec"), v("G")}))}},
        {"exploreMap", achieve("exploreMap", in_scheme), {}, {report("exploreMap")}},
        {"find", achieve("findUnexploredArea", in_scheme), {},
         {S::action(g("choose_unexplored")), report("findUnexploredArea")}},
        {"move", achieve("moveToUnexploredArea", in_scheme), {Literal::pos(g("explore_target", {v("X"), v("Y")}))},
         {S::action(g("travel", {v("X"), v("Y")})), S::del(g("explore_target", {v("X"), v("Y")})),
          report("moveToUnexploredArea")}},
        {"eliminateEnemy", achieve("eliminateEnemy", in_scheme), {}, {report("eliminateEnemy")}},
        {"select_near", achieve("selectEnemy", in_scheme), {Literal::pos(g("myrole", {a("defender")}))},
         {S::action(g("select_enemy", {Term::integer(1)})), report("selectEnemy")}},
        {"select", achieve("selectEnemy", in_scheme), {},
         {S::action(g("select_enemy", {Term::integer(0)})), report("selectEnemy")}},
        {"approach", achieve("approachEnemy", in_scheme), {Literal::pos(g("enemy", {v("E")}))},
         {S::action(g("approach_enemy", {v("E")})), report("approachEnemy")}},
        {"bomb", achieve("bombEnemy", in_scheme), {Literal::pos(g("enemy", {v("E")}))},
         {S::action(g("bomb_enemy", {v("E")})), report("bombEnemy")}},
    };
}

} // namespace plans

/// Role-derived beliefs an OCMAS agent needs: which scheme it opens for its
/// role and which mission it commits to there. Obligations take precedence.
inline std::vector<BeliefAtom> org_beliefs(const OrgSpec& spec, const std::string& role) {
    std::vector<BeliefAtom> out;
    if (!spec.structural.groups.empty())
        out.push_back(atom("group_spec", {Term::atom(spec.structural.groups.front().name)}));
    std::vector<const DeonticRelation*> rels;
    for (const auto& d : spec.deontics)
        if (d.role == role && d.modality == Modality::Obligation) rels.push_back(&d);
    for (const auto& d : spec.deontics)
        if (d.role == role && d.modality == Modality::Permission) rels.push_back(&d);
    bool have_scheme = false;
    for (const auto* d : rels) {
        for (const auto& s : spec.schemes) {
            if (!s.missions.contains(d->mission)) continue;
            out.push_back(atom("role_mission", {Term::atom(role), Term::atom(s.name), Term::atom(d->mission)}));
            if (!have_scheme) {
                out.push_back(atom("role_scheme", {Term::atom(role), Term::atom(s.name)}));
                have_scheme = true;
            }
        }
    }
    return out;
}

/// Hooks the match runner provides.
struct AgentHooks {
    std::function<bool(int agent, const BeliefAtom& directive)> org;
    std::function<void(const char* source, const std::string& kind, nlohmann::json payload)> log;
};

class ArenaAgent final : public AgentContext {
public:
    struct Setup {
        int id = 0;
        int team = 0;
        AgentRole role = AgentRole::Attacker;
        Strategy strategy = Strategy::Acmas;
        bool leader = false;
        Cell home;
        std::uint64_t seed = 0;
        AgentParams params;
        const OrgSpec* org = nullptr;
    };

    struct Decision {
        ActionIntent intent;
        std::vector<CnpMessage> outbox;
        const char* source = "idle"; // which layer chose the action
    };

    explicit ArenaAgent(Setup s)
        : setup_(std::move(s)),
          library_(setup_.strategy == Strategy::Acmas ? plans::acmas_library() : plans::ocmas_library()),
          rng_(setup_.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(setup_.id)) {
        initiator_.self = setup_.id;
        participant_.self = setup_.id;
        auto& b = reasoner_.beliefs();
        b.add(atom("me", {Term::integer(setup_.id)}));
        b.add(atom("myrole", {Term::atom(role_name(setup_.role))}));
        if (setup_.leader) b.add(atom("leader", {Term::integer(setup_.id)}));
        if (setup_.org)
            for (auto& a : org_beliefs(*setup_.org, role_name(setup_.role))) b.add(a);
        reasoner_.on_event_failed = [this](const Event& e) { event_failed(e); };
        if (setup_.strategy == Strategy::Ocmas) reasoner_.post(goal_event(atom("setup", {})));
    }

    int id() const { return setup_.id; }
    int team() const { return setup_.team; }
    AgentRole role() const { return setup_.role; }
    Strategy strategy() const { return setup_.strategy; }
    const AgentMetrics& metrics() const { return metrics_; }
    const InitiatorState& initiator() const { return initiator_; }
    const ParticipantState& participant() const { return participant_; }
    const Reasoner& reasoner() const { return reasoner_; }
    Reasoner& reasoner() { return reasoner_; }
    AgentHooks& hooks() { return hooks_; }

    /// Organizational event from the mediator, turned into a BDI event.
    void receive(const OrgEvent& e) {
        auto& b = reasoner_.beliefs();
        auto believe = [&](BeliefAtom a, Annotations ann = {}) {
            b.add(a);
            reasoner_.post(belief_event(std::move(a), std::move(ann)));
        };
        switch (e.kind) {
        case OrgEvent::Kind::GroupCreated:
            believe(atom("group", {Term::atom(e.spec), Term::integer(e.group_id)}),
                    {{"creator", Term::integer(e.creator)}});
            break;
        case OrgEvent::Kind::RoleAdopted:
            believe(atom("play", {Term::integer(e.agent), Term::atom(e.role), Term::integer(e.group_id)}));
            break;
        case OrgEvent::Kind::SchemeCreated:
            believe(atom("scheme", {Term::atom(e.spec), Term::integer(e.scheme_id), Term::integer(e.group_id)}),
                    {{"creator", Term::integer(e.creator)}});
            break;
        case OrgEvent::Kind::GoalAddition:
            reasoner_.post(goal_event(atom(e.goal, {}), {{"scheme", Term::integer(e.scheme_id)}}));
            break;
        case OrgEvent::Kind::SchemeFinished:
            believe(atom("schemeFinished", {Term::atom(e.spec), Term::integer(e.scheme_id)}),
                    {{"creator", Term::integer(e.creator)}});
            break;
        case OrgEvent::Kind::OrgError: believe(atom("orgError", {Term::atom(e.code)})); break;
        }
    }

    /// One decision: contract net, reflexes, then the reasoner, then the
    /// safety gate.
    Decision decide(const Percept& percept, const std::vector<CnpMessage>& inbox) {
        percept_ = &percept;
        const WorldState& w = percept.state();
        Decision out;
        retry_failed_goals();
        refresh_beliefs(percept);
        danger_ = danger_punishments(w, base_punishments(w.grid, setup_.params.box_punishment),
                                     setup_.params.weights);
        const ThreatMap threats(w);
        explored_.insert(percept.position);
        for (Cell c : neighbors(percept.position)) explored_.insert(c);

        auto ps = participant_step(std::move(participant_), inbox, percept, setup_.params.cnp);
        participant_ = std::move(ps.state);
        out.outbox = std::move(ps.outbox);

        const auto need = detect_stuck(percept);
        auto is = initiator_step(std::move(initiator_), inbox, percept.tick, need, alive_teammates(w, setup_.id),
                                 setup_.params.cnp);
        initiator_ = std::move(is.state);
        out.outbox.insert(out.outbox.end(), is.outbox.begin(), is.outbox.end());

        if (percept.position != last_position_) bumps_ = 0;
        last_position_ = percept.position;

        std::optional<ActionIntent> chosen;
        if (threats.ever_threatened(percept.position)) {
            if (auto route = escape(w, threats, percept.position, 0)) {
                const Cell next = route->size() > 1 ? (*route)[1] : percept.position;
                chosen = next == percept.position ? ActionIntent::wait()
                                                  : ActionIntent::move(direction_to(percept.position, next));
                out.source = "reflex";
            }
        }
        if (!chosen) {
            if (auto a = award_action(participant_, percept, setup_.params.cnp)) {
                chosen = a;
                out.source = "cnp";
            }
        }
        if (!chosen && need) {
            chosen = ActionIntent::wait();
            out.source = "stuck";
        }
        if (!chosen) {
            if (setup_.strategy == Strategy::Acmas && !reasoner_.busy() && reasoner_.pending_events() == 0)
                reasoner_.post(goal_event(atom(root_goal(), {})));
            chosen = reasoner_.cycle(*this);
            if (chosen) out.source = "bdi";
            else if (!reasoner_.busy()) ++metrics_.idle_ticks;
        }
        if (bumps_ >= 2 && chosen && chosen->is_move() && std::string_view(out.source) != "reflex") {
            chosen = sidestep(percept, threats);
            out.source = "sidestep";
            bumps_ = 0;
        }
        out.intent = gate(chosen.value_or(ActionIntent::wait()), percept, threats);
        percept_ = nullptr;
        return out;
    }

    /// The world did not carry out the action this agent submitted.
    void action_refused(const ActionIntent& intent) {
        if (intent.is_move()) ++bumps_;
        reasoner_.action_refused();
    }

    // AgentContext
    BeliefBase& beliefs() override { return reasoner_.beliefs(); }
    const std::vector<PlanRule>& library() const override { return library_; }

    ActionResult perform(const BeliefAtom& action) override {
        const auto& args = action.args;
        if (action.predicate == "choose_unexplored") return choose_unexplored();
        if (action.predicate == "travel" && args.size() == 2 && args[0].is_int() && args[1].is_int())
            return travel(Cell{static_cast<int>(args[0].value()), static_cast<int>(args[1].value())});
        if (action.predicate == "select_enemy" && args.size() == 1 && args[0].is_int())
            return select_enemy(args[0].value() != 0);
        if (action.predicate == "approach_enemy" && args.size() == 1 && args[0].is_int())
            return approach_enemy(static_cast<int>(args[0].value()));
        if (action.predicate == "bomb_enemy" && args.size() == 1 && args[0].is_int())
            return bomb_enemy(static_cast<int>(args[0].value()));
        return ActionResult::failed();
    }

    void send(const Term& to, const BeliefAtom& content) override {
        if (hooks_.log) hooks_.log("agent", "send", {{"agent", setup_.id}, {"to", to.to_string()}, {"content", content.to_string()}});
    }

    bool org_directive(const BeliefAtom& directive) override {
        if (setup_.strategy != Strategy::Ocmas || !hooks_.org) return false;
        return hooks_.org(setup_.id, directive);
    }

    void post(Event e) override { reasoner_.post(std::move(e)); }

    void goal_completed(const Event& e) override {
        if (setup_.strategy != Strategy::Acmas) return;
        ++metrics_.goals_satisfied;
        if (!pending_completion_) pending_completion_ = percept_ ? percept_->tick : 0;
        if (hooks_.log) hooks_.log("agent", "goal_completed", {{"agent", setup_.id}, {"goal", e.atom.to_string()}});
    }

    void goal_posted(const Event& e) override {
        if (setup_.strategy != Strategy::Acmas) return;
        const int now = percept_ ? percept_->tick : 0;
        if (pending_completion_) {
            metrics_.latencies.push_back(now - *pending_completion_);
            pending_completion_.reset();
        }
        if (hooks_.log) hooks_.log("agent", "goal_posted", {{"agent", setup_.id}, {"goal", e.atom.to_string()}});
    }

private:
    const char* root_goal() const {
        switch (setup_.role) {
        case AgentRole::Explorer: return "exploreMap";
        case AgentRole::Defender: return "defend";
        case AgentRole::Attacker: return "attack";
        }
        return "attack";
    }

    void refresh_beliefs(const Percept& p) {
        auto& b = reasoner_.beliefs();
        b.add(cell_atom("pos", p.position));
        b.add(atom("bombs", {Term::integer(p.bombs_available)}));
    }

    void event_failed(const Event& e) {
        if (e.kind == EventKind::BeliefAddition) return;
        if (e.annotations.contains("scheme")) retry_.push_back({EventKind::GoalAddition, e.atom, e.annotations});
    }

    void retry_failed_goals() {
        for (auto& e : retry_) reasoner_.post(std::move(e));
        retry_.clear();
    }

    const WorldState& world() const { return percept_->state(); }

    std::uint64_t draw(std::uint64_t n) { return rng_() % n; }

    void clear_navigation() {
        auto& b = reasoner_.beliefs();
        b.remove_all("target");
        b.remove_all("intermediate");
        b.remove_all("clear");
    }

    // Nearest unexplored open cell by augmented cost plus a small random
    // jitter. Once every reachable cell is explored the memory starts over.
    ActionResult choose_unexplored() {
        const WorldState& w = world();
        const Cell pos = percept_->position;
        const auto cost = cost_field(w.grid, pos, danger_);
        for (int pass = 0; pass < 2; ++pass) {
            std::optional<std::pair<long, Cell>> best;
            for (std::size_t i = 0; i < w.grid.size(); ++i) {
                const Cell c = w.grid.cell(i);
                if (w.grid.at(c) != CellKind::Empty || cost[i] == INT_MAX || explored_.contains(c)) continue;
                const std::pair<long, Cell> key{static_cast<long>(cost[i]) + static_cast<long>(draw(3)), c};
                if (!best || key < *best) best = key;
            }
            if (best) {
                auto& b = reasoner_.beliefs();
                b.remove_all("explore_target");
                b.add(cell_atom("explore_target", best->second));
                return ActionResult::completed();
            }
            explored_.clear();
            explored_.insert(pos);
            for (Cell c : neighbors(pos)) explored_.insert(c);
        }
        return ActionResult::failed();
    }

    // Fig. 3 navigation: replans every tick against current danger and keeps
    // the pos/target/intermediate/clear beliefs decide_move reads.
    ActionResult travel(Cell target) {
        const WorldState& w = world();
        const Cell pos = percept_->position;
        if (!w.grid.in_bounds(target) || w.grid.at(target) == CellKind::Solid) return ActionResult::failed();
        auto& b = reasoner_.beliefs();
        b.add(cell_atom("target", target));
        const auto plan = plan_path(w.grid, pos, target, danger_);
        if (!plan) {
            clear_navigation();
            return ActionResult::failed();
        }
        const auto old = b.find("intermediate");
        if (plan->intermediate && w.grid.at(plan->intermediate->box_cell) == CellKind::Box) {
            const BeliefAtom now_at = cell_atom("intermediate", plan->intermediate->bomb_cell);
            if (old && old->args != now_at.args) b.remove(atom("clear", old->args));
            b.add(now_at);
        } else if (old) {
            b.add(atom("clear", old->args));
            b.remove_all("intermediate");
        }
        switch (decide_move(b)) {
        case MoveDecision::Done: clear_navigation(); return ActionResult::completed();
        case MoveDecision::PlaceBombAndRetreat: return ActionResult::running(ActionIntent::place_bomb());
        case MoveDecision::WaitForBomb: return ActionResult::running(ActionIntent::wait());
        case MoveDecision::TowardIntermediate:
        case MoveDecision::TowardTarget: break;
        }
        return ActionResult::running(next_step(*plan, pos, w.grid));
    }

    // Closest enemy by augmented cost; with `nearby` only enemies within the
    // defend radius of home.
    ActionResult select_enemy(bool nearby) {
        const WorldState& w = world();
        const auto cost = cost_field(w.grid, percept_->position, danger_);
        std::optional<std::pair<int, int>> best;
        for (const auto& a : w.agents) {
            if (!a.alive || a.team == setup_.team) continue;
            const int c = cost[w.grid.index(a.position)];
            if (c == INT_MAX) continue;
            if (nearby && manhattan(a.position, setup_.home) > setup_.params.defend_radius) continue;
            if (!best || std::pair(c, a.id) < *best) best = {c, a.id};
        }
        if (!best) return ActionResult::failed();
        auto& b = reasoner_.beliefs();
        b.remove_all("enemy");
        b.add(atom("enemy", {Term::integer(best->second)}));
        return ActionResult::completed();
    }

    bool in_blast_of_own(Cell enemy_cell) const {
        const WorldState& w = world();
        const BombState hypo{setup_.id, percept_->position, w.rules.fuse_ticks, w.rules.blast_range};
        const auto fp = blast_footprint(w.grid, hypo);
        return std::binary_search(fp.begin(), fp.end(), enemy_cell);
    }

    ActionResult approach_enemy(int enemy) {
        const WorldState& w = world();
        const AgentBody* e = w.find_agent(enemy);
        if (!e || !e->alive) {
            clear_navigation();
            return ActionResult::completed();
        }
        if (in_blast_of_own(e->position)) {
            clear_navigation();
            return ActionResult::completed();
        }
        return travel(e->position);
    }

    ActionResult bomb_enemy(int enemy) {
        const WorldState& w = world();
        const AgentBody* e = w.find_agent(enemy);
        if (!e || !e->alive || !in_blast_of_own(e->position)) return ActionResult::completed();
        if (percept_->bombs_available == 0) return ActionResult::released(ActionIntent::wait());
        return ActionResult::released(ActionIntent::place_bomb());
    }

    // Escape that steers around other agents when possible.
    std::optional<std::vector<Cell>> escape(const WorldState& w, const ThreatMap& threats, Cell from,
                                            int first_move_tick) const {
        WorldState crowded = w;
        for (const auto& a : w.agents)
            if (a.alive && a.id != setup_.id) crowded.grid.set(a.position, CellKind::Solid);
        if (auto r = escape_route(crowded, threats, from, first_move_tick)) return r;
        return escape_route(w, threats, from, first_move_tick);
    }

    bool bomb_is_survivable(const WorldState& w, Cell pos) const {
        WorldState hypo = w;
        hypo.bombs.push_back({setup_.id, pos, w.rules.fuse_ticks + 1, w.rules.blast_range});
        const ThreatMap threats(hypo);
        return escape(hypo, threats, pos, 1).has_value();
    }

    // Random free neighbour (or staying put) after repeated bumps.
    ActionIntent sidestep(const Percept& p, const ThreatMap& threats) {
        const WorldState& w = p.state();
        std::vector<ActionIntent> options{ActionIntent::wait()};
        for (Cell nb : neighbors(p.position)) {
            if (!w.grid.passable(nb) || w.bomb_at(nb) || w.alive_agent_at(nb) || threats.ever_threatened(nb))
                continue;
            options.push_back(ActionIntent::move(direction_to(p.position, nb)));
        }
        return options[draw(options.size())];
    }

    // Never step into a cell that will be hit while currently safe, and never
    // drop a bomb without an escape or onto a teammate.
    ActionIntent gate(ActionIntent intent, const Percept& p, const ThreatMap& threats) const {
        const WorldState& w = p.state();
        if (intent.kind == ActionIntent::Kind::Move) {
            const Cell to = step(p.position, intent.direction);
            if (threats.unsafe(to, 0)) return ActionIntent::wait();
            if (threats.ever_threatened(to) && !threats.ever_threatened(p.position)) return ActionIntent::wait();
        }
        if (intent.kind == ActionIntent::Kind::PlaceBomb) {
            if (p.bombs_available == 0 || w.bomb_at(p.position)) return ActionIntent::wait();
            const BombState hypo{setup_.id, p.position, w.rules.fuse_ticks, w.rules.blast_range};
            const auto fp = blast_footprint(w.grid, hypo);
            for (const auto& a : w.agents)
                if (a.alive && a.team == setup_.team && a.id != setup_.id &&
                    std::binary_search(fp.begin(), fp.end(), a.position))
                    return ActionIntent::wait();
            if (!bomb_is_survivable(w, p.position)) return ActionIntent::wait();
        }
        return intent;
    }

    Setup setup_;
    std::vector<PlanRule> library_;
    Reasoner reasoner_;
    std::mt19937_64 rng_;
    AgentHooks hooks_;
    AgentMetrics metrics_;
    InitiatorState initiator_;
    ParticipantState participant_;
    std::set<Cell> explored_;
    std::vector<Event> retry_;
    PunishmentMap danger_;
    std::optional<int> pending_completion_;
    Cell last_position_{-1, -1};
    int bumps_ = 0;
    const Percept* percept_ = nullptr;
};

} // namespace arena
