#pragma once

// A small AgentSpeak-style reasoning substrate: ground belief base, plan rules
// "trigger : context <- body", applicable-plan selection and a single-stack
// intention runner that releases at most one world action per tick.

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "arena/world.hpp"

namespace arena {

class MissingBelief : public Error {
public:
    using Error::Error;
};

/// IntConst, Atom, Var or Wildcard ('_').
class Term {
public:
    enum class Kind { Int, Atom, Var, Wildcard };

    static Term integer(std::int64_t v) { return Term(Kind::Int, v, {}); }
    static Term atom(std::string name) { return Term(Kind::Atom, 0, std::move(name)); }
    static Term var(std::string name) { return Term(Kind::Var, 0, std::move(name)); }
    static Term any() { return Term(Kind::Wildcard, 0, {}); }

    Kind kind() const { return kind_; }
    bool is_int() const { return kind_ == Kind::Int; }
    bool is_var() const { return kind_ == Kind::Var; }
    bool is_wildcard() const { return kind_ == Kind::Wildcard; }
    bool is_ground() const { return kind_ == Kind::Int || kind_ == Kind::Atom; }
    std::int64_t value() const { return value_; }
    const std::string& name() const { return name_; }

    std::string to_string() const {
        switch (kind_) {
        case Kind::Int: return std::to_string(value_);
        case Kind::Atom:
        case Kind::Var: return name_;
        case Kind::Wildcard: return "_";
        }
        return "?";
    }

    friend auto operator<=>(const Term&, const Term&) = default;

private:
    Term(Kind k, std::int64_t v, std::string n) : kind_(k), value_(v), name_(std::move(n)) {}

    Kind kind_;
    std::int64_t value_;
    std::string name_;
};

inline Term operator""_t(unsigned long long v) { return Term::integer(static_cast<std::int64_t>(v)); }

/// Variable name -> ground term.
using Substitution = std::map<std::string, Term>;

inline Term apply(const Term& t, const Substitution& s) {
    if (t.is_var()) {
        if (auto it = s.find(t.name()); it != s.end()) return it->second;
    }
    return t;
}

struct BeliefAtom {
    std::string predicate;
    std::vector<Term> args;

    std::string to_string() const {
        std::string out = predicate;
        if (!args.empty()) {
            out += "(";
            for (std::size_t i = 0; i < args.size(); ++i) {
                if (i) out += ",";
                out += args[i].to_string();
            }
            out += ")";
        }
        return out;
    }
    bool is_ground() const {
        return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
    }
    friend auto operator<=>(const BeliefAtom&, const BeliefAtom&) = default;
};

inline BeliefAtom atom(std::string predicate, std::vector<Term> args = {}) {
    return {std::move(predicate), std::move(args)};
}

inline BeliefAtom apply(const BeliefAtom& a, const Substitution& s) {
    BeliefAtom out{a.predicate, {}};
    out.args.reserve(a.args.size());
    for (const auto& t : a.args) out.args.push_back(apply(t, s));
    return out;
}

/// One-way match of `pattern` against a ground term, extending `s`.
inline bool match(const Term& pattern, const Term& ground, Substitution& s) {
    switch (pattern.kind()) {
    case Term::Kind::Wildcard: return true;
    case Term::Kind::Var: {
        auto [it, inserted] = s.emplace(pattern.name(), ground);
        return inserted || it->second == ground;
    }
    default: return pattern == ground;
    }
}

inline bool match(const BeliefAtom& pattern, const BeliefAtom& ground, Substitution& s) {
    if (pattern.predicate != ground.predicate || pattern.args.size() != ground.args.size()) return false;
    for (std::size_t i = 0; i < pattern.args.size(); ++i)
        if (!match(pattern.args[i], ground.args[i], s)) return false;
    return true;
}

/// Ground atom store. pos/2, target/2, intermediate/2 and bombs/1 are
/// functional: adding one replaces the previous value.
class BeliefBase {
public:
    bool add(const BeliefAtom& a) {
        if (is_functional(a)) {
            for (auto it = atoms_.begin(); it != atoms_.end();) {
                if (it->predicate == a.predicate && it->args.size() == a.args.size() && *it != a)
                    it = atoms_.erase(it);
                else
                    ++it;
            }
        }
        return atoms_.insert(a).second;
    }
    bool remove(const BeliefAtom& a) { return atoms_.erase(a) > 0; }
    void remove_all(const std::string& predicate) {
        std::erase_if(atoms_, [&](const BeliefAtom& a) { return a.predicate == predicate; });
    }
    bool contains(const BeliefAtom& a) const { return atoms_.contains(a); }
    const std::set<BeliefAtom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

    std::optional<BeliefAtom> find(const std::string& predicate) const {
        for (const auto& a : atoms_)
            if (a.predicate == predicate) return a;
        return std::nullopt;
    }

    static bool is_functional(const BeliefAtom& a) {
        return (a.args.size() == 2 && (a.predicate == "pos" || a.predicate == "target" ||
                                       a.predicate == "intermediate")) ||
               (a.args.size() == 1 && a.predicate == "bombs");
    }

private:
    std::set<BeliefAtom> atoms_;
};

/// Every extension of `bindings` under which `pattern` is in `base`, in
/// sorted-atom order.
inline std::vector<Substitution> unify(const BeliefAtom& pattern, const BeliefBase& base,
                                       const Substitution& bindings = {}) {
    std::vector<Substitution> out;
    const BeliefAtom p = apply(pattern, bindings);
    for (const auto& a : base.atoms()) {
        Substitution s = bindings;
        if (match(p, a, s)) out.push_back(std::move(s));
    }
    return out;
}

enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };

/// Arithmetic guard `lhs op rhs + offset`; both sides must be bound integers.
struct Guard {
    Term lhs;
    CmpOp op = CmpOp::Eq;
    Term rhs;
    std::int64_t offset = 0;

    bool holds(const Substitution& s) const {
        const Term l = apply(lhs, s), r = apply(rhs, s);
        if (!l.is_int() || !r.is_int()) {
            if (op == CmpOp::Eq && offset == 0 && l.is_ground() && r.is_ground()) return l == r;
            if (op == CmpOp::Ne && offset == 0 && l.is_ground() && r.is_ground()) return l != r;
            return false;
        }
        const std::int64_t a = l.value(), b = r.value() + offset;
        switch (op) {
        case CmpOp::Lt: return a < b;
        case CmpOp::Le: return a <= b;
        case CmpOp::Gt: return a > b;
        case CmpOp::Ge: return a >= b;
        case CmpOp::Eq: return a == b;
        case CmpOp::Ne: return a != b;
        }
        return false;
    }
};

/// Context literal: a positive pattern, a negated pattern (negation as
/// failure) or a guard.
struct Literal {
    enum class Kind { Positive, Negated, Guard };
    Kind kind = Kind::Positive;
    BeliefAtom pattern;
    Guard guard;

    static Literal pos(BeliefAtom a) { return {Kind::Positive, std::move(a), no_guard()}; }
    static Literal neg(BeliefAtom a) { return {Kind::Negated, std::move(a), no_guard()}; }
    static Literal test(Term lhs, CmpOp op, Term rhs, std::int64_t offset = 0) {
        return {Kind::Guard, BeliefAtom{}, Guard{std::move(lhs), op, std::move(rhs), offset}};
    }

private:
    static Guard no_guard() { return Guard{Term::any(), CmpOp::Eq, Term::any(), 0}; }
};

using Context = std::vector<Literal>;

/// bombs(N_{>0}) shorthand: bombs(N) & N > 0.
inline Context bombs_positive(const std::string& var) {
    return {Literal::pos(atom("bombs", {Term::var(var)})), Literal::test(Term::var(var), CmpOp::Gt, 0_t)};
}

/// All solutions of a conjunction, depth-first, left to right.
inline std::vector<Substitution> solve(const Context& context, const BeliefBase& base,
                                       const Substitution& bindings = {}) {
    std::vector<Substitution> frontier{bindings};
    for (const auto& lit : context) {
        std::vector<Substitution> next;
        for (const auto& s : frontier) {
            switch (lit.kind) {
            case Literal::Kind::Positive: {
                auto ext = unify(lit.pattern, base, s);
                next.insert(next.end(), std::make_move_iterator(ext.begin()), std::make_move_iterator(ext.end()));
                break;
            }
            case Literal::Kind::Negated:
                if (unify(lit.pattern, base, s).empty()) next.push_back(s);
                break;
            case Literal::Kind::Guard:
                if (lit.guard.holds(s)) next.push_back(s);
                break;
            }
        }
        frontier = std::move(next);
        if (frontier.empty()) break;
    }
    return frontier;
}

using Annotations = std::map<std::string, Term>;

enum class EventKind { GoalAddition, BeliefAddition, GoalFailure };

struct Event {
    EventKind kind = EventKind::GoalAddition;
    BeliefAtom atom;
    Annotations annotations; // e.g. scheme -> id, creator -> agent

    std::string to_string() const {
        std::string out = kind == EventKind::GoalAddition ? "+!" : kind == EventKind::GoalFailure ? "-!" : "+";
        out += atom.to_string();
        if (!annotations.empty()) {
            out += "[";
            bool first = true;
            for (const auto& [k, v] : annotations) {
                if (!first) out += ",";
                first = false;
                out += k + "(" + v.to_string() + ")";
            }
            out += "]";
        }
        return out;
    }
};

inline Event goal_event(BeliefAtom a, Annotations ann = {}) {
    return {EventKind::GoalAddition, std::move(a), std::move(ann)};
}
inline Event belief_event(BeliefAtom a, Annotations ann = {}) {
    return {EventKind::BeliefAddition, std::move(a), std::move(ann)};
}

struct Step {
    enum class Kind { Action, Subgoal, AddBelief, DelBelief, Send, OrgDirective };
    Kind kind = Kind::Action;
    BeliefAtom content; // action/directive name + args, goal, belief or message
    Term receiver = Term::any(); // Send only

    static Step action(BeliefAtom a) { return {Kind::Action, std::move(a)}; }
    static Step subgoal(BeliefAtom a) { return {Kind::Subgoal, std::move(a)}; }
    static Step add(BeliefAtom a) { return {Kind::AddBelief, std::move(a)}; }
    static Step del(BeliefAtom a) { return {Kind::DelBelief, std::move(a)}; }
    static Step send(Term to, BeliefAtom msg) { return {Kind::Send, std::move(msg), std::move(to)}; }
    static Step org(BeliefAtom directive) { return {Kind::OrgDirective, std::move(directive)}; }
};

struct Trigger {
    EventKind kind = EventKind::GoalAddition;
    BeliefAtom pattern;
    Annotations annotations; // patterns; each must be present on the event
};

struct PlanRule {
    std::string label;
    Trigger trigger;
    Context context;
    std::vector<Step> body;
};

/// Variables used in the body that neither trigger nor context binds.
inline std::vector<std::string> unbound_body_vars(const PlanRule& rule) {
    std::set<std::string> bound;
    auto collect = [](const BeliefAtom& a, std::set<std::string>& into) {
        for (const auto& t : a.args)
            if (t.is_var()) into.insert(t.name());
    };
    collect(rule.trigger.pattern, bound);
    for (const auto& [k, v] : rule.trigger.annotations)
        if (v.is_var()) bound.insert(v.name());
    for (const auto& lit : rule.context)
        if (lit.kind == Literal::Kind::Positive) collect(lit.pattern, bound);
    std::set<std::string> unbound;
    for (const auto& st : rule.body) {
        std::set<std::string> used;
        collect(st.content, used);
        if (st.receiver.is_var()) used.insert(st.receiver.name());
        for (const auto& v : used)
            if (!bound.contains(v)) unbound.insert(v);
    }
    return {unbound.begin(), unbound.end()};
}

struct PlanInstance {
    const PlanRule* rule = nullptr;
    Event event;
    Substitution bindings;

    std::vector<Step> resolved_body() const {
        std::vector<Step> out;
        for (const auto& st : rule->body) {
            Step r = st;
            r.content = apply(st.content, bindings);
            r.receiver = apply(st.receiver, bindings);
            out.push_back(std::move(r));
        }
        return out;
    }
};

struct EventFailed {
    Event event;
};

using Selection = std::variant<PlanInstance, EventFailed>;

inline bool trigger_matches(const Trigger& t, const Event& e, Substitution& s) {
    if (t.kind != e.kind) return false;
    if (!match(t.pattern, e.atom, s)) return false;
    for (const auto& [name, pattern] : t.annotations) {
        auto it = e.annotations.find(name);
        if (it == e.annotations.end() || !match(pattern, it->second, s)) return false;
    }
    return true;
}

/// First rule, in declaration order, whose trigger matches and whose context
/// is satisfiable; otherwise the event fails.
inline Selection select_plan(const Event& event, const std::vector<PlanRule>& library, const BeliefBase& base) {
    for (const auto& rule : library) {
        Substitution s;
        if (!trigger_matches(rule.trigger, event, s)) continue;
        auto solutions = solve(rule.context, base, s);
        if (!solutions.empty()) return PlanInstance{&rule, event, std::move(solutions.front())};
    }
    return EventFailed{event};
}

/// Result of performing one body action.
struct ActionResult {
    enum class Kind {
        Completed, // no world effect this tick; continue with the next step
        Released,  // world action issued; the step is done
        Running,   // world action issued; the step repeats next tick
        Failed,
    };
    Kind kind = Kind::Completed;
    ActionIntent intent;

    static ActionResult completed() { return {Kind::Completed, {}}; }
    static ActionResult released(ActionIntent i) { return {Kind::Released, i}; }
    static ActionResult running(ActionIntent i) { return {Kind::Running, i}; }
    static ActionResult failed() { return {Kind::Failed, {}}; }
};

/// What an intention needs from its agent.
class AgentContext {
public:
    virtual ~AgentContext() = default;
    virtual BeliefBase& beliefs() = 0;
    virtual const std::vector<PlanRule>& library() const = 0;
    virtual ActionResult perform(const BeliefAtom& action) = 0;
    virtual void send(const Term& to, const BeliefAtom& content) = 0;
    virtual bool org_directive(const BeliefAtom& directive) = 0;
    virtual void post(Event e) = 0; // belief-addition events raised by body steps
    virtual void goal_completed(const Event&) {}
    virtual void goal_posted(const Event&) {}
};

/// One intention: a stack of plan instances. Subgoals push; a subgoal in tail
/// position replaces its caller.
class Intention {
public:
    enum class Status { Active, Finished, Failed };

    struct Outcome {
        Status status = Status::Active;
        std::optional<ActionIntent> intent;
    };

    explicit Intention(PlanInstance root) { push(std::move(root)); }

    bool empty() const { return frames_.empty(); }
    const Event& root_event() const { return root_event_; }
    std::size_t depth() const { return frames_.size(); }
    const PlanInstance& top() const { return frames_.back().instance; }

    /// Runs steps until a world action is released, the stack empties, or a
    /// step fails. `budget` bounds non-world steps per call.
    Outcome step(AgentContext& ctx, int budget = 256) {
        while (!frames_.empty()) {
            if (--budget < 0) return {Status::Active, std::nullopt};
            Frame& f = frames_.back();
            if (f.pc >= f.body.size()) {
                Event done = f.instance.event;
                frames_.pop_back();
                if (done.kind == EventKind::GoalAddition) ctx.goal_completed(done);
                continue;
            }
            const Step st = f.body[f.pc];
            switch (st.kind) {
            case Step::Kind::Action: {
                ActionResult r = ctx.perform(st.content);
                switch (r.kind) {
                case ActionResult::Kind::Completed: ++f.pc; break;
                case ActionResult::Kind::Released:
                    ++f.pc;
                    last_release_ = LastRelease::OneShot;
                    return {Status::Active, r.intent};
                case ActionResult::Kind::Running:
                    last_release_ = LastRelease::Durative;
                    return {Status::Active, r.intent};
                case ActionResult::Kind::Failed: return fail();
                }
                break;
            }
            case Step::Kind::Subgoal: {
                Event ev = goal_event(st.content);
                ctx.goal_posted(ev);
                auto sel = select_plan(ev, ctx.library(), ctx.beliefs());
                if (std::holds_alternative<EventFailed>(sel)) return fail();
                const bool tail = f.pc + 1 == f.body.size();
                ++f.pc;
                if (tail) frames_.pop_back();
                push(std::get<PlanInstance>(std::move(sel)));
                break;
            }
            case Step::Kind::AddBelief:
                ++f.pc;
                if (ctx.beliefs().add(st.content)) ctx.post(belief_event(st.content));
                break;
            case Step::Kind::DelBelief: {
                ++f.pc;
                std::vector<BeliefAtom> doomed;
                for (const auto& a : ctx.beliefs().atoms()) {
                    Substitution s;
                    if (match(st.content, a, s)) doomed.push_back(a);
                }
                for (const auto& a : doomed) ctx.beliefs().remove(a);
                break;
            }
            case Step::Kind::Send:
                ++f.pc;
                ctx.send(st.receiver, st.content);
                break;
            case Step::Kind::OrgDirective:
                ++f.pc;
                if (!ctx.org_directive(st.content)) return fail();
                break;
            }
        }
        return {Status::Finished, std::nullopt};
    }

    /// The world refused the last one-shot action: the intention fails.
    /// Durative actions re-evaluate next tick instead.
    bool action_refused() {
        if (last_release_ != LastRelease::OneShot) return false;
        frames_.clear();
        return true;
    }

    void clear_release() { last_release_ = LastRelease::None; }

private:
    struct Frame {
        PlanInstance instance;
        std::vector<Step> body;
        std::size_t pc = 0;
    };
    enum class LastRelease { None, OneShot, Durative };

    void push(PlanInstance inst) {
        if (frames_.empty()) root_event_ = inst.event;
        auto body = inst.resolved_body();
        frames_.push_back({std::move(inst), std::move(body), 0});
    }

    Outcome fail() {
        frames_.clear();
        return {Status::Failed, std::nullopt};
    }

    std::vector<Frame> frames_;
    Event root_event_;
    LastRelease last_release_ = LastRelease::None;
};

/// Per-agent reasoning loop: event queue plus one intention.
class Reasoner {
public:
    BeliefBase& beliefs() { return beliefs_; }
    const BeliefBase& beliefs() const { return beliefs_; }

    void post(Event e) { events_.push_back(std::move(e)); }
    std::size_t pending_events() const { return events_.size(); }
    bool busy() const { return intention_.has_value(); }
    const std::optional<Intention>& intention() const { return intention_; }

    /// Hook run whenever an event is dropped (no applicable plan or its
    /// intention failed).
    std::function<void(const Event&)> on_event_failed;

    /// One reasoning cycle: keep stepping the intention or adopting new events
    /// until a world action is produced or nothing is left to do.
    std::optional<ActionIntent> cycle(AgentContext& ctx, int max_iterations = 64) {
        if (intention_) intention_->clear_release();
        for (int i = 0; i < max_iterations; ++i) {
            if (!intention_) {
                if (events_.empty()) return std::nullopt;
                Event ev = std::move(events_.front());
                events_.pop_front();
                auto sel = select_plan(ev, ctx.library(), beliefs_);
                if (auto* failed = std::get_if<EventFailed>(&sel)) {
                    if (on_event_failed) on_event_failed(failed->event);
                    continue;
                }
                intention_.emplace(std::get<PlanInstance>(std::move(sel)));
            }
            auto out = intention_->step(ctx);
            if (out.status == Intention::Status::Failed) {
                Event root = intention_->root_event();
                intention_.reset();
                if (on_event_failed) on_event_failed(root);
                continue;
            }
            if (out.status == Intention::Status::Finished) {
                intention_.reset();
                continue;
            }
            if (out.intent) return out.intent;
            return std::nullopt; // budget exhausted
        }
        return std::nullopt;
    }

    /// Reports that the world did not carry out the released action.
    void action_refused() {
        if (intention_ && intention_->action_refused()) {
            Event root = intention_->root_event();
            intention_.reset();
            if (on_event_failed) on_event_failed({EventKind::GoalFailure, root.atom, root.annotations});
        }
    }

    void drop_intention() { intention_.reset(); }

private:
    BeliefBase beliefs_;
    std::deque<Event> events_;
    std::optional<Intention> intention_;
};

// Fig. 3 path decision over pos/target/intermediate/clear/bombs.

enum class MoveDecision { TowardIntermediate, TowardTarget, PlaceBombAndRetreat, WaitForBomb, Done };

inline const char* decision_name(MoveDecision d) {
    switch (d) {
    case MoveDecision::TowardIntermediate: return "TowardIntermediate";
    case MoveDecision::TowardTarget: return "TowardTarget";
    case MoveDecision::PlaceBombAndRetreat: return "PlaceBombAndRetreat";
    case MoveDecision::WaitForBomb: return "WaitForBomb";
    case MoveDecision::Done: return "Done";
    }
    return "?";
}

/// At the target: Done. With a blocked intermediate target C: at C place a
/// bomb if one is available, otherwise wait for one; elsewhere head for C.
/// Without a blocked intermediate: head for the target. Missing bombs/1 reads
/// as bombs(0).
inline MoveDecision decide_move(const BeliefBase& base) {
    const auto pos = base.find("pos");
    const auto target = base.find("target");
    if (!pos || pos->args.size() != 2) throw MissingBelief("pos/2 missing");
    if (!target || target->args.size() != 2) throw MissingBelief("target/2 missing");
    if (pos->args == target->args) return MoveDecision::Done;

    const auto inter = base.find("intermediate");
    if (inter && inter->args.size() == 2 && !base.contains(atom("clear", inter->args))) {
        if (pos->args == inter->args) {
            const bool has_bomb = !solve(bombs_positive("N"), base).empty();
            return has_bomb ? MoveDecision::PlaceBombAndRetreat : MoveDecision::WaitForBomb;
        }
        return MoveDecision::TowardIntermediate;
    }
    return MoveDecision::TowardTarget;
}

inline BeliefAtom cell_atom(const std::string& predicate, Cell c) {
    return atom(predicate, {Term::integer(c.x), Term::integer(c.y)});
}

} // namespace arena
