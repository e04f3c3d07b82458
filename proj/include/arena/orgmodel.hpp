#pragma once

// Moise-style organizational kernel. An OrgSpec holds the structural
// (roles, links, groups), functional (goal-decomposition schemes and
// missions) and deontic (obligations/permissions) parts; OrgKernel runs group
// and scheme instances and routes every resulting event through a mediation
// delay.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arena/geometry.hpp"

namespace arena {

class SpecError : public Error {
public:
    explicit SpecError(std::vector<std::string> faults)
        : Error(join(faults)), faults(std::move(faults)) {}
    std::vector<std::string> faults;

private:
    static std::string join(const std::vector<std::string>& f) {
        std::string out = "invalid organization spec";
        for (const auto& s : f) out += "; " + s;
        return out;
    }
};

class UnknownSpec : public Error {
public:
    explicit UnknownSpec(const std::string& name) : Error("unknown spec '" + name + "'") {}
};

class UnknownGroup : public Error {
public:
    explicit UnknownGroup(int id) : Error("unknown group " + std::to_string(id)) {}
};

enum class LinkKind { Acquaintance, Communication, Authority };

struct RoleLink {
    std::string from;
    std::string to;
    LinkKind kind = LinkKind::Acquaintance;
};

struct GroupSpec {
    std::string name;
    std::map<std::string, std::pair<int, int>> role_cardinalities; // role -> (min, max)
};

struct StructuralSpec {
    std::set<std::string> roles;
    std::vector<RoleLink> links;
    std::vector<GroupSpec> groups;
};

enum class GoalOperator { Sequence, Choice, Parallel, Leaf };

struct GoalNode {
    std::string id;
    GoalOperator op = GoalOperator::Leaf;
    std::vector<GoalNode> children;
    int cardinality = 1;
};

struct SchemeSpec {
    std::string name;
    GoalNode root;
    std::map<std::string, std::vector<std::string>> missions;
};

enum class Modality { Obligation, Permission };

struct TimeConstraint {
    enum class Kind { Anytime, Before, During };
    Kind kind = Kind::Anytime;
    int start = 0; // During
    int end = 0;   // Before / During

    bool expired(int now) const { return kind != Kind::Anytime && now > end; }
    friend bool operator==(const TimeConstraint&, const TimeConstraint&) = default;
};

struct DeonticRelation {
    Modality modality = Modality::Obligation;
    std::string role;
    std::string mission;
    TimeConstraint tc;
};

struct OrgSpec {
    StructuralSpec structural;
    std::vector<SchemeSpec> schemes;
    std::vector<DeonticRelation> deontics;

    const GroupSpec* find_group(const std::string& name) const {
        for (const auto& g : structural.groups)
            if (g.name == name) return &g;
        return nullptr;
    }
    const SchemeSpec* find_scheme(const std::string& name) const {
        for (const auto& s : schemes)
            if (s.name == name) return &s;
        return nullptr;
    }
};

namespace detail {

inline std::optional<GoalOperator> parse_op(const std::string& s) {
    if (s == "seq") return GoalOperator::Sequence;
    if (s == "choice") return GoalOperator::Choice;
    if (s == "par") return GoalOperator::Parallel;
    if (s == "leaf") return GoalOperator::Leaf;
    return std::nullopt;
}

inline GoalNode parse_node(const nlohmann::json& j, std::vector<std::string>& ancestors,
                           std::set<std::string>& seen, std::vector<std::string>& faults,
                           const std::string& scheme) {
    GoalNode n;
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
        faults.push_back("scheme '" + scheme + "': goal node without string id");
        return n;
    }
    n.id = j["id"].get<std::string>();
    if (std::find(ancestors.begin(), ancestors.end(), n.id) != ancestors.end()) {
        faults.push_back("scheme '" + scheme + "': cyclic goal tree at '" + n.id + "'");
        return n;
    }
    if (!seen.insert(n.id).second) faults.push_back("scheme '" + scheme + "': duplicate goal id '" + n.id + "'");
    const auto op = j.contains("op") && j["op"].is_string() ? parse_op(j["op"].get<std::string>()) : std::nullopt;
    if (!op) {
        faults.push_back("goal '" + n.id + "': op must be seq|choice|par|leaf");
    } else {
        n.op = *op;
    }
    if (j.contains("card")) {
        if (!j["card"].is_number_integer() || j["card"].get<int>() < 1)
            faults.push_back("goal '" + n.id + "': cardinality bound violation (card must be >= 1)");
        else
            n.cardinality = j["card"].get<int>();
    }
    const bool has_children = j.contains("children") && j["children"].is_array() && !j["children"].empty();
    if (op && n.op == GoalOperator::Leaf && has_children)
        faults.push_back("goal '" + n.id + "': leaf with children");
    if (op && n.op != GoalOperator::Leaf && !has_children)
        faults.push_back("goal '" + n.id + "': operator node without children");
    if (j.contains("children") && j["children"].is_array()) {
        ancestors.push_back(n.id);
        for (const auto& c : j["children"]) n.children.push_back(parse_node(c, ancestors, seen, faults, scheme));
        ancestors.pop_back();
    }
    return n;
}

inline void collect_ids(const GoalNode& n, std::set<std::string>& out) {
    out.insert(n.id);
    for (const auto& c : n.children) collect_ids(c, out);
}

inline std::optional<TimeConstraint> parse_tc(const nlohmann::json& j) {
    if (j.is_null() || (j.is_string() && j.get<std::string>() == "anytime")) return TimeConstraint{};
    if (j.is_object() && j.contains("before") && j["before"].is_number_integer())
        return TimeConstraint{TimeConstraint::Kind::Before, 0, j["before"].get<int>()};
    if (j.is_object() && j.contains("during") && j["during"].is_array() && j["during"].size() == 2 &&
        j["during"][0].is_number_integer() && j["during"][1].is_number_integer()) {
        const int s = j["during"][0].get<int>(), e = j["during"][1].get<int>();
        if (s > e) return std::nullopt;
        return TimeConstraint{TimeConstraint::Kind::During, s, e};
    }
    return std::nullopt;
}

} // namespace detail

/// Validates and builds an OrgSpec. Throws SpecError listing every fault.
inline OrgSpec load_org_spec(const nlohmann::json& doc) {
    std::vector<std::string> faults;
    OrgSpec spec;
    if (!doc.is_object()) throw SpecError({"document is not a JSON object"});

    auto array_of = [&](const char* key) -> nlohmann::json {
        if (!doc.contains(key)) return nlohmann::json::array();
        if (!doc[key].is_array()) {
            faults.push_back(std::string("'") + key + "' must be an array");
            return nlohmann::json::array();
        }
        return doc[key];
    };

    for (const auto& r : array_of("roles")) {
        if (!r.is_string()) {
            faults.push_back("role names must be strings");
            continue;
        }
        if (!spec.structural.roles.insert(r.get<std::string>()).second)
            faults.push_back("duplicate role '" + r.get<std::string>() + "'");
    }
    auto known_role = [&](const std::string& r) { return spec.structural.roles.contains(r); };

    for (const auto& l : array_of("links")) {
        RoleLink link;
        link.from = l.value("from", "");
        link.to = l.value("to", "");
        const std::string kind = l.value("kind", "");
        if (kind == "acquaintance") link.kind = LinkKind::Acquaintance;
        else if (kind == "communication") link.kind = LinkKind::Communication;
        else if (kind == "authority") link.kind = LinkKind::Authority;
        else faults.push_back("link " + link.from + "->" + link.to + ": unknown kind '" + kind + "'");
        if (!known_role(link.from)) faults.push_back("link: unknown role '" + link.from + "'");
        if (!known_role(link.to)) faults.push_back("link: unknown role '" + link.to + "'");
        spec.structural.links.push_back(link);
    }

    for (const auto& g : array_of("groups")) {
        GroupSpec gs;
        gs.name = g.value("name", "");
        if (gs.name.empty()) faults.push_back("group without name");
        if (spec.find_group(gs.name)) faults.push_back("duplicate group '" + gs.name + "'");
        if (g.contains("roles") && g["roles"].is_object()) {
            for (const auto& [role, bounds] : g["roles"].items()) {
                if (!known_role(role)) faults.push_back("group '" + gs.name + "': unknown role '" + role + "'");
                if (!bounds.is_array() || bounds.size() != 2 || !bounds[0].is_number_integer() ||
                    !bounds[1].is_number_integer()) {
                    faults.push_back("group '" + gs.name + "': role '" + role + "' needs [min,max]");
                    continue;
                }
                const int lo = bounds[0].get<int>(), hi = bounds[1].get<int>();
                if (lo < 0 || hi < 1 || lo > hi)
                    faults.push_back("group '" + gs.name + "': cardinality bound violation for role '" + role + "'");
                gs.role_cardinalities[role] = {lo, hi};
            }
        }
        spec.structural.groups.push_back(std::move(gs));
    }

    std::set<std::string> mission_names;
    for (const auto& s : array_of("schemes")) {
        SchemeSpec sc;
        sc.name = s.value("name", "");
        if (sc.name.empty()) faults.push_back("scheme without name");
        if (spec.find_scheme(sc.name)) faults.push_back("duplicate scheme '" + sc.name + "'");
        if (!s.contains("root")) {
            faults.push_back("scheme '" + sc.name + "' has no root");
        } else {
            std::vector<std::string> ancestors;
            std::set<std::string> seen;
            sc.root = detail::parse_node(s["root"], ancestors, seen, faults, sc.name);
        }
        std::set<std::string> ids;
        detail::collect_ids(sc.root, ids);
        if (s.contains("missions") && s["missions"].is_object()) {
            for (const auto& [mission, goals] : s["missions"].items()) {
                if (!mission_names.insert(mission).second) faults.push_back("duplicate mission '" + mission + "'");
                std::vector<std::string> list;
                if (!goals.is_array()) {
                    faults.push_back("mission '" + mission + "': goal list must be an array");
                } else {
                    for (const auto& gid : goals) {
                        const std::string id = gid.is_string() ? gid.get<std::string>() : "";
                        if (!ids.contains(id))
                            faults.push_back("mission '" + mission + "': dangling goal '" + id + "'");
                        list.push_back(id);
                    }
                }
                sc.missions[mission] = std::move(list);
            }
        }
        spec.schemes.push_back(std::move(sc));
    }

    for (const auto& d : array_of("deontics")) {
        DeonticRelation rel;
        const std::string modality = d.value("modality", "");
        if (modality == "obligation" || modality == "obl") rel.modality = Modality::Obligation;
        else if (modality == "permission" || modality == "per") rel.modality = Modality::Permission;
        else faults.push_back("deontic: unknown modality '" + modality + "'");
        rel.role = d.value("role", "");
        rel.mission = d.value("mission", "");
        if (!known_role(rel.role)) faults.push_back("deontic: unknown role '" + rel.role + "'");
        if (!mission_names.contains(rel.mission)) faults.push_back("deontic: dangling mission '" + rel.mission + "'");
        const auto tc = detail::parse_tc(d.contains("tc") ? d["tc"] : nlohmann::json());
        if (!tc) faults.push_back("deontic " + rel.role + "/" + rel.mission + ": malformed time constraint");
        else rel.tc = *tc;
        spec.deontics.push_back(rel);
    }

    if (!faults.empty()) throw SpecError(std::move(faults));
    return spec;
}

enum class GoalState { Waiting, Enabled, Satisfied, Impossible };

inline const char* state_name(GoalState s) {
    switch (s) {
    case GoalState::Waiting: return "waiting";
    case GoalState::Enabled: return "enabled";
    case GoalState::Satisfied: return "satisfied";
    case GoalState::Impossible: return "impossible";
    }
    return "?";
}

struct GroupInstance {
    int group_id = 0;
    std::string spec;
    int creator = 0;
    std::map<int, std::set<std::string>> role_assignments;

    friend bool operator==(const GroupInstance&, const GroupInstance&) = default;
};

struct SchemeInstance {
    int scheme_id = 0;
    std::string spec;
    int group_id = 0;
    int creator = 0;
    std::map<std::string, GoalState> goal_states;
    std::map<std::string, std::set<int>> satisfiers;
    std::map<int, std::set<std::string>> commitments;
    bool finished = false;

    friend bool operator==(const SchemeInstance&, const SchemeInstance&) = default;
};

/// The goal whose satisfaction produced an event, for latency accounting.
struct EventCause {
    int serial = 0;
    int scheme_id = 0;
    std::string goal;
    int agent = 0;
    int tick = 0;
};

struct OrgEvent {
    enum class Kind { GroupCreated, RoleAdopted, SchemeCreated, GoalAddition, SchemeFinished, OrgError };
    Kind kind = Kind::OrgError;
    int deliver_at = 0;
    int recipient = 0;
    int requester = 0;
    int seq = 0;
    std::string spec;  // group or scheme spec name
    int group_id = 0;
    int scheme_id = 0;
    int creator = 0;
    int agent = 0;     // RoleAdopted: adopter
    std::string role;
    std::string goal;  // GoalAddition
    std::string code;  // OrgError: always the opaque code
    std::string debug_cause; // true cause; event log only
    std::optional<EventCause> cause;
};

inline const char* event_name(OrgEvent::Kind k) {
    switch (k) {
    case OrgEvent::Kind::GroupCreated: return "GroupCreated";
    case OrgEvent::Kind::RoleAdopted: return "RoleAdopted";
    case OrgEvent::Kind::SchemeCreated: return "SchemeCreated";
    case OrgEvent::Kind::GoalAddition: return "GoalAddition";
    case OrgEvent::Kind::SchemeFinished: return "SchemeFinished";
    case OrgEvent::Kind::OrgError: return "OrgError";
    }
    return "?";
}

inline constexpr const char* kOpaqueOrgError = "org_error";

struct ObligationEntry {
    std::string mission;
    int scheme_id = 0;
    TimeConstraint tc;
    bool expired = false;

    friend bool operator==(const ObligationEntry&, const ObligationEntry&) = default;
};

/// Runtime organization for one team. Single owner; every mutating call
/// schedules its events `mediation_delay` ticks after `now`.
class OrgKernel {
public:
    OrgKernel(OrgSpec spec, std::vector<int> members, int mediation_delay = 1)
        : spec_(std::move(spec)), members_(std::move(members)), delay_(mediation_delay) {
        for (const auto& s : spec_.schemes) trees_.emplace(s.name, FlatTree(s));
    }

    const OrgSpec& spec() const { return spec_; }
    int mediation_delay() const { return delay_; }
    const std::map<int, GroupInstance>& groups() const { return groups_; }
    const std::map<int, SchemeInstance>& schemes() const { return schemes_; }
    const SchemeInstance& scheme(int id) const { return schemes_.at(id); }
    const std::vector<OrgEvent>& pending() const { return pending_; }

    struct Created {
        int id = 0;
        std::vector<OrgEvent> events;
    };

    Created create_group(int requester, const std::string& spec_name, int now) {
        if (!spec_.find_group(spec_name)) throw UnknownSpec(spec_name);
        const int id = next_group_++;
        groups_[id] = GroupInstance{id, spec_name, requester, {}};
        std::vector<OrgEvent> out;
        for (int m : members_) {
            OrgEvent e = base_event(OrgEvent::Kind::GroupCreated, m, requester, now);
            e.spec = spec_name;
            e.group_id = id;
            e.creator = requester;
            out.push_back(schedule(std::move(e)));
        }
        return {id, out};
    }

    std::vector<OrgEvent> adopt_role(int agent, const std::string& role, int group_id, int now) {
        auto git = groups_.find(group_id);
        if (git == groups_.end()) throw UnknownGroup(group_id);
        GroupInstance& g = git->second;
        const GroupSpec& gs = *spec_.find_group(g.spec);
        auto card = gs.role_cardinalities.find(role);
        if (!spec_.structural.roles.contains(role) || card == gs.role_cardinalities.end())
            return {error(agent, now, "role '" + role + "' not declared in group '" + g.spec + "'")};
        if (!g.role_assignments[agent].contains(role)) {
            int players = 0;
            for (const auto& [id, roles] : g.role_assignments) players += roles.contains(role) ? 1 : 0;
            if (players >= card->second.second) {
                if (g.role_assignments[agent].empty()) g.role_assignments.erase(agent);
                return {error(agent, now, "role '" + role + "' is at its maximum cardinality")};
            }
            g.role_assignments[agent].insert(role);
        }
        std::vector<OrgEvent> out;
        for (int m : members_) {
            OrgEvent e = base_event(OrgEvent::Kind::RoleAdopted, m, agent, now);
            e.group_id = group_id;
            e.agent = agent;
            e.role = role;
            e.spec = g.spec;
            out.push_back(schedule(std::move(e)));
        }
        return out;
    }

    Created create_scheme(int requester, const std::string& spec_name, int group_id, int now) {
        if (!spec_.find_scheme(spec_name)) throw UnknownSpec(spec_name);
        if (!groups_.contains(group_id)) throw UnknownGroup(group_id);
        const int id = next_scheme_++;
        SchemeInstance inst;
        inst.scheme_id = id;
        inst.spec = spec_name;
        inst.group_id = group_id;
        inst.creator = requester;
        const FlatTree& tree = trees_.at(spec_name);
        for (const auto& n : tree.nodes) inst.goal_states[n.id] = GoalState::Waiting;
        std::vector<std::size_t> ignored;
        enable(inst, tree, 0, ignored);
        schemes_[id] = std::move(inst);
        std::vector<OrgEvent> out;
        for (int m : members_) {
            OrgEvent e = base_event(OrgEvent::Kind::SchemeCreated, m, requester, now);
            e.spec = spec_name;
            e.scheme_id = id;
            e.group_id = group_id;
            e.creator = requester;
            out.push_back(schedule(std::move(e)));
        }
        return {id, out};
    }

    std::vector<OrgEvent> commit_mission(int agent, const std::string& mission, int scheme_id, int now) {
        auto sit = schemes_.find(scheme_id);
        if (sit == schemes_.end()) return {error(agent, now, "unknown scheme " + std::to_string(scheme_id))};
        SchemeInstance& inst = sit->second;
        const SchemeSpec& ss = *spec_.find_scheme(inst.spec);
        auto mit = ss.missions.find(mission);
        if (mit == ss.missions.end())
            return {error(agent, now, "mission '" + mission + "' not in scheme '" + inst.spec + "'")};
        if (inst.finished) return {error(agent, now, "scheme " + std::to_string(scheme_id) + " is finished")};
        if (!is_permitted(agent, mission, inst.group_id))
            return {error(agent, now, "no role permits or obliges mission '" + mission + "'")};
        if (!inst.commitments[agent].insert(mission).second) return {};

        const FlatTree& tree = trees_.at(inst.spec);
        std::vector<OrgEvent> out;
        for (const auto& gid : mit->second) {
            const std::size_t idx = tree.index.at(gid);
            if (achievable(inst, tree, idx)) {
                OrgEvent e = base_event(OrgEvent::Kind::GoalAddition, agent, agent, now);
                e.scheme_id = scheme_id;
                e.spec = inst.spec;
                e.goal = gid;
                out.push_back(schedule(std::move(e)));
            }
        }
        return out;
    }

    std::vector<OrgEvent> set_goal_state(int scheme_id, const std::string& goal, int agent, int now) {
        auto sit = schemes_.find(scheme_id);
        if (sit == schemes_.end()) return {error(agent, now, "unknown scheme " + std::to_string(scheme_id))};
        SchemeInstance& inst = sit->second;
        const FlatTree& tree = trees_.at(inst.spec);
        auto iit = tree.index.find(goal);
        if (iit == tree.index.end()) return {error(agent, now, "unknown goal '" + goal + "'")};
        if (!committed_to_goal(inst, agent, goal))
            return {error(agent, now, "agent not committed to a mission containing '" + goal + "'")};
        const std::size_t idx = iit->second;
        if (!achievable(inst, tree, idx)) return {error(agent, now, "goal '" + goal + "' is not enabled")};
        if (!inst.satisfiers[goal].insert(agent).second) return {};

        std::vector<std::size_t> newly;
        if (static_cast<int>(inst.satisfiers[goal].size()) >= tree.nodes[idx].cardinality) {
            inst.goal_states[goal] = GoalState::Satisfied;
            on_satisfied(inst, tree, idx, newly);
        }
        const EventCause cause{++cause_serial_, scheme_id, goal, agent, now};
        std::vector<OrgEvent> out;
        for (std::size_t g : newly) {
            const std::string& gid = tree.nodes[g].id;
            for (const auto& [member, missions] : inst.commitments) {
                if (!committed_to_goal(inst, member, gid)) continue;
                OrgEvent e = base_event(OrgEvent::Kind::GoalAddition, member, agent, now);
                e.scheme_id = scheme_id;
                e.spec = inst.spec;
                e.goal = gid;
                e.cause = cause;
                out.push_back(schedule(std::move(e)));
            }
        }
        if (inst.finished) {
            for (int m : members_) {
                OrgEvent e = base_event(OrgEvent::Kind::SchemeFinished, m, agent, now);
                e.scheme_id = scheme_id;
                e.spec = inst.spec;
                e.creator = inst.creator;
                e.cause = cause;
                out.push_back(schedule(std::move(e)));
            }
        }
        return out;
    }

    /// Obligations of every role the agent plays, joined with the live
    /// schemes of the group where it plays them.
    std::vector<ObligationEntry> obligations_for(int agent, int now = 0) const {
        std::vector<ObligationEntry> out;
        for (const auto& [gid, g] : groups_) {
            auto rit = g.role_assignments.find(agent);
            if (rit == g.role_assignments.end()) continue;
            for (const auto& d : spec_.deontics) {
                if (d.modality != Modality::Obligation || !rit->second.contains(d.role)) continue;
                for (const auto& [sid, inst] : schemes_) {
                    if (inst.group_id != gid || inst.finished) continue;
                    if (!spec_.find_scheme(inst.spec)->missions.contains(d.mission)) continue;
                    ObligationEntry e{d.mission, sid, d.tc, d.tc.expired(now)};
                    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
                }
            }
        }
        return out;
    }

    bool is_permitted(int agent, const std::string& mission, int group_id) const {
        auto git = groups_.find(group_id);
        if (git == groups_.end()) throw UnknownGroup(group_id);
        auto rit = git->second.role_assignments.find(agent);
        if (rit == git->second.role_assignments.end()) return false;
        for (const auto& d : spec_.deontics)
            if (d.mission == mission && rit->second.contains(d.role)) return true;
        return false;
    }

    /// Goals an agent may currently report satisfied.
    bool is_achievable(int scheme_id, const std::string& goal) const {
        const auto& inst = schemes_.at(scheme_id);
        const FlatTree& tree = trees_.at(inst.spec);
        return achievable(inst, tree, tree.index.at(goal));
    }

    /// Removes and returns every event due at or before `now`, ordered by
    /// delivery tick, requester id, then scheduling order.
    std::vector<OrgEvent> deliver(int now) {
        std::vector<OrgEvent> due, later;
        for (auto& e : pending_) (e.deliver_at <= now ? due : later).push_back(std::move(e));
        pending_ = std::move(later);
        std::stable_sort(due.begin(), due.end(), [](const OrgEvent& a, const OrgEvent& b) {
            return std::tuple(a.deliver_at, a.requester, a.seq) < std::tuple(b.deliver_at, b.requester, b.seq);
        });
        return due;
    }

private:
    struct FlatNode {
        std::string id;
        GoalOperator op;
        int cardinality;
        int parent;
        std::vector<std::size_t> children;
    };

    struct FlatTree {
        explicit FlatTree(const SchemeSpec& s) {
            add(s.root, -1);
            for (const auto& [m, goals] : s.missions)
                for (const auto& g : goals) in_mission.insert(g);
        }
        std::size_t add(const GoalNode& n, int parent) {
            const std::size_t idx = nodes.size();
            nodes.push_back({n.id, n.op, n.cardinality, parent, {}});
            index[n.id] = idx;
            for (const auto& c : n.children) {
                const std::size_t ci = add(c, static_cast<int>(idx));
                nodes[idx].children.push_back(ci);
            }
            return idx;
        }
        std::vector<FlatNode> nodes;
        std::map<std::string, std::size_t> index;
        std::set<std::string> in_mission;
    };

    OrgEvent base_event(OrgEvent::Kind kind, int recipient, int requester, int now) {
        OrgEvent e;
        e.kind = kind;
        e.recipient = recipient;
        e.requester = requester;
        e.deliver_at = now + delay_;
        return e;
    }

    OrgEvent schedule(OrgEvent e) {
        e.seq = next_seq_++;
        pending_.push_back(e);
        return e;
    }

    OrgEvent error(int agent, int now, std::string cause) {
        OrgEvent e = base_event(OrgEvent::Kind::OrgError, agent, agent, now);
        e.code = kOpaqueOrgError;
        e.debug_cause = std::move(cause);
        return schedule(std::move(e));
    }

    bool committed_to_goal(const SchemeInstance& inst, int agent, const std::string& goal) const {
        auto cit = inst.commitments.find(agent);
        if (cit == inst.commitments.end()) return false;
        const SchemeSpec& ss = *spec_.find_scheme(inst.spec);
        for (const auto& m : cit->second) {
            const auto& goals = ss.missions.at(m);
            if (std::find(goals.begin(), goals.end(), goal) != goals.end()) return true;
        }
        return false;
    }

    static GoalState state_of(const SchemeInstance& inst, const FlatTree& t, std::size_t i) {
        return inst.goal_states.at(t.nodes[i].id);
    }

    static bool children_done(const SchemeInstance& inst, const FlatTree& t, std::size_t i) {
        const auto& n = t.nodes[i];
        auto sat = [&](std::size_t c) { return state_of(inst, t, c) == GoalState::Satisfied; };
        if (n.op == GoalOperator::Choice) return std::any_of(n.children.begin(), n.children.end(), sat);
        return std::all_of(n.children.begin(), n.children.end(), sat);
    }

    static bool achievable(const SchemeInstance& inst, const FlatTree& t, std::size_t i) {
        if (state_of(inst, t, i) != GoalState::Enabled) return false;
        return t.nodes[i].op == GoalOperator::Leaf || children_done(inst, t, i);
    }

    void enable(SchemeInstance& inst, const FlatTree& t, std::size_t i, std::vector<std::size_t>& newly) {
        const auto& n = t.nodes[i];
        inst.goal_states[n.id] = GoalState::Enabled;
        if (n.op == GoalOperator::Leaf) {
            newly.push_back(i);
        } else if (n.op == GoalOperator::Sequence) {
            enable(inst, t, n.children.front(), newly);
        } else {
            for (std::size_t c : n.children) enable(inst, t, c, newly);
        }
    }

    void make_impossible(SchemeInstance& inst, const FlatTree& t, std::size_t i) {
        auto& st = inst.goal_states[t.nodes[i].id];
        if (st == GoalState::Satisfied) return;
        st = GoalState::Impossible;
        for (std::size_t c : t.nodes[i].children) make_impossible(inst, t, c);
    }

    // Children condition of `i` now holds: explicit goals (listed in a
    // mission) wait for an agent to report them; implicit ones complete.
    void children_completed(SchemeInstance& inst, const FlatTree& t, std::size_t i, std::vector<std::size_t>& newly) {
        if (t.in_mission.contains(t.nodes[i].id)) {
            newly.push_back(i);
            return;
        }
        inst.goal_states[t.nodes[i].id] = GoalState::Satisfied;
        on_satisfied(inst, t, i, newly);
    }

    void on_satisfied(SchemeInstance& inst, const FlatTree& t, std::size_t i, std::vector<std::size_t>& newly) {
        const int p = t.nodes[i].parent;
        if (p < 0) {
            inst.finished = true;
            return;
        }
        const auto& parent = t.nodes[static_cast<std::size_t>(p)];
        switch (parent.op) {
        case GoalOperator::Sequence: {
            auto it = std::find(parent.children.begin(), parent.children.end(), i);
            if (std::next(it) != parent.children.end()) enable(inst, t, *std::next(it), newly);
            else children_completed(inst, t, static_cast<std::size_t>(p), newly);
            break;
        }
        case GoalOperator::Choice:
            for (std::size_t c : parent.children)
                if (c != i) make_impossible(inst, t, c);
            children_completed(inst, t, static_cast<std::size_t>(p), newly);
            break;
        case GoalOperator::Parallel:
            if (children_done(inst, t, static_cast<std::size_t>(p)))
                children_completed(inst, t, static_cast<std::size_t>(p), newly);
            break;
        case GoalOperator::Leaf: break;
        }
    }

    OrgSpec spec_;
    std::map<std::string, FlatTree> trees_;
    std::vector<int> members_;
    int delay_;
    std::map<int, GroupInstance> groups_;
    std::map<int, SchemeInstance> schemes_;
    std::vector<OrgEvent> pending_;
    int next_group_ = 1;
    int next_scheme_ = 1;
    int next_seq_ = 0;
    int cause_serial_ = 0;
};

} // namespace arena
