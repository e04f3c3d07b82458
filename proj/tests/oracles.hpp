#pragma once

// Independent reference implementations used by the tests. Each one is
// written the slow, obvious way and shares no code with the library beyond
// the plain data types.

#include <algorithm>
#include <climits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arena/arena.hpp"

namespace oracle {

using arena::Cell;
using arena::CellKind;
using arena::GridMap;

// ------------------------------------------------------------------ blast

/// A cell is hit when it shares a row or column with the bomb, lies within
/// range, is not Solid, and every cell strictly between is Empty.
inline std::set<Cell> blast(const GridMap& g, Cell bomb, int range) {
    std::set<Cell> out{bomb};
    for (int y = 0; y < g.height(); ++y) {
        for (int x = 0; x < g.width(); ++x) {
            const Cell c{x, y};
            if (c == bomb || (c.x != bomb.x && c.y != bomb.y)) continue;
            const int d = std::abs(c.x - bomb.x) + std::abs(c.y - bomb.y);
            if (d > range || g.at(c) == CellKind::Solid) continue;
            bool clear = true;
            for (int i = 1; i < d; ++i) {
                const Cell m{bomb.x + (c.x - bomb.x) / d * i, bomb.y + (c.y - bomb.y) / d * i};
                if (g.at(m) != CellKind::Empty) clear = false;
            }
            if (clear) out.insert(c);
        }
    }
    return out;
}

// ------------------------------------------------------------- shortest path

struct Cost {
    int augmented = 0;
    int boxes = 0;
    friend auto operator<=>(const Cost&, const Cost&) = default;
};

/// Array-scan Dijkstra over (augmented cost, boxes) with entry cost
/// 1 + punishment. Returns the cost to every cell; unreachable cells are empty.
inline std::vector<std::optional<Cost>> dijkstra_all(const GridMap& g, Cell start, const arena::PunishmentMap& p) {
    const int w = g.width(), h = g.height();
    std::vector<std::optional<Cost>> dist(static_cast<std::size_t>(w * h));
    std::vector<bool> done(dist.size());
    auto idx = [&](Cell c) { return static_cast<std::size_t>(c.y * w + c.x); };
    dist[idx(start)] = Cost{};
    for (;;) {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < dist.size(); ++i)
            if (!done[i] && dist[i] && (!best || *dist[i] < *dist[*best])) best = i;
        if (!best) break;
        done[*best] = true;
        const Cell cur{static_cast<int>(*best) % w, static_cast<int>(*best) / w};
        const int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const Cell nb{cur.x + dx[k], cur.y + dy[k]};
            if (nb.x < 0 || nb.y < 0 || nb.x >= w || nb.y >= h || g.at(nb) == CellKind::Solid) continue;
            const Cost c{dist[*best]->augmented + 1 + p.at(nb),
                         dist[*best]->boxes + (g.at(nb) == CellKind::Box ? 1 : 0)};
            if (!dist[idx(nb)] || c < *dist[idx(nb)]) dist[idx(nb)] = c;
        }
    }
    return dist;
}

inline std::optional<Cost> dijkstra(const GridMap& g, Cell start, Cell target, const arena::PunishmentMap& p) {
    return dijkstra_all(g, start, p)[static_cast<std::size_t>(target.y * g.width() + target.x)];
}

/// Breadth-first hop count with no punishments.
inline std::optional<int> bfs_moves(const GridMap& g, Cell start, Cell target) {
    std::map<Cell, int> d{{start, 0}};
    std::vector<Cell> layer{start};
    for (int k = 1; !layer.empty(); ++k) {
        std::vector<Cell> next;
        for (Cell c : layer)
            for (Cell nb : arena::neighbors(c))
                if (g.at(nb) != CellKind::Solid && !d.contains(nb)) {
                    d[nb] = k;
                    next.push_back(nb);
                }
        layer = std::move(next);
    }
    auto it = d.find(target);
    return it == d.end() ? std::nullopt : std::optional<int>(it->second);
}

/// Moves needed to leave `footprint` from `from` without entering blocked
/// cells, found by growing reachable sets one move at a time.
inline std::optional<int> retreat_moves(const GridMap& g, const std::set<Cell>& blocked, Cell from,
                                        const std::set<Cell>& footprint, int max_moves) {
    std::set<Cell> reach{from};
    for (int k = 0; k <= max_moves; ++k) {
        for (Cell c : reach)
            if (!footprint.contains(c)) return k;
        std::set<Cell> next = reach;
        for (Cell c : reach)
            for (Cell nb : arena::neighbors(c))
                if (g.at(nb) == CellKind::Empty && !blocked.contains(nb)) next.insert(nb);
        reach = std::move(next);
    }
    return std::nullopt;
}

// ------------------------------------------------------------ goal frontier

struct TreeNode {
    std::string id;
    arena::GoalOperator op;
    int card = 1;
    int parent = -1;
    std::vector<int> children;
};

struct Tree {
    std::vector<TreeNode> nodes;
    std::set<std::string> explicit_goals;

    int index(const std::string& id) const {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].id == id) return static_cast<int>(i);
        return -1;
    }
};

inline void flatten(const arena::GoalNode& n, int parent, Tree& t) {
    const int me = static_cast<int>(t.nodes.size());
    t.nodes.push_back({n.id, n.op, n.cardinality, parent, {}});
    for (const auto& c : n.children) {
        t.nodes[me].children.push_back(static_cast<int>(t.nodes.size()));
        flatten(c, me, t);
    }
}

inline Tree tree_of(const arena::SchemeSpec& s) {
    Tree t;
    flatten(s.root, -1, t);
    for (const auto& [m, goals] : s.missions) t.explicit_goals.insert(goals.begin(), goals.end());
    return t;
}

/// Goal states from the operator rules, evaluated top-down and bottom-up
/// from scratch given who has reported which goal.
class Frontier {
public:
    Frontier(const Tree& t, const std::map<std::string, std::set<int>>& reported) : t_(t), s_(reported) {}

    bool reported_enough(int i) const {
        auto it = s_.find(t_.nodes[i].id);
        const int n = it == s_.end() ? 0 : static_cast<int>(it->second.size());
        return n >= t_.nodes[i].card;
    }

    bool children_hold(int i) const {
        const auto& n = t_.nodes[i];
        int sat = 0;
        for (int c : n.children) sat += satisfied(c) ? 1 : 0;
        if (n.op == arena::GoalOperator::Choice) return sat > 0;
        return sat == static_cast<int>(n.children.size());
    }

    bool is_explicit(int i) const { return t_.explicit_goals.contains(t_.nodes[i].id); }

    bool satisfied(int i) const {
        const auto& n = t_.nodes[i];
        if (n.op == arena::GoalOperator::Leaf || is_explicit(i)) {
            if (n.op != arena::GoalOperator::Leaf && !children_hold(i)) return false;
            return reported_enough(i);
        }
        return children_hold(i);
    }

    bool enabled(int i) const {
        const int p = t_.nodes[i].parent;
        if (p < 0) return true;
        if (!enabled(p)) return false;
        if (t_.nodes[p].op == arena::GoalOperator::Sequence) {
            for (int c : t_.nodes[p].children) {
                if (c == i) break;
                if (!satisfied(c)) return false;
            }
        }
        return true;
    }

    bool impossible(int i) const {
        if (satisfied(i)) return false;
        for (int m = i; t_.nodes[m].parent >= 0; m = t_.nodes[m].parent) {
            const auto& p = t_.nodes[t_.nodes[m].parent];
            if (p.op != arena::GoalOperator::Choice) continue;
            for (int c : p.children)
                if (c != m && satisfied(c)) return true;
        }
        return false;
    }

    arena::GoalState state(int i) const {
        if (satisfied(i)) return arena::GoalState::Satisfied;
        if (impossible(i)) return arena::GoalState::Impossible;
        if (enabled(i)) return arena::GoalState::Enabled;
        return arena::GoalState::Waiting;
    }

    std::map<std::string, arena::GoalState> states() const {
        std::map<std::string, arena::GoalState> out;
        for (std::size_t i = 0; i < t_.nodes.size(); ++i) out[t_.nodes[i].id] = state(static_cast<int>(i));
        return out;
    }

    /// Goals an agent may report now: enabled, explicit, children done.
    std::set<std::string> achievable() const {
        std::set<std::string> out;
        for (std::size_t k = 0; k < t_.nodes.size(); ++k) {
            const int i = static_cast<int>(k);
            if (state(i) != arena::GoalState::Enabled) continue;
            const bool leaf = t_.nodes[k].op == arena::GoalOperator::Leaf;
            if (leaf || (is_explicit(i) && children_hold(i))) out.insert(t_.nodes[k].id);
        }
        return out;
    }

private:
    const Tree& t_;
    const std::map<std::string, std::set<int>>& s_;
};

// ------------------------------------------------------------- generators

/// Random goal tree as org-spec JSON, at most `max_nodes` nodes.
inline nlohmann::json random_goal_tree(std::mt19937_64& rng, int max_nodes, int& used, int depth = 0) {
    const std::string id = "g" + std::to_string(used++);
    const int room = max_nodes - used;
    std::uniform_int_distribution<int> coin(0, 99);
    if (room < 2 || depth >= 3 || coin(rng) < 30) {
        std::uniform_int_distribution<int> card(1, 3);
        nlohmann::json leaf{{"id", id}, {"op", "leaf"}};
        const int c = coin(rng) < 60 ? 1 : card(rng);
        if (c > 1) leaf["card"] = c;
        return leaf;
    }
    static const char* ops[] = {"seq", "choice", "par"};
    nlohmann::json node{{"id", id}, {"op", ops[coin(rng) % 3]}, {"children", nlohmann::json::array()}};
    const int kids = std::min(room, 2 + coin(rng) % 2);
    for (int k = 0; k < kids && used < max_nodes; ++k)
        node["children"].push_back(random_goal_tree(rng, max_nodes, used, depth + 1));
    if (node["children"].empty()) return nlohmann::json{{"id", id}, {"op", "leaf"}};
    return node;
}

inline void collect(const nlohmann::json& n, std::vector<std::string>& leaves, std::vector<std::string>& inner) {
    (n["op"] == "leaf" ? leaves : inner).push_back(n["id"].get<std::string>());
    if (n.contains("children"))
        for (const auto& c : n["children"]) collect(c, leaves, inner);
}

/// Random 9x9 grid: Solid border, random Solid/Box/Empty interior.
inline GridMap random_grid(std::mt19937_64& rng, int w = 9, int h = 9, int solid_pct = 20, int box_pct = 25) {
    GridMap g(w, h);
    std::uniform_int_distribution<int> pct(0, 99);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const bool border = x == 0 || y == 0 || x == w - 1 || y == h - 1;
            const int r = pct(rng);
            g.set({x, y}, border || r < solid_pct ? CellKind::Solid
                          : r < solid_pct + box_pct ? CellKind::Box
                                                    : CellKind::Empty);
        }
    return g;
}

inline Cell random_open_cell(std::mt19937_64& rng, const GridMap& g) {
    std::vector<Cell> open;
    for (int y = 0; y < g.height(); ++y)
        for (int x = 0; x < g.width(); ++x)
            if (g.at({x, y}) != CellKind::Solid) open.push_back({x, y});
    return open[rng() % open.size()];
}

/// Random arena map text: pillar lattice, random boxes, four cleared corner
/// spawns (team 1 on the left, team 2 on the right).
inline std::string random_arena_text(std::mt19937_64& rng, int size = 11, int box_pct = 45) {
    std::vector<std::string> rows(static_cast<std::size_t>(size), std::string(static_cast<std::size_t>(size), '.'));
    std::uniform_int_distribution<int> pct(0, 99);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            char& g = rows[y][x];
            if (x == 0 || y == 0 || x == size - 1 || y == size - 1 || (x % 2 == 0 && y % 2 == 0)) g = '#';
            else if (pct(rng) < box_pct) g = '+';
        }
    const int e = size - 2;
    const std::pair<Cell, char> spawns[] = {{{1, 1}, '1'}, {{1, e}, '2'}, {{e, 1}, 'a'}, {{e, e}, 'b'}};
    for (const auto& [c, glyph] : spawns) {
        rows[c.y][c.x] = glyph;
        for (Cell nb : arena::neighbors(c))
            if (rows[nb.y][nb.x] == '+') rows[nb.y][nb.x] = '.';
    }
    std::string text;
    for (const auto& r : rows) text += r + "\n";
    return text;
}

inline arena::ActionIntent random_intent(std::mt19937_64& rng) {
    switch (rng() % 6) {
    case 0: return arena::ActionIntent::wait();
    case 1: return arena::ActionIntent::place_bomb();
    default: return arena::ActionIntent::move(static_cast<arena::Direction>(rng() % 4));
    }
}

/// First conservation law broken by one world step, if any.
inline std::optional<std::string> step_violation(const arena::WorldState& prev, const arena::StepResult& r) {
    using namespace arena;
    const WorldState& next = r.state;
    if (next.tick != prev.tick + 1) return "tick did not advance by one";
    for (const auto& a : next.agents) {
        int live = 0;
        for (const auto& b : next.bombs) live += b.owner == a.id;
        if (a.bombs_available + live != a.bombs_capacity)
            return "bomb supply of agent " + std::to_string(a.id) + " is off";
        if (a.alive && !prev.agent(a.id).alive) return "agent " + std::to_string(a.id) + " came back";
    }
    for (std::size_t i = 0; i < next.agents.size(); ++i)
        for (std::size_t j = i + 1; j < next.agents.size(); ++j)
            if (next.agents[i].alive && next.agents[j].alive && next.agents[i].position == next.agents[j].position)
                return "agents share a cell";
    for (int y = 0; y < next.grid.height(); ++y)
        for (int x = 0; x < next.grid.width(); ++x)
            if (next.grid.at({x, y}) == CellKind::Box && prev.grid.at({x, y}) != CellKind::Box)
                return "box appeared at " + to_string(Cell{x, y});
    const long won = std::count_if(r.events.begin(), r.events.end(),
                                   [](const WorldEvent& e) { return e.kind == WorldEventKind::MatchWon; });
    const bool due = !prev.match_decided && is_terminal(next).has_value();
    if (won != (due ? 1 : 0)) return "MatchWon emitted " + std::to_string(won) + " times";
    return std::nullopt;
}

/// Checks every step of a recorded trace: `states` are the pre-tick
/// snapshots, `final` the end state, `events` all world events in order.
inline std::optional<std::string> trace_violation(const std::vector<arena::WorldState>& states,
                                                  const arena::WorldState& final,
                                                  const std::vector<arena::WorldEvent>& events) {
    for (std::size_t i = 0; i < states.size(); ++i) {
        arena::StepResult r{i + 1 < states.size() ? states[i + 1] : final, {}};
        for (const auto& e : events)
            if (e.tick == states[i].tick) r.events.push_back(e);
        if (auto v = step_violation(states[i], r)) return "tick " + std::to_string(states[i].tick) + ": " + *v;
    }
    return std::nullopt;
}

} // namespace oracle
