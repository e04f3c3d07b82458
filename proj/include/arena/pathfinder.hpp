#pragma once

// A* over per-cell punishments, intermediate bombing targets, danger costs
// and retreat search.

#include <algorithm>
#include <climits>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <tuple>
#include <vector>

#include "arena/world.hpp"

namespace arena {

class BadCell : public Error {
public:
    explicit BadCell(Cell c) : Error("cell " + to_string(c) + " is Solid or off-grid") {}
};

class OffPlan : public Error {
public:
    explicit OffPlan(Cell c) : Error("cell " + to_string(c) + " is not on the plan") {}
};

/// Extra cost charged for entering a cell.
class PunishmentMap {
public:
    PunishmentMap() = default;
    PunishmentMap(int width, int height) : width_(width), values_(static_cast<std::size_t>(width * height), 0) {}

    int at(Cell c) const { return values_.at(static_cast<std::size_t>(c.y * width_ + c.x)); }
    void set(Cell c, int v) { values_.at(static_cast<std::size_t>(c.y * width_ + c.x)) = v; }
    void add(Cell c, int v) { values_.at(static_cast<std::size_t>(c.y * width_ + c.x)) += v; }
    int max_value() const { return values_.empty() ? 0 : *std::max_element(values_.begin(), values_.end()); }

    friend bool operator==(const PunishmentMap&, const PunishmentMap&) = default;

private:
    int width_ = 0;
    std::vector<int> values_;
};

/// Box cells carry `box_punishment`; everything else is free.
inline PunishmentMap base_punishments(const GridMap& grid, int box_punishment = 5) {
    PunishmentMap p(grid.width(), grid.height());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Cell c = grid.cell(i);
        if (grid.at(c) == CellKind::Box) p.set(c, box_punishment);
    }
    return p;
}

struct IntermediateTarget {
    Cell bomb_cell;
    Cell box_cell;
    friend bool operator==(const IntermediateTarget&, const IntermediateTarget&) = default;
};

struct PathPlan {
    std::vector<Cell> steps; // start .. destination, inclusive
    std::optional<IntermediateTarget> intermediate;
    int augmented_cost = 0;
    int box_count = 0;

    std::size_t moves() const { return steps.empty() ? 0 : steps.size() - 1; }
    Cell start() const { return steps.front(); }
    Cell destination() const { return steps.back(); }
    std::optional<std::size_t> index_of(Cell c) const {
        for (std::size_t i = 0; i < steps.size(); ++i)
            if (steps[i] == c) return i;
        return std::nullopt;
    }
};

namespace detail {

struct PathCost {
    int augmented = 0;
    int boxes = 0;
    friend auto operator<=>(const PathCost&, const PathCost&) = default;
};

inline PathCost enter_cost(const GridMap& grid, const PunishmentMap& p, Cell c) {
    return {1 + p.at(c), grid.at(c) == CellKind::Box ? 1 : 0};
}

inline PathCost operator+(PathCost a, PathCost b) { return {a.augmented + b.augmented, a.boxes + b.boxes}; }

} // namespace detail

/// Minimum augmented-cost path. Entering a cell costs 1 + punishment; Solid is
/// impassable, Box is passable at its punishment. Ties go to fewer boxes, then
/// to the lexicographically smaller step sequence. Returns nullopt when the
/// target is unreachable.
inline std::optional<PathPlan> plan_path(const GridMap& grid, Cell start, Cell target,
                                         const PunishmentMap& punishment) {
    if (!grid.in_bounds(start) || grid.at(start) == CellKind::Solid) throw BadCell(start);
    if (!grid.in_bounds(target) || grid.at(target) == CellKind::Solid) throw BadCell(target);

    using detail::PathCost;
    const std::size_t n = grid.size();
    std::vector<std::optional<PathCost>> best(n);
    std::vector<bool> settled(n);

    // Key: (f, boxes, cell). Manhattan distance never overestimates since every
    // move costs at least 1.
    using Key = std::tuple<int, int, Cell>;
    std::priority_queue<Key, std::vector<Key>, std::greater<>> open;
    best[grid.index(start)] = PathCost{};
    open.emplace(manhattan(start, target), 0, start);
    std::optional<std::pair<int, int>> goal_key;

    while (!open.empty()) {
        auto [f, boxes, cur] = open.top();
        if (goal_key && std::pair(f, boxes) > *goal_key) break;
        open.pop();
        const std::size_t ci = grid.index(cur);
        if (settled[ci]) continue;
        const PathCost g = *best[ci];
        if (g.augmented + manhattan(cur, target) != f || g.boxes != boxes) continue;
        settled[ci] = true;
        if (cur == target) goal_key = std::pair(f, boxes);
        for (Cell nb : neighbors(cur)) {
            if (!grid.in_bounds(nb) || grid.at(nb) == CellKind::Solid) continue;
            const std::size_t ni = grid.index(nb);
            if (settled[ni]) continue;
            const PathCost cand = g + detail::enter_cost(grid, punishment, nb);
            if (!best[ni] || cand < *best[ni]) {
                best[ni] = cand;
                open.emplace(cand.augmented + manhattan(nb, target), cand.boxes, nb);
            }
        }
    }
    if (!settled[grid.index(target)]) return std::nullopt;

    // Cells on some optimal path: walk back from the target over tight edges.
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i)
        if (settled[i]) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return *best[b] < *best[a]; });
    std::vector<bool> on_optimal(n);
    on_optimal[grid.index(target)] = true;
    auto tight = [&](Cell from, Cell to) {
        const std::size_t fi = grid.index(from), ti = grid.index(to);
        return settled[fi] && settled[ti] &&
               *best[fi] + detail::enter_cost(grid, punishment, to) == *best[ti];
    };
    for (std::size_t i : order) {
        if (!on_optimal[i]) continue;
        const Cell v = grid.cell(i);
        for (Cell u : neighbors(v)) {
            if (!grid.in_bounds(u) || grid.at(u) == CellKind::Solid) continue;
            if (tight(u, v)) on_optimal[grid.index(u)] = true;
        }
    }

    PathPlan plan;
    plan.steps.push_back(start);
    for (Cell cur = start; cur != target;) {
        Cell next = cur;
        for (Cell nb : neighbors(cur)) { // ascending order: first tight hit is the smallest
            if (!grid.in_bounds(nb) || grid.at(nb) == CellKind::Solid) continue;
            if (on_optimal[grid.index(nb)] && tight(cur, nb)) {
                next = nb;
                break;
            }
        }
        cur = next;
        plan.steps.push_back(cur);
    }
    const PathCost total = *best[grid.index(target)];
    plan.augmented_cost = total.augmented;
    plan.box_count = total.boxes;
    for (std::size_t i = 1; i < plan.steps.size(); ++i) {
        if (grid.at(plan.steps[i]) == CellKind::Box) {
            plan.intermediate = IntermediateTarget{plan.steps[i - 1], plan.steps[i]};
            break;
        }
    }
    return plan;
}

/// Augmented cost from `start` to every cell (INT_MAX when unreachable).
inline std::vector<int> cost_field(const GridMap& grid, Cell start, const PunishmentMap& punishment) {
    std::vector<int> dist(grid.size(), INT_MAX);
    using Item = std::pair<int, Cell>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist[grid.index(start)] = 0;
    open.emplace(0, start);
    while (!open.empty()) {
        auto [d, cur] = open.top();
        open.pop();
        if (d != dist[grid.index(cur)]) continue;
        for (Cell nb : neighbors(cur)) {
            if (!grid.in_bounds(nb) || grid.at(nb) == CellKind::Solid) continue;
            const int nd = d + 1 + punishment.at(nb);
            if (nd < dist[grid.index(nb)]) {
                dist[grid.index(nb)] = nd;
                open.emplace(nd, nb);
            }
        }
    }
    return dist;
}

struct DangerWeights {
    int danger_weight = 10;
    int explosion_punishment = 50;
};

/// Adds bomb and explosion danger to `base`. A cell in a live bomb's footprint
/// gains danger_weight * (1 + fuse_ticks - fuse_remaining), so the last fuse
/// tick costs the most. Live explosion cells gain at least as much as the most
/// threatened cell can ever carry.
inline PunishmentMap danger_punishments(const WorldState& state, const PunishmentMap& base,
                                        DangerWeights weights = {}) {
    PunishmentMap threat(state.grid.width(), state.grid.height());
    for (const auto& b : state.bombs) {
        const int fuse = std::clamp(b.fuse_remaining, 1, std::max(1, state.rules.fuse_ticks));
        const int inc = weights.danger_weight * (1 + std::max(0, state.rules.fuse_ticks - fuse));
        for (Cell c : blast_footprint(state.grid, b)) threat.add(c, inc);
    }
    PunishmentMap out = base;
    for (std::size_t i = 0; i < state.grid.size(); ++i) {
        const Cell c = state.grid.cell(i);
        out.add(c, threat.at(c));
    }
    if (!state.explosions.empty()) {
        const int ceiling = std::max(weights.explosion_punishment, threat.max_value() + base.max_value());
        std::set<Cell> hot;
        for (const auto& e : state.explosions) hot.insert(e.cells.begin(), e.cells.end());
        for (Cell c : hot) out.add(c, ceiling);
    }
    return out;
}

/// Action that follows `plan` from `current`. At the bomb cell of an intact
/// intermediate box this is PlaceBomb; at the destination it is Wait.
inline ActionIntent next_step(const PathPlan& plan, Cell current, const GridMap& grid) {
    const auto idx = plan.index_of(current);
    if (!idx) throw OffPlan(current);
    if (*idx + 1 >= plan.steps.size()) return ActionIntent::wait();
    if (plan.intermediate && plan.intermediate->bomb_cell == current &&
        grid.at(plan.intermediate->box_cell) == CellKind::Box)
        return ActionIntent::place_bomb();
    return ActionIntent::move(direction_to(current, plan.steps[*idx + 1]));
}

/// Shortest escape from a hypothetical bomb at `from`: a path (from .. refuge)
/// to a cell outside the bomb's footprint, reachable before it detonates
/// (fuse_remaining - 1 moves, the placement tick carries no move). Walks only
/// Empty cells without other bombs or live explosions.
inline std::optional<std::vector<Cell>> is_safe_retreat(const WorldState& state, Cell from, const BombState& bomb) {
    const auto footprint = blast_footprint(state.grid, bomb);
    auto threatened = [&](Cell c) { return std::binary_search(footprint.begin(), footprint.end(), c); };
    const int max_moves = bomb.fuse_remaining - 1;
    std::map<Cell, Cell> parent;
    std::map<Cell, int> depth;
    std::deque<Cell> queue{from};
    depth[from] = 0;
    while (!queue.empty()) {
        const Cell cur = queue.front();
        queue.pop_front();
        if (!threatened(cur)) {
            std::vector<Cell> path{cur};
            for (Cell c = cur; c != from; c = parent[c]) path.push_back(parent[c]);
            std::reverse(path.begin(), path.end());
            return path;
        }
        if (depth[cur] >= max_moves) continue;
        for (Cell nb : neighbors(cur)) {
            if (depth.contains(nb) || !state.grid.passable(nb) || state.bomb_at(nb) || state.in_explosion(nb))
                continue;
            depth[nb] = depth[cur] + 1;
            parent[nb] = cur;
            queue.push_back(nb);
        }
    }
    return std::nullopt;
}

/// Time-resolved danger: for each cell, the ticks (counted from the current
/// decision, 0 = this tick's move phase) during which standing there is lethal.
class ThreatMap {
public:
    explicit ThreatMap(const WorldState& state)
        : grid_(&state.grid), windows_(state.grid.size()) {
        const int linger = std::max(1, state.rules.explosion_linger);
        // Chained bombs detonate with the earliest bomb whose blast reaches them.
        std::vector<int> eta;
        std::vector<std::vector<Cell>> fps;
        for (const auto& b : state.bombs) {
            eta.push_back(b.fuse_remaining);
            fps.push_back(blast_footprint(state.grid, b));
        }
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t i = 0; i < eta.size(); ++i)
                for (std::size_t j = 0; j < eta.size(); ++j)
                    if (eta[i] < eta[j] &&
                        std::binary_search(fps[i].begin(), fps[i].end(), state.bombs[j].position)) {
                        eta[j] = eta[i];
                        changed = true;
                    }
        }
        for (std::size_t i = 0; i < eta.size(); ++i) {
            // Explodes in phase 1 of decision tick eta-1, lingers `linger` move phases.
            const int first = eta[i] - 1;
            for (Cell c : fps[i]) add(c, first, first + linger - 1);
        }
        for (const auto& e : state.explosions) {
            // Ages in phase 2 before this tick's moves.
            if (e.ticks_remaining >= 2)
                for (Cell c : e.cells) add(c, 0, e.ticks_remaining - 2);
        }
    }

    /// Lethal to be in `c` at the move phase of tick `k`, or when phase 1 of
    /// tick k+1 detonates.
    bool unsafe(Cell c, int k) const {
        for (auto [lo, hi] : windows_[grid_->index(c)])
            if ((k >= lo && k <= hi) || k + 1 == lo) return true;
        return false;
    }

    bool ever_threatened(Cell c) const { return !windows_[grid_->index(c)].empty(); }

    int horizon() const {
        int h = 0;
        for (const auto& w : windows_)
            for (auto [lo, hi] : w) h = std::max(h, hi + 1);
        return h;
    }

private:
    void add(Cell c, int lo, int hi) {
        if (hi < lo) return;
        windows_[grid_->index(c)].emplace_back(std::max(0, lo), hi);
    }

    const GridMap* grid_;
    std::vector<std::vector<std::pair<int, int>>> windows_;
};

/// Time-expanded search from `from` to a cell no bomb or explosion will ever
/// reach. Returns one cell per tick (from .. refuge; repeated cells are waits)
/// or nullopt. `first_move_tick` is 1 when the agent spends the current tick
/// placing a bomb.
inline std::optional<std::vector<Cell>> escape_route(const WorldState& state, const ThreatMap& threats,
                                                     Cell from, int first_move_tick = 0) {
    struct Node {
        Cell cell;
        int k;
        int parent;
    };
    const int horizon = threats.horizon() + 2;
    if (threats.unsafe(from, first_move_tick - 1)) return std::nullopt;
    std::vector<Node> nodes{{from, first_move_tick - 1, -1}};
    std::set<std::pair<Cell, int>> seen{{from, first_move_tick - 1}};
    for (std::size_t head = 0; head < nodes.size(); ++head) {
        const Node cur = nodes[head];
        if (!threats.ever_threatened(cur.cell)) {
            std::vector<Cell> path;
            for (int i = static_cast<int>(head); i >= 0; i = nodes[i].parent) path.push_back(nodes[i].cell);
            std::reverse(path.begin(), path.end());
            return path;
        }
        const int k = cur.k + 1;
        if (k > horizon) continue;
        std::vector<Cell> options{cur.cell};
        for (Cell nb : neighbors(cur.cell)) {
            if (state.grid.passable(nb) && !state.bomb_at(nb)) options.push_back(nb);
        }
        for (Cell c : options) {
            if (threats.unsafe(c, k)) continue;
            if (!seen.insert({c, k}).second) continue;
            nodes.push_back({c, k, static_cast<int>(head)});
        }
    }
    return std::nullopt;
}

} // namespace arena
