#pragma once

// Turn-based team Bomberman: grid, bombs, explosions, agents and the tick
// function that advances them. Everything here is a pure function of its
// inputs; WorldState is a plain value.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "arena/geometry.hpp"

namespace arena {

class MapParseError : public Error {
public:
    using Error::Error;
};

class SpawnError : public Error {
public:
    using Error::Error;
};

class MissingIntent : public Error {
public:
    explicit MissingIntent(int agent)
        : Error("no intent for alive agent " + std::to_string(agent)), agent_id(agent) {}
    int agent_id;
};

class UnknownAgent : public Error {
public:
    explicit UnknownAgent(int agent) : Error("unknown agent " + std::to_string(agent)) {}
};

enum class CellKind : std::uint8_t { Empty, Solid, Box };

class GridMap {
public:
    GridMap() = default;
    GridMap(int width, int height, CellKind fill = CellKind::Empty)
        : width_(width), height_(height), cells_(static_cast<std::size_t>(width * height), fill) {}

    int width() const { return width_; }
    int height() const { return height_; }

    bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }

    /// Off-grid cells read as Solid.
    CellKind at(Cell c) const { return in_bounds(c) ? cells_[index(c)] : CellKind::Solid; }

    void set(Cell c, CellKind kind) { cells_.at(index(c)) = kind; }

    bool passable(Cell c) const { return at(c) == CellKind::Empty; }

    int count(CellKind kind) const {
        return static_cast<int>(std::count(cells_.begin(), cells_.end(), kind));
    }

    std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y * width_ + c.x); }
    Cell cell(std::size_t i) const {
        return {static_cast<int>(i) % width_, static_cast<int>(i) / width_};
    }
    std::size_t size() const { return cells_.size(); }

    friend bool operator==(const GridMap&, const GridMap&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<CellKind> cells_;
};

struct Spawn {
    int team = 0;
    char glyph = 0;
    Cell cell;
};

/// A parsed ASCII map: terrain plus spawn glyph positions.
struct MapLayout {
    GridMap grid;
    std::vector<Spawn> spawns;
};

/// Parses the ASCII map format: '#' Solid, '+' Box, '.' Empty, '1'-'4' team-1
/// spawns, 'a'-'d' team-2 spawns. Rows must have equal length and the border
/// must be Solid.
inline MapLayout parse_map(std::string_view text) {
    std::vector<std::string> rows;
    std::string line;
    std::istringstream in{std::string(text)};
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        rows.push_back(line);
    }
    while (!rows.empty() && rows.back().empty()) rows.pop_back();
    if (rows.empty()) throw MapParseError("map is empty");

    const int width = static_cast<int>(rows.front().size());
    const int height = static_cast<int>(rows.size());
    if (width < 3 || height < 3) throw MapParseError("map must be at least 3x3");

    MapLayout layout{GridMap(width, height), {}};
    std::set<char> seen;
    for (int y = 0; y < height; ++y) {
        if (static_cast<int>(rows[y].size()) != width)
            throw MapParseError("row " + std::to_string(y) + " has length " +
                                std::to_string(rows[y].size()) + ", expected " +
                                std::to_string(width));
        for (int x = 0; x < width; ++x) {
            const char g = rows[y][x];
            const Cell c{x, y};
            const bool border = x == 0 || y == 0 || x == width - 1 || y == height - 1;
            if (border && g != '#')
                throw MapParseError("border cell " + to_string(c) + " is not '#'");
            switch (g) {
            case '#': layout.grid.set(c, CellKind::Solid); break;
            case '+': layout.grid.set(c, CellKind::Box); break;
            case '.': break;
            case '1': case '2': case '3': case '4':
            case 'a': case 'b': case 'c': case 'd': {
                if (!seen.insert(g).second)
                    throw MapParseError(std::string("duplicate spawn glyph '") + g + "'");
                const int team = (g >= '1' && g <= '4') ? 1 : 2;
                layout.spawns.push_back({team, g, c});
                break;
            }
            default:
                throw MapParseError(std::string("unknown glyph '") + g + "' at " + to_string(c));
            }
        }
    }
    std::sort(layout.spawns.begin(), layout.spawns.end(),
              [](const Spawn& a, const Spawn& b) {
                  return std::pair(a.team, a.glyph) < std::pair(b.team, b.glyph);
              });
    return layout;
}

/// Match constants. Defaults are small so desk-scale matches stay short.
struct WorldRules {
    int fuse_ticks = 8;
    int blast_range = 2;
    int explosion_linger = 2;
    int bombs_capacity = 1;
};

struct AgentBody {
    int id = 0;
    int team = 0;
    Cell position;
    bool alive = true;
    int bombs_available = 0;
    int bombs_capacity = 1;
};

struct BombState {
    int owner = 0;
    Cell position;
    int fuse_remaining = 0;
    int blast_range = 1;
};

struct ExplosionState {
    std::vector<Cell> cells;
    int ticks_remaining = 0;
};

struct ActionIntent {
    enum class Kind { Move, PlaceBomb, Wait };
    Kind kind = Kind::Wait;
    Direction direction = Direction::North;

    static ActionIntent move(Direction d) { return {Kind::Move, d}; }
    static ActionIntent place_bomb() { return {Kind::PlaceBomb, Direction::North}; }
    static ActionIntent wait() { return {}; }

    bool is_move() const { return kind == Kind::Move; }

    friend bool operator==(const ActionIntent& a, const ActionIntent& b) {
        return a.kind == b.kind && (a.kind != Kind::Move || a.direction == b.direction);
    }
};

inline std::string to_string(const ActionIntent& a) {
    switch (a.kind) {
    case ActionIntent::Kind::Move: return std::string("Move(") + direction_name(a.direction) + ")";
    case ActionIntent::Kind::PlaceBomb: return "PlaceBomb";
    case ActionIntent::Kind::Wait: return "Wait";
    }
    return "?";
}

struct WorldState {
    int tick = 0;
    GridMap grid;
    std::vector<AgentBody> agents; // sorted by id
    std::vector<BombState> bombs;
    std::vector<ExplosionState> explosions;
    std::uint64_t rng_seed = 0;
    WorldRules rules;
    bool match_decided = false; // MatchWon already emitted

    const AgentBody* find_agent(int id) const {
        for (const auto& a : agents)
            if (a.id == id) return &a;
        return nullptr;
    }
    AgentBody* find_agent(int id) {
        for (auto& a : agents)
            if (a.id == id) return &a;
        return nullptr;
    }
    const AgentBody& agent(int id) const {
        if (const auto* a = find_agent(id)) return *a;
        throw UnknownAgent(id);
    }
    const BombState* bomb_at(Cell c) const {
        for (const auto& b : bombs)
            if (b.position == c) return &b;
        return nullptr;
    }
    bool in_explosion(Cell c) const {
        for (const auto& e : explosions)
            if (std::find(e.cells.begin(), e.cells.end(), c) != e.cells.end()) return true;
        return false;
    }
    const AgentBody* alive_agent_at(Cell c) const {
        for (const auto& a : agents)
            if (a.alive && a.position == c) return &a;
        return nullptr;
    }
    std::vector<int> teams() const {
        std::set<int> t;
        for (const auto& a : agents) t.insert(a.team);
        return {t.begin(), t.end()};
    }
    int live_bombs_owned(int id) const {
        return static_cast<int>(std::count_if(bombs.begin(), bombs.end(),
                                              [id](const BombState& b) { return b.owner == id; }));
    }
};

/// Builds the tick-0 state. Agent ids are assigned 1..n in (team, glyph) order.
inline WorldState new_world(const MapLayout& layout, const WorldRules& rules, std::uint64_t seed) {
    std::map<int, int> per_team;
    for (const auto& s : layout.spawns) {
        if (layout.grid.at(s.cell) != CellKind::Empty)
            throw SpawnError("spawn " + std::string(1, s.glyph) + " is not on an Empty cell");
        ++per_team[s.team];
    }
    for (int team : {1, 2}) {
        if (per_team[team] < 2)
            throw SpawnError("team " + std::to_string(team) + " has " +
                             std::to_string(per_team[team]) + " spawn(s); at least 2 required");
    }
    WorldState w;
    w.grid = layout.grid;
    w.rng_seed = seed;
    w.rules = rules;
    int next_id = 1;
    for (const auto& s : layout.spawns) {
        w.agents.push_back({next_id++, s.team, s.cell, true, rules.bombs_capacity, rules.bombs_capacity});
    }
    return w;
}

/// Cells hit by `bomb`: its own cell plus four rays of up to blast_range cells.
/// A ray stops before Solid and stops at (including) the first Box.
inline std::vector<Cell> blast_footprint(const GridMap& grid, const BombState& bomb) {
    std::vector<Cell> out{bomb.position};
    for (Direction d : {Direction::North, Direction::South, Direction::East, Direction::West}) {
        Cell c = bomb.position;
        for (int i = 0; i < bomb.blast_range; ++i) {
            c = step(c, d);
            const CellKind k = grid.at(c);
            if (k == CellKind::Solid) break;
            out.push_back(c);
            if (k == CellKind::Box) break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<Cell> blast_footprint(const WorldState& state, const BombState& bomb) {
    return blast_footprint(state.grid, bomb);
}

enum class WorldEventKind { BombPlaced, BombExploded, BoxDestroyed, AgentDied, MatchWon };

inline const char* event_name(WorldEventKind k) {
    switch (k) {
    case WorldEventKind::BombPlaced: return "BombPlaced";
    case WorldEventKind::BombExploded: return "BombExploded";
    case WorldEventKind::BoxDestroyed: return "BoxDestroyed";
    case WorldEventKind::AgentDied: return "AgentDied";
    case WorldEventKind::MatchWon: return "MatchWon";
    }
    return "?";
}

struct WorldEvent {
    WorldEventKind kind{};
    int tick = 0;
    int phase = 0;
    Cell cell{-1, -1};
    int agent = 0;  // BombPlaced/BombExploded: owner; AgentDied: victim
    int winner = 0; // MatchWon: winning team, 0 for a draw
};

/// Outcome of is_terminal: a winning team, or a draw.
struct MatchOutcome {
    int winner = 0; // 0 means Draw
    bool draw() const { return winner == 0; }
    friend bool operator==(const MatchOutcome&, const MatchOutcome&) = default;
};

inline std::optional<MatchOutcome> is_terminal(const WorldState& state) {
    std::set<int> alive_teams;
    for (const auto& a : state.agents)
        if (a.alive) alive_teams.insert(a.team);
    if (alive_teams.empty()) return MatchOutcome{0};
    if (alive_teams.size() == 1) return MatchOutcome{*alive_teams.begin()};
    return std::nullopt;
}

struct StepResult {
    WorldState state;
    std::vector<WorldEvent> events;
};

namespace detail {

inline void sort_events(std::vector<WorldEvent>& events) {
    std::stable_sort(events.begin(), events.end(), [](const WorldEvent& a, const WorldEvent& b) {
        return std::tuple(a.phase, row_major(a.cell), a.agent, static_cast<int>(a.kind)) <
               std::tuple(b.phase, row_major(b.cell), b.agent, static_cast<int>(b.kind));
    });
}

} // namespace detail

/// Advances the world by one tick. Phases: (1) fuses and chained explosions,
/// (2) explosion linger, (3) bomb placement, (4) movement and explosion
/// deaths, (5) tick increment and win check.
inline StepResult apply_actions(WorldState state, const std::map<int, ActionIntent>& intents) {
    for (const auto& a : state.agents)
        if (a.alive && !intents.contains(a.id)) throw MissingIntent(a.id);

    std::vector<WorldEvent> events;
    const int tick = state.tick;
    auto emit = [&](WorldEventKind kind, int phase, Cell cell, int agent, int winner = 0) {
        events.push_back({kind, tick, phase, cell, agent, winner});
    };

    // Phase 1: fuses, simultaneous chained detonation against the pre-blast grid.
    for (auto& b : state.bombs) --b.fuse_remaining;
    std::vector<bool> exploding(state.bombs.size());
    for (std::size_t i = 0; i < state.bombs.size(); ++i) exploding[i] = state.bombs[i].fuse_remaining <= 0;
    std::vector<std::vector<Cell>> footprints(state.bombs.size());
    std::vector<bool> done(state.bombs.size());
    for (bool progress = true; progress;) {
        progress = false;
        for (std::size_t i = 0; i < state.bombs.size(); ++i) {
            if (!exploding[i] || done[i]) continue;
            done[i] = true;
            progress = true;
            footprints[i] = blast_footprint(state.grid, state.bombs[i]);
            for (std::size_t j = 0; j < state.bombs.size(); ++j) {
                if (exploding[j]) continue;
                const auto& fp = footprints[i];
                if (std::binary_search(fp.begin(), fp.end(), state.bombs[j].position)) exploding[j] = true;
            }
        }
    }
    std::set<Cell> blasted;
    std::vector<ExplosionState> fresh;
    std::vector<BombState> remaining;
    for (std::size_t i = 0; i < state.bombs.size(); ++i) {
        const auto& b = state.bombs[i];
        if (!exploding[i]) {
            remaining.push_back(b);
            continue;
        }
        emit(WorldEventKind::BombExploded, 1, b.position, b.owner);
        blasted.insert(footprints[i].begin(), footprints[i].end());
        fresh.push_back({footprints[i], state.rules.explosion_linger});
        if (auto* owner = state.find_agent(b.owner)) ++owner->bombs_available;
    }
    state.bombs = std::move(remaining);
    for (Cell c : blasted) {
        if (state.grid.at(c) == CellKind::Box) {
            state.grid.set(c, CellKind::Empty);
            emit(WorldEventKind::BoxDestroyed, 1, c, 0);
        }
    }
    for (auto& a : state.agents) {
        if (a.alive && blasted.contains(a.position)) {
            a.alive = false;
            emit(WorldEventKind::AgentDied, 1, a.position, a.id);
        }
    }

    // Phase 2: explosions from earlier ticks age; fresh ones start full.
    std::vector<ExplosionState> kept;
    for (auto& e : state.explosions) {
        if (--e.ticks_remaining > 0) kept.push_back(std::move(e));
    }
    for (auto& e : fresh)
        if (e.ticks_remaining > 0) kept.push_back(std::move(e));
    state.explosions = std::move(kept);

    // Phase 3: bomb placement in agent id order.
    for (auto& a : state.agents) {
        if (!a.alive) continue;
        if (intents.at(a.id).kind != ActionIntent::Kind::PlaceBomb) continue;
        if (a.bombs_available <= 0 || state.bomb_at(a.position)) continue;
        --a.bombs_available;
        state.bombs.push_back({a.id, a.position, state.rules.fuse_ticks, state.rules.blast_range});
        emit(WorldEventKind::BombPlaced, 3, a.position, a.id);
    }

    // Phase 4: movement. Invalid moves wait; conflicts go to the lowest id;
    // agents never swap or step onto a stationary agent.
    std::map<int, Cell> dest;
    for (const auto& a : state.agents) {
        if (!a.alive) continue;
        dest[a.id] = a.position;
        const auto& intent = intents.at(a.id);
        if (!intent.is_move()) continue;
        const Cell to = step(a.position, intent.direction);
        if (!state.grid.passable(to) || state.bomb_at(to)) continue;
        dest[a.id] = to;
    }
    auto pos_of = [&](int id) { return state.find_agent(id)->position; };
    for (bool changed = true; changed;) {
        changed = false;
        std::map<Cell, std::vector<int>> claims;
        for (const auto& [id, c] : dest) claims[c].push_back(id);
        for (const auto& [cell, ids] : claims) {
            if (ids.size() < 2) continue;
            const bool someone_stays = std::any_of(ids.begin(), ids.end(),
                                                   [&](int id) { return pos_of(id) == cell; });
            for (std::size_t k = 0; k < ids.size(); ++k) {
                const int id = ids[k];
                if (pos_of(id) == cell) continue;
                if (someone_stays || k > 0) {
                    dest[id] = pos_of(id);
                    changed = true;
                }
            }
        }
        for (auto& [a, ca] : dest) {
            for (auto& [b, cb] : dest) {
                if (a >= b || ca == pos_of(a) || cb == pos_of(b)) continue;
                if (ca == pos_of(b) && cb == pos_of(a)) {
                    ca = pos_of(a);
                    cb = pos_of(b);
                    changed = true;
                }
            }
        }
    }
    for (auto& a : state.agents) {
        if (!a.alive) continue;
        a.position = dest[a.id];
        if (state.in_explosion(a.position)) {
            a.alive = false;
            emit(WorldEventKind::AgentDied, 4, a.position, a.id);
        }
    }

    // Phase 5.
    state.tick += 1;
    if (!state.match_decided) {
        if (auto outcome = is_terminal(state)) {
            state.match_decided = true;
            emit(WorldEventKind::MatchWon, 5, {-1, -1}, 0, outcome->winner);
        }
    }
    detail::sort_events(events);
    return {std::move(state), std::move(events)};
}

/// Full-observability snapshot handed to one agent. The world pointer is
/// shared and immutable.
struct Percept {
    int self = 0;
    int team = 0;
    bool alive = false;
    Cell position;
    int bombs_available = 0;
    int tick = 0;
    std::shared_ptr<const WorldState> world;

    const WorldState& state() const { return *world; }
};

inline Percept percept_for(std::shared_ptr<const WorldState> world, int agent_id) {
    const AgentBody& a = world->agent(agent_id);
    return {a.id, a.team, a.alive, a.position, a.bombs_available, world->tick, std::move(world)};
}

inline Percept percept_for(const WorldState& state, int agent_id) {
    return percept_for(std::make_shared<const WorldState>(state), agent_id);
}

} // namespace arena
