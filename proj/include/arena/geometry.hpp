#pragma once

#include <array>
#include <compare>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace arena {

/// Base of every fault raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Grid coordinate. Ordering is (x, y); this is the order used for every
/// lexicographic tie-break in the library.
struct Cell {
    int x = 0;
    int y = 0;

    friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline std::string to_string(Cell c) {
    return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

enum class Direction { North, South, East, West };

inline Cell step(Cell c, Direction d) {
    switch (d) {
    case Direction::North: return {c.x, c.y - 1};
    case Direction::South: return {c.x, c.y + 1};
    case Direction::East: return {c.x + 1, c.y};
    case Direction::West: return {c.x - 1, c.y};
    }
    return c;
}

inline const char* direction_name(Direction d) {
    switch (d) {
    case Direction::North: return "N";
    case Direction::South: return "S";
    case Direction::East: return "E";
    case Direction::West: return "W";
    }
    return "?";
}

/// Direction that moves `from` onto the 4-adjacent cell `to`.
inline Direction direction_to(Cell from, Cell to) {
    if (to.x > from.x) return Direction::East;
    if (to.x < from.x) return Direction::West;
    if (to.y > from.y) return Direction::South;
    return Direction::North;
}

inline int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

inline bool adjacent(Cell a, Cell b) { return manhattan(a, b) == 1; }

/// The four neighbours in ascending Cell order: W, N, S, E.
inline std::array<Cell, 4> neighbors(Cell c) {
    return {Cell{c.x - 1, c.y}, Cell{c.x, c.y - 1}, Cell{c.x, c.y + 1}, Cell{c.x + 1, c.y}};
}

/// Row-major key used for event ordering.
inline std::pair<int, int> row_major(Cell c) { return {c.y, c.x}; }

} // namespace arena
