#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace gridatlas {

enum class EnvKind : uint8_t { Sokoban, FrozenLake };

enum class CellKind : uint8_t { Floor, Wall, Target, Hole, Goal, Start };

struct GridCoord {
    int x = 0;
    int y = 0;
    bool operator==(const GridCoord&) const = default;
    auto operator<=>(const GridCoord&) const = default;
};

enum class Dir : uint8_t { Up, Down, Left, Right };

inline constexpr int kNumDirs = 4;

GridCoord dir_delta(Dir d);

struct Action {
    Dir dir = Dir::Up;
    bool well_formed = true;
};

// Static geometry of one environment instance. Immutable after generation.
struct GridLayout {
    int width = 0;
    int height = 0;
    std::vector<CellKind> cells;  // row-major, y * width + x
    uint64_t seed = 0;
    EnvKind kind = EnvKind::Sokoban;
    int max_steps = 100;

    CellKind at(int x, int y) const { return cells[static_cast<size_t>(y) * width + x]; }
    CellKind at(GridCoord c) const { return at(c.x, c.y); }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    bool in_bounds(GridCoord c) const { return in_bounds(c.x, c.y); }
    // Off-grid counts as wall for movement, pushing and corner checks.
    bool wall_or_outside(GridCoord c) const {
        return !in_bounds(c) || at(c) == CellKind::Wall;
    }
    // Traversable by a walking entity (box paths use the same notion).
    bool passable(GridCoord c) const {
        return in_bounds(c) && at(c) != CellKind::Wall && at(c) != CellKind::Hole;
    }
    std::vector<GridCoord> cells_of(CellKind kind) const;
};

enum class Terminal : uint8_t { Running, Success, Failure };

enum class Outcome : uint8_t { Success, Failure, Timeout };

// Full mutable environment state; environments hold nothing else.
struct GridState {
    std::shared_ptr<const GridLayout> layout;
    GridCoord player;
    std::vector<GridCoord> boxes;  // kept sorted (x, then y) as a canonical form
    int step_index = 0;
    Terminal terminal = Terminal::Running;

    bool box_at(GridCoord c) const;
    bool all_boxes_on_targets() const;
    // Pure function of layout seed + player + boxes; used as the tabular state key.
    uint64_t occupancy_hash() const;
};

struct TrajectoryStep {
    GridCoord coord;  // primary entity after the step: pushed box if a push happened, else player
    Action action;
    double env_reward = 0.0;
    bool format_valid = true;
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;
    GridCoord initial_coord;
    Outcome outcome = Outcome::Timeout;
    uint64_t layout_seed = 0;
};

// Plain-text snapshot of a state, one char per cell after a "W H" header line.
//   '#' wall   '.' floor   'T' target   'H' hole   'G' goal   'S' start
//   'B' box    'P' player
// Occupied special cells use the lowercase form so parsing stays lossless:
//   'b' box on target, 'p' player on target, 's'/'g'/'h' player on start/goal/hole.
std::string serialize_state(const GridState& state);
GridState parse_state(const std::string& text);

}  // namespace gridatlas
