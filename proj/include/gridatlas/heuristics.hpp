#pragma once

#include <optional>
#include <vector>

#include "gridatlas/grid.hpp"
#include "gridatlas/heatmap.hpp"

namespace gridatlas {

// Multi-source BFS distances over passable cells (walls and holes block).
// Unreachable cells carry nullopt.
struct DistanceField {
    int width = 0;
    int height = 0;
    std::vector<std::optional<int>> dist;

    std::optional<int> at(int x, int y) const {
        return dist[static_cast<size_t>(y) * width + x];
    }
    std::optional<int> at(GridCoord c) const { return at(c.x, c.y); }
};

DistanceField bfs_distance_field(const GridLayout& layout,
                                 const std::vector<GridCoord>& sources);

// 1 - d/d_max toward the layout's goal cells (targets for box puzzles, Goal for
// lakes). Walls, holes and unreachable cells get 0; if every reachable cell is a
// source (d_max = 0) all of them get 1.
Heatmap affinity_heuristic(const GridLayout& layout);

// Box puzzles: non-target corners 1.0, other wall-adjacent cells 0.4.
// Lakes: holes 1.0, hole-adjacent cells 0.6. Overlaps take the maximum; goal
// cells and targets are always 0.
Heatmap danger_heuristic(const GridLayout& layout);

}  // namespace gridatlas
