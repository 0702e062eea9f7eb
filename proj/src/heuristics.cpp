#include "gridatlas/heuristics.hpp"

#include <algorithm>
#include <queue>

#include "gridatlas/errors.hpp"
#include "gridatlas/gridworld.hpp"
#include "gridatlas/rng.hpp"

namespace gridatlas {

uint64_t Heatmap::content_hash() const {
    Digest d;
    d.add_i64(width);
    d.add_i64(height);
    for (double v : values) d.add_double(v);
    return d.value();
}

DistanceField bfs_distance_field(const GridLayout& layout,
                                 const std::vector<GridCoord>& sources) {
    DistanceField field;
    field.width = layout.width;
    field.height = layout.height;
    field.dist.assign(layout.cells.size(), std::nullopt);

    std::queue<GridCoord> frontier;
    for (GridCoord s : sources) {
        if (!layout.in_bounds(s))
            throw OutOfBounds("bfs: source cell outside the layout");
        if (!layout.passable(s)) continue;
        auto& d = field.dist[static_cast<size_t>(s.y) * layout.width + s.x];
        if (!d) {
            d = 0;
            frontier.push(s);
        }
    }
    while (!frontier.empty()) {
        GridCoord c = frontier.front();
        frontier.pop();
        int base = *field.at(c);
        for (int i = 0; i < kNumDirs; ++i) {
            GridCoord delta = dir_delta(static_cast<Dir>(i));
            GridCoord n{c.x + delta.x, c.y + delta.y};
            if (!layout.passable(n)) continue;
            auto& d = field.dist[static_cast<size_t>(n.y) * layout.width + n.x];
            if (d) continue;
            d = base + 1;
            frontier.push(n);
        }
    }
    return field;
}

namespace {

std::vector<GridCoord> goal_cells(const GridLayout& layout) {
    return layout.cells_of(layout.kind == EnvKind::Sokoban ? CellKind::Target
                                                           : CellKind::Goal);
}

}  // namespace

Heatmap affinity_heuristic(const GridLayout& layout) {
    Heatmap m = Heatmap::zeros(layout.width, layout.height);
    DistanceField field = bfs_distance_field(layout, goal_cells(layout));

    int d_max = 0;
    for (const auto& d : field.dist)
        if (d) d_max = std::max(d_max, *d);

    for (int y = 0; y < layout.height; ++y)
        for (int x = 0; x < layout.width; ++x) {
            auto d = field.at(x, y);
            if (!d) continue;  // walls, holes, unreachable pockets
            m.at(x, y) = d_max == 0 ? 1.0 : 1.0 - static_cast<double>(*d) / d_max;
        }
    m.clamp01();
    return m;
}

Heatmap danger_heuristic(const GridLayout& layout) {
    Heatmap m = Heatmap::zeros(layout.width, layout.height);
    for (int y = 0; y < layout.height; ++y)
        for (int x = 0; x < layout.width; ++x) {
            GridCoord c{x, y};
            CellKind k = layout.at(c);
            if (layout.kind == EnvKind::Sokoban) {
                if (k != CellKind::Floor) continue;  // walls and targets stay 0
                double v = 0.0;
                if (deadlocked_box(layout, c))
                    v = 1.0;
                else {
                    for (int i = 0; i < kNumDirs; ++i) {
                        GridCoord delta = dir_delta(static_cast<Dir>(i));
                        if (layout.wall_or_outside({x + delta.x, y + delta.y})) v = 0.4;
                    }
                }
                m.at(c) = v;
            } else {
                if (k == CellKind::Goal) continue;
                if (k == CellKind::Hole) {
                    m.at(c) = 1.0;
                    continue;
                }
                for (int i = 0; i < kNumDirs; ++i) {
                    GridCoord delta = dir_delta(static_cast<Dir>(i));
                    GridCoord n{x + delta.x, y + delta.y};
                    if (layout.in_bounds(n) && layout.at(n) == CellKind::Hole)
                        m.at(c) = std::max(m.at(c), 0.6);
                }
            }
        }
    m.clamp01();
    return m;
}

}  // namespace gridatlas
