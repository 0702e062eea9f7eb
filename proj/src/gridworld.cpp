#include "gridatlas/gridworld.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "gridatlas/errors.hpp"
#include "gridatlas/rng.hpp"

namespace gridatlas {

namespace {

bool path_exists(const GridLayout& lay, GridCoord from, GridCoord to) {
    if (!lay.passable(from) || !lay.passable(to)) return false;
    std::vector<uint8_t> seen(lay.cells.size(), 0);
    std::queue<GridCoord> q;
    q.push(from);
    seen[static_cast<size_t>(from.y) * lay.width + from.x] = 1;
    while (!q.empty()) {
        GridCoord c = q.front();
        q.pop();
        if (c == to) return true;
        for (int d = 0; d < kNumDirs; ++d) {
            GridCoord delta = dir_delta(static_cast<Dir>(d));
            GridCoord n{c.x + delta.x, c.y + delta.y};
            if (!lay.passable(n)) continue;
            uint8_t& mark = seen[static_cast<size_t>(n.y) * lay.width + n.x];
            if (mark) continue;
            mark = 1;
            q.push(n);
        }
    }
    return false;
}

}  // namespace

bool deadlocked_box(const GridLayout& layout, GridCoord box) {
    if (layout.at(box) == CellKind::Target) return false;
    auto wall = [&](int dx, int dy) {
        return layout.wall_or_outside({box.x + dx, box.y + dy});
    };
    bool vertical = wall(0, -1) || wall(0, 1);
    bool horizontal = wall(-1, 0) || wall(1, 0);
    return vertical && horizontal;
}

GeneratedInstance generate_sokoban(uint64_t seed, int width, int height, int n_boxes,
                                   int max_steps) {
    if (width < 4 || height < 4) throw std::invalid_argument("sokoban: width and height must be >= 4");
    if (n_boxes < 1) throw std::invalid_argument("sokoban: need at least one box");
    const int interior = (width - 2) * (height - 2);
    if (2 * n_boxes + 1 > interior)
        throw InfeasibleGeneration(kGenerationBudget,
                                   "sokoban: grid too small for " + std::to_string(n_boxes) + " boxes");

    for (int attempt = 0; attempt < kGenerationBudget; ++attempt) {
        Rng rng(derive_seed(seed, 0x536f6b, attempt));

        auto layout = std::make_shared<GridLayout>();
        layout->width = width;
        layout->height = height;
        layout->seed = seed;
        layout->kind = EnvKind::Sokoban;
        layout->max_steps = max_steps;
        layout->cells.assign(static_cast<size_t>(width) * height, CellKind::Wall);

        // Carve a connected floor region with a random walk over the interior.
        const int floor_goal = std::max(2 * n_boxes + 2, (interior * 3) / 5);
        GridCoord cur{1 + static_cast<int>(rng.next_below(width - 2)),
                      1 + static_cast<int>(rng.next_below(height - 2))};
        std::vector<GridCoord> floors;
        auto carve = [&](GridCoord c) {
            CellKind& k = layout->cells[static_cast<size_t>(c.y) * width + c.x];
            if (k == CellKind::Wall) {
                k = CellKind::Floor;
                floors.push_back(c);
            }
        };
        carve(cur);
        for (int i = 0; i < interior * 12 && static_cast<int>(floors.size()) < floor_goal; ++i) {
            GridCoord d = dir_delta(static_cast<Dir>(rng.next_below(kNumDirs)));
            GridCoord n{cur.x + d.x, cur.y + d.y};
            if (n.x < 1 || n.x > width - 2 || n.y < 1 || n.y > height - 2) continue;
            cur = n;
            carve(cur);
        }
        if (static_cast<int>(floors.size()) < 2 * n_boxes + 1) continue;

        // Targets on distinct floor cells; boxes start solved, sitting on them.
        std::vector<GridCoord> pool = floors;
        std::vector<GridCoord> targets;
        for (int i = 0; i < n_boxes; ++i) {
            size_t pick = rng.next_below(static_cast<uint32_t>(pool.size()));
            targets.push_back(pool[pick]);
            pool.erase(pool.begin() + pick);
        }
        for (GridCoord t : targets)
            layout->cells[static_cast<size_t>(t.y) * width + t.x] = CellKind::Target;

        std::vector<GridCoord> boxes = targets;
        size_t pick = rng.next_below(static_cast<uint32_t>(pool.size()));
        GridCoord player = pool[pick];

        // Pull boxes backwards; reversing those pulls is a valid push solution.
        auto box_index = [&](GridCoord c) -> int {
            for (size_t i = 0; i < boxes.size(); ++i)
                if (boxes[i] == c) return static_cast<int>(i);
            return -1;
        };
        const int pulls = interior * 6;
        for (int i = 0; i < pulls; ++i) {
            GridCoord d = dir_delta(static_cast<Dir>(rng.next_below(kNumDirs)));
            GridCoord dest{player.x + d.x, player.y + d.y};
            if (layout->wall_or_outside(dest) || box_index(dest) >= 0) continue;
            int behind = box_index({player.x - d.x, player.y - d.y});
            GridCoord old = player;
            player = dest;
            if (behind >= 0) boxes[static_cast<size_t>(behind)] = old;
        }

        bool off_target = false;
        bool stuck = false;
        for (GridCoord b : boxes) {
            if (layout->at(b) != CellKind::Target) off_target = true;
            if (deadlocked_box(*layout, b)) stuck = true;
        }
        if (!off_target || stuck) continue;

        GridState initial;
        initial.layout = layout;
        initial.player = player;
        initial.boxes = boxes;
        std::sort(initial.boxes.begin(), initial.boxes.end());
        return {layout, initial};
    }
    throw InfeasibleGeneration(kGenerationBudget,
                               "sokoban: no feasible instance within " +
                                   std::to_string(kGenerationBudget) + " attempts");
}

GeneratedInstance generate_frozenlake(uint64_t seed, int width, int height,
                                      double hole_fraction, int max_steps) {
    if (width < 2 || height < 2) throw std::invalid_argument("frozenlake: width and height must be >= 2");
    if (hole_fraction < 0.0 || hole_fraction >= 1.0)
        throw std::invalid_argument("frozenlake: hole_fraction must be in [0, 1)");

    const GridCoord start{0, 0};
    const GridCoord goal{width - 1, height - 1};
    for (int attempt = 0; attempt < kGenerationBudget; ++attempt) {
        Rng rng(derive_seed(seed, 0x4c616b65, attempt));
        auto layout = std::make_shared<GridLayout>();
        layout->width = width;
        layout->height = height;
        layout->seed = seed;
        layout->kind = EnvKind::FrozenLake;
        layout->max_steps = max_steps;
        layout->cells.assign(static_cast<size_t>(width) * height, CellKind::Floor);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                GridCoord c{x, y};
                if (c == start || c == goal) continue;
                if (rng.next_bool(hole_fraction))
                    layout->cells[static_cast<size_t>(y) * width + x] = CellKind::Hole;
            }
        layout->cells[static_cast<size_t>(start.y) * width + start.x] = CellKind::Start;
        layout->cells[static_cast<size_t>(goal.y) * width + goal.x] = CellKind::Goal;
        if (!path_exists(*layout, start, goal)) continue;

        GridState initial;
        initial.layout = layout;
        initial.player = start;
        return {layout, initial};
    }
    throw InfeasibleGeneration(kGenerationBudget,
                               "frozenlake: no traversable lake within " +
                                   std::to_string(kGenerationBudget) + " attempts");
}

StepResult step(const GridState& state, Action action, const RewardConfig& rewards) {
    if (state.terminal != Terminal::Running)
        throw SteppedTerminal("step() called on a terminal state");

    const GridLayout& lay = *state.layout;
    StepResult r;
    r.next = state;
    r.next.step_index = state.step_index + 1;
    r.step.action = action;
    r.step.format_valid = action.well_formed;
    r.step.coord = state.player;

    if (action.well_formed) {
        GridCoord d = dir_delta(action.dir);
        GridCoord dest{state.player.x + d.x, state.player.y + d.y};
        if (lay.kind == EnvKind::Sokoban) {
            if (!lay.wall_or_outside(dest)) {
                if (state.box_at(dest)) {
                    GridCoord beyond{dest.x + d.x, dest.y + d.y};
                    if (!lay.wall_or_outside(beyond) && !state.box_at(beyond)) {
                        auto it = std::find(r.next.boxes.begin(), r.next.boxes.end(), dest);
                        *it = beyond;
                        std::sort(r.next.boxes.begin(), r.next.boxes.end());
                        r.next.player = dest;
                        r.step.coord = beyond;
                        if (r.next.all_boxes_on_targets()) {
                            r.next.terminal = Terminal::Success;
                            r.cause = TerminalCause::Success;
                        } else if (deadlocked_box(lay, beyond)) {
                            r.next.terminal = Terminal::Failure;
                            r.cause = TerminalCause::Deadlock;
                        }
                    }
                } else {
                    r.next.player = dest;
                    r.step.coord = dest;
                }
            }
        } else {  // FrozenLake: no walls, edges block, holes and goal absorb
            if (lay.in_bounds(dest)) {
                r.next.player = dest;
                r.step.coord = dest;
                if (lay.at(dest) == CellKind::Hole) {
                    r.next.terminal = Terminal::Failure;
                    r.cause = TerminalCause::Hole;
                } else if (lay.at(dest) == CellKind::Goal) {
                    r.next.terminal = Terminal::Success;
                    r.cause = TerminalCause::Success;
                }
            }
        }
    }

    if (r.next.terminal == Terminal::Running && r.next.step_index >= lay.max_steps) {
        r.next.terminal = Terminal::Failure;
        r.cause = TerminalCause::Timeout;
    }

    if (r.next.terminal == Terminal::Success)
        r.step.env_reward = rewards.success;
    else if (r.next.terminal == Terminal::Failure)
        r.step.env_reward = rewards.failure;
    return r;
}

GridCoord project_continuous(double pos_x, double pos_z, double origin_x, double origin_z,
                             double resolution) {
    if (resolution <= 0.0) throw std::invalid_argument("projection: resolution must be positive");
    int cx = static_cast<int>(std::floor((pos_x - origin_x) / resolution));
    int cz = static_cast<int>(std::floor((pos_z - origin_z) / resolution));
    if (cx < 0 || cz < 0)
        throw OutOfBounds("projection: position " + std::to_string(pos_x) + "," +
                          std::to_string(pos_z) + " falls before the grid origin");
    return {cx, cz};
}

}  // namespace gridatlas
