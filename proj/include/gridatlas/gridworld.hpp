#pragma once

#include <cstdint>

#include "gridatlas/grid.hpp"
#include "gridatlas/reward_config.hpp"

namespace gridatlas {

// Seeded environment instance: layout plus its initial state.
struct GeneratedInstance {
    std::shared_ptr<const GridLayout> layout;
    GridState initial;
};

inline constexpr int kGenerationBudget = 1000;

// Reverse-play generation: boxes start on targets and are pulled backwards, so a
// forward push solution exists by construction. Throws InfeasibleGeneration once
// the retry budget is exhausted (or immediately when the grid cannot fit n_boxes).
GeneratedInstance generate_sokoban(uint64_t seed, int width, int height, int n_boxes,
                                   int max_steps = 100);

// Deterministic lake: Start in the top-left corner, Goal in the bottom-right,
// holes sampled i.i.d.; resampled until a Start->Goal path exists.
GeneratedInstance generate_frozenlake(uint64_t seed, int width, int height,
                                      double hole_fraction, int max_steps = 100);

// Why the episode ended, as seen by the environment.
enum class TerminalCause : uint8_t { None, Success, Deadlock, Hole, Timeout };

struct StepResult {
    GridState next;
    TrajectoryStep step;
    TerminalCause cause = TerminalCause::None;
};

// Advances one step. Blocked moves and malformed actions only consume budget.
// env_reward is sparse: nonzero only when the step ends the episode.
// Throws SteppedTerminal when called on a finished state.
StepResult step(const GridState& state, Action action, const RewardConfig& rewards);

// A box pushed onto a non-target cell with two orthogonal walls at 90 degrees can
// never be recovered; the episode fails eagerly on that push.
bool deadlocked_box(const GridLayout& layout, GridCoord box);

// Maps a continuous planar position to its grid cell; a cell boundary belongs to
// the higher-index cell. Throws OutOfBounds when either index is negative.
GridCoord project_continuous(double pos_x, double pos_z, double origin_x, double origin_z,
                             double resolution);

inline constexpr double kReferenceResolution = 0.25;  // meters per cell

}  // namespace gridatlas
