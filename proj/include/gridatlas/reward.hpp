#pragma once

#include "gridatlas/atlas.hpp"
#include "gridatlas/grid.hpp"
#include "gridatlas/reward_config.hpp"

namespace gridatlas {

// Scaled components; total == env + danger + affinity + format.
struct RewardBreakdown {
    double env = 0.0;
    double danger = 0.0;
    double affinity = 0.0;
    double format = 0.0;
    double total = 0.0;
};

// -danger(entered cell); in [-1, 0]. Throws OutOfBounds off the map.
double danger_penalty(GridCoord entered, const Heatmap& danger_map);

// Potential difference of the affinity field along the entity's move, optionally
// discount-corrected (gamma * phi(next) - phi(prev)); in [-1, 1].
double affinity_gain(GridCoord prev, GridCoord next, const Heatmap& affinity_map,
                     double gamma, bool gamma_correction);

// Dense shaping on top of the sparse env reward. prev_coord is the primary
// entity's coordinate before the step (the trajectory's previous coord).
RewardBreakdown shaped_reward(const TrajectoryStep& step, GridCoord prev_coord,
                              const BlendedMaps& maps, const RewardConfig& config);

}  // namespace gridatlas
