#include "gridatlas/reward.hpp"

#include "gridatlas/errors.hpp"

namespace gridatlas {

RewardConfig RewardConfig::sokoban_preset() {
    RewardConfig c;
    c.success = 1.0;
    c.failure = -0.1;
    c.format_penalty = -0.5;
    c.lambda_danger = 0.05;
    c.lambda_affinity = 0.05;
    c.gamma = 0.99;
    c.gamma_correction = false;
    return c;
}

RewardConfig RewardConfig::frozenlake_preset() {
    return sokoban_preset();  // the grid presets share one reward row
}

RewardConfig RewardConfig::preset_for(EnvKind kind) {
    return kind == EnvKind::Sokoban ? sokoban_preset() : frozenlake_preset();
}

RewardConfig RewardConfig::preset_by_name(const std::string& name) {
    if (name == "sokoban") return sokoban_preset();
    if (name == "frozenlake") return frozenlake_preset();
    throw ConfigError("unknown reward preset '" + name + "'", 0, "reward_preset");
}

double danger_penalty(GridCoord entered, const Heatmap& danger_map) {
    if (!danger_map.in_bounds(entered))
        throw OutOfBounds("danger_penalty: coordinate outside the map");
    return -danger_map.at(entered);
}

double affinity_gain(GridCoord prev, GridCoord next, const Heatmap& affinity_map,
                     double gamma, bool gamma_correction) {
    if (!affinity_map.in_bounds(prev) || !affinity_map.in_bounds(next))
        throw OutOfBounds("affinity_gain: coordinate outside the map");
    double phi_prev = affinity_map.at(prev);
    double phi_next = affinity_map.at(next);
    return (gamma_correction ? gamma * phi_next : phi_next) - phi_prev;
}

RewardBreakdown shaped_reward(const TrajectoryStep& step, GridCoord prev_coord,
                              const BlendedMaps& maps, const RewardConfig& config) {
    RewardBreakdown r;
    r.env = step.env_reward;
    r.danger = config.lambda_danger * danger_penalty(step.coord, maps.danger);
    r.affinity = config.lambda_affinity *
                 affinity_gain(prev_coord, step.coord, maps.affinity, config.gamma,
                               config.gamma_correction);
    r.format = step.format_valid ? 0.0 : config.format_penalty;
    r.total = r.env + r.danger + r.affinity + r.format;
    return r;
}

}  // namespace gridatlas
