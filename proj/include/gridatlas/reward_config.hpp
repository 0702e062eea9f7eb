#pragma once

#include <string>

#include "gridatlas/grid.hpp"

namespace gridatlas {

struct RewardConfig {
    double success = 1.0;
    double failure = -0.1;
    double format_penalty = -0.5;
    double lambda_danger = 0.05;
    double lambda_affinity = 0.05;
    double gamma = 0.99;
    // When set, affinity gain uses gamma * phi(next) - phi(prev); the default keeps
    // the plain potential difference phi(next) - phi(prev).
    bool gamma_correction = false;

    static RewardConfig sokoban_preset();
    static RewardConfig frozenlake_preset();
    static RewardConfig preset_for(EnvKind kind);
    // "sokoban" or "frozenlake"; throws ConfigError otherwise.
    static RewardConfig preset_by_name(const std::string& name);
};

}  // namespace gridatlas
