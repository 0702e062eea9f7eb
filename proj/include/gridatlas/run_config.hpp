#pragma once

#include <string>

#include "gridatlas/agent.hpp"

namespace gridatlas {

// Everything a run needs, as read from a flat key=value config file.
struct RunConfig {
    TrainConfig train;
    std::string out_dir = "out";
    bool emit_heatmaps = true;
    int heatmap_interval = 50;
    bool emit_waterfall = true;
    bool emit_pool_log = true;
    int checkpoint_interval = 0;  // 0: final checkpoint only
    int eval_episodes = 100;
    bool greedy_eval = true;

    void validate() const;  // throws ConfigError
};

// '#' comment lines, blank lines, 'key = value' otherwise. Unknown keys and
// malformed values raise ConfigError carrying the line number and field.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

// Canonical form: fixed key order, shortest-round-trip numbers. Parsing the
// output yields an identical config.
std::string serialize_run_config(const RunConfig& config);

}  // namespace gridatlas
