#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "gridatlas/grid.hpp"
#include "gridatlas/heatmap.hpp"

namespace gridatlas {

enum class BlendSchedule : uint8_t { Linear, Cosine };

BlendSchedule schedule_by_name(const std::string& name);
std::string schedule_name(BlendSchedule s);

// Trust weight for the learned statistics at epoch k of K; anneals 0 -> 1.
double beta_schedule(int epoch, int total_epochs, BlendSchedule kind = BlendSchedule::Linear);

// Per-batch trajectory statistics for one layout.
struct BatchStats {
    Heatmap danger_batch;
    Heatmap affinity_batch;
    int n_fail = 0;
    int n_succ = 0;
};

// Failure mass lands on each failed trajectory's final coordinate; success mass
// spreads over every visited coordinate, 1/(len * n_succ) per visit. Timeouts
// count as failures. Throws MixedLayouts when a trajectory belongs elsewhere.
BatchStats accumulate_batch(const GridLayout& layout, std::span<const Trajectory> trajectories);

struct BlendedMaps {
    Heatmap danger;
    Heatmap affinity;
    uint64_t content_hash() const;
};

// Evolving spatial memory for one layout: static heuristic maps plus EMA
// statistics, blended by the annealed trust weight.
struct AtlasState {
    Heatmap danger_heuristic;
    Heatmap affinity_heuristic;
    Heatmap danger_stat;
    Heatmap affinity_stat;
    int epoch = 0;
    double alpha = 0.85;
    int total_epochs = 1;
    BlendSchedule schedule = BlendSchedule::Linear;
    uint64_t layout_seed = 0;

    static AtlasState create(const GridLayout& layout, double alpha, int total_epochs,
                             BlendSchedule schedule = BlendSchedule::Linear);

    // stat <- alpha * stat + (1 - alpha) * batch, clamped to [0, 1]; bumps epoch.
    void apply_ema(const BatchStats& batch);

    // (1 - beta) * heuristic + beta * stat for both channels.
    BlendedMaps blend() const;

    double beta() const;
};

// One atlas per layout seed.
struct AtlasRegistry {
    std::map<uint64_t, AtlasState> atlases;

    AtlasState& get_or_create(const GridLayout& layout, double alpha, int total_epochs,
                              BlendSchedule schedule = BlendSchedule::Linear);
    const AtlasState* find(uint64_t layout_seed) const;
};

// Versioned text checkpoint; serialize(parse(text)) == text byte for byte.
std::string serialize_atlas(const AtlasState& atlas);
AtlasState parse_atlas(const std::string& text);

void save_atlas_file(const AtlasState& atlas, const std::string& path);
AtlasState load_atlas_file(const std::string& path);

}  // namespace gridatlas
