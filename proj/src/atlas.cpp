#include "gridatlas/atlas.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "gridatlas/errors.hpp"
#include "gridatlas/heuristics.hpp"
#include "gridatlas/rng.hpp"
#include "gridatlas/textio.hpp"

namespace gridatlas {

BlendSchedule schedule_by_name(const std::string& name) {
    if (name == "linear") return BlendSchedule::Linear;
    if (name == "cosine") return BlendSchedule::Cosine;
    throw ConfigError("unknown blend schedule '" + name + "'", 0, "schedule");
}

std::string schedule_name(BlendSchedule s) {
    return s == BlendSchedule::Linear ? "linear" : "cosine";
}

double beta_schedule(int epoch, int total_epochs, BlendSchedule kind) {
    if (total_epochs < 1) throw std::invalid_argument("beta_schedule: total_epochs must be >= 1");
    if (epoch < 0) throw std::invalid_argument("beta_schedule: epoch must be >= 0");
    double t = static_cast<double>(epoch) / total_epochs;
    if (t > 1.0) t = 1.0;
    if (kind == BlendSchedule::Cosine)
        return 0.5 * (1.0 - std::cos(std::numbers::pi * t));
    return t;
}

BatchStats accumulate_batch(const GridLayout& layout, std::span<const Trajectory> trajectories) {
    BatchStats stats;
    stats.danger_batch = Heatmap::zeros(layout.width, layout.height);
    stats.affinity_batch = Heatmap::zeros(layout.width, layout.height);

    for (const Trajectory& t : trajectories) {
        if (t.layout_seed != layout.seed)
            throw MixedLayouts("accumulate_batch: trajectory from layout seed " +
                               std::to_string(t.layout_seed) + " mixed into seed " +
                               std::to_string(layout.seed));
        if (t.outcome == Outcome::Success)
            ++stats.n_succ;
        else
            ++stats.n_fail;  // timeouts count as failures
    }

    for (const Trajectory& t : trajectories) {
        if (t.outcome == Outcome::Success) {
            if (t.steps.empty()) continue;
            const double w = 1.0 / (static_cast<double>(t.steps.size()) * stats.n_succ);
            for (const TrajectoryStep& s : t.steps) {
                if (!stats.affinity_batch.in_bounds(s.coord))
                    throw OutOfBounds("accumulate_batch: visited coordinate outside layout");
                stats.affinity_batch.at(s.coord) += w;
            }
        } else {
            GridCoord final_coord = t.steps.empty() ? t.initial_coord : t.steps.back().coord;
            if (!stats.danger_batch.in_bounds(final_coord))
                throw OutOfBounds("accumulate_batch: terminal coordinate outside layout");
            stats.danger_batch.at(final_coord) += 1.0 / stats.n_fail;
        }
    }
    stats.danger_batch.clamp01();
    stats.affinity_batch.clamp01();
    return stats;
}

uint64_t BlendedMaps::content_hash() const {
    Digest d;
    d.add_u64(danger.content_hash());
    d.add_u64(affinity.content_hash());
    return d.value();
}

AtlasState AtlasState::create(const GridLayout& layout, double alpha, int total_epochs,
                              BlendSchedule schedule) {
    if (alpha < 0.0 || alpha >= 1.0)
        throw std::invalid_argument("atlas: alpha must be in [0, 1)");
    if (total_epochs < 1) throw std::invalid_argument("atlas: total_epochs must be >= 1");
    AtlasState a;
    a.danger_heuristic = gridatlas::danger_heuristic(layout);
    a.affinity_heuristic = gridatlas::affinity_heuristic(layout);
    a.danger_stat = Heatmap::zeros(layout.width, layout.height);
    a.affinity_stat = Heatmap::zeros(layout.width, layout.height);
    a.epoch = 0;
    a.alpha = alpha;
    a.total_epochs = total_epochs;
    a.schedule = schedule;
    a.layout_seed = layout.seed;
    return a;
}

void AtlasState::apply_ema(const BatchStats& batch) {
    if (!batch.danger_batch.same_shape(danger_stat) ||
        !batch.affinity_batch.same_shape(affinity_stat))
        throw DimensionMismatch("ema: batch maps do not match the atlas shape");
    for (size_t i = 0; i < danger_stat.values.size(); ++i)
        danger_stat.values[i] = alpha * danger_stat.values[i] +
                                (1.0 - alpha) * batch.danger_batch.values[i];
    for (size_t i = 0; i < affinity_stat.values.size(); ++i)
        affinity_stat.values[i] = alpha * affinity_stat.values[i] +
                                  (1.0 - alpha) * batch.affinity_batch.values[i];
    danger_stat.clamp01();
    affinity_stat.clamp01();
    ++epoch;
}

double AtlasState::beta() const { return beta_schedule(epoch, total_epochs, schedule); }

BlendedMaps AtlasState::blend() const {
    const double b = beta();
    BlendedMaps out;
    out.danger = Heatmap::zeros(danger_heuristic.width, danger_heuristic.height);
    out.affinity = Heatmap::zeros(affinity_heuristic.width, affinity_heuristic.height);
    for (size_t i = 0; i < out.danger.values.size(); ++i)
        out.danger.values[i] =
            (1.0 - b) * danger_heuristic.values[i] + b * danger_stat.values[i];
    for (size_t i = 0; i < out.affinity.values.size(); ++i)
        out.affinity.values[i] =
            (1.0 - b) * affinity_heuristic.values[i] + b * affinity_stat.values[i];
    return out;
}

AtlasState& AtlasRegistry::get_or_create(const GridLayout& layout, double alpha,
                                         int total_epochs, BlendSchedule schedule) {
    auto it = atlases.find(layout.seed);
    if (it == atlases.end())
        it = atlases.emplace(layout.seed, AtlasState::create(layout, alpha, total_epochs, schedule))
                 .first;
    return it->second;
}

const AtlasState* AtlasRegistry::find(uint64_t layout_seed) const {
    auto it = atlases.find(layout_seed);
    return it == atlases.end() ? nullptr : &it->second;
}

namespace {

constexpr const char* kAtlasMagic = "gridatlas-atlas v1";

void write_map(std::ostringstream& out, const char* name, const Heatmap& m) {
    out << name << '\n';
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            if (x) out << ' ';
            out << format_double(m.at(x, y));
        }
        out << '\n';
    }
}

Heatmap read_map(std::istream& in, const char* name, int w, int h) {
    std::string label;
    if (!(in >> label) || label != name)
        throw CheckpointError(std::string("atlas: expected map '") + name + "'");
    Heatmap m = Heatmap::zeros(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (!(in >> m.at(x, y)))
                throw CheckpointError(std::string("atlas: truncated map '") + name + "'");
    return m;
}

}  // namespace

std::string serialize_atlas(const AtlasState& atlas) {
    std::ostringstream out;
    out << kAtlasMagic << '\n';
    out << "layout_seed " << atlas.layout_seed << '\n';
    out << "alpha " << format_double(atlas.alpha) << '\n';
    out << "epoch " << atlas.epoch << '\n';
    out << "total_epochs " << atlas.total_epochs << '\n';
    out << "schedule " << schedule_name(atlas.schedule) << '\n';
    out << "size " << atlas.danger_heuristic.width << ' ' << atlas.danger_heuristic.height
        << '\n';
    write_map(out, "danger_heuristic", atlas.danger_heuristic);
    write_map(out, "affinity_heuristic", atlas.affinity_heuristic);
    write_map(out, "danger_stat", atlas.danger_stat);
    write_map(out, "affinity_stat", atlas.affinity_stat);
    return out.str();
}

AtlasState parse_atlas(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kAtlasMagic)
        throw CheckpointError("atlas: bad or missing header");
    AtlasState a;
    std::string key;
    int w = 0;
    int h = 0;
    std::string sched;
    if (!(in >> key >> a.layout_seed) || key != "layout_seed")
        throw CheckpointError("atlas: missing layout_seed");
    if (!(in >> key >> a.alpha) || key != "alpha") throw CheckpointError("atlas: missing alpha");
    if (!(in >> key >> a.epoch) || key != "epoch") throw CheckpointError("atlas: missing epoch");
    if (!(in >> key >> a.total_epochs) || key != "total_epochs")
        throw CheckpointError("atlas: missing total_epochs");
    if (!(in >> key >> sched) || key != "schedule")
        throw CheckpointError("atlas: missing schedule");
    if (sched == "linear")
        a.schedule = BlendSchedule::Linear;
    else if (sched == "cosine")
        a.schedule = BlendSchedule::Cosine;
    else
        throw CheckpointError("atlas: unknown schedule '" + sched + "'");
    if (!(in >> key >> w >> h) || key != "size" || w < 1 || h < 1)
        throw CheckpointError("atlas: missing size");
    a.danger_heuristic = read_map(in, "danger_heuristic", w, h);
    a.affinity_heuristic = read_map(in, "affinity_heuristic", w, h);
    a.danger_stat = read_map(in, "danger_stat", w, h);
    a.affinity_stat = read_map(in, "affinity_stat", w, h);
    return a;
}

void save_atlas_file(const AtlasState& atlas, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("atlas: cannot write " + path);
    out << serialize_atlas(atlas);
}

AtlasState load_atlas_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("atlas: cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_atlas(buf.str());
}

}  // namespace gridatlas
