#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridatlas/atlas.hpp"
#include "gridatlas/gridworld.hpp"
#include "gridatlas/memory.hpp"
#include "gridatlas/reward.hpp"
#include "gridatlas/rng.hpp"

namespace gridatlas {

struct ShapedTransition {
    uint64_t state_hash = 0;
    int action = 0;
    double reward = 0.0;  // shaped total
    uint64_t next_hash = 0;
    bool terminal = false;
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual Action act(const GridState& obs, const PromptDocument& prompt, Rng& rng) = 0;
    virtual void learn(std::span<const ShapedTransition> batch) = 0;
};

// One-step Q-learning over occupancy hashes.
class TabularAgent : public Policy {
public:
    TabularAgent(double learning_rate = 0.1, double gamma = 0.99, double epsilon = 1.0);

    Action act(const GridState& obs, const PromptDocument& prompt, Rng& rng) override;
    // Argmax over the state's action values; exact ties are broken uniformly
    // at random (a fresh state ties all four ways).
    Action act_greedy(const GridState& obs, Rng& rng) const;
    void learn(std::span<const ShapedTransition> batch) override;

    void set_epsilon(double e) { epsilon_ = e; }
    double epsilon() const { return epsilon_; }
    double q(uint64_t state_hash, int action) const;
    void set_q(uint64_t state_hash, int action, double value);
    size_t table_size() const { return table_.size(); }

    std::string serialize() const;  // sorted, text, round-trips exactly
    static TabularAgent parse(const std::string& text);

private:
    std::unordered_map<uint64_t, std::array<double, kNumDirs>> table_;
    double learning_rate_;
    double gamma_;
    double epsilon_;
};

struct TrainConfig {
    EnvKind environment = EnvKind::Sokoban;
    int width = 6;
    int height = 6;
    int n_boxes = 1;            // box puzzles
    double hole_fraction = 0.2; // lakes
    int max_steps = 100;
    RewardConfig rewards = RewardConfig::sokoban_preset();
    int epochs = 200;
    int batch_size = 128;
    double alpha = 0.85;
    BlendSchedule schedule = BlendSchedule::Linear;
    std::vector<uint64_t> train_seeds = {1, 2, 3, 4};
    std::vector<uint64_t> eval_seeds = {101, 102};
    uint64_t master_seed = 7;
    double learning_rate = 0.1;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    int top_k_skills = kDefaultTopKSkills;
    int rerank_interval = 10;
    std::string rulebook_path;  // empty -> built-in texts
    int cell_px = kDefaultCellPx;

    void validate() const;  // throws ConfigError
};

struct EpochMetrics {
    int epoch = 0;  // 1-based; equals the atlas epoch after the update
    double success_rate = 0.0;
    double mean_return = 0.0;
    double mean_env = 0.0;
    double mean_danger = 0.0;
    double mean_affinity = 0.0;
    int pool_size = 0;
};

struct EpisodeRollout {
    Trajectory trajectory;
    std::vector<GridState> frames;        // initial state plus one per step
    std::vector<RewardBreakdown> shaped;  // one per step
    std::vector<ShapedTransition> transitions;
    uint64_t blend_hash = 0;  // content hash of the frozen maps this episode saw
    int64_t episode_id = 0;
    uint64_t layout_seed = 0;
};

struct EvalEpisode {
    int64_t episode = 0;
    uint64_t layout_seed = 0;
    Outcome outcome = Outcome::Timeout;
    int steps = 0;
    double env_return = 0.0;
};

struct EvalResult {
    double success_rate = 0.0;
    int episodes = 0;
    bool empty = true;
    std::vector<EvalEpisode> rows;
};

struct TrainHooks {
    std::function<void(const EpisodeRollout&)> on_episode;
    std::function<void(int epoch, const PoolEvent&)> on_pool_event;
    std::function<void(const EpochMetrics&)> on_metrics;
    std::function<void(int epoch)> after_epoch;
};

struct CheckpointMeta {
    uint64_t master_seed = 0;
    int epoch = 0;
    EnvKind environment = EnvKind::Sokoban;
    std::vector<uint64_t> train_seeds;
};

// Owns the whole loop state: per-seed layouts and atlases, the exemplar pool,
// the skill library, the learner and the metrics history.
class TrainingRun {
public:
    explicit TrainingRun(const TrainConfig& config);

    // One frozen-snapshot batch under the current policy; pure given run state.
    std::vector<EpisodeRollout> rollout_batch(int n_episodes) const;

    // rollout -> learn -> accumulate -> EMA -> mine -> metrics, `epochs` times.
    void train(int epochs, const TrainHooks& hooks = {});

    // Unseen-seed episodes against heuristic-only maps; mutates nothing.
    EvalResult evaluate(int n_episodes, bool greedy = true) const;

    uint64_t memory_digest() const;  // atlas + pool + skills

    void save_checkpoint(const std::string& dir) const;
    CheckpointMeta load_checkpoint(const std::string& dir);

    const TrainConfig& config() const { return config_; }
    const std::vector<EpochMetrics>& metrics() const { return metrics_; }
    const AtlasRegistry& registry() const { return registry_; }
    const ExemplarPool& pool() const { return pool_; }
    const SkillLibrary& skills() const { return skills_; }
    TabularAgent& agent() { return agent_; }
    const TabularAgent& agent() const { return agent_; }
    int epoch() const { return epoch_; }
    const std::vector<GeneratedInstance>& instances() const { return instances_; }

    double epsilon_for(int epoch_index) const;

private:
    TrainConfig config_;
    std::vector<GeneratedInstance> instances_;  // one per train seed
    AtlasRegistry registry_;
    ExemplarPool pool_;
    SkillLibrary skills_;
    TabularAgent agent_;
    std::vector<EpochMetrics> metrics_;
    int epoch_ = 0;
    int64_t episode_counter_ = 0;
};

GeneratedInstance generate_instance(const TrainConfig& config, uint64_t seed);

}  // namespace gridatlas
