#include "gridatlas/agent.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gridatlas/errors.hpp"
#include "gridatlas/textio.hpp"

namespace gridatlas {

namespace {

constexpr uint64_t kRolloutStream = 0x726f6c6cull;
constexpr uint64_t kEvalStream = 0x6576616cull;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("checkpoint: cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("checkpoint: cannot write " + path);
    out << text;
}

}  // namespace

TabularAgent::TabularAgent(double learning_rate, double gamma, double epsilon)
    : learning_rate_(learning_rate), gamma_(gamma), epsilon_(epsilon) {}

Action TabularAgent::act(const GridState& obs, const PromptDocument&, Rng& rng) {
    if (rng.next_double() < epsilon_)
        return {static_cast<Dir>(rng.next_below(kNumDirs)), true};
    return act_greedy(obs, rng);
}

Action TabularAgent::act_greedy(const GridState& obs, Rng& rng) const {
    auto it = table_.find(obs.occupancy_hash());
    std::array<int, kNumDirs> tied{};
    int n_tied = 0;
    if (it == table_.end()) {
        for (int a = 0; a < kNumDirs; ++a) tied[static_cast<size_t>(n_tied++)] = a;
    } else {
        double best = it->second[0];
        for (int a = 1; a < kNumDirs; ++a) best = std::max(best, it->second[a]);
        for (int a = 0; a < kNumDirs; ++a)
            if (it->second[a] == best) tied[static_cast<size_t>(n_tied++)] = a;
    }
    // A unique argmax never touches the rng stream.
    int pick = n_tied == 1 ? tied[0]
                           : tied[rng.next_below(static_cast<uint32_t>(n_tied))];
    return {static_cast<Dir>(pick), true};
}

void TabularAgent::learn(std::span<const ShapedTransition> batch) {
    for (const ShapedTransition& t : batch) {
        double target = t.reward;
        if (!t.terminal) {
            auto it = table_.find(t.next_hash);
            if (it != table_.end())
                target += gamma_ * *std::max_element(it->second.begin(), it->second.end());
        }
        double& q = table_[t.state_hash][static_cast<size_t>(t.action)];
        q += learning_rate_ * (target - q);
    }
}

double TabularAgent::q(uint64_t state_hash, int action) const {
    auto it = table_.find(state_hash);
    return it == table_.end() ? 0.0 : it->second[static_cast<size_t>(action)];
}

void TabularAgent::set_q(uint64_t state_hash, int action, double value) {
    table_[state_hash][static_cast<size_t>(action)] = value;
}

std::string TabularAgent::serialize() const {
    std::ostringstream out;
    out << "gridatlas-qtable v1\n";
    out << "learning_rate " << format_double(learning_rate_) << " gamma "
        << format_double(gamma_) << " epsilon " << format_double(epsilon_) << '\n';
    out << "count " << table_.size() << '\n';
    std::vector<uint64_t> keys;
    keys.reserve(table_.size());
    for (const auto& [k, v] : table_) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    for (uint64_t k : keys) {
        out << k;
        for (double v : table_.at(k)) out << ' ' << format_double(v);
        out << '\n';
    }
    return out.str();
}

TabularAgent TabularAgent::parse(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "gridatlas-qtable v1")
        throw CheckpointError("qtable: bad or missing header");
    TabularAgent agent;
    std::string key;
    size_t count = 0;
    if (!(in >> key >> agent.learning_rate_) || key != "learning_rate")
        throw CheckpointError("qtable: missing learning_rate");
    if (!(in >> key >> agent.gamma_) || key != "gamma")
        throw CheckpointError("qtable: missing gamma");
    if (!(in >> key >> agent.epsilon_) || key != "epsilon")
        throw CheckpointError("qtable: missing epsilon");
    if (!(in >> key >> count) || key != "count") throw CheckpointError("qtable: missing count");
    for (size_t i = 0; i < count; ++i) {
        uint64_t h = 0;
        std::array<double, kNumDirs> row{};
        if (!(in >> h >> row[0] >> row[1] >> row[2] >> row[3]))
            throw CheckpointError("qtable: truncated row");
        agent.table_[h] = row;
    }
    return agent;
}

void TrainConfig::validate() const {
    if (width < 2 || height < 2) throw ConfigError("grid size must be at least 2x2", 0, "width");
    if (environment == EnvKind::Sokoban && n_boxes < 1)
        throw ConfigError("n_boxes must be >= 1", 0, "n_boxes");
    if (environment == EnvKind::FrozenLake &&
        (hole_fraction < 0.0 || hole_fraction >= 1.0))
        throw ConfigError("hole_fraction must be in [0, 1)", 0, "hole_fraction");
    if (max_steps < 1) throw ConfigError("max_steps must be >= 1", 0, "max_steps");
    if (epochs < 1) throw ConfigError("epochs must be >= 1", 0, "epochs");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1", 0, "batch_size");
    if (alpha < 0.0 || alpha >= 1.0) throw ConfigError("alpha must be in [0, 1)", 0, "alpha");
    if (train_seeds.empty()) throw ConfigError("need at least one training seed", 0, "train_seeds");
    if (learning_rate <= 0.0 || learning_rate > 1.0)
        throw ConfigError("learning_rate must be in (0, 1]", 0, "learning_rate");
    if (rewards.gamma <= 0.0 || rewards.gamma > 1.0)
        throw ConfigError("gamma must be in (0, 1]", 0, "gamma");
    if (epsilon_start < 0.0 || epsilon_start > 1.0 || epsilon_end < 0.0 || epsilon_end > 1.0)
        throw ConfigError("epsilon bounds must be in [0, 1]", 0, "epsilon_start");
    if (top_k_skills < 0) throw ConfigError("top_k_skills must be >= 0", 0, "top_k_skills");
    if (cell_px < 1) throw ConfigError("cell_px must be >= 1", 0, "cell_px");
    for (uint64_t e : eval_seeds)
        for (uint64_t t : train_seeds)
            if (e == t)
                throw ConfigError("seed " + std::to_string(e) +
                                      " appears in both train_seeds and eval_seeds",
                                  0, "eval_seeds");
}

GeneratedInstance generate_instance(const TrainConfig& config, uint64_t seed) {
    if (config.environment == EnvKind::Sokoban)
        return generate_sokoban(seed, config.width, config.height, config.n_boxes,
                                config.max_steps);
    return generate_frozenlake(seed, config.width, config.height, config.hole_fraction,
                               config.max_steps);
}

TrainingRun::TrainingRun(const TrainConfig& config)
    : config_(config),
      agent_(config.learning_rate, config.rewards.gamma, config.epsilon_start) {
    config_.validate();
    for (uint64_t seed : config_.train_seeds) {
        instances_.push_back(generate_instance(config_, seed));
        registry_.get_or_create(*instances_.back().layout, config_.alpha, config_.epochs,
                                config_.schedule);
    }
    skills_ = config_.rulebook_path.empty() ? builtin_rulebook(config_.environment)
                                            : load_rulebook_file(config_.rulebook_path);
    skills_.rerank_interval = config_.rerank_interval;
}

double TrainingRun::epsilon_for(int epoch_index) const {
    int half = std::max(1, config_.epochs / 2);
    if (epoch_index >= half) return config_.epsilon_end;
    return config_.epsilon_start +
           (config_.epsilon_end - config_.epsilon_start) * epoch_index / half;
}

std::vector<EpisodeRollout> TrainingRun::rollout_batch(int n_episodes) const {
    if (n_episodes < 0) throw ConfigError("rollout: n_episodes must be >= 0", 0, "batch_size");

    struct SeedSnapshot {
        BlendedMaps blend;
        std::shared_ptr<const Image> danger_img;
        std::shared_ptr<const Image> affinity_img;
        uint64_t hash = 0;
    };
    std::vector<SeedSnapshot> snaps;
    snaps.reserve(instances_.size());
    for (const GeneratedInstance& inst : instances_) {
        const AtlasState* atlas = registry_.find(inst.layout->seed);
        SeedSnapshot s;
        s.blend = atlas->blend();
        s.danger_img = std::make_shared<Image>(
            render_heatmap(s.blend.danger, HeatmapChannel::Danger, config_.cell_px));
        s.affinity_img = std::make_shared<Image>(
            render_heatmap(s.blend.affinity, HeatmapChannel::Affinity, config_.cell_px));
        s.hash = s.blend.content_hash();
        snaps.push_back(std::move(s));
    }

    std::vector<EpisodeRollout> batch;
    batch.reserve(static_cast<size_t>(n_episodes));
    // The agent's table is frozen during a batch, so act() is a pure function of
    // (state, derived rng); identical run state reproduces the batch exactly.
    TabularAgent policy = agent_;
    for (int i = 0; i < n_episodes; ++i) {
        size_t ctx_i = static_cast<size_t>(i) % instances_.size();
        const GeneratedInstance& inst = instances_[ctx_i];
        const SeedSnapshot& snap = snaps[ctx_i];
        Rng rng(derive_seed(config_.master_seed, kRolloutStream,
                            static_cast<uint64_t>(epoch_), static_cast<uint64_t>(i)));

        EpisodeRollout ep;
        ep.episode_id = episode_counter_ + i;
        ep.layout_seed = inst.layout->seed;
        ep.blend_hash = snap.hash;
        ep.trajectory.layout_seed = inst.layout->seed;
        ep.trajectory.initial_coord = inst.initial.player;

        GridState state = inst.initial;
        ep.frames.push_back(state);
        GridCoord prev_coord = state.player;
        TerminalCause cause = TerminalCause::None;
        while (state.terminal == Terminal::Running) {
            PromptDocument prompt = assemble_prompt_prerendered(
                snap.danger_img, snap.affinity_img, pool_, skills_, state,
                config_.top_k_skills);
            Action a = policy.act(state, prompt, rng);
            StepResult sr = step(state, a, config_.rewards);
            RewardBreakdown rb = shaped_reward(sr.step, prev_coord, snap.blend, config_.rewards);
            ep.transitions.push_back({state.occupancy_hash(), static_cast<int>(a.dir), rb.total,
                                      sr.next.occupancy_hash(),
                                      sr.next.terminal != Terminal::Running});
            ep.trajectory.steps.push_back(sr.step);
            ep.shaped.push_back(rb);
            ep.frames.push_back(sr.next);
            prev_coord = sr.step.coord;
            cause = sr.cause;
            state = std::move(sr.next);
        }
        switch (cause) {
            case TerminalCause::Success: ep.trajectory.outcome = Outcome::Success; break;
            case TerminalCause::Timeout: ep.trajectory.outcome = Outcome::Timeout; break;
            default: ep.trajectory.outcome = Outcome::Failure; break;
        }
        batch.push_back(std::move(ep));
    }
    return batch;
}

void TrainingRun::train(int epochs, const TrainHooks& hooks) {
    if (epochs < 1) throw ConfigError("train: epochs must be >= 1", 0, "epochs");
    for (int e = 0; e < epochs; ++e) {
        agent_.set_epsilon(epsilon_for(epoch_));
        std::vector<EpisodeRollout> batch = rollout_batch(config_.batch_size);
        episode_counter_ += static_cast<int64_t>(batch.size());

        size_t total_steps = 0;
        for (const EpisodeRollout& ep : batch) {
            agent_.learn(ep.transitions);
            total_steps += ep.trajectory.steps.size();
            if (hooks.on_episode) hooks.on_episode(ep);
        }

        // Retrieval-hit bookkeeping: the same top-k selection fed every prompt
        // of this batch, once per step.
        auto selected = skills_.top_k(config_.top_k_skills);
        for (size_t s = 0; s < total_steps; ++s) skills_.record_hits(selected);

        for (const GeneratedInstance& inst : instances_) {
            std::vector<Trajectory> seed_trajs;
            for (const EpisodeRollout& ep : batch)
                if (ep.layout_seed == inst.layout->seed) seed_trajs.push_back(ep.trajectory);
            BatchStats stats = accumulate_batch(*inst.layout, seed_trajs);
            registry_.atlases.at(inst.layout->seed).apply_ema(stats);
        }

        for (const EpisodeRollout& ep : batch)
            for (Exemplar& cand : mine_keyframes(ep.trajectory, ep.frames)) {
                cand.source_episode = ep.episode_id;
                for (const PoolEvent& ev : pool_.insert_with_eviction(std::move(cand)))
                    if (hooks.on_pool_event) hooks.on_pool_event(epoch_ + 1, ev);
            }

        EpochMetrics m;
        m.epoch = epoch_ + 1;
        m.pool_size = static_cast<int>(pool_.size());
        if (!batch.empty()) {
            for (const EpisodeRollout& ep : batch) {
                if (ep.trajectory.outcome == Outcome::Success) m.success_rate += 1.0;
                for (const RewardBreakdown& rb : ep.shaped) {
                    m.mean_return += rb.total;
                    m.mean_env += rb.env;
                    m.mean_danger += rb.danger;
                    m.mean_affinity += rb.affinity;
                }
            }
            double n = static_cast<double>(batch.size());
            m.success_rate /= n;
            m.mean_return /= n;
            m.mean_env /= n;
            m.mean_danger /= n;
            m.mean_affinity /= n;
        }
        metrics_.push_back(m);

        ++epoch_;
        skills_.maybe_rerank(epoch_);
        if (hooks.on_metrics) hooks.on_metrics(m);
        if (hooks.after_epoch) hooks.after_epoch(epoch_);
    }
}

EvalResult TrainingRun::evaluate(int n_episodes, bool greedy) const {
    for (uint64_t e : config_.eval_seeds)
        for (uint64_t t : config_.train_seeds)
            if (e == t)
                throw SeedOverlap(e, "evaluation seed " + std::to_string(e) +
                                         " was used for training");
    if (n_episodes < 0) throw ConfigError("evaluate: n_episodes must be >= 0", 0, "episodes");

    EvalResult result;
    if (n_episodes == 0 || config_.eval_seeds.empty()) return result;
    result.empty = false;

    struct EvalCtx {
        GeneratedInstance inst;
        BlendedMaps blend;  // heuristic branch only: fresh atlas at epoch 0
        std::shared_ptr<const Image> danger_img;
        std::shared_ptr<const Image> affinity_img;
    };
    std::vector<EvalCtx> ctxs;
    for (uint64_t seed : config_.eval_seeds) {
        EvalCtx c;
        c.inst = generate_instance(config_, seed);
        AtlasState fresh = AtlasState::create(*c.inst.layout, config_.alpha, config_.epochs,
                                              config_.schedule);
        c.blend = fresh.blend();
        c.danger_img = std::make_shared<Image>(
            render_heatmap(c.blend.danger, HeatmapChannel::Danger, config_.cell_px));
        c.affinity_img = std::make_shared<Image>(
            render_heatmap(c.blend.affinity, HeatmapChannel::Affinity, config_.cell_px));
        ctxs.push_back(std::move(c));
    }

    TabularAgent policy = agent_;  // local copy: evaluation must not touch run state
    int successes = 0;
    for (int i = 0; i < n_episodes; ++i) {
        const EvalCtx& c = ctxs[static_cast<size_t>(i) % ctxs.size()];
        Rng rng(derive_seed(config_.master_seed, kEvalStream, static_cast<uint64_t>(i)));
        GridState state = c.inst.initial;
        TerminalCause cause = TerminalCause::None;
        int steps = 0;
        double env_return = 0.0;
        while (state.terminal == Terminal::Running) {
            PromptDocument prompt = assemble_prompt_prerendered(
                c.danger_img, c.affinity_img, pool_, skills_, state, config_.top_k_skills);
            Action a = greedy ? policy.act_greedy(state, rng) : policy.act(state, prompt, rng);
            StepResult sr = step(state, a, config_.rewards);
            env_return += sr.step.env_reward;
            ++steps;
            cause = sr.cause;
            state = std::move(sr.next);
        }
        Outcome outcome = cause == TerminalCause::Success
                              ? Outcome::Success
                              : (cause == TerminalCause::Timeout ? Outcome::Timeout
                                                                 : Outcome::Failure);
        if (outcome == Outcome::Success) ++successes;
        result.rows.push_back({i, c.inst.layout->seed, outcome, steps, env_return});
    }
    result.episodes = n_episodes;
    result.success_rate = static_cast<double>(successes) / n_episodes;
    return result;
}

uint64_t TrainingRun::memory_digest() const {
    Digest d;
    for (const auto& [seed, atlas] : registry_.atlases) {
        d.add_u64(seed);
        d.add_string(serialize_atlas(atlas));
    }
    d.add_string(serialize_pool(pool_));
    d.add_string(serialize_skills(skills_));
    return d.value();
}

void TrainingRun::save_checkpoint(const std::string& dir) const {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CheckpointError("checkpoint: cannot create " + dir);

    std::ostringstream meta;
    meta << "gridatlas-checkpoint v1\n";
    meta << "master_seed " << config_.master_seed << '\n';
    meta << "epoch " << epoch_ << '\n';
    meta << "episodes " << episode_counter_ << '\n';
    meta << "environment "
         << (config_.environment == EnvKind::Sokoban ? "sokoban" : "frozenlake") << '\n';
    meta << "train_seeds";
    for (uint64_t s : config_.train_seeds) meta << ' ' << s;
    meta << '\n';
    write_file(dir + "/meta.txt", meta.str());

    for (const auto& [seed, atlas] : registry_.atlases)
        write_file(dir + "/atlas_" + std::to_string(seed) + ".txt", serialize_atlas(atlas));
    write_file(dir + "/qtable.txt", agent_.serialize());
    write_file(dir + "/pool.txt", serialize_pool(pool_));
    write_file(dir + "/skills.txt", serialize_skills(skills_));
}

CheckpointMeta TrainingRun::load_checkpoint(const std::string& dir) {
    std::istringstream meta(read_file(dir + "/meta.txt"));
    std::string line;
    if (!std::getline(meta, line) || line != "gridatlas-checkpoint v1")
        throw CheckpointError("checkpoint: bad or missing meta header in " + dir);
    CheckpointMeta out;
    std::string key;
    std::string env;
    if (!(meta >> key >> out.master_seed) || key != "master_seed")
        throw CheckpointError("checkpoint: missing master_seed");
    if (!(meta >> key >> out.epoch) || key != "epoch")
        throw CheckpointError("checkpoint: missing epoch");
    int64_t episodes = 0;
    if (!(meta >> key >> episodes) || key != "episodes")
        throw CheckpointError("checkpoint: missing episodes");
    if (!(meta >> key >> env) || key != "environment")
        throw CheckpointError("checkpoint: missing environment");
    if (env == "sokoban")
        out.environment = EnvKind::Sokoban;
    else if (env == "frozenlake")
        out.environment = EnvKind::FrozenLake;
    else
        throw CheckpointError("checkpoint: unknown environment '" + env + "'");
    if (!(meta >> key) || key != "train_seeds")
        throw CheckpointError("checkpoint: missing train_seeds");
    uint64_t s = 0;
    while (meta >> s) out.train_seeds.push_back(s);

    agent_ = TabularAgent::parse(read_file(dir + "/qtable.txt"));
    pool_ = parse_pool(read_file(dir + "/pool.txt"));
    skills_ = parse_skills(read_file(dir + "/skills.txt"));
    skills_.rerank_interval = config_.rerank_interval;
    for (uint64_t seed : out.train_seeds) {
        std::string path = dir + "/atlas_" + std::to_string(seed) + ".txt";
        if (std::filesystem::exists(path)) registry_.atlases[seed] = load_atlas_file(path);
    }
    epoch_ = out.epoch;
    episode_counter_ = episodes;
    return out;
}

}  // namespace gridatlas
