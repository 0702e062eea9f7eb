#include "gridatlas/run_config.hpp"

#include <fstream>
#include <sstream>

#include "gridatlas/errors.hpp"
#include "gridatlas/textio.hpp"

namespace gridatlas {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("line " + std::to_string(line) + ": " + key +
                          " expects true or false, got '" + v + "'",
                      line, key);
}

int64_t parse_int(const std::string& v, int line, const std::string& key) {
    try {
        size_t used = 0;
        int64_t out = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": " + key +
                              " expects an integer, got '" + v + "'",
                          line, key);
    }
}

uint64_t parse_u64(const std::string& v, int line, const std::string& key) {
    try {
        size_t used = 0;
        uint64_t out = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": " + key +
                              " expects an unsigned integer, got '" + v + "'",
                          line, key);
    }
}

double parse_real(const std::string& v, int line, const std::string& key) {
    try {
        size_t used = 0;
        double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": " + key +
                              " expects a number, got '" + v + "'",
                          line, key);
    }
}

std::vector<uint64_t> parse_seed_list(const std::string& v, int line, const std::string& key) {
    std::vector<uint64_t> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("line " + std::to_string(line) + ": " + key +
                                  " has an empty entry",
                              line, key);
        out.push_back(parse_u64(item, line, key));
    }
    if (out.empty())
        throw ConfigError("line " + std::to_string(line) + ": " + key + " is empty", line, key);
    return out;
}

std::string seed_list(const std::vector<uint64_t>& seeds) {
    std::string out;
    for (size_t i = 0; i < seeds.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(seeds[i]);
    }
    return out;
}

}  // namespace

void RunConfig::validate() const {
    train.validate();
    if (out_dir.empty()) throw ConfigError("out_dir must not be empty", 0, "out_dir");
    if (heatmap_interval < 1)
        throw ConfigError("heatmap_interval must be >= 1", 0, "heatmap_interval");
    if (checkpoint_interval < 0)
        throw ConfigError("checkpoint_interval must be >= 0", 0, "checkpoint_interval");
    if (eval_episodes < 0) throw ConfigError("eval_episodes must be >= 0", 0, "eval_episodes");
}

RunConfig parse_run_config(const std::string& text) {
    RunConfig cfg;
    // preset resolves first, explicit reward.* keys then override it in file order
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool preset_seen = false;
    std::vector<std::pair<int, std::pair<std::string, std::string>>> entries;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'",
                              lineno, "");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": missing key", lineno, "");
        if (key == "reward_preset") {
            cfg.train.rewards = RewardConfig::preset_by_name(value);
            preset_seen = true;
            continue;
        }
        if (key == "environment") {
            if (value == "sokoban")
                cfg.train.environment = EnvKind::Sokoban;
            else if (value == "frozenlake")
                cfg.train.environment = EnvKind::FrozenLake;
            else
                throw ConfigError("line " + std::to_string(lineno) +
                                      ": environment must be sokoban or frozenlake",
                                  lineno, key);
            if (!preset_seen) cfg.train.rewards = RewardConfig::preset_for(cfg.train.environment);
            continue;
        }
        entries.push_back({lineno, {key, value}});
    }

    for (auto& [ln, kv] : entries) {
        const std::string& key = kv.first;
        const std::string& value = kv.second;
        TrainConfig& t = cfg.train;
        if (key == "width")
            t.width = static_cast<int>(parse_int(value, ln, key));
        else if (key == "height")
            t.height = static_cast<int>(parse_int(value, ln, key));
        else if (key == "n_boxes")
            t.n_boxes = static_cast<int>(parse_int(value, ln, key));
        else if (key == "hole_fraction")
            t.hole_fraction = parse_real(value, ln, key);
        else if (key == "max_steps")
            t.max_steps = static_cast<int>(parse_int(value, ln, key));
        else if (key == "reward.success")
            t.rewards.success = parse_real(value, ln, key);
        else if (key == "reward.failure")
            t.rewards.failure = parse_real(value, ln, key);
        else if (key == "reward.format_penalty")
            t.rewards.format_penalty = parse_real(value, ln, key);
        else if (key == "reward.lambda_danger")
            t.rewards.lambda_danger = parse_real(value, ln, key);
        else if (key == "reward.lambda_affinity")
            t.rewards.lambda_affinity = parse_real(value, ln, key);
        else if (key == "reward.gamma")
            t.rewards.gamma = parse_real(value, ln, key);
        else if (key == "reward.gamma_correction")
            t.rewards.gamma_correction = parse_bool(value, ln, key);
        else if (key == "epochs")
            t.epochs = static_cast<int>(parse_int(value, ln, key));
        else if (key == "batch_size")
            t.batch_size = static_cast<int>(parse_int(value, ln, key));
        else if (key == "alpha")
            t.alpha = parse_real(value, ln, key);
        else if (key == "schedule")
            t.schedule = schedule_by_name(value);
        else if (key == "train_seeds")
            t.train_seeds = parse_seed_list(value, ln, key);
        else if (key == "eval_seeds")
            t.eval_seeds = parse_seed_list(value, ln, key);
        else if (key == "master_seed")
            t.master_seed = parse_u64(value, ln, key);
        else if (key == "learning_rate")
            t.learning_rate = parse_real(value, ln, key);
        else if (key == "epsilon_start")
            t.epsilon_start = parse_real(value, ln, key);
        else if (key == "epsilon_end")
            t.epsilon_end = parse_real(value, ln, key);
        else if (key == "top_k_skills")
            t.top_k_skills = static_cast<int>(parse_int(value, ln, key));
        else if (key == "rerank_interval")
            t.rerank_interval = static_cast<int>(parse_int(value, ln, key));
        else if (key == "rulebook")
            t.rulebook_path = value;
        else if (key == "cell_px")
            t.cell_px = static_cast<int>(parse_int(value, ln, key));
        else if (key == "out_dir")
            cfg.out_dir = value;
        else if (key == "emit_heatmaps")
            cfg.emit_heatmaps = parse_bool(value, ln, key);
        else if (key == "heatmap_interval")
            cfg.heatmap_interval = static_cast<int>(parse_int(value, ln, key));
        else if (key == "emit_waterfall")
            cfg.emit_waterfall = parse_bool(value, ln, key);
        else if (key == "emit_pool_log")
            cfg.emit_pool_log = parse_bool(value, ln, key);
        else if (key == "checkpoint_interval")
            cfg.checkpoint_interval = static_cast<int>(parse_int(value, ln, key));
        else if (key == "eval_episodes")
            cfg.eval_episodes = static_cast<int>(parse_int(value, ln, key));
        else if (key == "greedy_eval")
            cfg.greedy_eval = parse_bool(value, ln, key);
        else
            throw ConfigError("line " + std::to_string(ln) + ": unknown key '" + key + "'", ln,
                              key);
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path, 0, "");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

std::string serialize_run_config(const RunConfig& cfg) {
    const TrainConfig& t = cfg.train;
    std::ostringstream out;
    out << "environment = "
        << (t.environment == EnvKind::Sokoban ? "sokoban" : "frozenlake") << '\n';
    out << "width = " << t.width << '\n';
    out << "height = " << t.height << '\n';
    out << "n_boxes = " << t.n_boxes << '\n';
    out << "hole_fraction = " << format_double(t.hole_fraction) << '\n';
    out << "max_steps = " << t.max_steps << '\n';
    out << "reward.success = " << format_double(t.rewards.success) << '\n';
    out << "reward.failure = " << format_double(t.rewards.failure) << '\n';
    out << "reward.format_penalty = " << format_double(t.rewards.format_penalty) << '\n';
    out << "reward.lambda_danger = " << format_double(t.rewards.lambda_danger) << '\n';
    out << "reward.lambda_affinity = " << format_double(t.rewards.lambda_affinity) << '\n';
    out << "reward.gamma = " << format_double(t.rewards.gamma) << '\n';
    out << "reward.gamma_correction = " << (t.rewards.gamma_correction ? "true" : "false")
        << '\n';
    out << "epochs = " << t.epochs << '\n';
    out << "batch_size = " << t.batch_size << '\n';
    out << "alpha = " << format_double(t.alpha) << '\n';
    out << "schedule = " << schedule_name(t.schedule) << '\n';
    out << "train_seeds = " << seed_list(t.train_seeds) << '\n';
    if (!t.eval_seeds.empty()) out << "eval_seeds = " << seed_list(t.eval_seeds) << '\n';
    out << "master_seed = " << t.master_seed << '\n';
    out << "learning_rate = " << format_double(t.learning_rate) << '\n';
    out << "epsilon_start = " << format_double(t.epsilon_start) << '\n';
    out << "epsilon_end = " << format_double(t.epsilon_end) << '\n';
    out << "top_k_skills = " << t.top_k_skills << '\n';
    out << "rerank_interval = " << t.rerank_interval << '\n';
    if (!t.rulebook_path.empty()) out << "rulebook = " << t.rulebook_path << '\n';
    out << "cell_px = " << t.cell_px << '\n';
    out << "out_dir = " << cfg.out_dir << '\n';
    out << "emit_heatmaps = " << (cfg.emit_heatmaps ? "true" : "false") << '\n';
    out << "heatmap_interval = " << cfg.heatmap_interval << '\n';
    out << "emit_waterfall = " << (cfg.emit_waterfall ? "true" : "false") << '\n';
    out << "emit_pool_log = " << (cfg.emit_pool_log ? "true" : "false") << '\n';
    out << "checkpoint_interval = " << cfg.checkpoint_interval << '\n';
    out << "eval_episodes = " << cfg.eval_episodes << '\n';
    out << "greedy_eval = " << (cfg.greedy_eval ? "true" : "false") << '\n';
    return out.str();
}

}  // namespace gridatlas
