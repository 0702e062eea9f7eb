#include "gridatlas/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "gridatlas/agent.hpp"
#include "gridatlas/errors.hpp"
#include "gridatlas/run_config.hpp"
#include "gridatlas/textio.hpp"

namespace gridatlas {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    return f;
}

void write_heatmap_pair(const AtlasState& atlas, const std::string& dir, int cell_px) {
    BlendedMaps maps = atlas.blend();
    std::string stem = dir + "/atlas_" + std::to_string(atlas.layout_seed) + "_" +
                       std::to_string(atlas.epoch) + "_";
    write_png(render_heatmap(maps.danger, HeatmapChannel::Danger, cell_px), stem + "danger.png");
    write_png(render_heatmap(maps.affinity, HeatmapChannel::Affinity, cell_px),
              stem + "affinity.png");
}

std::string outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Success: return "success";
        case Outcome::Failure: return "failure";
        case Outcome::Timeout: return "timeout";
    }
    return "?";
}

int cmd_train(const std::string& config_path, uint64_t* seed_override,
              const std::string* out_override, std::ostream& out) {
    RunConfig cfg = load_run_config(config_path);
    if (seed_override) cfg.train.master_seed = *seed_override;
    if (out_override) cfg.out_dir = *out_override;
    cfg.validate();

    fs::create_directories(cfg.out_dir);
    std::ofstream config_echo = open_out(cfg.out_dir + "/config.txt");
    config_echo << serialize_run_config(cfg);
    config_echo.close();

    TrainingRun run(cfg.train);

    std::ofstream metrics = open_out(cfg.out_dir + "/metrics.csv");
    metrics << "epoch,success_rate,mean_return,mean_env,mean_danger,mean_affinity,pool_size\n";

    std::ofstream waterfall;
    if (cfg.emit_waterfall) {
        waterfall = open_out(cfg.out_dir + "/waterfall.csv");
        waterfall << "episode,step,env,danger,affinity,format,total\n";
    }
    std::ofstream pool_log;
    if (cfg.emit_pool_log) {
        pool_log = open_out(cfg.out_dir + "/pool_log.csv");
        pool_log << "epoch,event,tag,sequence,source_episode,pool_size\n";
    }

    if (cfg.emit_heatmaps)
        for (const auto& [seed, atlas] : run.registry().atlases)
            write_heatmap_pair(atlas, cfg.out_dir, cfg.train.cell_px);

    TrainHooks hooks;
    if (cfg.emit_waterfall)
        hooks.on_episode = [&](const EpisodeRollout& ep) {
            for (size_t s = 0; s < ep.shaped.size(); ++s) {
                const RewardBreakdown& rb = ep.shaped[s];
                waterfall << ep.episode_id << ',' << s << ',' << format_double(rb.env) << ','
                          << format_double(rb.danger) << ',' << format_double(rb.affinity) << ','
                          << format_double(rb.format) << ',' << format_double(rb.total) << '\n';
            }
        };
    if (cfg.emit_pool_log)
        hooks.on_pool_event = [&](int epoch, const PoolEvent& ev) {
            const char* kind = ev.kind == PoolEventKind::Inserted
                                   ? "insert"
                                   : (ev.kind == PoolEventKind::Evicted ? "evict" : "reject");
            pool_log << epoch << ',' << kind << ','
                     << (ev.tag == ExemplarTag::Positive ? "positive" : "negative") << ','
                     << ev.sequence << ',' << ev.source_episode << ',' << run.pool().size()
                     << '\n';
        };
    hooks.on_metrics = [&](const EpochMetrics& m) {
        metrics << m.epoch << ',' << format_double(m.success_rate) << ','
                << format_double(m.mean_return) << ',' << format_double(m.mean_env) << ','
                << format_double(m.mean_danger) << ',' << format_double(m.mean_affinity) << ','
                << m.pool_size << '\n';
    };
    hooks.after_epoch = [&](int epoch) {
        bool last = epoch == cfg.train.epochs;
        if (cfg.emit_heatmaps && (epoch % cfg.heatmap_interval == 0 || last))
            for (const auto& [seed, atlas] : run.registry().atlases)
                write_heatmap_pair(atlas, cfg.out_dir, cfg.train.cell_px);
        if (last || (cfg.checkpoint_interval > 0 && epoch % cfg.checkpoint_interval == 0))
            run.save_checkpoint(cfg.out_dir + "/run_" + std::to_string(cfg.train.master_seed) +
                                "/epoch_" + std::to_string(epoch));
    };

    run.train(cfg.train.epochs, hooks);

    const EpochMetrics& last = run.metrics().back();
    out << "trained " << cfg.train.epochs << " epochs x " << cfg.train.batch_size
        << " episodes\n";
    out << "final success rate " << format_double(last.success_rate) << ", pool size "
        << last.pool_size << '\n';
    out << "artifacts in " << cfg.out_dir << '\n';
    return kExitOk;
}

int cmd_eval(const std::string& config_path, const std::string& checkpoint_dir,
             uint64_t* seed_override, const std::string* out_override, std::ostream& out) {
    RunConfig cfg = load_run_config(config_path);
    if (seed_override) cfg.train.master_seed = *seed_override;
    if (out_override) cfg.out_dir = *out_override;
    cfg.validate();

    TrainingRun run(cfg.train);
    CheckpointMeta meta = run.load_checkpoint(checkpoint_dir);
    for (uint64_t e : cfg.train.eval_seeds)
        for (uint64_t t : meta.train_seeds)
            if (e == t)
                throw SeedOverlap(e, "evaluation seed " + std::to_string(e) +
                                         " was a training seed of this checkpoint");

    EvalResult result = run.evaluate(cfg.eval_episodes, cfg.greedy_eval);

    fs::create_directories(cfg.out_dir);
    std::ofstream csv = open_out(cfg.out_dir + "/eval.csv");
    csv << "episode,layout_seed,outcome,steps,env_return\n";
    for (const EvalEpisode& row : result.rows)
        csv << row.episode << ',' << row.layout_seed << ',' << outcome_name(row.outcome) << ','
            << row.steps << ',' << format_double(row.env_return) << '\n';

    out << "evaluated " << result.episodes << " episodes (checkpoint epoch " << meta.epoch
        << ")\n";
    out << "success rate " << format_double(result.success_rate) << '\n';
    return kExitOk;
}

struct WaterfallRow {
    int64_t episode;
    int step;
    double env, danger, affinity, format, total;
};

void plot_waterfall(const std::vector<WaterfallRow>& rows, const std::string& path) {
    const int bar_w = 18;
    const int gap = 6;
    const int h = 320;
    const int mid = h / 2;
    int w = static_cast<int>(rows.size()) * (bar_w + gap) + gap;
    Image img = Image::blank(std::max(w, 64), h);
    img.fill_rect(0, 0, img.width, img.height, 24, 24, 24, 255);
    img.fill_rect(0, mid, img.width, 1, 200, 200, 200, 255);

    double peak = 1e-9;
    for (const WaterfallRow& r : rows) {
        double up = std::max(0.0, r.env) + std::max(0.0, r.danger) + std::max(0.0, r.affinity) +
                    std::max(0.0, r.format);
        double down = std::max(0.0, -r.env) + std::max(0.0, -r.danger) +
                      std::max(0.0, -r.affinity) + std::max(0.0, -r.format);
        peak = std::max({peak, up, down});
    }
    double scale = (mid - 10) / peak;

    auto draw = [&](int x, double& up_off, double& down_off, double v, uint8_t r, uint8_t g,
                    uint8_t b) {
        int px_h = static_cast<int>(std::lround(std::abs(v) * scale));
        if (px_h == 0) return;
        if (v >= 0) {
            img.fill_rect(x, mid - static_cast<int>(up_off) - px_h, bar_w, px_h, r, g, b, 255);
            up_off += px_h;
        } else {
            img.fill_rect(x, mid + 1 + static_cast<int>(down_off), bar_w, px_h, r, g, b, 255);
            down_off += px_h;
        }
    };
    int x = gap;
    for (const WaterfallRow& r : rows) {
        double up = 0.0;
        double down = 0.0;
        draw(x, up, down, r.env, 180, 180, 180);
        draw(x, up, down, r.danger, 220, 60, 60);
        draw(x, up, down, r.affinity, 60, 200, 80);
        draw(x, up, down, r.format, 230, 150, 40);
        x += bar_w + gap;
    }
    write_png(img, path);
}

int cmd_waterfall(const std::string& run_dir, int64_t episode, const std::string& plot_path,
                  std::ostream& out) {
    std::string path = run_dir + "/waterfall.csv";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("no waterfall log at " + path);

    std::string line;
    if (!std::getline(in, line) || line != "episode,step,env,danger,affinity,format,total")
        throw CheckpointError("waterfall log at " + path + " has an unexpected header");

    std::vector<WaterfallRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        WaterfallRow r{};
        char c = 0;
        std::istringstream ls(line);
        if (!(ls >> r.episode >> c >> r.step >> c >> r.env >> c >> r.danger >> c >> r.affinity >>
              c >> r.format >> c >> r.total))
            throw CheckpointError("waterfall log at " + path + " has a corrupt row");
        if (r.episode == episode) rows.push_back(r);
    }
    if (rows.empty())
        throw CheckpointError("episode " + std::to_string(episode) + " not present in " + path);
    std::sort(rows.begin(), rows.end(),
              [](const WaterfallRow& a, const WaterfallRow& b) { return a.step < b.step; });

    out << "episode " << episode << " reward decomposition\n";
    out << std::left << std::setw(6) << "step" << std::right << std::setw(12) << "env"
        << std::setw(12) << "danger" << std::setw(12) << "affinity" << std::setw(12) << "format"
        << std::setw(12) << "total" << '\n';
    double sum_env = 0, sum_dan = 0, sum_aff = 0, sum_fmt = 0, sum_tot = 0;
    for (const WaterfallRow& r : rows) {
        out << std::left << std::setw(6) << r.step << std::right << std::fixed
            << std::setprecision(5) << std::setw(12) << r.env << std::setw(12) << r.danger
            << std::setw(12) << r.affinity << std::setw(12) << r.format << std::setw(12)
            << r.total << '\n';
        out.unsetf(std::ios::fixed);
        sum_env += r.env;
        sum_dan += r.danger;
        sum_aff += r.affinity;
        sum_fmt += r.format;
        sum_tot += r.total;
    }
    out << std::left << std::setw(6) << "sum" << std::right << std::fixed << std::setprecision(5)
        << std::setw(12) << sum_env << std::setw(12) << sum_dan << std::setw(12) << sum_aff
        << std::setw(12) << sum_fmt << std::setw(12) << sum_tot << '\n';
    out.unsetf(std::ios::fixed);

    if (!plot_path.empty()) {
        plot_waterfall(rows, plot_path);
        out << "plot written to " << plot_path << '\n';
    }
    return kExitOk;
}

int cmd_render_atlas(const std::string& target, const std::string& out_dir, int cell_px,
                     std::ostream& out) {
    std::vector<std::string> files;
    if (fs::is_directory(target)) {
        for (const auto& entry : fs::directory_iterator(target)) {
            std::string name = entry.path().filename().string();
            if (name.rfind("atlas_", 0) == 0 && name.size() > 4 &&
                name.substr(name.size() - 4) == ".txt")
                files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end());
        if (files.empty())
            throw CheckpointError("no atlas files under " + target);
    } else if (fs::exists(target)) {
        files.push_back(target);
    } else {
        throw CheckpointError("no such checkpoint: " + target);
    }

    fs::create_directories(out_dir);
    for (const std::string& f : files) {
        AtlasState atlas = load_atlas_file(f);
        write_heatmap_pair(atlas, out_dir, cell_px);
        out << "rendered atlas seed " << atlas.layout_seed << " epoch " << atlas.epoch << '\n';
    }
    return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"spatial skill-memory gridworld trainer"};
    app.require_subcommand(1);

    std::string config_path;
    std::string checkpoint;
    std::string run_dir;
    std::string plot_path;
    std::string out_dir;
    uint64_t seed = 0;
    int64_t episode = 0;
    int cell_px = kDefaultCellPx;

    auto* train = app.add_subcommand("train", "train a run from a config file");
    train->add_option("config", config_path, "config file")->required();
    auto* train_seed = train->add_option("--seed", seed, "override master_seed");
    auto* train_out = train->add_option("--out", out_dir, "override out_dir");

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on unseen seeds");
    eval->add_option("config", config_path, "config file")->required();
    eval->add_option("checkpoint", checkpoint, "checkpoint directory")->required();
    auto* eval_seed = eval->add_option("--seed", seed, "override master_seed");
    auto* eval_out = eval->add_option("--out", out_dir, "override out_dir");

    auto* wf = app.add_subcommand("waterfall", "print one episode's reward decomposition");
    wf->add_option("run_dir", run_dir, "training output directory")->required();
    wf->add_option("episode", episode, "episode id")->required();
    wf->add_option("--plot", plot_path, "also write a PNG chart");

    auto* ra = app.add_subcommand("render-atlas", "render heatmap PNGs from a checkpoint");
    ra->add_option("checkpoint", checkpoint, "atlas file or checkpoint directory")->required();
    ra->add_option("--out", out_dir, "output directory")->default_val(std::string("."));
    ra->add_option("--cell-px", cell_px, "pixels per cell");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (train->parsed())
            return cmd_train(config_path, train_seed->count() ? &seed : nullptr,
                             train_out->count() ? &out_dir : nullptr, out);
        if (eval->parsed())
            return cmd_eval(config_path, checkpoint, eval_seed->count() ? &seed : nullptr,
                            eval_out->count() ? &out_dir : nullptr, out);
        if (wf->parsed()) return cmd_waterfall(run_dir, episode, plot_path, out);
        if (ra->parsed()) return cmd_render_atlas(checkpoint, out_dir, cell_px, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SeedOverlap& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const CheckpointError& e) {
        err << "checkpoint error: " << e.what() << '\n';
        return kExitMissing;
    } catch (const FormatError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitConfig;
}

}  // namespace gridatlas
