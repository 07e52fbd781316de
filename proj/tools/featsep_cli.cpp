#include <CLI11.hpp>
#include <deque>
#include <iostream>
#include <string>

#include "featsep/experiments.hpp"
#include "featsep/io.hpp"

namespace {

using featsep::ExperimentConfig;
using nlohmann::json;

struct CommandBuilder {
    CLI::App* cmd = nullptr;
    ExperimentConfig cfg;
    std::string config_path;
    bool seed_in_config = false;
    bool needs_seed = false;

    // Local mirrors for flag parsing; applied over the config file values
    // only when the flag was actually given.
    std::uint64_t seed = 0;
    std::string input, output_dir = ".";
    int threads = 0;
    featsep::GeneratorSpec gen;
    bool gen_touched = false;
    std::string algorithm = "kmeans";
    int n_subsample = 1000, k_min = 3, k_max = 14, t_proposals = 1000;
    double lambda = 0.0, tol = 1e-7, huber_delta = 0.01;
    int max_iters = 0;
    double target_nnz = 1.0;
    bool no_normalize = false;
    int null_runs = 1;
    std::string scores, mask, score_summary;
    std::vector<double> ratios, s_values;
    std::vector<int> n_values;
    long long depth = 10000;
    double mean_min = 0.05, std_min = 0.05;
    std::string whitelist, selected;
    int expand_k = 5;
};

void add_common(CommandBuilder& b) {
    b.cmd->add_option("--config", b.config_path, "JSON config file; flags override its fields");
    b.cmd->add_option("-o,--output-dir", b.output_dir, "output directory");
    b.cmd->add_option("--threads", b.threads, "worker threads (0 = all cores)");
    if (b.needs_seed)
        b.cmd->add_option("--seed", b.seed, "64-bit seed (required for stochastic commands)");
}

void add_generator(CommandBuilder& b) {
    auto touch = [&b](const std::string&) { b.gen_touched = true; };
    b.cmd->add_option("--kind", b.gen.kind, "generator kind: pairwise | single_axis")->each(touch);
    b.cmd->add_option("--k-true", b.gen.k_true, "number of true clusters")->each(touch);
    b.cmd->add_option("--d-total", b.gen.d_total, "total feature count D")->each(touch);
    b.cmd->add_option("--separation", b.gen.separation, "cluster mean gap along informative features")->each(touch);
    b.cmd->add_option("--sigma", b.gen.sigma, "within-cluster std along informative features")->each(touch);
    b.cmd->add_option("--n-per-cluster", b.gen.n_per_cluster, "samples per cluster")->each(touch);
    b.cmd->add_option("--noise-theta", b.gen.noise_theta, "planted noise-correlation strength")->each(touch);
    b.cmd->add_option("--n", b.gen.n, "single_axis: total samples (even)")->each(touch);
    b.cmd->add_option("--delta", b.gen.delta, "single_axis: mean gap")->each(touch);
    b.cmd->add_option("--d-noise", b.gen.d_noise, "single_axis: noise feature count")->each(touch);
}

void add_scorer(CommandBuilder& b) {
    b.cmd->add_option("--n-subsample", b.n_subsample, "rows per proposal subsample");
    b.cmd->add_option("--k-min", b.k_min, "lower bound of the K_p prior");
    b.cmd->add_option("--k-max", b.k_max, "upper bound of the K_p prior");
    b.cmd->add_option("--algorithm", b.algorithm, "proposal clustering: kmeans | ward");
    b.cmd->add_option("-T,--t-proposals", b.t_proposals, "ensemble size");
    b.cmd->add_option("--lambda", b.lambda, "fixed L1 weight (0 = calibrate)");
    b.cmd->add_option("--tol", b.tol, "solver convergence tolerance");
    b.cmd->add_option("--huber-delta", b.huber_delta, "hinge smoothing half-width");
    b.cmd->add_option("--max-iters", b.max_iters, "solver sweep cap (0 = 10*D)");
    b.cmd->add_option("--target-nnz", b.target_nnz, "calibration target support size");
    b.cmd->add_flag("--no-normalize-theta", b.no_normalize, "accumulate raw |theta| instead of unit-L2");
    b.cmd->add_option("--null-runs", b.null_runs, "shuffled scoring runs for the null model");
}

ExperimentConfig resolve(CommandBuilder& b, const std::string& command) {
    ExperimentConfig cfg;
    if (!b.config_path.empty()) {
        json j = json::parse(featsep::read_text_file(b.config_path));
        cfg = ExperimentConfig::from_json(j);
        b.seed_in_config = j.contains("seed");
    }
    cfg.command = command;
    cfg.output_dir = b.output_dir;

    auto flag_count = [&](const char* flag) -> std::size_t {
        const CLI::Option* opt = b.cmd->get_option_no_throw(flag);
        return opt ? opt->count() : 0;
    };
    auto set_if = [&](const char* flag, auto&& apply) {
        if (flag_count(flag) > 0) apply();
    };
    set_if("--seed", [&] { cfg.seed = b.seed; });
    set_if("--threads", [&] { cfg.threads = b.threads; });
    set_if("--input", [&] { cfg.input = b.input; });
    set_if("--n-subsample", [&] { cfg.policy.n_subsample = b.n_subsample; });
    set_if("--k-min", [&] { cfg.policy.k_min = b.k_min; });
    set_if("--k-max", [&] { cfg.policy.k_max = b.k_max; });
    set_if("--algorithm", [&] { cfg.policy.algorithm = featsep::parse_algorithm(b.algorithm); });
    set_if("--t-proposals", [&] { cfg.policy.t_proposals = b.t_proposals; });
    set_if("--lambda", [&] { cfg.solver.lambda = b.lambda; });
    set_if("--tol", [&] { cfg.solver.tol = b.tol; });
    set_if("--huber-delta", [&] { cfg.solver.huber_delta = b.huber_delta; });
    set_if("--max-iters", [&] { cfg.solver.max_iters = b.max_iters; });
    set_if("--target-nnz", [&] { cfg.target_nnz = b.target_nnz; });
    set_if("--no-normalize-theta", [&] { cfg.normalize_theta = false; });
    set_if("--null-runs", [&] { cfg.null_runs = b.null_runs; });
    set_if("--scores", [&] { cfg.scores = b.scores; });
    set_if("--mask", [&] { cfg.mask = b.mask; });
    set_if("--score-summary", [&] { cfg.score_summary = b.score_summary; });
    set_if("--ratios", [&] { cfg.ratios = b.ratios; });
    set_if("--n-values", [&] { cfg.n_values = b.n_values; });
    set_if("--s-values", [&] { cfg.s_values = b.s_values; });
    set_if("--depth", [&] { cfg.depth = b.depth; });
    set_if("--mean-min", [&] { cfg.mean_min = b.mean_min; });
    set_if("--std-min", [&] { cfg.std_min = b.std_min; });
    set_if("--whitelist", [&] { cfg.whitelist = b.whitelist; });
    set_if("--selected", [&] { cfg.selected = b.selected; });
    set_if("--expand-k", [&] { cfg.expand_k = b.expand_k; });
    if (b.gen_touched || !cfg.generator) {
        if (b.gen_touched && cfg.generator) {
            // Start from the config file's generator, then overlay flags.
            featsep::GeneratorSpec merged = *cfg.generator;
            auto gset = [&](const char* flag, auto&& apply) {
                if (flag_count(flag) > 0) apply(merged);
            };
            gset("--kind", [&](auto& g) { g.kind = b.gen.kind; });
            gset("--k-true", [&](auto& g) { g.k_true = b.gen.k_true; });
            gset("--d-total", [&](auto& g) { g.d_total = b.gen.d_total; });
            gset("--separation", [&](auto& g) { g.separation = b.gen.separation; });
            gset("--sigma", [&](auto& g) { g.sigma = b.gen.sigma; });
            gset("--n-per-cluster", [&](auto& g) { g.n_per_cluster = b.gen.n_per_cluster; });
            gset("--noise-theta", [&](auto& g) { g.noise_theta = b.gen.noise_theta; });
            gset("--n", [&](auto& g) { g.n = b.gen.n; });
            gset("--delta", [&](auto& g) { g.delta = b.gen.delta; });
            gset("--d-noise", [&](auto& g) { g.d_noise = b.gen.d_noise; });
            cfg.generator = merged;
        } else if (b.gen_touched) {
            cfg.generator = b.gen;
        }
    }

    if (b.needs_seed && flag_count("--seed") == 0 && !b.seed_in_config) {
        throw featsep::ConfigError(command + " requires --seed (or a seed in --config)");
    }
    return cfg;
}

int dispatch(CommandBuilder& b, const std::string& command) {
    ExperimentConfig cfg = resolve(b, command);
    featsep::run_command(cfg);
    return 0;
}

void emit_error(const std::string& code, const std::string& message) {
    std::cerr << json{{"error", code}, {"message", message}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unsupervised sparse-feature discovery: score features by how often "
                 "L1 max-margin separators over an ensemble of proposal clusterings use them."};
    app.require_subcommand(1);

    std::deque<std::pair<std::string, CommandBuilder>> builders;

    auto make = [&](const std::string& name, const std::string& desc, bool needs_seed) -> CommandBuilder& {
        builders.emplace_back(name, CommandBuilder{});
        CommandBuilder& b = builders.back().second;
        b.cmd = app.add_subcommand(name, desc);
        b.needs_seed = needs_seed;
        add_common(b);
        return b;
    };

    CommandBuilder& synth = make("synth", "generate a synthetic dataset with ground truth", true);
    add_generator(synth);

    CommandBuilder& score = make("score", "score features on a data matrix", true);
    score.cmd->add_option("--input", score.input, "matrix CSV (labels/mask sidecars auto-detected)");
    add_scorer(score);

    CommandBuilder& nullc = make("null", "null-model statistics for a data matrix", true);
    nullc.cmd->add_option("--input", nullc.input, "matrix CSV");
    add_scorer(nullc);

    CommandBuilder& evalc = make("eval", "ROC/AUROC and weight ratio from scores + mask", false);
    evalc.cmd->add_option("--scores", evalc.scores, "scores.csv from a score run");
    evalc.cmd->add_option("--mask", evalc.mask, "ground-truth mask CSV");
    evalc.cmd->add_option("--score-summary", evalc.score_summary, "summary.json from the score run");

    CommandBuilder& scaling = make("scaling", "run the (D/D_s, N) grid experiment", true);
    add_generator(scaling);
    add_scorer(scaling);
    scaling.cmd->add_option("--ratios", scaling.ratios, "D/D_s values")->delimiter(',');
    scaling.cmd->add_option("--n-values", scaling.n_values, "N values")->delimiter(',');

    CommandBuilder& sweep = make("sweep-s", "sweep the separation parameter S", true);
    add_generator(sweep);
    add_scorer(sweep);
    sweep.cmd->add_option("--s-values", sweep.s_values, "S values")->delimiter(',');

    CommandBuilder& prep = make("prep", "downsample reads and filter/normalize genes", true);
    prep.cmd->add_option("--input", prep.input, "count matrix CSV");
    prep.cmd->add_option("--depth", prep.depth, "reads per cell after downsampling");
    prep.cmd->add_option("--mean-min", prep.mean_min, "minimum gene mean");
    prep.cmd->add_option("--std-min", prep.std_min, "minimum gene std");
    prep.cmd->add_option("--whitelist", prep.whitelist, "one-gene-per-line whitelist file");

    CommandBuilder& expand = make("expand", "expand selected features by top correlates", false);
    expand.cmd->add_option("--input", expand.input, "matrix CSV");
    expand.cmd->add_option("--selected", expand.selected, "one-feature-per-line seed list");
    expand.cmd->add_option("--expand-k", expand.expand_k, "correlates added per seed feature");

    std::string manifest_path;
    std::string rerun_out = ".";
    CLI::App* rerun = app.add_subcommand("rerun", "re-execute a run from its manifest.json");
    rerun->add_option("manifest", manifest_path, "manifest.json of a previous run")->required();
    rerun->add_option("-o,--output-dir", rerun_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (rerun->parsed()) {
            json manifest = json::parse(featsep::read_text_file(manifest_path));
            ExperimentConfig cfg = featsep::config_from_manifest(manifest);
            cfg.output_dir = rerun_out;
            featsep::run_command(cfg);
            return 0;
        }
        for (auto& [name, b] : builders) {
            if (b.cmd->parsed()) return dispatch(b, name);
        }
        return 0;
    } catch (const nlohmann::json::exception& e) {
        emit_error("config_parse", e.what());
        return 2;
    } catch (const featsep::ConfigError& e) {
        emit_error(e.code(), e.what());
        return 2;
    } catch (const featsep::Error& e) {
        emit_error(e.code(), e.what());
        return 1;
    } catch (const std::exception& e) {
        emit_error("internal", e.what());
        return 1;
    }
}
