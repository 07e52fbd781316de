#include "featsep/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "featsep/counts.hpp"
#include "featsep/io.hpp"

namespace featsep {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.output_dir);
    return (fs::path(cfg.output_dir) / name).string();
}

void write_manifest(const ExperimentConfig& cfg) {
    write_text_file(make_manifest(cfg).dump(2) + "\n", out_path(cfg, "manifest.json"));
}

void write_json_file(const json& j, const std::string& path) {
    write_text_file(j.dump(2) + "\n", path);
}

const GeneratorSpec& require_generator(const ExperimentConfig& cfg) {
    if (!cfg.generator) throw ConfigError(cfg.command + " requires a generator spec");
    return *cfg.generator;
}

SyntheticDataset generate_from_config(const ExperimentConfig& cfg, RngSeed seed) {
    const GeneratorSpec& g = require_generator(cfg);
    if (g.kind == "pairwise") {
        return generate_pairwise_mixture(g.pairwise_spec(seed));
    }
    SyntheticDataset out;
    out.matrix = generate_single_axis(g.n, g.delta, g.d_noise, seed);
    out.informative.assign(static_cast<std::size_t>(out.matrix.n_features()), 0);
    out.informative[0] = 1;
    out.s_parameter = g.delta;
    return out;
}

double fraction_missed(const FeatureScores& scores, const std::vector<char>& mask,
                       double z_threshold) {
    long informative = 0, missed = 0;
    for (Eigen::Index d = 0; d < scores.z.size(); ++d) {
        if (!mask[static_cast<std::size_t>(d)]) continue;
        ++informative;
        if (!(scores.z[d] > z_threshold)) ++missed;
    }
    return informative > 0 ? static_cast<double>(missed) / static_cast<double>(informative)
                           : std::numeric_limits<double>::quiet_NaN();
}

json scores_summary(const FeatureScores& scores, const DataMatrix& m,
                    const std::vector<char>* mask) {
    json j;
    j["lambda_hat"] = scores.lambda_hat;
    j["t_proposals"] = scores.proposals_used;
    j["entropy"] = scores.mean_proposal_entropy;
    j["separators_fitted"] = scores.separators_fitted;
    j["separators_nonzero"] = scores.separators_nonzero;
    j["null_mu"] = scores.null_mean;
    j["null_sigma"] = scores.null_std;
    j["n_selected_z_gt_1"] =
        scores.has_z() ? static_cast<long>(select_features(scores, 1.0).size()) : -1;
    if (mask) {
        j["auroc"] = roc(scores.g, *mask).auroc;
        j["weight_ratio"] = weight_ratio(scores.g, *mask).value;
        Vector votes(scores.g.size());
        for (Eigen::Index d = 0; d < votes.size(); ++d)
            votes[d] = static_cast<double>(scores.support_counts[static_cast<std::size_t>(d)]);
        j["measured_vote_ratio"] = weight_ratio(votes, *mask).value;
        if (scores.has_z()) j["fnr_z_gt_1"] = fraction_missed(scores, *mask, 1.0);
    }
    (void)m;
    return j;
}

}  // namespace

void run_synth(const ExperimentConfig& cfg) {
    SyntheticDataset data = generate_from_config(cfg, RngSeed{cfg.seed});
    write_matrix_csv(data.matrix, out_path(cfg, "data.csv"));
    write_labels_csv(data.matrix, out_path(cfg, "data.labels.csv"));
    write_mask_csv(data.matrix.feature_names, data.informative, out_path(cfg, "data.mask.csv"));
    write_manifest(cfg);
}

void run_score(const ExperimentConfig& cfg) {
    if (cfg.input.empty()) throw ConfigError("score requires an input matrix");
    DataMatrix m = standardize_columns(load_matrix_with_sidecars(cfg.input));
    ScorerConfig sc = cfg.scorer_config();

    FeatureScores scores;
    if (cfg.solver.lambda > 0.0) {
        scores = score_features_with_lambda(m, sc, cfg.solver.lambda, RngSeed{cfg.seed});
        if (sc.null_runs >= 1) {
            NullStatistics null = null_statistics(m, sc, cfg.solver.lambda, RngSeed{cfg.seed});
            scores.null_mean = null.mu;
            scores.null_std = null.sigma;
            scores = z_scores(scores);
        }
    } else {
        scores = sc.null_runs >= 1 ? score_with_null(m, sc, RngSeed{cfg.seed})
                                   : score_features(m, sc, RngSeed{cfg.seed});
    }

    write_scores_csv(scores, m.feature_names, out_path(cfg, "scores.csv"));
    write_histogram_csv(scores.g, 40, out_path(cfg, "score_hist.csv"));

    std::vector<char> mask;
    std::string mask_path = sibling_path(cfg.input, "mask");
    bool have_mask = fs::exists(mask_path);
    if (have_mask) mask = read_mask_csv(mask_path, m.feature_names);
    write_json_file(scores_summary(scores, m, have_mask ? &mask : nullptr),
                    out_path(cfg, "summary.json"));
    write_manifest(cfg);
}

void run_null(const ExperimentConfig& cfg) {
    if (cfg.input.empty()) throw ConfigError("null requires an input matrix");
    if (cfg.null_runs < 1) throw ConfigError("null requires null_runs >= 1");
    DataMatrix m = standardize_columns(load_matrix_with_sidecars(cfg.input));
    ScorerConfig sc = cfg.scorer_config();

    // Calibrate exactly as `score` would, so the two commands agree on lambda.
    double lambda_hat = cfg.solver.lambda;
    if (!(lambda_hat > 0.0))
        lambda_hat = calibrate_scoring_lambda(m, sc, RngSeed{cfg.seed});
    NullStatistics null = null_statistics(m, sc, lambda_hat, RngSeed{cfg.seed});

    std::ostringstream csv;
    csv << "feature,run,g\n";
    for (std::size_t r = 0; r < null.run_scores.size(); ++r) {
        const Vector& g = null.run_scores[r];
        for (Eigen::Index d = 0; d < g.size(); ++d) {
            csv << m.feature_names[static_cast<std::size_t>(d)] << ',' << r << ','
                << format_double(g[d]) << '\n';
        }
    }
    write_text_file(csv.str(), out_path(cfg, "null_scores.csv"));
    write_json_file(json{{"mu", null.mu}, {"sigma", null.sigma}, {"lambda_hat", lambda_hat}},
                    out_path(cfg, "null_stats.json"));
    write_manifest(cfg);
}

void run_eval(const ExperimentConfig& cfg) {
    if (cfg.scores.empty()) throw ConfigError("eval requires --scores");
    if (cfg.mask.empty()) throw ConfigError("eval requires --mask");
    ScoresFile f = read_scores_csv(cfg.scores);
    std::vector<char> mask = read_mask_csv(cfg.mask, f.feature_names);

    RocCurve curve = roc(f.g, mask);
    write_roc_csv(curve, out_path(cfg, "roc.csv"));

    json summary;
    summary["auroc"] = curve.auroc;
    summary["weight_ratio"] = weight_ratio(f.g, mask).value;
    summary["entropy"] = nullptr;
    summary["lambda_hat"] = nullptr;
    summary["t_proposals"] = nullptr;
    if (!cfg.score_summary.empty()) {
        json run = json::parse(read_text_file(cfg.score_summary));
        if (run.contains("entropy")) summary["entropy"] = run["entropy"];
        if (run.contains("lambda_hat")) summary["lambda_hat"] = run["lambda_hat"];
        if (run.contains("t_proposals")) summary["t_proposals"] = run["t_proposals"];
    }
    write_json_file(summary, out_path(cfg, "summary.json"));
    write_manifest(cfg);
}

ProposalPolicy scaling_cell_policy(const ProposalPolicy& base, int n_rows) {
    ProposalPolicy p = base;
    p.n_subsample = std::min(base.n_subsample, n_rows);
    p.k_max = std::max(base.k_min, n_rows / 20);
    p.k_max = std::min(p.k_max, p.n_subsample);
    p.k_min = std::min(base.k_min, p.k_max);
    return p;
}

std::vector<ScalingRow> compute_scaling_rows(const ExperimentConfig& cfg) {
    const GeneratorSpec& g = require_generator(cfg);
    if (g.kind != "pairwise") throw ConfigError("scaling requires the pairwise generator");
    if (cfg.ratios.empty() || cfg.n_values.empty())
        throw ConfigError("scaling requires ratios and n_values");

    PairwiseMixtureSpec base = g.pairwise_spec(child_seed(RngSeed{cfg.seed}, "data"));
    std::vector<ScalingCell> cells = generate_scaling_grid(base, cfg.ratios, cfg.n_values);

    std::vector<ScalingRow> rows;
    std::uint64_t idx = 0;
    for (const ScalingCell& cell : cells) {
        ScorerConfig sc = cfg.scorer_config();
        sc.policy = scaling_cell_policy(cfg.policy, cell.data.matrix.n_samples());
        sc.null_runs = 0;
        FeatureScores scores = score_features(cell.data.matrix, sc,
                                              child_seed(RngSeed{cfg.seed}, "score", idx++));
        ScalingRow row;
        row.d = cell.data.matrix.n_features();
        row.d_s = base.d_informative();
        row.n = cell.data.matrix.n_samples();
        row.t = sc.policy.t_proposals;
        row.weight_ratio = weight_ratio(scores.g, cell.data.informative).value;
        row.auroc = roc(scores.g, cell.data.informative).auroc;
        row.entropy = scores.mean_proposal_entropy;
        rows.push_back(row);
    }
    return rows;
}

void run_scaling(const ExperimentConfig& cfg) {
    std::vector<ScalingRow> rows = compute_scaling_rows(cfg);
    std::ostringstream csv;
    csv << "D,D_s,N,T,weight_ratio,auroc,entropy\n";
    for (const auto& r : rows) {
        csv << r.d << ',' << r.d_s << ',' << r.n << ',' << r.t << ','
            << format_double(r.weight_ratio) << ',' << format_double(r.auroc) << ','
            << format_double(r.entropy) << '\n';
    }
    write_text_file(csv.str(), out_path(cfg, "scaling.csv"));
    write_manifest(cfg);
}

std::vector<SweepRow> compute_sweep_rows(const ExperimentConfig& cfg) {
    const GeneratorSpec& g = require_generator(cfg);
    if (g.kind != "pairwise") throw ConfigError("sweep-s requires the pairwise generator");
    if (cfg.s_values.empty()) throw ConfigError("sweep-s requires s_values");

    std::vector<SweepRow> rows;
    std::uint64_t idx = 0;
    for (double s : cfg.s_values) {
        GeneratorSpec gs = g;
        gs.separation = s * g.sigma;
        PairwiseMixtureSpec spec = gs.pairwise_spec(child_seed(RngSeed{cfg.seed}, "data", idx));
        SyntheticDataset data = generate_pairwise_mixture(spec);

        ScorerConfig sc = cfg.scorer_config();
        sc.policy.n_subsample = std::min(sc.policy.n_subsample, data.matrix.n_samples());
        FeatureScores scores =
            sc.null_runs >= 1
                ? score_with_null(data.matrix, sc, child_seed(RngSeed{cfg.seed}, "score", idx))
                : score_features(data.matrix, sc, child_seed(RngSeed{cfg.seed}, "score", idx));
        ++idx;

        SweepRow row;
        row.s = s;
        row.auroc = roc(scores.g, data.informative).auroc;
        row.weight_ratio = weight_ratio(scores.g, data.informative).value;
        row.entropy = scores.mean_proposal_entropy;
        if (scores.has_z()) row.fnr_z_gt_1 = fraction_missed(scores, data.informative, 1.0);
        rows.push_back(row);
    }
    return rows;
}

void run_sweep_s(const ExperimentConfig& cfg) {
    std::vector<SweepRow> rows = compute_sweep_rows(cfg);
    std::ostringstream csv;
    csv << "S,auroc,weight_ratio,entropy,fnr_z_gt_1\n";
    for (const auto& r : rows) {
        csv << format_double(r.s) << ',' << format_double(r.auroc) << ','
            << format_double(r.weight_ratio) << ',' << format_double(r.entropy) << ','
            << format_double(r.fnr_z_gt_1) << '\n';
    }
    write_text_file(csv.str(), out_path(cfg, "sweep_s.csv"));
    write_manifest(cfg);
}

void run_prep(const ExperimentConfig& cfg) {
    if (cfg.input.empty()) throw ConfigError("prep requires an input count matrix");
    CountMatrix counts = read_counts_csv(cfg.input);
    DownsampleResult down = downsample_reads(counts, cfg.depth, RngSeed{cfg.seed});

    std::optional<std::vector<std::string>> whitelist;
    if (!cfg.whitelist.empty()) whitelist = read_name_list(cfg.whitelist);
    FilterResult filtered =
        filter_and_normalize(down.kept, cfg.mean_min, cfg.std_min, whitelist);

    write_matrix_csv(filtered.matrix, out_path(cfg, "prep_data.csv"));
    json report;
    report["dropped_cells"] = down.dropped_cells;
    report["n_cells_kept"] = down.kept.n_cells();
    report["kept_genes"] = filtered.report.kept;
    report["dropped_low_mean"] = filtered.report.dropped_low_mean;
    report["dropped_low_std"] = filtered.report.dropped_low_std;
    report["dropped_not_whitelisted"] = filtered.report.dropped_not_whitelisted;
    write_json_file(report, out_path(cfg, "prep_report.json"));
    write_manifest(cfg);
}

void run_expand(const ExperimentConfig& cfg) {
    if (cfg.input.empty()) throw ConfigError("expand requires an input matrix");
    if (cfg.selected.empty()) throw ConfigError("expand requires --selected");
    DataMatrix m = read_matrix_csv(cfg.input);
    std::vector<std::string> selected = read_name_list(cfg.selected);
    std::vector<std::string> expanded = expand_correlated(m, selected, cfg.expand_k);

    std::ostringstream txt;
    for (const auto& name : expanded) txt << name << '\n';
    write_text_file(txt.str(), out_path(cfg, "expanded_features.txt"));
    write_manifest(cfg);
}

void run_command(const ExperimentConfig& cfg) {
    if (cfg.command == "synth") run_synth(cfg);
    else if (cfg.command == "score") run_score(cfg);
    else if (cfg.command == "null") run_null(cfg);
    else if (cfg.command == "eval") run_eval(cfg);
    else if (cfg.command == "scaling") run_scaling(cfg);
    else if (cfg.command == "sweep-s") run_sweep_s(cfg);
    else if (cfg.command == "prep") run_prep(cfg);
    else if (cfg.command == "expand") run_expand(cfg);
    else throw ConfigError("unknown command: " + cfg.command);
}

}  // namespace featsep
