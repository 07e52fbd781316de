#include "featsep/config.hpp"

#include <set>

namespace featsep {

using nlohmann::json;

PairwiseMixtureSpec GeneratorSpec::pairwise_spec(RngSeed seed) const {
    PairwiseMixtureSpec spec;
    spec.k_true = k_true;
    spec.d_total = d_total;
    spec.separation = separation;
    spec.sigma_in = sigma;
    spec.n_per_cluster = n_per_cluster;
    spec.noise_theta = noise_theta;
    spec.seed = seed;
    return spec;
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

template <typename T>
void get_to(const json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

json generator_to_json(const GeneratorSpec& g) {
    return json{{"kind", g.kind},
                {"k_true", g.k_true},
                {"d_total", g.d_total},
                {"separation", g.separation},
                {"sigma", g.sigma},
                {"n_per_cluster", g.n_per_cluster},
                {"noise_theta", g.noise_theta},
                {"n", g.n},
                {"delta", g.delta},
                {"d_noise", g.d_noise}};
}

GeneratorSpec generator_from_json(const json& j) {
    check_keys(j,
               {"kind", "k_true", "d_total", "separation", "sigma", "n_per_cluster",
                "noise_theta", "n", "delta", "d_noise"},
               "generator");
    GeneratorSpec g;
    get_to(j, "kind", g.kind);
    if (g.kind != "pairwise" && g.kind != "single_axis")
        throw ConfigError("generator.kind must be pairwise or single_axis");
    get_to(j, "k_true", g.k_true);
    get_to(j, "d_total", g.d_total);
    get_to(j, "separation", g.separation);
    get_to(j, "sigma", g.sigma);
    get_to(j, "n_per_cluster", g.n_per_cluster);
    get_to(j, "noise_theta", g.noise_theta);
    get_to(j, "n", g.n);
    get_to(j, "delta", g.delta);
    get_to(j, "d_noise", g.d_noise);
    return g;
}

}  // namespace

json ExperimentConfig::to_json() const {
    json j;
    j["command"] = command;
    j["seed"] = seed;
    j["generator"] = generator ? generator_to_json(*generator) : json(nullptr);
    j["input"] = input;
    j["policy"] = json{{"n_subsample", policy.n_subsample},
                       {"k_min", policy.k_min},
                       {"k_max", policy.k_max},
                       {"algorithm", algorithm_name(policy.algorithm)},
                       {"t_proposals", policy.t_proposals}};
    j["solver"] = json{{"lambda", solver.lambda},
                       {"max_iters", solver.max_iters},
                       {"tol", solver.tol},
                       {"huber_delta", solver.huber_delta}};
    j["target_nnz"] = target_nnz;
    j["normalize_theta"] = normalize_theta;
    j["null_runs"] = null_runs;
    j["threads"] = threads;
    j["scores"] = scores;
    j["mask"] = mask;
    j["score_summary"] = score_summary;
    j["ratios"] = ratios;
    j["n_values"] = n_values;
    j["s_values"] = s_values;
    j["depth"] = depth;
    j["mean_min"] = mean_min;
    j["std_min"] = std_min;
    j["whitelist"] = whitelist;
    j["selected"] = selected;
    j["expand_k"] = expand_k;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    check_keys(j,
               {"command", "seed", "generator", "input", "policy", "solver", "target_nnz",
                "normalize_theta", "null_runs", "threads", "scores", "mask", "score_summary",
                "ratios", "n_values", "s_values", "depth", "mean_min", "std_min", "whitelist",
                "selected", "expand_k"},
               "config");
    ExperimentConfig c;
    get_to(j, "command", c.command);
    get_to(j, "seed", c.seed);
    if (j.contains("generator") && !j.at("generator").is_null())
        c.generator = generator_from_json(j.at("generator"));
    get_to(j, "input", c.input);
    if (j.contains("policy")) {
        const json& p = j.at("policy");
        check_keys(p, {"n_subsample", "k_min", "k_max", "algorithm", "t_proposals"}, "policy");
        get_to(p, "n_subsample", c.policy.n_subsample);
        get_to(p, "k_min", c.policy.k_min);
        get_to(p, "k_max", c.policy.k_max);
        if (p.contains("algorithm"))
            c.policy.algorithm = parse_algorithm(p.at("algorithm").get<std::string>());
        get_to(p, "t_proposals", c.policy.t_proposals);
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        check_keys(s, {"lambda", "max_iters", "tol", "huber_delta"}, "solver");
        get_to(s, "lambda", c.solver.lambda);
        get_to(s, "max_iters", c.solver.max_iters);
        get_to(s, "tol", c.solver.tol);
        get_to(s, "huber_delta", c.solver.huber_delta);
    }
    get_to(j, "target_nnz", c.target_nnz);
    get_to(j, "normalize_theta", c.normalize_theta);
    get_to(j, "null_runs", c.null_runs);
    get_to(j, "threads", c.threads);
    get_to(j, "scores", c.scores);
    get_to(j, "mask", c.mask);
    get_to(j, "score_summary", c.score_summary);
    get_to(j, "ratios", c.ratios);
    get_to(j, "n_values", c.n_values);
    get_to(j, "s_values", c.s_values);
    get_to(j, "depth", c.depth);
    get_to(j, "mean_min", c.mean_min);
    get_to(j, "std_min", c.std_min);
    get_to(j, "whitelist", c.whitelist);
    get_to(j, "selected", c.selected);
    get_to(j, "expand_k", c.expand_k);
    return c;
}

ScorerConfig ExperimentConfig::scorer_config() const {
    ScorerConfig sc;
    sc.policy = policy;
    sc.solver = solver;
    sc.target_nnz = target_nnz;
    sc.normalize_theta = normalize_theta;
    sc.null_runs = null_runs;
    sc.threads = threads;
    return sc;
}

json make_manifest(const ExperimentConfig& cfg) {
    return json{{"featsep_version", kVersion},
                {"command", cfg.command},
                {"config", cfg.to_json()}};
}

ExperimentConfig config_from_manifest(const json& manifest) {
    check_keys(manifest, {"featsep_version", "command", "config"}, "manifest");
    if (!manifest.contains("config")) throw ConfigError("manifest missing config");
    ExperimentConfig cfg = ExperimentConfig::from_json(manifest.at("config"));
    if (manifest.contains("command"))
        cfg.command = manifest.at("command").get<std::string>();
    return cfg;
}

}  // namespace featsep
