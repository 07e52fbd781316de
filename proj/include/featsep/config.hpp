#ifndef FEATSEP_CONFIG_HPP
#define FEATSEP_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "featsep/scorer.hpp"
#include "featsep/synth.hpp"

namespace featsep {

inline constexpr const char* kVersion = "0.1.0";

struct GeneratorSpec {
    std::string kind = "pairwise";  // pairwise | single_axis
    // pairwise mixture
    int k_true = 7;
    int d_total = 861;
    double separation = 6.0;
    double sigma = 1.0;
    int n_per_cluster = 200;
    double noise_theta = 0.0;
    // single axis
    int n = 200;
    double delta = 6.0;
    int d_noise = 2;

    PairwiseMixtureSpec pairwise_spec(RngSeed seed) const;
};

// Full declarative description of one CLI run. Serialization is strict in
// both directions: every field is written, unknown keys are rejected, and
// parse(serialize(c)) == c.
struct ExperimentConfig {
    std::string command;
    std::uint64_t seed = 0;
    std::optional<GeneratorSpec> generator;
    std::string input;

    ProposalPolicy policy{1000, 3, 14, ClusterAlgorithm::kKMeans, 1000};
    SolverSettings solver{};
    double target_nnz = 1.0;
    bool normalize_theta = true;
    int null_runs = 1;
    int threads = 0;

    std::string scores;         // eval: scores.csv path
    std::string mask;           // eval: mask.csv path
    std::string score_summary;  // eval: optional summary.json from the score run

    std::vector<double> ratios;   // scaling: D / D_s values
    std::vector<int> n_values;    // scaling: N values
    std::vector<double> s_values; // sweep-s: separation values

    long long depth = 10000;  // prep
    double mean_min = 0.05;
    double std_min = 0.05;
    std::string whitelist;    // prep: optional one-name-per-line file

    std::string selected;  // expand: one-name-per-line file of seed features
    int expand_k = 5;

    std::string output_dir = ".";  // placement only; never serialized

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);

    ScorerConfig scorer_config() const;
};

// manifest.json: {"featsep_version", "command", "config"}; a run is fully
// reproducible from it.
nlohmann::json make_manifest(const ExperimentConfig& cfg);
ExperimentConfig config_from_manifest(const nlohmann::json& manifest);

}  // namespace featsep

#endif  // FEATSEP_CONFIG_HPP
