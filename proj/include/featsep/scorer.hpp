#ifndef FEATSEP_SCORER_HPP
#define FEATSEP_SCORER_HPP

#include <functional>
#include <utility>
#include <vector>

#include "featsep/clustering.hpp"
#include "featsep/core.hpp"
#include "featsep/solver.hpp"

namespace featsep {

struct ScorerConfig {
    ProposalPolicy policy;
    SolverSettings solver;       // lambda ignored; calibration sets it
    double target_nnz = 1.0;
    bool normalize_theta = true;  // rescale each nonzero separator to unit L2
    int null_runs = 1;
    int threads = 0;              // 0 = hardware concurrency

    void validate(int n_rows) const;
};

// Pluggable pair solver: the production path fits the L1 max-margin
// separator; tests inject fixed weight vectors through this seam.
using PairSolverFn = std::function<Vector(
    const RowMajorMatrix& points, const std::vector<int>& rows_pos,
    const std::vector<int>& rows_neg, std::pair<int, int> pair)>;

PairSolverFn make_l1_pair_solver(const SolverSettings& settings);

// Raw ensemble sums over proposal indices [t_begin, t_end): per-feature
// accumulated |theta_hat| (not yet divided by T), separator vote counts, and
// per-proposal entropies when labels are present. Proposal t always draws
// from child(seed, "proposal", t), so a run may be split into consecutive
// index ranges and summed without changing any draw.
struct EnsembleAccumulation {
    Vector g_sum;
    std::vector<long> support_counts;
    long separators_fitted = 0;
    long separators_nonzero = 0;
    std::vector<double> proposal_entropies;
};

EnsembleAccumulation accumulate_scores(const DataMatrix& m, const ProposalPolicy& policy,
                                       int t_begin, int t_end, RngSeed seed,
                                       const PairSolverFn& solve_pair, int threads);

// The full scoring pass: calibrate lambda on a pilot ensemble (25 proposals,
// or T if smaller), then average L2-normalized separator magnitudes over T
// proposals. Deterministic for a given seed regardless of thread count.
FeatureScores score_features(const DataMatrix& m, const ScorerConfig& config, RngSeed seed);

// Same pass at a fixed lambda (used by the null model, which must reuse the
// real run's calibration, and by resumed runs).
FeatureScores score_features_with_lambda(const DataMatrix& m, const ScorerConfig& config,
                                         double lambda_hat, RngSeed seed);

// Just the calibration step of score_features (same pilot draws, same child
// seeds), so a standalone null run matches the real run's lambda.
double calibrate_scoring_lambda(const DataMatrix& m, const ScorerConfig& config, RngSeed seed);

// Independently permute every column; marginals are exactly preserved while
// joint structure is destroyed. Labels are dropped: they no longer describe
// the permuted rows.
DataMatrix shuffle_columns(const DataMatrix& m, RngSeed seed);

struct NullStatistics {
    double mu = 0.0;
    double sigma = 0.0;            // population std over pooled null scores
    std::vector<Vector> run_scores;  // one g vector per null run
};

// Score `null_runs` column-shuffled copies at the same lambda/policy/T as the
// real run and pool the D * null_runs scores. Throws DegenerateNull when all
// pooled scores are identical.
NullStatistics null_statistics(const DataMatrix& m, const ScorerConfig& config,
                               double lambda_hat, RngSeed seed);

// Attach z = (g - mu) / sigma. Throws DegenerateNull when sigma <= 0.
FeatureScores z_scores(const FeatureScores& scores);

// Indices with z above the threshold (the selection rule; default z > 1).
std::vector<int> select_features(const FeatureScores& scores, double threshold = 1.0);

// score_features + null_statistics + z_scores in one call.
FeatureScores score_with_null(const DataMatrix& m, const ScorerConfig& config, RngSeed seed);

}  // namespace featsep

#endif  // FEATSEP_SCORER_HPP
