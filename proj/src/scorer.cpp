#include "featsep/scorer.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "featsep/metrics.hpp"

namespace featsep {

void ScorerConfig::validate(int n_rows) const {
    policy.validate(n_rows);
    solver.validate();
    if (target_nnz < 1.0) throw ConfigError("target_nnz must be >= 1");
    if (null_runs < 0) throw ConfigError("null_runs must be >= 0");
    if (threads < 0) throw ConfigError("threads must be >= 0");
}

PairSolverFn make_l1_pair_solver(const SolverSettings& settings) {
    return [settings](const RowMajorMatrix& points, const std::vector<int>& rows_pos,
                      const std::vector<int>& rows_neg, std::pair<int, int> pair) {
        Separator sep = fit_separator_rows(points, rows_pos, rows_neg, settings);
        (void)pair;
        return sep.theta;
    };
}

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

struct ProposalContribution {
    Vector g;                 // sum over pairs of |theta_hat|
    std::vector<long> votes;  // support counts over pairs
    long fitted = 0;
    long nonzero = 0;
    double entropy = std::numeric_limits<double>::quiet_NaN();
};

ProposalContribution score_one_proposal(const DataMatrix& m, const ProposalPolicy& policy,
                                        RngSeed proposal_seed,
                                        const PairSolverFn& solve_pair) {
    DrawnProposal drawn = draw_proposal_with_points(m, policy, proposal_seed);
    const int d = static_cast<int>(drawn.points.cols());

    ProposalContribution out;
    out.g = Vector::Zero(d);
    out.votes.assign(static_cast<std::size_t>(d), 0);
    if (m.true_labels)
        out.entropy = cluster_entropy(drawn.proposal, *m.true_labels);

    auto members = drawn.proposal.members();
    const int k = drawn.proposal.k_p;
    for (int l = 0; l < k; ++l) {
        if (members[static_cast<std::size_t>(l)].empty()) continue;
        for (int mm = l + 1; mm < k; ++mm) {
            if (members[static_cast<std::size_t>(mm)].empty()) continue;
            Vector theta = solve_pair(drawn.points, members[static_cast<std::size_t>(l)],
                                      members[static_cast<std::size_t>(mm)], {l, mm});
            ++out.fitted;
            double norm = theta.norm();
            if (count_nnz(theta) == 0 || norm <= 0.0) continue;  // sparsity at work
            ++out.nonzero;
            for (int dd = 0; dd < d; ++dd) {
                double a = std::abs(theta[dd]);
                if (a > kSparsityEps) {
                    out.g[dd] += a / norm;
                    ++out.votes[static_cast<std::size_t>(dd)];
                }
            }
        }
    }
    return out;
}

}  // namespace

EnsembleAccumulation accumulate_scores(const DataMatrix& m, const ProposalPolicy& policy,
                                       int t_begin, int t_end, RngSeed seed,
                                       const PairSolverFn& solve_pair, int threads) {
    if (t_begin < 0 || t_end < t_begin) throw BadCount("accumulate_scores: bad t range");
    const int d = m.n_features();
    const int count = t_end - t_begin;
    EnsembleAccumulation acc;
    acc.g_sum = Vector::Zero(d);
    acc.support_counts.assign(static_cast<std::size_t>(d), 0);
    if (count == 0) return acc;

    std::vector<ProposalContribution> slots(static_cast<std::size_t>(count));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    std::atomic<int> next{0};

    int n_workers = std::min(resolve_threads(threads), count);
    auto worker = [&]() {
        while (true) {
            int idx = next.fetch_add(1);
            if (idx >= count) break;
            int t = t_begin + idx;
            try {
                slots[static_cast<std::size_t>(idx)] = score_one_proposal(
                    m, policy, child_seed(seed, "proposal", static_cast<std::uint64_t>(t)),
                    solve_pair);
            } catch (...) {
                errors[static_cast<std::size_t>(idx)] = std::current_exception();
            }
        }
    };
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Reduce in ascending t order: results are bit-identical for any thread
    // count, and the first failing proposal wins.
    for (int idx = 0; idx < count; ++idx) {
        if (errors[static_cast<std::size_t>(idx)]) {
            try {
                std::rethrow_exception(errors[static_cast<std::size_t>(idx)]);
            } catch (const std::exception& e) {
                throw Error("proposal_failed",
                            "proposal " + std::to_string(t_begin + idx) +
                                " failed: " + e.what());
            }
        }
        const auto& c = slots[static_cast<std::size_t>(idx)];
        acc.g_sum += c.g;
        for (int dd = 0; dd < d; ++dd)
            acc.support_counts[static_cast<std::size_t>(dd)] += c.votes[static_cast<std::size_t>(dd)];
        acc.separators_fitted += c.fitted;
        acc.separators_nonzero += c.nonzero;
        if (m.true_labels) acc.proposal_entropies.push_back(c.entropy);
    }
    return acc;
}

namespace {

FeatureScores finish_scores(const DataMatrix& m, const ScorerConfig& config,
                            double lambda_hat, const EnsembleAccumulation& acc) {
    FeatureScores out;
    const double t = static_cast<double>(config.policy.t_proposals);
    out.g = acc.g_sum / t;
    out.proposals_used = config.policy.t_proposals;
    out.lambda_hat = lambda_hat;
    out.support_counts = acc.support_counts;
    out.separators_fitted = acc.separators_fitted;
    out.separators_nonzero = acc.separators_nonzero;
    if (!acc.proposal_entropies.empty()) {
        double s = 0.0;
        for (double e : acc.proposal_entropies) s += e;
        out.mean_proposal_entropy = s / static_cast<double>(acc.proposal_entropies.size());
    }
    (void)m;
    return out;
}

ScorerConfig solver_with_lambda(const ScorerConfig& config, double lambda_hat) {
    ScorerConfig c = config;
    c.solver.lambda = lambda_hat;
    return c;
}

}  // namespace

FeatureScores score_features_with_lambda(const DataMatrix& m, const ScorerConfig& config,
                                         double lambda_hat, RngSeed seed) {
    config.validate(m.n_samples());
    ScorerConfig cfg = solver_with_lambda(config, lambda_hat);
    PairSolverFn solver = make_l1_pair_solver(cfg.solver);
    EnsembleAccumulation acc =
        accumulate_scores(m, cfg.policy, 0, cfg.policy.t_proposals,
                          child_seed(seed, "ensemble"), solver, cfg.threads);
    return finish_scores(m, cfg, lambda_hat, acc);
}

namespace {

double calibrate_for(const DataMatrix& m, const ScorerConfig& config, RngSeed seed) {
    int n_pilot = std::min(25, config.policy.t_proposals);
    std::vector<ClusterProposal> pilots;
    pilots.reserve(static_cast<std::size_t>(n_pilot));
    for (int i = 0; i < n_pilot; ++i) {
        pilots.push_back(draw_proposal(
            m, config.policy, child_seed(seed, "pilot", static_cast<std::uint64_t>(i))));
    }
    return calibrate_lambda(m, pilots, config.target_nnz, config.solver,
                            child_seed(seed, "calibration"));
}

}  // namespace

double calibrate_scoring_lambda(const DataMatrix& m, const ScorerConfig& config, RngSeed seed) {
    config.validate(m.n_samples());
    return calibrate_for(m, config, seed);
}

FeatureScores score_features(const DataMatrix& m, const ScorerConfig& config, RngSeed seed) {
    config.validate(m.n_samples());
    double lambda_hat = calibrate_for(m, config, seed);
    return score_features_with_lambda(m, config, lambda_hat, seed);
}

DataMatrix shuffle_columns(const DataMatrix& m, RngSeed seed) {
    DataMatrix out = m;
    out.true_labels.reset();
    const int n = m.n_samples();
    std::vector<double> col(static_cast<std::size_t>(n));
    for (int d = 0; d < m.n_features(); ++d) {
        for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = m.values(i, d);
        Rng rng(child_seed(seed, "column", static_cast<std::uint64_t>(d)));
        rng.shuffle(col);
        for (int i = 0; i < n; ++i) out.values(i, d) = col[static_cast<std::size_t>(i)];
    }
    return out;
}

NullStatistics null_statistics(const DataMatrix& m, const ScorerConfig& config,
                               double lambda_hat, RngSeed seed) {
    config.validate(m.n_samples());
    if (config.null_runs < 1) throw ConfigError("null_statistics needs null_runs >= 1");

    NullStatistics out;
    double sum = 0.0, sum2 = 0.0;
    long count = 0;
    for (int r = 0; r < config.null_runs; ++r) {
        RngSeed run_seed = child_seed(seed, "null", static_cast<std::uint64_t>(r));
        DataMatrix shuffled = shuffle_columns(m, child_seed(run_seed, "shuffle"));
        FeatureScores s = score_features_with_lambda(shuffled, config, lambda_hat, run_seed);
        for (Eigen::Index d = 0; d < s.g.size(); ++d) {
            sum += s.g[d];
            sum2 += s.g[d] * s.g[d];
            ++count;
        }
        out.run_scores.push_back(std::move(s.g));
    }
    out.mu = sum / static_cast<double>(count);
    double var = sum2 / static_cast<double>(count) - out.mu * out.mu;
    out.sigma = var > 0.0 ? std::sqrt(var) : 0.0;
    if (out.sigma <= 0.0) throw DegenerateNull();
    return out;
}

FeatureScores z_scores(const FeatureScores& scores) {
    if (!scores.has_null() || !(scores.null_std > 0.0)) throw DegenerateNull();
    FeatureScores out = scores;
    out.z = (scores.g.array() - scores.null_mean) / scores.null_std;
    return out;
}

std::vector<int> select_features(const FeatureScores& scores, double threshold) {
    if (!scores.has_z()) throw DegenerateNull();
    std::vector<int> out;
    for (Eigen::Index d = 0; d < scores.z.size(); ++d) {
        if (scores.z[d] > threshold) out.push_back(static_cast<int>(d));
    }
    return out;
}

FeatureScores score_with_null(const DataMatrix& m, const ScorerConfig& config, RngSeed seed) {
    config.validate(m.n_samples());
    double lambda_hat = calibrate_for(m, config, seed);
    FeatureScores scores = score_features_with_lambda(m, config, lambda_hat, seed);
    if (config.null_runs >= 1) {
        NullStatistics null = null_statistics(m, config, lambda_hat, seed);
        scores.null_mean = null.mu;
        scores.null_std = null.sigma;
        scores = z_scores(scores);
    }
    return scores;
}

}  // namespace featsep
