#ifndef FEATSEP_METRICS_HPP
#define FEATSEP_METRICS_HPP

#include <vector>

#include "featsep/core.hpp"

namespace featsep {

struct RocCurve {
    std::vector<double> thresholds;  // descending
    std::vector<double> tpr;
    std::vector<double> fpr;
    double auroc = 0.0;
};

// ROC over all distinct thresholds; tied scores move diagonally so that
// all-equal scores give exactly 0.5. AUROC by trapezoid.
RocCurve roc(const Vector& scores, const std::vector<char>& truth_mask);

// Pearson correlation between squared pairwise distances computed in the
// masked subspace and in the full space, over all N(N-1)/2 pairs.
double distance_correlation(const DataMatrix& m, const std::vector<char>& subspace_mask);

// Closed-form prediction of the statistic for independent Gaussian features
// with the given per-feature variances: sqrt(sum_masked v^2 / sum_all v^2).
// For unit variances this reduces to sqrt(D_s / D).
double expected_distance_correlation(const std::vector<double>& variances,
                                     const std::vector<char>& subspace_mask);

// Size-weighted entropy (nats) of true labels inside each proposed cluster;
// zero iff every cluster is label-pure.
double cluster_entropy(const ClusterProposal& proposal, const std::vector<int>& true_labels);

struct WeightRatio {
    double value = 0.0;
    bool denominator_zero = false;  // value is +inf sentinel when set
};

// Mean score over informative features / mean over uninformative features.
WeightRatio weight_ratio(const Vector& scores, const std::vector<char>& truth_mask);

struct CountingOracle {
    double exact = 0.0;       // keeps the K_p dependence, real-valued binomials
    double simplified = 0.0;  // (D - C(k_true, 2)) / (2 k_true)
};

// Predicted ratio of per-feature signal votes to error votes for an ensemble
// with k_p proposal clusters over k_true true clusters in d dimensions.
CountingOracle counting_oracle(int k_true, int k_p, int d);

}  // namespace featsep

#endif  // FEATSEP_METRICS_HPP
