#ifndef FEATSEP_CORE_HPP
#define FEATSEP_CORE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "featsep/errors.hpp"
#include "featsep/rng.hpp"

namespace featsep {

using Matrix = Eigen::MatrixXd;
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Threshold below which a separator component counts as zero.
inline constexpr double kSparsityEps = 1e-8;

// N samples x D features, plus names and optional ground-truth labels.
// Treated as immutable once built; all stochastic operations take a seed.
struct DataMatrix {
    Matrix values;                                  // N x D
    std::vector<std::string> feature_names;         // D
    std::vector<std::string> sample_ids;            // N
    std::optional<std::vector<int>> true_labels;    // N, values in [0, K_true)

    int n_samples() const { return static_cast<int>(values.rows()); }
    int n_features() const { return static_cast<int>(values.cols()); }

    // Checks all type invariants; throws InvalidData on violation.
    void validate() const;
};

// A clustering of a row subsample into k_p proposed clusters.
struct ClusterProposal {
    std::vector<int> row_indices;   // distinct indices into DataMatrix rows
    std::vector<int> assignments;   // same length, values in [0, k_p)
    int k_p = 0;

    void validate() const;

    // Local (position-in-subsample) indices per cluster; empty clusters allowed.
    std::vector<std::vector<int>> members() const;
};

// Sparse weight vector separating one pair of proposed clusters.
struct Separator {
    Vector theta;           // length D
    std::pair<int, int> pair{0, 0};  // (l, m), l < m by convention of the caller
    double objective_value = 0.0;
    int nnz = 0;            // components with |theta_d| > kSparsityEps
};

inline int count_nnz(const Vector& theta) {
    int n = 0;
    for (Eigen::Index d = 0; d < theta.size(); ++d) {
        if (std::abs(theta[d]) > kSparsityEps) ++n;
    }
    return n;
}

// Ensemble-averaged per-feature scores plus null-model statistics.
struct FeatureScores {
    Vector g;                       // length D, nonnegative
    double null_mean = std::numeric_limits<double>::quiet_NaN();
    double null_std = std::numeric_limits<double>::quiet_NaN();
    Vector z;                       // empty until z-scores are attached
    int proposals_used = 0;

    // Run diagnostics (not part of g itself).
    double lambda_hat = 0.0;
    std::vector<long> support_counts;       // per-feature separator votes
    long separators_fitted = 0;
    long separators_nonzero = 0;
    double mean_proposal_entropy = std::numeric_limits<double>::quiet_NaN();

    bool has_null() const { return std::isfinite(null_std); }
    bool has_z() const { return z.size() == g.size(); }
};

// Center each column to mean zero and scale to unit sample std (N-1
// denominator). Throws ZeroVarianceColumn on a constant column.
DataMatrix standardize_columns(const DataMatrix& m);

// Column means / sample stds (N-1), used by standardization and ingestion checks.
Vector column_means(const Matrix& values);
Vector column_stds(const Matrix& values);

}  // namespace featsep

#endif  // FEATSEP_CORE_HPP
