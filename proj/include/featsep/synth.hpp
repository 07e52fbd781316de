#ifndef FEATSEP_SYNTH_HPP
#define FEATSEP_SYNTH_HPP

#include <utility>
#include <vector>

#include "featsep/core.hpp"

namespace featsep {

// Gaussian mixture where every pair of true clusters is separable along
// exactly one dedicated feature, and all remaining features are shared
// unit-variance noise (optionally with a planted correlation direction).
struct PairwiseMixtureSpec {
    int k_true = 2;
    int d_total = 1;        // D, must be >= k_true * (k_true - 1) / 2
    double separation = 1.0;  // mean gap along an informative feature
    double sigma_in = 1.0;    // within-cluster std along its informative feature
    int n_per_cluster = 1;
    double noise_theta = 0.0;  // strength of planted noise correlations
    RngSeed seed;

    int d_informative() const { return k_true * (k_true - 1) / 2; }
    void validate() const;
};

struct SyntheticDataset {
    DataMatrix matrix;
    std::vector<char> informative;                 // length D mask
    std::vector<std::pair<int, int>> pair_for_dim;  // pair (l, m) per informative dim
    Vector noise_direction;   // planted direction r over the noise block; empty if unused
    double s_parameter = 0.0;  // separation / sigma_in
};

// Informative feature d(l, m) is the lexicographic rank of (l, m); cluster l
// is drawn at +separation/2 and cluster m at -separation/2 with std sigma_in
// there, every other entry is standard normal. Columns come back
// standardized; the _raw variant skips that final step (generator tests need
// pre-standardization moments).
SyntheticDataset generate_pairwise_mixture(const PairwiseMixtureSpec& spec);
SyntheticDataset generate_pairwise_mixture_raw(const PairwiseMixtureSpec& spec);

// Same mixture with explicit per-cluster sizes (the scaling grid divides N
// unevenly when k_true does not divide it).
SyntheticDataset generate_pairwise_mixture_sized(const PairwiseMixtureSpec& spec,
                                                 const std::vector<int>& cluster_sizes,
                                                 bool standardize);

// Two clusters split by `delta` along feature 0, plus d_noise standard-normal
// features. Not standardized.
DataMatrix generate_single_axis(int n, double delta, int d_noise, RngSeed seed);

struct ScalingCell {
    double ratio = 0.0;  // D / D_s
    int n = 0;
    SyntheticDataset data;
};

// One dataset per (ratio, N) cell with D = ratio * D_s and near-equal
// cluster sizes; cells get deterministic child seeds of base.seed.
std::vector<ScalingCell> generate_scaling_grid(const PairwiseMixtureSpec& base,
                                               const std::vector<double>& ratios,
                                               const std::vector<int>& n_values);

}  // namespace featsep

#endif  // FEATSEP_SYNTH_HPP
