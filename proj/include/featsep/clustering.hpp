#ifndef FEATSEP_CLUSTERING_HPP
#define FEATSEP_CLUSTERING_HPP

#include <string>
#include <vector>

#include "featsep/core.hpp"

namespace featsep {

enum class ClusterAlgorithm { kKMeans, kWard };

ClusterAlgorithm parse_algorithm(const std::string& name);
std::string algorithm_name(ClusterAlgorithm a);

// How one proposal is drawn: subsample size, prior over the cluster count,
// backend algorithm, and the ensemble size T.
struct ProposalPolicy {
    int n_subsample = 0;
    int k_min = 2;
    int k_max = 2;
    ClusterAlgorithm algorithm = ClusterAlgorithm::kKMeans;
    int t_proposals = 1;

    void validate(int n_rows) const;
};

// n distinct row indices, uniform without replacement, sorted ascending.
std::vector<int> subsample_rows(const DataMatrix& m, int n, RngSeed seed);

struct KMeansResult {
    ClusterProposal proposal;         // row_indices = 0..n-1 (local)
    std::vector<double> inertia_trace;  // per Lloyd iteration, non-increasing
};

// Lloyd with k-means++ seeding, one restart, at most 100 iterations or
// centroid movement < 1e-6. Empty clusters are repaired by moving the point
// farthest from the centroid of the largest cluster. Ties always break to
// the lowest index.
KMeansResult kmeans_with_trace(const RowMajorMatrix& points, int k, RngSeed seed);
ClusterProposal kmeans(const RowMajorMatrix& points, int k, RngSeed seed);

struct WardResult {
    ClusterProposal proposal;
    std::vector<double> merge_heights;  // within-cluster SSE increase per merge
};

// Agglomerative merging under Ward's minimum-variance criterion
// (Lance-Williams update), cut at k clusters. Deterministic: exact ties
// merge the smallest (i, j) pair of active cluster ids.
WardResult ward_with_heights(const RowMajorMatrix& points, int k);
ClusterProposal ward(const RowMajorMatrix& points, int k);

// One ensemble draw: subsample rows, draw K_p ~ DiscreteUniform[k_min, k_max],
// cluster the subsample. Proposal row_indices refer to rows of `m`.
ClusterProposal draw_proposal(const DataMatrix& m, const ProposalPolicy& policy,
                              RngSeed seed);

// Draw plus the subsample itself (row-major, aligned with the proposal's
// local order); the ensemble loop fits separators directly on these rows.
struct DrawnProposal {
    ClusterProposal proposal;
    RowMajorMatrix points;
};
DrawnProposal draw_proposal_with_points(const DataMatrix& m, const ProposalPolicy& policy,
                                        RngSeed seed);

// Row cap for the O(n^2)-memory ward backend.
inline constexpr int kWardMaxRows = 5000;

}  // namespace featsep

#endif  // FEATSEP_CLUSTERING_HPP
