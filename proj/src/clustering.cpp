#include "featsep/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace featsep {

ClusterAlgorithm parse_algorithm(const std::string& name) {
    if (name == "kmeans") return ClusterAlgorithm::kKMeans;
    if (name == "ward") return ClusterAlgorithm::kWard;
    throw ConfigError("unknown clustering algorithm: " + name);
}

std::string algorithm_name(ClusterAlgorithm a) {
    return a == ClusterAlgorithm::kKMeans ? "kmeans" : "ward";
}

void ProposalPolicy::validate(int n_rows) const {
    if (k_min < 2) throw ConfigError("k_min must be >= 2");
    if (k_max < k_min) throw ConfigError("k_max must be >= k_min");
    if (n_subsample < 1) throw ConfigError("n_subsample must be >= 1");
    if (k_max > n_subsample) throw ConfigError("k_max must be <= n_subsample");
    if (n_subsample > n_rows) throw ConfigError("n_subsample exceeds row count");
    if (t_proposals < 1) throw ConfigError("t_proposals must be >= 1");
    if (algorithm == ClusterAlgorithm::kWard && n_subsample > kWardMaxRows)
        throw ConfigError("ward subsamples are capped at " +
                          std::to_string(kWardMaxRows) + " rows");
}

std::vector<int> subsample_rows(const DataMatrix& m, int n, RngSeed seed) {
    if (n < 1 || n > m.n_samples())
        throw BadCount("subsample_rows: n out of [1, N]");
    Rng rng(seed);
    return rng.sample_without_replacement(m.n_samples(), n);
}

namespace {

// Squared distances of every point to every center, n x k.
Matrix squared_distances(const RowMajorMatrix& points, const RowMajorMatrix& centers) {
    Vector pn = points.rowwise().squaredNorm();
    Vector cn = centers.rowwise().squaredNorm();
    Matrix d = -2.0 * (points * centers.transpose());
    d.colwise() += pn;
    d.rowwise() += cn.transpose();
    return d.cwiseMax(0.0);
}

std::vector<int> kmeanspp_centers(const RowMajorMatrix& points, int k, Rng& rng) {
    const int n = static_cast<int>(points.rows());
    std::vector<int> centers;
    centers.reserve(static_cast<std::size_t>(k));
    centers.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));

    Vector mindist(n);
    for (int i = 0; i < n; ++i)
        mindist[i] = (points.row(i) - points.row(centers[0])).squaredNorm();

    std::vector<char> chosen(static_cast<std::size_t>(n), 0);
    chosen[static_cast<std::size_t>(centers[0])] = 1;
    while (static_cast<int>(centers.size()) < k) {
        double total = mindist.sum();
        int pick = -1;
        if (total > 0.0) {
            double r = rng.next_double() * total;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += mindist[i];
                if (r < acc) {
                    pick = i;
                    break;
                }
            }
            if (pick < 0) pick = n - 1;  // r landed on the accumulated rounding edge
        }
        if (pick < 0 || chosen[static_cast<std::size_t>(pick)]) {
            // All remaining mass sits on chosen points (duplicates); take the
            // lowest unchosen index.
            pick = -1;
            for (int i = 0; i < n; ++i) {
                if (!chosen[static_cast<std::size_t>(i)]) {
                    pick = i;
                    break;
                }
            }
            if (pick < 0) pick = static_cast<int>(centers.size()) % n;
        }
        centers.push_back(pick);
        chosen[static_cast<std::size_t>(pick)] = 1;
        for (int i = 0; i < n; ++i) {
            double d = (points.row(i) - points.row(pick)).squaredNorm();
            if (d < mindist[i]) mindist[i] = d;
        }
    }
    return centers;
}

}  // namespace

KMeansResult kmeans_with_trace(const RowMajorMatrix& points, int k, RngSeed seed) {
    const int n = static_cast<int>(points.rows());
    const int dim = static_cast<int>(points.cols());
    if (k < 2 || k > n) throw BadK("kmeans: need 2 <= k <= n");
    Rng rng(seed);

    RowMajorMatrix centers(k, dim);
    {
        std::vector<int> init = kmeanspp_centers(points, k, rng);
        for (int c = 0; c < k; ++c) centers.row(c) = points.row(init[static_cast<std::size_t>(c)]);
    }

    std::vector<int> assign(static_cast<std::size_t>(n), 0);
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    KMeansResult result;

    for (int iter = 0; iter < 100; ++iter) {
        Matrix d = squared_distances(points, centers);
        double inertia = 0.0;
        std::fill(sizes.begin(), sizes.end(), 0);
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double bestd = d(i, 0);
            for (int c = 1; c < k; ++c) {
                if (d(i, c) < bestd) {
                    bestd = d(i, c);
                    best = c;
                }
            }
            assign[static_cast<std::size_t>(i)] = best;
            ++sizes[static_cast<std::size_t>(best)];
            inertia += bestd;
        }
        result.inertia_trace.push_back(inertia);

        RowMajorMatrix next = RowMajorMatrix::Zero(k, dim);
        for (int i = 0; i < n; ++i)
            next.row(assign[static_cast<std::size_t>(i)]) += points.row(i);
        for (int c = 0; c < k; ++c) {
            if (sizes[static_cast<std::size_t>(c)] > 0)
                next.row(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);
            else
                next.row(c) = centers.row(c);
        }

        // Re-seed each empty cluster on the point farthest from the centroid
        // of the currently largest cluster; intra-phase inertia only drops.
        for (int c = 0; c < k; ++c) {
            if (sizes[static_cast<std::size_t>(c)] != 0) continue;
            int big = static_cast<int>(
                std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
            int far_pt = -1;
            double far_d = -1.0;
            for (int i = 0; i < n; ++i) {
                if (assign[static_cast<std::size_t>(i)] != big) continue;
                double dd = (points.row(i) - next.row(big)).squaredNorm();
                if (dd > far_d) {
                    far_d = dd;
                    far_pt = i;
                }
            }
            next.row(c) = points.row(far_pt);
            assign[static_cast<std::size_t>(far_pt)] = c;
            --sizes[static_cast<std::size_t>(big)];
            ++sizes[static_cast<std::size_t>(c)];
        }

        double movement = (next - centers).rowwise().norm().maxCoeff();
        centers = std::move(next);
        if (movement < 1e-6) break;
    }

    result.proposal.k_p = k;
    result.proposal.row_indices.resize(static_cast<std::size_t>(n));
    std::iota(result.proposal.row_indices.begin(), result.proposal.row_indices.end(), 0);
    result.proposal.assignments = assign;
    result.proposal.validate();
    return result;
}

ClusterProposal kmeans(const RowMajorMatrix& points, int k, RngSeed seed) {
    return kmeans_with_trace(points, k, seed).proposal;
}

WardResult ward_with_heights(const RowMajorMatrix& points, int k) {
    const int n = static_cast<int>(points.rows());
    if (k < 2 || k > n) throw BadK("ward: need 2 <= k <= n");
    if (n > kWardMaxRows)
        throw BadCount("ward: row count exceeds cap of " + std::to_string(kWardMaxRows));

    // Condensed pairwise merge costs; entry (i, j), i < j, is the increase in
    // total within-cluster SSE caused by merging clusters i and j.
    auto idx = [n](int i, int j) {
        return static_cast<std::size_t>(i) * n + j;  // i < j, upper triangle
    };
    std::vector<double> dist(static_cast<std::size_t>(n) * n,
                             std::numeric_limits<double>::infinity());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            dist[idx(i, j)] = 0.5 * (points.row(i) - points.row(j)).squaredNorm();
        }
    }

    std::vector<char> active(static_cast<std::size_t>(n), 1);
    std::vector<double> csize(static_cast<std::size_t>(n), 1.0);
    std::vector<int> nn_idx(static_cast<std::size_t>(n), -1);
    std::vector<double> nn_dist(static_cast<std::size_t>(n),
                                std::numeric_limits<double>::infinity());

    auto recompute_nn = [&](int i) {
        nn_idx[static_cast<std::size_t>(i)] = -1;
        nn_dist[static_cast<std::size_t>(i)] = std::numeric_limits<double>::infinity();
        for (int j = i + 1; j < n; ++j) {
            if (!active[static_cast<std::size_t>(j)]) continue;
            double d = dist[idx(i, j)];
            if (d < nn_dist[static_cast<std::size_t>(i)]) {
                nn_dist[static_cast<std::size_t>(i)] = d;
                nn_idx[static_cast<std::size_t>(i)] = j;
            }
        }
    };
    for (int i = 0; i < n - 1; ++i) recompute_nn(i);

    WardResult result;
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);

    int merges = n - k;
    for (int step = 0; step < merges; ++step) {
        int a = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n - 1; ++i) {
            if (active[static_cast<std::size_t>(i)] &&
                nn_idx[static_cast<std::size_t>(i)] >= 0 &&
                nn_dist[static_cast<std::size_t>(i)] < best) {
                best = nn_dist[static_cast<std::size_t>(i)];
                a = i;
            }
        }
        int b = nn_idx[static_cast<std::size_t>(a)];
        result.merge_heights.push_back(best);

        double na = csize[static_cast<std::size_t>(a)];
        double nb = csize[static_cast<std::size_t>(b)];
        double dab = dist[idx(a, b)];
        active[static_cast<std::size_t>(b)] = 0;
        csize[static_cast<std::size_t>(a)] = na + nb;
        for (int i = 0; i < n; ++i) {
            if (parent[static_cast<std::size_t>(i)] == b)
                parent[static_cast<std::size_t>(i)] = a;
        }

        // Lance-Williams (Ward) update of every surviving distance to a.
        for (int kk = 0; kk < n; ++kk) {
            if (!active[static_cast<std::size_t>(kk)] || kk == a) continue;
            double nk = csize[static_cast<std::size_t>(kk)];
            double dak = kk < a ? dist[idx(kk, a)] : dist[idx(a, kk)];
            double dbk = kk < b ? dist[idx(kk, b)] : dist[idx(b, kk)];
            double nd = ((na + nk) * dak + (nb + nk) * dbk - nk * dab) / (na + nb + nk);
            if (kk < a) dist[idx(kk, a)] = nd;
            else dist[idx(a, kk)] = nd;
        }

        // Repair the nearest-neighbor cache.
        for (int i = 0; i < n - 1; ++i) {
            if (!active[static_cast<std::size_t>(i)]) continue;
            if (i == a || nn_idx[static_cast<std::size_t>(i)] == a ||
                nn_idx[static_cast<std::size_t>(i)] == b) {
                recompute_nn(i);
            } else if (i < a) {
                double d = dist[idx(i, a)];
                if (d < nn_dist[static_cast<std::size_t>(i)]) {
                    nn_dist[static_cast<std::size_t>(i)] = d;
                    nn_idx[static_cast<std::size_t>(i)] = a;
                }
            }
        }
    }

    // Label surviving clusters 0..k-1 in order of their smallest member.
    std::vector<int> label(static_cast<std::size_t>(n), -1);
    int next_label = 0;
    result.proposal.row_indices.resize(static_cast<std::size_t>(n));
    std::iota(result.proposal.row_indices.begin(), result.proposal.row_indices.end(), 0);
    result.proposal.assignments.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        int root = parent[static_cast<std::size_t>(i)];
        if (label[static_cast<std::size_t>(root)] < 0)
            label[static_cast<std::size_t>(root)] = next_label++;
        result.proposal.assignments[static_cast<std::size_t>(i)] =
            label[static_cast<std::size_t>(root)];
    }
    result.proposal.k_p = k;
    result.proposal.validate();
    return result;
}

ClusterProposal ward(const RowMajorMatrix& points, int k) {
    return ward_with_heights(points, k).proposal;
}

DrawnProposal draw_proposal_with_points(const DataMatrix& m, const ProposalPolicy& policy,
                                        RngSeed seed) {
    policy.validate(m.n_samples());
    std::vector<int> rows = subsample_rows(m, policy.n_subsample, child_seed(seed, "rows"));
    Rng krng(child_seed(seed, "k"));
    int k = static_cast<int>(krng.uniform_int(policy.k_min, policy.k_max));

    DrawnProposal out;
    out.points.resize(static_cast<Eigen::Index>(rows.size()), m.values.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.points.row(static_cast<Eigen::Index>(i)) = m.values.row(rows[i]);

    out.proposal = policy.algorithm == ClusterAlgorithm::kKMeans
                       ? kmeans(out.points, k, child_seed(seed, "cluster"))
                       : ward(out.points, k);
    out.proposal.row_indices = std::move(rows);
    out.proposal.validate();
    return out;
}

ClusterProposal draw_proposal(const DataMatrix& m, const ProposalPolicy& policy,
                              RngSeed seed) {
    return draw_proposal_with_points(m, policy, seed).proposal;
}

}  // namespace featsep
