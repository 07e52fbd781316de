#include "featsep/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace featsep {

RocCurve roc(const Vector& scores, const std::vector<char>& truth_mask) {
    const std::size_t d = truth_mask.size();
    if (static_cast<std::size_t>(scores.size()) != d)
        throw InvalidData("roc: scores/mask size mismatch");
    long n_pos = std::count(truth_mask.begin(), truth_mask.end(), 1);
    long n_neg = static_cast<long>(d) - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw DegenerateMask("roc needs at least one positive and one negative");

    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    RocCurve curve;
    curve.thresholds.push_back(std::numeric_limits<double>::infinity());
    curve.tpr.push_back(0.0);
    curve.fpr.push_back(0.0);

    long tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < d) {
        double t = scores[order[i]];
        // Tied scores advance as one diagonal step.
        while (i < d && scores[order[i]] == t) {
            if (truth_mask[static_cast<std::size_t>(order[i])]) ++tp;
            else ++fp;
            ++i;
        }
        curve.thresholds.push_back(t);
        curve.tpr.push_back(static_cast<double>(tp) / static_cast<double>(n_pos));
        curve.fpr.push_back(static_cast<double>(fp) / static_cast<double>(n_neg));
    }

    double area = 0.0;
    for (std::size_t j = 1; j < curve.fpr.size(); ++j) {
        area += 0.5 * (curve.fpr[j] - curve.fpr[j - 1]) * (curve.tpr[j] + curve.tpr[j - 1]);
    }
    curve.auroc = area;
    return curve;
}

namespace {

// Pearson correlation between all-pairs squared distances of two row sets,
// streamed through the Gram matrices to avoid materializing the pair lists.
double pair_distance_correlation(const Matrix& xa, const Matrix& xb) {
    const Eigen::Index n = xa.rows();
    Matrix ga = xa * xa.transpose();
    Matrix gb = xb * xb.transpose();
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    long cnt = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double da = ga(i, i) + ga(j, j) - 2.0 * ga(i, j);
            double db = gb(i, i) + gb(j, j) - 2.0 * gb(i, j);
            sa += da;
            sb += db;
            saa += da * da;
            sbb += db * db;
            sab += da * db;
            ++cnt;
        }
    }
    double inv = 1.0 / static_cast<double>(cnt);
    double cov = sab * inv - (sa * inv) * (sb * inv);
    double va = saa * inv - (sa * inv) * (sa * inv);
    double vb = sbb * inv - (sb * inv) * (sb * inv);
    if (va <= 0.0 || vb <= 0.0)
        throw DegenerateMask("distance correlation undefined: constant distances");
    return cov / std::sqrt(va * vb);
}

}  // namespace

double distance_correlation(const DataMatrix& m, const std::vector<char>& subspace_mask) {
    if (m.n_samples() < 2) throw InvalidData("distance_correlation needs N >= 2");
    if (static_cast<int>(subspace_mask.size()) != m.n_features())
        throw InvalidData("mask size mismatch");
    long n_in = std::count(subspace_mask.begin(), subspace_mask.end(), 1);
    if (n_in == 0) throw DegenerateMask("empty subspace mask");

    Matrix sub(m.values.rows(), n_in);
    Eigen::Index c = 0;
    for (int d = 0; d < m.n_features(); ++d) {
        if (subspace_mask[static_cast<std::size_t>(d)]) sub.col(c++) = m.values.col(d);
    }
    return pair_distance_correlation(sub, m.values);
}

double expected_distance_correlation(const std::vector<double>& variances,
                                     const std::vector<char>& subspace_mask) {
    if (variances.size() != subspace_mask.size())
        throw InvalidData("variances/mask size mismatch");
    double masked = 0.0, total = 0.0;
    for (std::size_t d = 0; d < variances.size(); ++d) {
        double v2 = variances[d] * variances[d];
        total += v2;
        if (subspace_mask[d]) masked += v2;
    }
    if (total <= 0.0 || masked <= 0.0)
        throw DegenerateMask("expected_distance_correlation: no variance in mask");
    return std::sqrt(masked / total);
}

double cluster_entropy(const ClusterProposal& proposal, const std::vector<int>& true_labels) {
    if (true_labels.empty()) throw MissingLabels();
    const std::size_t n = proposal.row_indices.size();
    for (int r : proposal.row_indices) {
        if (r < 0 || static_cast<std::size_t>(r) >= true_labels.size())
            throw MissingLabels();
    }
    double total = 0.0;
    auto members = proposal.members();
    for (const auto& cluster : members) {
        if (cluster.empty()) continue;
        std::vector<int> counts;
        for (int local : cluster) {
            int lab = true_labels[static_cast<std::size_t>(
                proposal.row_indices[static_cast<std::size_t>(local)])];
            if (lab >= static_cast<int>(counts.size()))
                counts.resize(static_cast<std::size_t>(lab) + 1, 0);
            ++counts[static_cast<std::size_t>(lab)];
        }
        double h = 0.0;
        double sz = static_cast<double>(cluster.size());
        for (int cnt : counts) {
            if (cnt == 0) continue;
            double p = static_cast<double>(cnt) / sz;
            h -= p * std::log(p);
        }
        total += (sz / static_cast<double>(n)) * h;
    }
    return total;
}

WeightRatio weight_ratio(const Vector& scores, const std::vector<char>& truth_mask) {
    if (static_cast<std::size_t>(scores.size()) != truth_mask.size())
        throw InvalidData("weight_ratio: size mismatch");
    double sum_in = 0.0, sum_out = 0.0;
    long n_in = 0, n_out = 0;
    for (Eigen::Index d = 0; d < scores.size(); ++d) {
        if (truth_mask[static_cast<std::size_t>(d)]) {
            sum_in += scores[d];
            ++n_in;
        } else {
            sum_out += scores[d];
            ++n_out;
        }
    }
    if (n_in == 0 || n_out == 0)
        throw DegenerateMask("weight_ratio needs both mask classes");
    WeightRatio out;
    double mean_in = sum_in / static_cast<double>(n_in);
    double mean_out = sum_out / static_cast<double>(n_out);
    if (mean_out <= 0.0) {
        out.value = std::numeric_limits<double>::infinity();
        out.denominator_zero = true;
    } else {
        out.value = mean_in / mean_out;
    }
    return out;
}

CountingOracle counting_oracle(int k_true, int k_p, int d) {
    if (k_true < 2 || k_p < k_true) throw SpecInvalid("counting_oracle: need k_p >= k_true >= 2");
    double c_true = 0.5 * k_true * (k_true - 1.0);
    if (d <= c_true) throw SpecInvalid("counting_oracle: need d > C(k_true, 2)");

    CountingOracle out;
    out.simplified = (d - c_true) / (2.0 * k_true);
    // Real-valued binomial C(x, 2) = x (x - 1) / 2 with x = k_p / k_true
    // proposed clusters per true cluster; diverges as k_p -> k_true where the
    // derivation's assumptions break down.
    double x = static_cast<double>(k_p) / k_true;
    double cx2 = 0.5 * x * (x - 1.0);
    double kt3 = static_cast<double>(k_true) * k_true * k_true;
    if (cx2 <= 0.0) {
        out.exact = std::numeric_limits<double>::infinity();
    } else {
        out.exact = (static_cast<double>(k_p) * k_p * (d - c_true)) / (2.0 * kt3 * 2.0 * cx2);
    }
    return out;
}

}  // namespace featsep
