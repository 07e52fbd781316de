#include "featsep/counts.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace featsep {

void CountMatrix::validate() const {
    if (static_cast<int>(gene_names.size()) != n_genes())
        throw InvalidData("CountMatrix gene_names size mismatch");
    if (static_cast<int>(cell_ids.size()) != n_cells())
        throw InvalidData("CountMatrix cell_ids size mismatch");
    for (Eigen::Index i = 0; i < counts.rows(); ++i) {
        for (Eigen::Index j = 0; j < counts.cols(); ++j) {
            if (counts(i, j) < 0) throw InvalidData("negative read count");
        }
    }
}

namespace {

// depth distinct positions in [0, total), then bucketed into gene ranges via
// the prefix sums; exactly the multivariate hypergeometric draw.
void downsample_row(const Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>& counts,
                    Eigen::Index row, long long total, long long depth, Rng& rng,
                    Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>& out,
                    Eigen::Index out_row) {
    const Eigen::Index g = counts.cols();
    std::vector<long long> picks;
    picks.reserve(static_cast<std::size_t>(depth));
    std::unordered_set<long long> chosen;
    chosen.reserve(static_cast<std::size_t>(depth) * 2);
    for (long long j = total - depth; j < total; ++j) {
        long long t = static_cast<long long>(rng.below(static_cast<std::uint64_t>(j) + 1));
        if (chosen.count(t)) {
            picks.push_back(j);
            chosen.insert(j);
        } else {
            picks.push_back(t);
            chosen.insert(t);
        }
    }
    std::sort(picks.begin(), picks.end());

    long long prefix = 0;
    std::size_t p = 0;
    for (Eigen::Index gene = 0; gene < g; ++gene) {
        long long next_prefix = prefix + counts(row, gene);
        long long cnt = 0;
        while (p < picks.size() && picks[p] < next_prefix) {
            ++cnt;
            ++p;
        }
        out(out_row, gene) = cnt;
        prefix = next_prefix;
    }
}

}  // namespace

DownsampleResult downsample_reads(const CountMatrix& c, long long depth, RngSeed seed) {
    if (depth < 1) throw BadCount("downsample depth must be >= 1");
    c.validate();

    std::vector<Eigen::Index> keep;
    DownsampleResult result;
    for (Eigen::Index i = 0; i < c.counts.rows(); ++i) {
        long long total = c.counts.row(i).sum();
        if (total >= depth) keep.push_back(i);
        else result.dropped_cells.push_back(c.cell_ids[static_cast<std::size_t>(i)]);
    }

    result.kept.counts.resize(static_cast<Eigen::Index>(keep.size()), c.counts.cols());
    result.kept.gene_names = c.gene_names;
    result.kept.cell_ids.reserve(keep.size());
    for (std::size_t o = 0; o < keep.size(); ++o) {
        Eigen::Index i = keep[o];
        result.kept.cell_ids.push_back(c.cell_ids[static_cast<std::size_t>(i)]);
        long long total = c.counts.row(i).sum();
        if (total == depth) {
            result.kept.counts.row(static_cast<Eigen::Index>(o)) = c.counts.row(i);
        } else {
            Rng rng(child_seed(seed, "cell", static_cast<std::uint64_t>(i)));
            downsample_row(c.counts, i, total, depth, rng, result.kept.counts,
                           static_cast<Eigen::Index>(o));
        }
    }
    return result;
}

FilterResult filter_and_normalize(const CountMatrix& c, double mean_min, double std_min,
                                  const std::optional<std::vector<std::string>>& whitelist) {
    if (mean_min < 0.0 || std_min < 0.0) throw ConfigError("filter thresholds must be >= 0");
    c.validate();
    const Eigen::Index n = c.counts.rows();
    const Eigen::Index g = c.counts.cols();
    if (n < 2) throw InvalidData("filter_and_normalize needs at least 2 cells");

    std::unordered_set<std::string> allow;
    if (whitelist) allow.insert(whitelist->begin(), whitelist->end());

    FilterResult result;
    std::vector<Eigen::Index> kept_cols;
    std::vector<double> kept_stds;
    for (Eigen::Index j = 0; j < g; ++j) {
        const std::string& name = c.gene_names[static_cast<std::size_t>(j)];
        if (whitelist && !allow.count(name)) {
            result.report.dropped_not_whitelisted.push_back(name);
            continue;
        }
        double mean = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) mean += static_cast<double>(c.counts(i, j));
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double dv = static_cast<double>(c.counts(i, j)) - mean;
            ss += dv * dv;
        }
        double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (mean < mean_min) {
            result.report.dropped_low_mean.push_back(name);
            continue;
        }
        if (sd < std_min || sd <= 0.0) {
            result.report.dropped_low_std.push_back(name);
            continue;
        }
        kept_cols.push_back(j);
        kept_stds.push_back(sd);
        result.report.kept.push_back(name);
    }
    if (kept_cols.empty()) throw EmptyResult("no gene passed the filters");

    result.matrix.values.resize(n, static_cast<Eigen::Index>(kept_cols.size()));
    for (std::size_t o = 0; o < kept_cols.size(); ++o) {
        // Variance-only scaling: counts stay nonnegative.
        result.matrix.values.col(static_cast<Eigen::Index>(o)) =
            c.counts.col(kept_cols[o]).cast<double>() / kept_stds[o];
        result.matrix.feature_names.push_back(
            c.gene_names[static_cast<std::size_t>(kept_cols[o])]);
    }
    result.matrix.sample_ids = c.cell_ids;
    result.matrix.validate();
    return result;
}

std::vector<std::string> expand_correlated(const DataMatrix& m,
                                           const std::vector<std::string>& selected,
                                           int k) {
    if (selected.empty()) throw BadCount("expand_correlated: empty selection");
    if (k < 0) throw BadCount("expand_correlated: k must be >= 0");
    m.validate();

    std::unordered_map<std::string, int> index;
    for (int d = 0; d < m.n_features(); ++d) index[m.feature_names[static_cast<std::size_t>(d)]] = d;

    const Eigen::Index n = m.values.rows();
    Vector mu = column_means(m.values);
    Vector sd = column_stds(m.values);

    std::vector<std::string> out;
    std::unordered_set<std::string> present;
    for (const auto& name : selected) {
        if (!index.count(name)) throw InvalidData("unknown selected feature: " + name);
        if (present.insert(name).second) out.push_back(name);
    }

    for (const auto& name : selected) {
        int s = index[name];
        // Correlations of the seed column against all others; constant
        // columns get 0 and can never win a slot over a real correlate.
        std::vector<std::pair<double, int>> ranked;
        ranked.reserve(static_cast<std::size_t>(m.n_features()) - 1);
        for (int d = 0; d < m.n_features(); ++d) {
            if (d == s) continue;
            double corr = 0.0;
            if (sd[s] > 0.0 && sd[d] > 0.0) {
                double cov = ((m.values.col(s).array() - mu[s]) *
                              (m.values.col(d).array() - mu[d]))
                                 .sum() /
                             static_cast<double>(n - 1);
                corr = cov / (sd[s] * sd[d]);
            }
            ranked.emplace_back(corr, d);
        }
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        int taken = 0;
        for (const auto& [corr, d] : ranked) {
            if (taken >= k) break;
            ++taken;
            const std::string& cand = m.feature_names[static_cast<std::size_t>(d)];
            if (present.insert(cand).second) out.push_back(cand);
        }
    }
    return out;
}

}  // namespace featsep
