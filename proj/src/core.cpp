#include "featsep/core.hpp"

#include <cmath>
#include <unordered_set>

namespace featsep {

void DataMatrix::validate() const {
    const int n = n_samples();
    const int d = n_features();
    if (n < 2) throw InvalidData("DataMatrix needs N >= 2");
    if (d < 1) throw InvalidData("DataMatrix needs D >= 1");
    if (!values.allFinite()) throw InvalidData("DataMatrix has non-finite entries");
    if (static_cast<int>(feature_names.size()) != d)
        throw InvalidData("feature_names size mismatch");
    if (static_cast<int>(sample_ids.size()) != n)
        throw InvalidData("sample_ids size mismatch");

    std::unordered_set<std::string> seen;
    for (const auto& f : feature_names) {
        if (!seen.insert(f).second) throw InvalidData("duplicate feature name: " + f);
    }
    seen.clear();
    for (const auto& s : sample_ids) {
        if (!seen.insert(s).second) throw InvalidData("duplicate sample id: " + s);
    }

    if (true_labels) {
        if (static_cast<int>(true_labels->size()) != n)
            throw InvalidData("true_labels size mismatch");
        int k = 0;
        for (int v : *true_labels) {
            if (v < 0) throw InvalidData("negative true label");
            k = std::max(k, v + 1);
        }
        std::vector<char> present(static_cast<std::size_t>(k), 0);
        for (int v : *true_labels) present[static_cast<std::size_t>(v)] = 1;
        for (int c = 0; c < k; ++c) {
            if (!present[static_cast<std::size_t>(c)])
                throw InvalidData("true label " + std::to_string(c) + " unused");
        }
    }
}

void ClusterProposal::validate() const {
    if (k_p < 2) throw BadK("ClusterProposal needs k_p >= 2");
    if (row_indices.size() != assignments.size())
        throw InvalidData("ClusterProposal length mismatch");
    std::unordered_set<int> seen;
    for (int r : row_indices) {
        if (r < 0) throw InvalidData("negative row index");
        if (!seen.insert(r).second) throw InvalidData("duplicate row index in proposal");
    }
    std::vector<int> sizes(static_cast<std::size_t>(k_p), 0);
    for (int a : assignments) {
        if (a < 0 || a >= k_p) throw InvalidData("assignment outside [0, k_p)");
        ++sizes[static_cast<std::size_t>(a)];
    }
    // Referenced clusters must be non-empty, which counting guarantees;
    // clusters with no references are permitted by the type.
}

std::vector<std::vector<int>> ClusterProposal::members() const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(k_p));
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        out[static_cast<std::size_t>(assignments[i])].push_back(static_cast<int>(i));
    }
    return out;
}

Vector column_means(const Matrix& values) {
    return values.colwise().mean();
}

Vector column_stds(const Matrix& values) {
    const auto n = values.rows();
    Vector mu = column_means(values);
    Vector out(values.cols());
    for (Eigen::Index d = 0; d < values.cols(); ++d) {
        double ss = (values.col(d).array() - mu[d]).square().sum();
        out[d] = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    }
    return out;
}

DataMatrix standardize_columns(const DataMatrix& m) {
    DataMatrix out = m;
    Vector mu = column_means(m.values);
    Vector sd = column_stds(m.values);
    for (Eigen::Index d = 0; d < m.values.cols(); ++d) {
        if (sd[d] <= 0.0) throw ZeroVarianceColumn(static_cast<int>(d));
        out.values.col(d) = (m.values.col(d).array() - mu[d]) / sd[d];
    }
    return out;
}

}  // namespace featsep
