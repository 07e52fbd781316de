#ifndef FEATSEP_COUNTS_HPP
#define FEATSEP_COUNTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "featsep/core.hpp"

namespace featsep {

// Nonnegative integer read counts, cells x genes.
struct CountMatrix {
    Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> counts;
    std::vector<std::string> gene_names;
    std::vector<std::string> cell_ids;

    int n_cells() const { return static_cast<int>(counts.rows()); }
    int n_genes() const { return static_cast<int>(counts.cols()); }
    void validate() const;
};

struct DownsampleResult {
    CountMatrix kept;
    std::vector<std::string> dropped_cells;  // cells with fewer than depth reads
};

// Per cell, draw `depth` reads without replacement from the cell's read
// multiset (multivariate hypergeometric); every kept row sums exactly to
// depth. Cells whose total is below depth are dropped and reported.
DownsampleResult downsample_reads(const CountMatrix& c, long long depth, RngSeed seed);

struct FilterReport {
    std::vector<std::string> kept;
    std::vector<std::string> dropped_low_mean;
    std::vector<std::string> dropped_low_std;
    std::vector<std::string> dropped_not_whitelisted;
};

struct FilterResult {
    DataMatrix matrix;
    FilterReport report;
};

// Drop genes with mean < mean_min or sample std < std_min (a zero-variance
// gene always counts as failing the std rule), optionally intersect with a
// whitelist, then scale surviving columns to unit variance without
// centering. Throws EmptyResult when nothing survives.
FilterResult filter_and_normalize(const CountMatrix& c, double mean_min, double std_min,
                                  const std::optional<std::vector<std::string>>& whitelist);

// For each selected feature, add its top-k Pearson-correlated other features;
// returns the deduplicated union: selected first, then additions in first-
// selection order.
std::vector<std::string> expand_correlated(const DataMatrix& m,
                                           const std::vector<std::string>& selected,
                                           int k);

}  // namespace featsep

#endif  // FEATSEP_COUNTS_HPP
