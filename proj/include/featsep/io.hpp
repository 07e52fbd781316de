#ifndef FEATSEP_IO_HPP
#define FEATSEP_IO_HPP

#include <string>
#include <vector>

#include "featsep/core.hpp"
#include "featsep/counts.hpp"
#include "featsep/metrics.hpp"

namespace featsep {

// All CSVs carry a header row; the first column is sample_id (cell_id for
// counts), decimals use '.', rows are newline-terminated. Doubles print with
// 17 significant digits so read-after-write recovers values to full
// precision.

std::string format_double(double v);

// "dir/name.csv" -> "dir/name.<tag>.csv" (sidecar naming for labels/mask).
std::string sibling_path(const std::string& csv_path, const std::string& tag);

void write_matrix_csv(const DataMatrix& m, const std::string& path);
DataMatrix read_matrix_csv(const std::string& path);

// Reads the matrix and attaches <name>.labels.csv when it exists.
DataMatrix load_matrix_with_sidecars(const std::string& path);

void write_labels_csv(const DataMatrix& m, const std::string& path);
std::vector<int> read_labels_csv(const std::string& path,
                                 const std::vector<std::string>& sample_ids);

void write_mask_csv(const std::vector<std::string>& feature_names,
                    const std::vector<char>& mask, const std::string& path);
std::vector<char> read_mask_csv(const std::string& path,
                                const std::vector<std::string>& feature_names);

void write_counts_csv(const CountMatrix& c, const std::string& path);
CountMatrix read_counts_csv(const std::string& path);

// scores.csv: feature,g,z (z printed as nan when absent).
void write_scores_csv(const FeatureScores& scores,
                      const std::vector<std::string>& feature_names,
                      const std::string& path);
struct ScoresFile {
    std::vector<std::string> feature_names;
    Vector g;
    Vector z;  // may contain nan
};
ScoresFile read_scores_csv(const std::string& path);

// roc.csv: threshold,fpr,tpr.
void write_roc_csv(const RocCurve& curve, const std::string& path);

// histogram CSV: bin_lo,bin_hi,count over equal-width bins spanning the data.
void write_histogram_csv(const Vector& values, int bins, const std::string& path);

void write_text_file(const std::string& text, const std::string& path);
std::string read_text_file(const std::string& path);
std::vector<std::string> read_name_list(const std::string& path);  // one name per line

}  // namespace featsep

#endif  // FEATSEP_IO_HPP
