#include "featsep/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace featsep {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string sibling_path(const std::string& csv_path, const std::string& tag) {
    const std::string suffix = ".csv";
    if (csv_path.size() > suffix.size() &&
        csv_path.compare(csv_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return csv_path.substr(0, csv_path.size() - suffix.size()) + "." + tag + ".csv";
    }
    return csv_path + "." + tag + ".csv";
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

double parse_double(const std::string& s, const std::string& path) {
    // from_chars is locale-independent; '.' decimals only.
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw IoError("bad numeric field '" + s + "' in " + path);
    }
    return v;
}

long long parse_int(const std::string& s, const std::string& path) {
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw IoError("bad integer field '" + s + "' in " + path);
    return v;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

}  // namespace

void write_matrix_csv(const DataMatrix& m, const std::string& path) {
    auto out = open_out(path);
    out << "sample_id";
    for (const auto& f : m.feature_names) out << ',' << f;
    out << '\n';
    for (int i = 0; i < m.n_samples(); ++i) {
        out << m.sample_ids[static_cast<std::size_t>(i)];
        for (int d = 0; d < m.n_features(); ++d) {
            out << ',' << format_double(m.values(i, d));
        }
        out << '\n';
    }
}

DataMatrix read_matrix_csv(const std::string& path) {
    auto lines = read_lines(path);
    if (lines.size() < 2) throw IoError("matrix CSV needs a header and rows: " + path);
    auto header = split_line(lines[0]);
    if (header.empty() || header[0] != "sample_id")
        throw IoError("matrix CSV must start with sample_id column: " + path);

    DataMatrix m;
    m.feature_names.assign(header.begin() + 1, header.end());
    const int d = static_cast<int>(m.feature_names.size());
    const int n = static_cast<int>(lines.size()) - 1;
    m.values.resize(n, d);
    for (int i = 0; i < n; ++i) {
        auto fields = split_line(lines[static_cast<std::size_t>(i) + 1]);
        if (static_cast<int>(fields.size()) != d + 1)
            throw IoError("row " + std::to_string(i) + " has wrong field count in " + path);
        m.sample_ids.push_back(fields[0]);
        for (int j = 0; j < d; ++j) {
            double v = parse_double(fields[static_cast<std::size_t>(j) + 1], path);
            if (!std::isfinite(v))
                throw InvalidData("non-finite entry in " + path);
            m.values(i, j) = v;
        }
    }
    m.validate();
    return m;
}

DataMatrix load_matrix_with_sidecars(const std::string& path) {
    DataMatrix m = read_matrix_csv(path);
    std::string labels_path = sibling_path(path, "labels");
    if (std::ifstream(labels_path).good()) {
        m.true_labels = read_labels_csv(labels_path, m.sample_ids);
        m.validate();
    }
    return m;
}

void write_labels_csv(const DataMatrix& m, const std::string& path) {
    if (!m.true_labels) throw MissingLabels();
    auto out = open_out(path);
    out << "sample_id,label\n";
    for (int i = 0; i < m.n_samples(); ++i) {
        out << m.sample_ids[static_cast<std::size_t>(i)] << ','
            << (*m.true_labels)[static_cast<std::size_t>(i)] << '\n';
    }
}

std::vector<int> read_labels_csv(const std::string& path,
                                 const std::vector<std::string>& sample_ids) {
    auto lines = read_lines(path);
    if (lines.empty() || split_line(lines[0]) != std::vector<std::string>{"sample_id", "label"})
        throw IoError("labels CSV needs header sample_id,label: " + path);
    std::unordered_map<std::string, int> by_id;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto fields = split_line(lines[i]);
        if (fields.size() != 2) throw IoError("bad labels row in " + path);
        by_id[fields[0]] = static_cast<int>(parse_int(fields[1], path));
    }
    std::vector<int> labels;
    labels.reserve(sample_ids.size());
    for (const auto& id : sample_ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw IoError("label missing for sample " + id);
        labels.push_back(it->second);
    }
    return labels;
}

void write_mask_csv(const std::vector<std::string>& feature_names,
                    const std::vector<char>& mask, const std::string& path) {
    if (feature_names.size() != mask.size()) throw InvalidData("mask size mismatch");
    auto out = open_out(path);
    out << "feature,is_informative\n";
    for (std::size_t d = 0; d < mask.size(); ++d) {
        out << feature_names[d] << ',' << (mask[d] ? 1 : 0) << '\n';
    }
}

std::vector<char> read_mask_csv(const std::string& path,
                                const std::vector<std::string>& feature_names) {
    auto lines = read_lines(path);
    if (lines.empty() ||
        split_line(lines[0]) != std::vector<std::string>{"feature", "is_informative"})
        throw IoError("mask CSV needs header feature,is_informative: " + path);
    std::unordered_map<std::string, char> by_name;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto fields = split_line(lines[i]);
        if (fields.size() != 2) throw IoError("bad mask row in " + path);
        by_name[fields[0]] = parse_int(fields[1], path) != 0 ? 1 : 0;
    }
    std::vector<char> mask;
    mask.reserve(feature_names.size());
    for (const auto& name : feature_names) {
        auto it = by_name.find(name);
        if (it == by_name.end()) throw IoError("mask missing feature " + name);
        mask.push_back(it->second);
    }
    return mask;
}

void write_counts_csv(const CountMatrix& c, const std::string& path) {
    auto out = open_out(path);
    out << "sample_id";
    for (const auto& g : c.gene_names) out << ',' << g;
    out << '\n';
    for (int i = 0; i < c.n_cells(); ++i) {
        out << c.cell_ids[static_cast<std::size_t>(i)];
        for (int j = 0; j < c.n_genes(); ++j) out << ',' << c.counts(i, j);
        out << '\n';
    }
}

CountMatrix read_counts_csv(const std::string& path) {
    auto lines = read_lines(path);
    if (lines.size() < 2) throw IoError("count CSV needs a header and rows: " + path);
    auto header = split_line(lines[0]);
    if (header.empty() || header[0] != "sample_id")
        throw IoError("count CSV must start with sample_id column: " + path);
    CountMatrix c;
    c.gene_names.assign(header.begin() + 1, header.end());
    const int g = static_cast<int>(c.gene_names.size());
    const int n = static_cast<int>(lines.size()) - 1;
    c.counts.resize(n, g);
    for (int i = 0; i < n; ++i) {
        auto fields = split_line(lines[static_cast<std::size_t>(i) + 1]);
        if (static_cast<int>(fields.size()) != g + 1)
            throw IoError("row " + std::to_string(i) + " has wrong field count in " + path);
        c.cell_ids.push_back(fields[0]);
        for (int j = 0; j < g; ++j)
            c.counts(i, j) = parse_int(fields[static_cast<std::size_t>(j) + 1], path);
    }
    c.validate();
    return c;
}

void write_scores_csv(const FeatureScores& scores,
                      const std::vector<std::string>& feature_names,
                      const std::string& path) {
    if (static_cast<Eigen::Index>(feature_names.size()) != scores.g.size())
        throw InvalidData("scores/feature_names size mismatch");
    auto out = open_out(path);
    out << "feature,g,z\n";
    for (Eigen::Index d = 0; d < scores.g.size(); ++d) {
        double z = scores.has_z() ? scores.z[d] : std::numeric_limits<double>::quiet_NaN();
        out << feature_names[static_cast<std::size_t>(d)] << ','
            << format_double(scores.g[d]) << ',' << format_double(z) << '\n';
    }
}

ScoresFile read_scores_csv(const std::string& path) {
    auto lines = read_lines(path);
    if (lines.empty() || split_line(lines[0]) != std::vector<std::string>{"feature", "g", "z"})
        throw IoError("scores CSV needs header feature,g,z: " + path);
    ScoresFile f;
    const int d = static_cast<int>(lines.size()) - 1;
    f.g.resize(d);
    f.z.resize(d);
    for (int i = 0; i < d; ++i) {
        auto fields = split_line(lines[static_cast<std::size_t>(i) + 1]);
        if (fields.size() != 3) throw IoError("bad scores row in " + path);
        f.feature_names.push_back(fields[0]);
        f.g[i] = parse_double(fields[1], path);
        f.z[i] = parse_double(fields[2], path);
    }
    return f;
}

void write_roc_csv(const RocCurve& curve, const std::string& path) {
    auto out = open_out(path);
    out << "threshold,fpr,tpr\n";
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
        out << format_double(curve.thresholds[i]) << ',' << format_double(curve.fpr[i])
            << ',' << format_double(curve.tpr[i]) << '\n';
    }
}

void write_histogram_csv(const Vector& values, int bins, const std::string& path) {
    if (bins < 1) throw BadCount("histogram needs bins >= 1");
    double lo = values.minCoeff();
    double hi = values.maxCoeff();
    if (hi <= lo) hi = lo + 1.0;
    std::vector<long> counts(static_cast<std::size_t>(bins), 0);
    double width = (hi - lo) / bins;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        int b = static_cast<int>((values[i] - lo) / width);
        b = std::min(std::max(b, 0), bins - 1);
        ++counts[static_cast<std::size_t>(b)];
    }
    auto out = open_out(path);
    out << "bin_lo,bin_hi,count\n";
    for (int b = 0; b < bins; ++b) {
        out << format_double(lo + b * width) << ',' << format_double(lo + (b + 1) * width)
            << ',' << counts[static_cast<std::size_t>(b)] << '\n';
    }
}

void write_text_file(const std::string& text, const std::string& path) {
    auto out = open_out(path);
    out << text;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> read_name_list(const std::string& path) {
    auto lines = read_lines(path);
    std::vector<std::string> out;
    for (auto& l : lines) {
        if (!l.empty()) out.push_back(l);
    }
    return out;
}

}  // namespace featsep
