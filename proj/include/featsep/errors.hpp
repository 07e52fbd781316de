#ifndef FEATSEP_ERRORS_HPP
#define FEATSEP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace featsep {

// Base for all library errors. `code()` is a stable machine-readable tag
// used by the CLI error records.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct ZeroVarianceColumn : Error {
    explicit ZeroVarianceColumn(int column)
        : Error("zero_variance_column",
                "column " + std::to_string(column) + " has zero variance"),
          column(column) {}
    int column;
};

struct EmptyCluster : Error {
    explicit EmptyCluster(int cluster)
        : Error("empty_cluster",
                "cluster " + std::to_string(cluster) + " is empty"),
          cluster(cluster) {}
    int cluster;
};

struct BadCount : Error {
    explicit BadCount(const std::string& msg) : Error("bad_count", msg) {}
};

struct BadK : Error {
    explicit BadK(const std::string& msg) : Error("bad_k", msg) {}
};

struct DegenerateNull : Error {
    DegenerateNull() : Error("degenerate_null", "all null scores are identical") {}
};

struct DegenerateMask : Error {
    explicit DegenerateMask(const std::string& msg) : Error("degenerate_mask", msg) {}
};

struct MissingLabels : Error {
    MissingLabels() : Error("missing_labels", "true labels required but absent") {}
};

struct SpecInvalid : Error {
    explicit SpecInvalid(const std::string& msg) : Error("spec_invalid", msg) {}
};

struct EmptyResult : Error {
    explicit EmptyResult(const std::string& msg) : Error("empty_result", msg) {}
};

struct InvalidData : Error {
    explicit InvalidData(const std::string& msg) : Error("invalid_data", msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error("io_error", msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error("config_error", msg) {}
};

}  // namespace featsep

#endif  // FEATSEP_ERRORS_HPP
