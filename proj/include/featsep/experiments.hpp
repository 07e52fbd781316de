#ifndef FEATSEP_EXPERIMENTS_HPP
#define FEATSEP_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include "featsep/config.hpp"
#include "featsep/metrics.hpp"

namespace featsep {

// Each runner consumes a resolved config, writes its outputs plus
// manifest.json into cfg.output_dir, and is byte-reproducible from that
// manifest.

void run_synth(const ExperimentConfig& cfg);
void run_score(const ExperimentConfig& cfg);
void run_null(const ExperimentConfig& cfg);
void run_eval(const ExperimentConfig& cfg);
void run_scaling(const ExperimentConfig& cfg);
void run_sweep_s(const ExperimentConfig& cfg);
void run_prep(const ExperimentConfig& cfg);
void run_expand(const ExperimentConfig& cfg);

// Dispatch on cfg.command.
void run_command(const ExperimentConfig& cfg);

// Per-cell scaling policy: K_p ~ Unif(k_min, N/20) clamped to the subsample,
// subsample capped by the configured n_subsample.
ProposalPolicy scaling_cell_policy(const ProposalPolicy& base, int n_rows);

// Rows of the scaling table, exposed for the acceptance suite.
struct ScalingRow {
    int d = 0;
    int d_s = 0;
    int n = 0;
    int t = 0;
    double weight_ratio = 0.0;
    double auroc = 0.0;
    double entropy = 0.0;
};
std::vector<ScalingRow> compute_scaling_rows(const ExperimentConfig& cfg);

struct SweepRow {
    double s = 0.0;
    double auroc = 0.0;
    double weight_ratio = 0.0;
    double entropy = 0.0;
    double fnr_z_gt_1 = std::numeric_limits<double>::quiet_NaN();
};
std::vector<SweepRow> compute_sweep_rows(const ExperimentConfig& cfg);

}  // namespace featsep

#endif  // FEATSEP_EXPERIMENTS_HPP
