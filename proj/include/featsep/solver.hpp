#ifndef FEATSEP_SOLVER_HPP
#define FEATSEP_SOLVER_HPP

#include <span>
#include <utility>
#include <vector>

#include "featsep/core.hpp"

namespace featsep {

// Settings for the sparse max-margin pair separator.
//
// The objective for clusters (l, m) with labels y = +1 on l and -1 on m is
//
//   L(theta) = sum_i hinge(1 - y_i * theta.x_i) + lambda * ||theta||_1
//
// with no intercept; inputs are expected column-standardized. The hinge is
// Huber-smoothed with half-width huber_delta (quadratic for margins within
// [1 - delta, 1 + delta]), which keeps the loss C^1 so coordinate descent
// converges cleanly while the L1 prox still produces exact zeros.
// huber_delta = 0 selects the exact (non-smooth) hinge; that path minimizes
// each coordinate by breakpoint enumeration and is intended for small test
// problems only.
struct SolverSettings {
    double lambda = 0.0;
    int max_iters = 0;        // total coordinate sweeps; 0 = 10 * D
    double tol = 1e-7;        // relative objective decrease per sweep
    double huber_delta = 0.01;

    void validate() const;
};

struct NotConverged : Error {
    NotConverged(int max_iters, Separator best_iterate)
        : Error("not_converged",
                "separator fit did not converge within " +
                    std::to_string(max_iters) + " sweeps"),
          best(std::move(best_iterate)) {}
    Separator best;
};

// Fit the separator between proposal clusters `pair.first` (labeled +1) and
// `pair.second` (labeled -1). Rows are taken from `m` via the proposal's
// row_indices. Throws EmptyCluster / NotConverged.
Separator fit_separator(const DataMatrix& m, const ClusterProposal& proposal,
                        std::pair<int, int> pair, const SolverSettings& settings);

// Same solve on an explicit row-major matrix with row index lists; this is
// the entry the ensemble loop uses (X is its subsample).
Separator fit_separator_rows(const RowMajorMatrix& x,
                             std::span<const int> rows_pos,
                             std::span<const int> rows_neg,
                             const SolverSettings& settings);

// Smallest L1 weight at which theta = 0 is optimal:
//   lambda_max = max_d | sum_{i in C_l} x_id - sum_{i in C_m} x_id |
double lambda_max(const DataMatrix& m, const ClusterProposal& proposal,
                  std::pair<int, int> pair);
double lambda_max_rows(const RowMajorMatrix& x,
                       std::span<const int> rows_pos,
                       std::span<const int> rows_neg);

// Pick lambda so the mean support size over pilot pairs hits target_nnz.
// Bisects log-lambda in [1e-4 * lam_bar, lam_bar] where lam_bar is the
// median lambda_max over the pilot pairs (subsampled to at most
// max_calibration_pairs); returns the endpoint nearest the target when the
// target is unattainable inside the bracket.
struct CalibrationSettings {
    double target_nnz = 1.0;
    int max_pairs = 100;
    int bisection_depth = 20;
    double nnz_tolerance = 0.25;
};

double calibrate_lambda(const DataMatrix& m,
                        const std::vector<ClusterProposal>& pilot_proposals,
                        double target_nnz, const SolverSettings& settings,
                        RngSeed seed,
                        const CalibrationSettings& cal = CalibrationSettings{});

// Value of the (smoothed) objective at a given theta; exposed for tests.
double separator_objective(const RowMajorMatrix& x,
                           std::span<const int> rows_pos,
                           std::span<const int> rows_neg,
                           const Vector& theta, const SolverSettings& settings);

// Gradient of the smooth loss part at theta (length D); exposed for the
// optimality-condition checks.
Vector separator_loss_gradient(const RowMajorMatrix& x,
                               std::span<const int> rows_pos,
                               std::span<const int> rows_neg,
                               const Vector& theta,
                               const SolverSettings& settings);

}  // namespace featsep

#endif  // FEATSEP_SOLVER_HPP
