#include "featsep/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace featsep {

namespace {

// Hinge terms are written in z = 1 - margin, so the loss per point is
// h(z) with h the (optionally smoothed) positive part.
inline double hinge_value(double z, double delta) {
    if (delta <= 0.0) return z > 0.0 ? z : 0.0;
    if (z <= -delta) return 0.0;
    if (z >= delta) return z;
    double t = z + delta;
    return t * t / (4.0 * delta);
}

inline double hinge_slope(double z, double delta) {
    if (delta <= 0.0) return z > 0.0 ? 1.0 : 0.0;
    if (z <= -delta) return 0.0;
    if (z >= delta) return 1.0;
    return (z + delta) / (2.0 * delta);
}

struct PairProblem {
    const RowMajorMatrix& x;
    std::vector<int> rows;    // ascending, canonical order for both orientations
    std::vector<double> y;    // +1 / -1 aligned with rows
};

PairProblem make_problem(const RowMajorMatrix& x, std::span<const int> rows_pos,
                         std::span<const int> rows_neg) {
    if (rows_pos.empty()) throw EmptyCluster(0);
    if (rows_neg.empty()) throw EmptyCluster(1);
    std::vector<std::pair<int, double>> pts;
    pts.reserve(rows_pos.size() + rows_neg.size());
    for (int r : rows_pos) pts.emplace_back(r, 1.0);
    for (int r : rows_neg) pts.emplace_back(r, -1.0);
    // Sorting by row index makes the point order independent of the pair
    // orientation, so swapping (l, m) negates theta bit-exactly.
    std::sort(pts.begin(), pts.end());
    PairProblem p{x, {}, {}};
    p.rows.reserve(pts.size());
    p.y.reserve(pts.size());
    for (auto& [r, lab] : pts) {
        p.rows.push_back(r);
        p.y.push_back(lab);
    }
    return p;
}

// Root of psi(t) = -lam on t >= 0, where
//   psi(t) = sum_i -u_i * h'(c_i - u_i t)
// is the loss derivative along one coordinate: nondecreasing and piecewise
// linear (delta > 0). Caller guarantees psi(0) < -lam.
double solve_positive(const std::vector<double>& c, const std::vector<double>& u,
                      double lam, double delta) {
    double psi = 0.0;
    double slope = 0.0;
    static thread_local std::vector<std::pair<double, double>> events;
    events.clear();
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] == 0.0) continue;
        psi -= u[i] * hinge_slope(c[i], delta);
        double t1 = (c[i] - delta) / u[i];
        double t2 = (c[i] + delta) / u[i];
        double tlo = std::min(t1, t2);
        double thi = std::max(t1, t2);
        double k = u[i] * u[i] / (2.0 * delta);
        if (tlo <= 0.0 && thi > 0.0) slope += k;
        if (tlo > 0.0) events.emplace_back(tlo, k);
        if (thi > 0.0) events.emplace_back(thi, -k);
    }
    std::sort(events.begin(), events.end());
    const double target = -lam;
    double t_cur = 0.0;
    for (auto& [tb, dk] : events) {
        if (slope > 0.0) {
            double t_hit = t_cur + (target - psi) / slope;
            if (t_hit <= tb) return std::max(t_hit, t_cur);
        }
        psi += slope * (tb - t_cur);
        t_cur = tb;
        slope += dk;
    }
    if (slope > 0.0) return std::max(t_cur + (target - psi) / slope, t_cur);
    return t_cur;
}

// Exact hinge (delta = 0): the coordinate objective is convex piecewise
// linear, so a minimizer sits on a breakpoint. Enumerate them.
double minimize_coordinate_exact_hinge(const std::vector<double>& c,
                                       const std::vector<double>& u, double lam) {
    auto phi = [&](double t) {
        double s = lam * std::abs(t);
        for (std::size_t i = 0; i < c.size(); ++i) {
            double z = c[i] - u[i] * t;
            if (z > 0.0) s += z;
        }
        return s;
    };
    double best_t = 0.0;
    double best_v = phi(0.0);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] == 0.0) continue;
        double t = c[i] / u[i];
        double v = phi(t);
        if (v < best_v - 1e-15 ||
            (std::abs(v - best_v) <= 1e-15 && std::abs(t) < std::abs(best_t))) {
            best_v = v;
            best_t = t;
        }
    }
    return best_t;
}

class CoordinateDescent {
public:
    CoordinateDescent(const PairProblem& p, const SolverSettings& s)
        : p_(p), s_(s), n_(static_cast<int>(p.rows.size())),
          d_(static_cast<int>(p.x.cols())) {
        theta_ = Vector::Zero(d_);
        z_.assign(static_cast<std::size_t>(n_), 1.0);
        // 10 * D sweeps, floored so low-dimensional problems still get a
        // useful budget (separable pairs at tiny lambda converge slowly).
        max_sweeps_ = s.max_iters > 0 ? s.max_iters : std::max(1000, 10 * d_);
    }

    Separator run() {
        std::vector<int> active;
        std::vector<char> in_active(static_cast<std::size_t>(d_), 0);
        Vector grad(d_);
        // Coordinates within this slack of the KKT boundary stay at zero;
        // the optimality contract allows |grad| <= lambda + 10 * tol there.
        const double screen_slack = std::max(1e-12, 5.0 * s_.tol);
        int sweeps_used = 0;

        for (int round = 0; round < 1000; ++round) {
            loss_gradient(grad);
            int added = 0;
            for (int d = 0; d < d_; ++d) {
                if (!in_active[static_cast<std::size_t>(d)] &&
                    std::abs(grad[d]) > s_.lambda + screen_slack) {
                    active.push_back(d);
                    in_active[static_cast<std::size_t>(d)] = 1;
                    ++added;
                }
            }
            if (added == 0 && round > 0) return finish();
            if (active.empty()) return finish();

            double obj = objective();
            bool settled = false;
            while (sweeps_used < max_sweeps_) {
                ++sweeps_used;
                prev_active_.resize(active.size());
                for (std::size_t a = 0; a < active.size(); ++a)
                    prev_active_[a] = theta_[active[a]];
                for (int d : active) update_coordinate(d);
                extrapolate_sweep(active);
                double new_obj = objective();
                double decrease = obj - new_obj;
                obj = new_obj;
                if (decrease < s_.tol * std::max(1.0, std::abs(new_obj))) {
                    settled = true;
                    break;
                }
            }
            if (!settled) throw NotConverged(max_sweeps_, finish());
        }
        throw NotConverged(max_sweeps_, finish());
    }

    void loss_gradient(Vector& grad) const {
        grad.setZero();
        for (int i = 0; i < n_; ++i) {
            double w = hinge_slope(z_[static_cast<std::size_t>(i)], s_.huber_delta);
            if (w != 0.0) {
                grad.noalias() -=
                    (p_.y[static_cast<std::size_t>(i)] * w) *
                    p_.x.row(p_.rows[static_cast<std::size_t>(i)]).transpose();
            }
        }
    }

    double objective() const {
        double s = 0.0;
        for (double z : z_) s += hinge_value(z, s_.huber_delta);
        return s + s_.lambda * theta_.lpNorm<1>();
    }

private:
    // Exactly minimizes the objective along coordinate d; returns the move.
    double update_coordinate(int d) {
        auto& c = scratch_c_;
        auto& u = scratch_u_;
        c.resize(static_cast<std::size_t>(n_));
        u.resize(static_cast<std::size_t>(n_));
        const double t0 = theta_[d];
        double psi0 = 0.0;
        bool any = false;
        for (int i = 0; i < n_; ++i) {
            double ui = p_.y[static_cast<std::size_t>(i)] *
                        p_.x(p_.rows[static_cast<std::size_t>(i)], d);
            u[static_cast<std::size_t>(i)] = ui;
            c[static_cast<std::size_t>(i)] = z_[static_cast<std::size_t>(i)] + ui * t0;
            if (ui != 0.0) {
                any = true;
                psi0 -= ui * hinge_slope(c[static_cast<std::size_t>(i)], s_.huber_delta);
            }
        }
        double t_new;
        if (!any) {
            t_new = 0.0;
        } else if (s_.huber_delta <= 0.0) {
            t_new = minimize_coordinate_exact_hinge(c, u, s_.lambda);
        } else if (std::abs(psi0) <= s_.lambda) {
            t_new = 0.0;
        } else if (psi0 < -s_.lambda) {
            t_new = solve_positive(c, u, s_.lambda, s_.huber_delta);
        } else {
            auto& un = scratch_un_;
            un.resize(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) un[i] = -u[i];
            t_new = -solve_positive(c, un, s_.lambda, s_.huber_delta);
        }
        double move = t_new - t0;
        if (move != 0.0) {
            for (int i = 0; i < n_; ++i) {
                z_[static_cast<std::size_t>(i)] -= u[static_cast<std::size_t>(i)] * move;
            }
            theta_[d] = t_new;
        }
        return move;
    }

    // Cyclic sweeps zigzag badly along flat L1 valleys (separable pairs at
    // small lambda). A doubling line search along the sweep's aggregate
    // displacement collapses that crawl; it only ever accepts a strictly
    // lower objective, so the descent guarantee is untouched.
    void extrapolate_sweep(const std::vector<int>& active) {
        if (active.empty()) return;
        auto& dir = scratch_c_;  // per-active displacement
        dir.resize(active.size());
        bool moved = false;
        for (std::size_t a = 0; a < active.size(); ++a) {
            dir[a] = theta_[active[a]] - prev_active_[a];
            if (dir[a] != 0.0) moved = true;
        }
        if (!moved) return;

        auto& w = scratch_u_;  // margin change per unit step
        w.assign(static_cast<std::size_t>(n_), 0.0);
        for (std::size_t a = 0; a < active.size(); ++a) {
            if (dir[a] == 0.0) continue;
            const int d = active[a];
            for (int i = 0; i < n_; ++i) {
                w[static_cast<std::size_t>(i)] +=
                    p_.y[static_cast<std::size_t>(i)] *
                    p_.x(p_.rows[static_cast<std::size_t>(i)], d) * dir[a];
            }
        }

        double l1_rest = theta_.lpNorm<1>();
        for (std::size_t a = 0; a < active.size(); ++a)
            l1_rest -= std::abs(theta_[active[a]]);
        auto candidate_obj = [&](double step) {
            double s = 0.0;
            for (int i = 0; i < n_; ++i)
                s += hinge_value(z_[static_cast<std::size_t>(i)] -
                                     step * w[static_cast<std::size_t>(i)],
                                 s_.huber_delta);
            double l1 = l1_rest;
            for (std::size_t a = 0; a < active.size(); ++a)
                l1 += std::abs(theta_[active[a]] + step * dir[a]);
            return s + s_.lambda * l1;
        };

        double best_step = 0.0;
        double best = objective();
        for (double step = 1.0; step <= 1048576.0; step *= 2.0) {
            double obj = candidate_obj(step);
            if (obj < best) {
                best = obj;
                best_step = step;
            } else {
                break;
            }
        }
        if (best_step > 0.0) {
            for (std::size_t a = 0; a < active.size(); ++a)
                theta_[active[a]] += best_step * dir[a];
            for (int i = 0; i < n_; ++i)
                z_[static_cast<std::size_t>(i)] -= best_step * w[static_cast<std::size_t>(i)];
        }
    }

    Separator finish() const {
        Separator sep;
        sep.theta = theta_;
        sep.objective_value = objective();
        sep.nnz = count_nnz(theta_);
        return sep;
    }

    const PairProblem& p_;
    const SolverSettings& s_;
    int n_;
    int d_;
    int max_sweeps_ = 0;
    Vector theta_;
    std::vector<double> z_;
    std::vector<double> scratch_c_, scratch_u_, scratch_un_, prev_active_;
};

RowMajorMatrix extract_rows(const Matrix& values, const std::vector<int>& rows) {
    RowMajorMatrix out(static_cast<Eigen::Index>(rows.size()), values.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = values.row(rows[i]);
    }
    return out;
}

void split_pair_rows(const ClusterProposal& proposal, std::pair<int, int> pair,
                     std::vector<int>& global_pos, std::vector<int>& global_neg) {
    if (pair.first < 0 || pair.first >= proposal.k_p || pair.second < 0 ||
        pair.second >= proposal.k_p || pair.first == pair.second) {
        throw BadK("invalid cluster pair");
    }
    for (std::size_t i = 0; i < proposal.assignments.size(); ++i) {
        if (proposal.assignments[i] == pair.first)
            global_pos.push_back(proposal.row_indices[i]);
        else if (proposal.assignments[i] == pair.second)
            global_neg.push_back(proposal.row_indices[i]);
    }
    if (global_pos.empty()) throw EmptyCluster(pair.first);
    if (global_neg.empty()) throw EmptyCluster(pair.second);
}

}  // namespace

void SolverSettings::validate() const {
    if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
    if (max_iters < 0) throw ConfigError("max_iters must be >= 0");
    if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
    if (huber_delta < 0.0) throw ConfigError("huber_delta must be >= 0");
}

Separator fit_separator_rows(const RowMajorMatrix& x,
                             std::span<const int> rows_pos,
                             std::span<const int> rows_neg,
                             const SolverSettings& settings) {
    settings.validate();
    PairProblem p = make_problem(x, rows_pos, rows_neg);
    CoordinateDescent cd(p, settings);
    return cd.run();
}

Separator fit_separator(const DataMatrix& m, const ClusterProposal& proposal,
                        std::pair<int, int> pair, const SolverSettings& settings) {
    std::vector<int> gpos, gneg;
    split_pair_rows(proposal, pair, gpos, gneg);
    std::vector<int> all = gpos;
    all.insert(all.end(), gneg.begin(), gneg.end());
    std::sort(all.begin(), all.end());
    RowMajorMatrix x = extract_rows(m.values, all);
    auto local = [&](const std::vector<int>& g) {
        std::vector<int> out;
        out.reserve(g.size());
        for (int r : g) {
            out.push_back(static_cast<int>(
                std::lower_bound(all.begin(), all.end(), r) - all.begin()));
        }
        return out;
    };
    std::vector<int> lpos = local(gpos), lneg = local(gneg);
    Separator sep = fit_separator_rows(x, lpos, lneg, settings);
    sep.pair = pair;
    return sep;
}

double lambda_max_rows(const RowMajorMatrix& x, std::span<const int> rows_pos,
                       std::span<const int> rows_neg) {
    if (rows_pos.empty()) throw EmptyCluster(0);
    if (rows_neg.empty()) throw EmptyCluster(1);
    Vector spos = Vector::Zero(x.cols());
    Vector sneg = Vector::Zero(x.cols());
    for (int r : rows_pos) spos += x.row(r).transpose();
    for (int r : rows_neg) sneg += x.row(r).transpose();
    return (spos - sneg).cwiseAbs().maxCoeff();
}

double lambda_max(const DataMatrix& m, const ClusterProposal& proposal,
                  std::pair<int, int> pair) {
    std::vector<int> gpos, gneg;
    split_pair_rows(proposal, pair, gpos, gneg);
    Vector spos = Vector::Zero(m.values.cols());
    Vector sneg = Vector::Zero(m.values.cols());
    for (int r : gpos) spos += m.values.row(r).transpose();
    for (int r : gneg) sneg += m.values.row(r).transpose();
    return (spos - sneg).cwiseAbs().maxCoeff();
}

double separator_objective(const RowMajorMatrix& x, std::span<const int> rows_pos,
                           std::span<const int> rows_neg, const Vector& theta,
                           const SolverSettings& settings) {
    double s = settings.lambda * theta.lpNorm<1>();
    for (int r : rows_pos)
        s += hinge_value(1.0 - x.row(r).dot(theta), settings.huber_delta);
    for (int r : rows_neg)
        s += hinge_value(1.0 + x.row(r).dot(theta), settings.huber_delta);
    return s;
}

Vector separator_loss_gradient(const RowMajorMatrix& x, std::span<const int> rows_pos,
                               std::span<const int> rows_neg, const Vector& theta,
                               const SolverSettings& settings) {
    Vector grad = Vector::Zero(x.cols());
    for (int r : rows_pos) {
        double w = hinge_slope(1.0 - x.row(r).dot(theta), settings.huber_delta);
        if (w != 0.0) grad.noalias() -= w * x.row(r).transpose();
    }
    for (int r : rows_neg) {
        double w = hinge_slope(1.0 + x.row(r).dot(theta), settings.huber_delta);
        if (w != 0.0) grad.noalias() += w * x.row(r).transpose();
    }
    return grad;
}

namespace {

struct CalibrationPair {
    RowMajorMatrix x;
    std::vector<int> pos;
    std::vector<int> neg;
};

}  // namespace

double calibrate_lambda(const DataMatrix& m,
                        const std::vector<ClusterProposal>& pilot_proposals,
                        double target_nnz, const SolverSettings& settings,
                        RngSeed seed, const CalibrationSettings& cal) {
    if (pilot_proposals.empty()) throw BadCount("calibrate_lambda: empty pilot set");
    if (target_nnz < 1.0) throw ConfigError("target_nnz must be >= 1");

    // All (proposal, l, m) candidates, then a seeded subsample of them.
    std::vector<std::array<int, 3>> candidates;
    for (std::size_t p = 0; p < pilot_proposals.size(); ++p) {
        int k = pilot_proposals[p].k_p;
        for (int l = 0; l < k; ++l)
            for (int mm = l + 1; mm < k; ++mm)
                candidates.push_back({static_cast<int>(p), l, mm});
    }
    if (static_cast<int>(candidates.size()) > cal.max_pairs) {
        Rng rng(child_seed(seed, "calibration_pairs"));
        rng.shuffle(candidates);
        candidates.resize(static_cast<std::size_t>(cal.max_pairs));
        std::sort(candidates.begin(), candidates.end());
    }

    std::vector<CalibrationPair> pairs;
    std::vector<double> lmaxes;
    for (auto& [p, l, mm] : candidates) {
        const ClusterProposal& prop = pilot_proposals[static_cast<std::size_t>(p)];
        std::vector<int> gpos, gneg;
        for (std::size_t i = 0; i < prop.assignments.size(); ++i) {
            if (prop.assignments[i] == l) gpos.push_back(prop.row_indices[i]);
            else if (prop.assignments[i] == mm) gneg.push_back(prop.row_indices[i]);
        }
        if (gpos.empty() || gneg.empty()) continue;  // cluster unused by proposal
        std::vector<int> all = gpos;
        all.insert(all.end(), gneg.begin(), gneg.end());
        std::sort(all.begin(), all.end());
        CalibrationPair cp;
        cp.x = RowMajorMatrix(static_cast<Eigen::Index>(all.size()), m.values.cols());
        for (std::size_t i = 0; i < all.size(); ++i)
            cp.x.row(static_cast<Eigen::Index>(i)) = m.values.row(all[i]);
        auto local = [&](const std::vector<int>& g) {
            std::vector<int> out;
            for (int r : g)
                out.push_back(static_cast<int>(
                    std::lower_bound(all.begin(), all.end(), r) - all.begin()));
            return out;
        };
        cp.pos = local(gpos);
        cp.neg = local(gneg);
        lmaxes.push_back(lambda_max_rows(cp.x, cp.pos, cp.neg));
        pairs.push_back(std::move(cp));
    }
    if (pairs.empty()) throw BadCount("calibrate_lambda: no usable pilot pairs");

    std::vector<double> sorted = lmaxes;
    std::sort(sorted.begin(), sorted.end());
    std::size_t n = sorted.size();
    double lam_bar = (n % 2 == 1) ? sorted[n / 2]
                                  : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    if (lam_bar <= 0.0) return 0.0;  // all pilot pairs degenerate

    auto mean_nnz = [&](double lam) {
        SolverSettings s = settings;
        s.lambda = lam;
        double total = 0.0;
        for (const auto& cp : pairs) {
            total += fit_separator_rows(cp.x, cp.pos, cp.neg, s).nnz;
        }
        return total / static_cast<double>(pairs.size());
    };

    double lo = 1e-4 * lam_bar;
    double hi = lam_bar;
    double nnz_hi = mean_nnz(hi);
    if (nnz_hi > target_nnz) return hi;  // unattainable: too dense even at the top
    if (std::abs(nnz_hi - target_nnz) <= cal.nnz_tolerance) return hi;
    double nnz_lo = mean_nnz(lo);
    if (nnz_lo < target_nnz) return lo;  // unattainable: too sparse even at the bottom
    if (std::abs(nnz_lo - target_nnz) <= cal.nnz_tolerance) return lo;

    double best_lam = hi;
    double best_gap = std::abs(nnz_hi - target_nnz);
    if (std::abs(nnz_lo - target_nnz) < best_gap) {
        best_lam = lo;
        best_gap = std::abs(nnz_lo - target_nnz);
    }
    for (int it = 0; it < cal.bisection_depth; ++it) {
        double mid = std::sqrt(lo * hi);
        double nnz_mid = mean_nnz(mid);
        double gap = std::abs(nnz_mid - target_nnz);
        if (gap < best_gap || (gap == best_gap && mid > best_lam)) {
            best_gap = gap;
            best_lam = mid;
        }
        if (gap <= cal.nnz_tolerance) return mid;
        if (nnz_mid >= target_nnz) lo = mid;
        else hi = mid;
    }
    return best_lam;
}

}  // namespace featsep
