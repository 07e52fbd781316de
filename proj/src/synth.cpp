#include "featsep/synth.hpp"

#include <cmath>
#include <cstdio>

namespace featsep {

namespace {

std::string padded_name(const char* prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%04d", prefix, i);
    return buf;
}

}  // namespace

void PairwiseMixtureSpec::validate() const {
    if (k_true < 2) throw SpecInvalid("k_true must be >= 2");
    if (d_total < d_informative())
        throw SpecInvalid("d_total must be >= k_true*(k_true-1)/2");
    if (!(separation > 0.0)) throw SpecInvalid("separation must be > 0");
    if (!(sigma_in > 0.0)) throw SpecInvalid("sigma_in must be > 0");
    if (n_per_cluster < 1) throw SpecInvalid("n_per_cluster must be >= 1");
    if (noise_theta < 0.0) throw SpecInvalid("noise_theta must be >= 0");
}

SyntheticDataset generate_pairwise_mixture_sized(const PairwiseMixtureSpec& spec,
                                                 const std::vector<int>& cluster_sizes,
                                                 bool standardize) {
    spec.validate();
    if (static_cast<int>(cluster_sizes.size()) != spec.k_true)
        throw SpecInvalid("cluster_sizes length must equal k_true");
    int n = 0;
    for (int s : cluster_sizes) {
        if (s < 1) throw SpecInvalid("every cluster needs at least one sample");
        n += s;
    }
    const int d_s = spec.d_informative();
    const int d = spec.d_total;
    const int d_noise = d - d_s;

    SyntheticDataset out;
    out.s_parameter = spec.separation / spec.sigma_in;
    out.matrix.values.resize(n, d);
    out.informative.assign(static_cast<std::size_t>(d), 0);

    std::vector<int> labels(static_cast<std::size_t>(n));
    {
        int row = 0;
        for (int c = 0; c < spec.k_true; ++c) {
            for (int i = 0; i < cluster_sizes[static_cast<std::size_t>(c)]; ++i)
                labels[static_cast<std::size_t>(row++)] = c;
        }
    }

    // Informative block: one column per cluster pair, lexicographic order.
    int col = 0;
    for (int l = 0; l < spec.k_true; ++l) {
        for (int m = l + 1; m < spec.k_true; ++m, ++col) {
            out.pair_for_dim.emplace_back(l, m);
            out.informative[static_cast<std::size_t>(col)] = 1;
            Rng rng(child_seed(spec.seed, "informative_col", static_cast<std::uint64_t>(col)));
            for (int i = 0; i < n; ++i) {
                int lab = labels[static_cast<std::size_t>(i)];
                double v;
                if (lab == l) {
                    v = 0.5 * spec.separation + spec.sigma_in * rng.next_normal();
                } else if (lab == m) {
                    v = -0.5 * spec.separation + spec.sigma_in * rng.next_normal();
                } else {
                    v = rng.next_normal();
                }
                out.matrix.values(i, col) = v;
            }
        }
    }

    // Noise block: standard normal, optionally with covariance I + theta r r^T.
    for (int j = 0; j < d_noise; ++j) {
        Rng rng(child_seed(spec.seed, "noise_col", static_cast<std::uint64_t>(j)));
        for (int i = 0; i < n; ++i) out.matrix.values(i, d_s + j) = rng.next_normal();
    }
    if (spec.noise_theta > 0.0 && d_noise > 0) {
        Rng rdir(child_seed(spec.seed, "noise_direction"));
        out.noise_direction.resize(d_noise);
        for (int j = 0; j < d_noise; ++j) out.noise_direction[j] = rdir.next_normal();
        Rng rmix(child_seed(spec.seed, "noise_mix"));
        const double scale = std::sqrt(spec.noise_theta);
        for (int i = 0; i < n; ++i) {
            double xi = scale * rmix.next_normal();
            out.matrix.values.row(i).segment(d_s, d_noise) +=
                xi * out.noise_direction.transpose();
        }
    }

    out.matrix.feature_names.reserve(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) out.matrix.feature_names.push_back(padded_name("f", j));
    out.matrix.sample_ids.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.matrix.sample_ids.push_back(padded_name("s", i));
    out.matrix.true_labels = std::move(labels);
    out.matrix.validate();

    if (standardize) out.matrix = standardize_columns(out.matrix);
    return out;
}

SyntheticDataset generate_pairwise_mixture(const PairwiseMixtureSpec& spec) {
    std::vector<int> sizes(static_cast<std::size_t>(spec.k_true), spec.n_per_cluster);
    return generate_pairwise_mixture_sized(spec, sizes, true);
}

SyntheticDataset generate_pairwise_mixture_raw(const PairwiseMixtureSpec& spec) {
    std::vector<int> sizes(static_cast<std::size_t>(spec.k_true), spec.n_per_cluster);
    return generate_pairwise_mixture_sized(spec, sizes, false);
}

DataMatrix generate_single_axis(int n, double delta, int d_noise, RngSeed seed) {
    if (n < 2 || n % 2 != 0) throw SpecInvalid("single-axis generator needs even n >= 2");
    if (delta < 0.0) throw SpecInvalid("delta must be >= 0");
    if (d_noise < 0) throw SpecInvalid("d_noise must be >= 0");

    DataMatrix m;
    const int d = 1 + d_noise;
    m.values.resize(n, d);
    std::vector<int> labels(static_cast<std::size_t>(n));
    Rng raxis(child_seed(seed, "axis"));
    for (int i = 0; i < n; ++i) {
        int lab = i < n / 2 ? 0 : 1;
        labels[static_cast<std::size_t>(i)] = lab;
        double mean = lab == 0 ? 0.5 * delta : -0.5 * delta;
        m.values(i, 0) = mean + raxis.next_normal();
    }
    for (int j = 0; j < d_noise; ++j) {
        Rng rng(child_seed(seed, "noise_col", static_cast<std::uint64_t>(j)));
        for (int i = 0; i < n; ++i) m.values(i, 1 + j) = rng.next_normal();
    }
    for (int j = 0; j < d; ++j) m.feature_names.push_back(padded_name("f", j));
    for (int i = 0; i < n; ++i) m.sample_ids.push_back(padded_name("s", i));
    m.true_labels = std::move(labels);
    m.validate();
    return m;
}

std::vector<ScalingCell> generate_scaling_grid(const PairwiseMixtureSpec& base,
                                               const std::vector<double>& ratios,
                                               const std::vector<int>& n_values) {
    base.validate();
    const int d_s = base.d_informative();
    std::vector<ScalingCell> cells;
    std::uint64_t cell_index = 0;
    for (double ratio : ratios) {
        double d_real = ratio * d_s;
        int d = static_cast<int>(std::llround(d_real));
        if (std::abs(d_real - d) > 1e-9 || d < d_s)
            throw SpecInvalid("ratio * D_s must be an integer >= D_s");
        for (int n : n_values) {
            if (n < base.k_true) throw SpecInvalid("N must be >= k_true");
            std::vector<int> sizes(static_cast<std::size_t>(base.k_true), n / base.k_true);
            for (int c = 0; c < n % base.k_true; ++c) ++sizes[static_cast<std::size_t>(c)];
            PairwiseMixtureSpec spec = base;
            spec.d_total = d;
            spec.seed = child_seed(base.seed, "grid_cell", cell_index++);
            ScalingCell cell;
            cell.ratio = ratio;
            cell.n = n;
            cell.data = generate_pairwise_mixture_sized(spec, sizes, true);
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

}  // namespace featsep
