#ifndef FEATSEP_RNG_HPP
#define FEATSEP_RNG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include "featsep/errors.hpp"

namespace featsep {

struct RngSeed {
    std::uint64_t value = 0;
};

// splitmix64 step; also used as the avalanche for seed derivation.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic child-seed derivation: hash of (parent, stage label, index).
// Every stochastic stage draws from its own child so that adding or
// reordering stages never perturbs the streams of the others.
inline RngSeed child_seed(RngSeed parent, std::string_view label, std::uint64_t index = 0) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    std::uint64_t s = parent.value;
    s ^= h + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
    s ^= index + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
    return RngSeed{splitmix64_next(s)};
}

// Small self-contained generator. std::* distributions are not
// reproducible across standard library implementations, so all draws are
// implemented here; identical seeds give identical streams.
class Rng {
public:
    explicit Rng(RngSeed seed) : state_(seed.value) {}

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // Uniform on [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on [0, n), unbiased (rejection).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw BadCount("Rng::below(0)");
        std::uint64_t threshold = (0 - n) % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x < threshold);
        return x % n;
    }

    // Uniform integer on [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) throw BadCount("uniform_int: lo > hi");
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    // Standard normal, Marsaglia polar method.
    double next_normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_double() - 1.0;
            v = 2.0 * next_double() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = v * f;
        have_cached_ = true;
        return u * f;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices from [0, n), uniform over subsets, returned sorted.
    std::vector<int> sample_without_replacement(int n, int k);

private:
    std::uint64_t state_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

inline std::vector<int> Rng::sample_without_replacement(int n, int k) {
    if (k < 0 || k > n) throw BadCount("sample_without_replacement: k out of range");
    // Floyd's algorithm: uniform over k-subsets.
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int j = n - k; j < n; ++j) {
        int t = static_cast<int>(below(static_cast<std::uint64_t>(j) + 1));
        if (std::find(out.begin(), out.end(), t) != out.end()) {
            out.push_back(j);
        } else {
            out.push_back(t);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace featsep

#endif  // FEATSEP_RNG_HPP
