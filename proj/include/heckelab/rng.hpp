#pragma once

#include <heckelab/matrix.hpp>

#include <cstdint>

namespace heckelab {

// splitmix64-seeded xorshift generator. Distributions are hand-rolled so
// that a fixed seed yields identical streams on every platform.
class Rng {
public:
    explicit Rng(uint64_t seed) : s_(seed) {
        // splitmix64 warmup to spread low-entropy seeds
        for (int i = 0; i < 4; ++i) next();
    }

    uint64_t next() {
        s_ += 0x9e3779b97f4a7c15ULL;
        uint64_t z = s_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform integer in [0, n)
    uint64_t below(uint64_t n) { return next() % n; }

    // uniform integer in [lo, hi] inclusive
    int64_t range(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1)));
    }

    // uniform double in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    uint64_t s_;
};

// Bounded product of elementary matrices: determinant exactly 1.
inline IntegerMatrix random_unimodular(Rng& rng, int dim, int steps = 8, int max_coef = 3) {
    IntegerMatrix m = IntegerMatrix::identity(dim);
    for (int s = 0; s < steps; ++s) {
        int i = static_cast<int>(rng.below(dim));
        int j = static_cast<int>(rng.below(dim));
        if (i == j) continue;
        Int c = rng.range(-max_coef, max_coef);
        for (int k = 0; k < dim; ++k) m(i, k) += c * m(j, k);
    }
    return m;
}

inline RationalMatrix random_unimodular_rational(Rng& rng, int dim, int steps = 8,
                                                 int max_den = 6) {
    // Elementary row additions with rational coefficients keep det = 1.
    RationalMatrix m = RationalMatrix::identity(dim);
    for (int s = 0; s < steps; ++s) {
        int i = static_cast<int>(rng.below(dim));
        int j = static_cast<int>(rng.below(dim));
        if (i == j) continue;
        Rat c(rng.range(-5, 5), rng.range(1, max_den));
        for (int k = 0; k < dim; ++k) m(i, k) += c * m(j, k);
    }
    return m;
}

}  // namespace heckelab
