#pragma once

#include <heckelab/matrix.hpp>
#include <heckelab/root_data.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace heckelab {

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
inline bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    uint64_t d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    auto mulmod = [&](uint64_t a, uint64_t b) -> uint64_t {
        return static_cast<uint64_t>((__uint128_t)a * b % n);
    };
    auto powmod = [&](uint64_t a, uint64_t e) {
        uint64_t acc = 1;
        while (e) {
            if (e & 1) acc = mulmod(acc, a);
            a = mulmod(a, a);
            e >>= 1;
        }
        return acc;
    };
    for (uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        uint64_t x = powmod(a % n, d);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < r; ++i) {
            x = mulmod(x, x);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

// Small dense integer matrix in int64, the fast path for lattice work.
// All products route through __int128 with overflow checks.
struct LatMat {
    int d = 0;
    std::vector<int64_t> e;

    LatMat() = default;
    explicit LatMat(int dim) : d(dim), e(dim * dim, 0) {}
    static LatMat identity(int dim) {
        LatMat m(dim);
        for (int i = 0; i < dim; ++i) m.at(i, i) = 1;
        return m;
    }
    int64_t& at(int i, int j) { return e[i * d + j]; }
    int64_t at(int i, int j) const { return e[i * d + j]; }
    bool operator==(const LatMat& o) const { return d == o.d && e == o.e; }
    bool operator<(const LatMat& o) const { return e < o.e; }
};

struct LatMatHash {
    size_t operator()(const LatMat& m) const {
        uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (int64_t x : m.e) {
            h ^= static_cast<uint64_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<size_t>(h);
    }
};

inline int64_t checked_i64(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("LatMat: int64 overflow");
    return static_cast<int64_t>(v);
}

inline LatMat lat_mul(const LatMat& a, const LatMat& b) {
    LatMat r(a.d);
    for (int i = 0; i < a.d; ++i)
        for (int j = 0; j < a.d; ++j) {
            __int128 acc = 0;
            for (int k = 0; k < a.d; ++k) acc += (__int128)a.at(i, k) * b.at(k, j);
            r.at(i, j) = checked_i64(acc);
        }
    return r;
}

namespace detail {

inline int64_t floor_div(int64_t a, int64_t b) {
    int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

// In-place column Euclid on row r across columns [0, cmax], leaving the gcd in
// column cmax and zeros elsewhere in that row.
inline void column_euclid_row(std::vector<std::vector<int64_t>>& cols, int r, int cmax) {
    for (int c = 0; c < cmax; ++c) {
        while (cols[c][r] != 0) {
            if (cols[cmax][r] == 0) {
                std::swap(cols[c], cols[cmax]);
                continue;
            }
            int64_t q = cols[c][r] / cols[cmax][r];
            if (q != 0)
                for (size_t i = 0; i < cols[c].size(); ++i)
                    cols[c][i] = checked_i64((__int128)cols[c][i] - (__int128)q * cols[cmax][i]);
            if (cols[c][r] != 0) std::swap(cols[c], cols[cmax]);
        }
    }
}

}  // namespace detail

// Canonical representative of the lattice spanned by the given columns:
// upper triangular, positive diagonal, h(i,j) in [0, h(i,i)) for j > i.
// This is the canonical form of gK under right multiplication by GL_d(Z).
inline LatMat lattice_canonical(int d, std::vector<std::vector<int64_t>> cols) {
    int m = static_cast<int>(cols.size());
    if (m < d) throw std::invalid_argument("lattice_canonical: rank deficient input");
    for (int r = d - 1; r >= 0; --r) {
        int cmax = m - (d - 1 - r) - 1;
        detail::column_euclid_row(cols, r, cmax);
        // Columns < cmax now have zero in row r; restrict future work to them.
    }
    LatMat h(d);
    for (int j = 0; j < d; ++j) {
        const auto& col = cols[m - d + j];
        for (int i = 0; i < d; ++i) h.at(i, j) = col[i];
    }
    for (int j = 0; j < d; ++j) {
        if (h.at(j, j) == 0) throw std::invalid_argument("lattice_canonical: singular lattice");
        if (h.at(j, j) < 0)
            for (int i = 0; i < d; ++i) h.at(i, j) = -h.at(i, j);
    }
    // Reduce above-pivot entries, bottom row first.
    for (int i = d - 1; i >= 0; --i)
        for (int j = i + 1; j < d; ++j) {
            int64_t q = detail::floor_div(h.at(i, j), h.at(i, i));
            if (q == 0) continue;
            for (int k = 0; k <= i; ++k)
                h.at(k, j) = checked_i64((__int128)h.at(k, j) - (__int128)q * h.at(k, i));
        }
    return h;
}

inline LatMat lattice_canonical(const LatMat& g) {
    std::vector<std::vector<int64_t>> cols(g.d, std::vector<int64_t>(g.d));
    for (int j = 0; j < g.d; ++j)
        for (int i = 0; i < g.d; ++i) cols[j][i] = g.at(i, j);
    return lattice_canonical(g.d, std::move(cols));
}

// Elementary divisors of a nonsingular integer matrix, as exponents of p,
// sorted descending. Throws if a divisor is not a p-power.
inline std::vector<int64_t> smith_p_exponents(const LatMat& g, int64_t p) {
    int d = g.d;
    std::vector<std::vector<Int>> a(d, std::vector<Int>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a[i][j] = g.at(i, j);
    std::vector<Int> divisors;
    int top = 0;
    while (top < d) {
        // Find minimal nonzero entry and move to (top, top).
        int bi = -1, bj = -1;
        for (int i = top; i < d; ++i)
            for (int j = top; j < d; ++j)
                if (a[i][j] != 0 && (bi < 0 || abs(a[i][j]) < abs(a[bi][bj]))) {
                    bi = i;
                    bj = j;
                }
        if (bi < 0) throw std::invalid_argument("smith: singular matrix");
        std::swap(a[top], a[bi]);
        for (int i = top; i < d; ++i) std::swap(a[i][top], a[i][bj]);
        bool clean = true;
        for (int i = top + 1; i < d; ++i) {
            Int q = a[i][top] / a[top][top];
            if (q != 0)
                for (int j = top; j < d; ++j) a[i][j] -= q * a[top][j];
            if (a[i][top] != 0) clean = false;
        }
        for (int j = top + 1; j < d; ++j) {
            Int q = a[top][j] / a[top][top];
            if (q != 0)
                for (int i = top; i < d; ++i) a[i][j] -= q * a[i][top];
            if (a[top][j] != 0) clean = false;
        }
        if (!clean) continue;
        // Ensure the pivot divides the remaining block.
        bool divides = true;
        for (int i = top + 1; i < d && divides; ++i)
            for (int j = top + 1; j < d; ++j)
                if (a[i][j] % a[top][top] != 0) {
                    for (int k = top; k < d; ++k) a[top][k] += a[i][k];
                    divides = false;
                    break;
                }
        if (!divides) continue;
        divisors.push_back(abs(a[top][top]));
        ++top;
    }
    std::vector<int64_t> exps;
    for (Int v : divisors) {
        int64_t e = 0;
        while (v % p == 0) {
            v /= p;
            ++e;
        }
        if (v != 1) throw std::invalid_argument("smith_p_exponents: divisor not a p-power");
        exps.push_back(e);
    }
    std::sort(exps.begin(), exps.end(), std::greater<int64_t>());
    return exps;
}

struct DoubleCosetKey {
    int64_t p;
    int d;
    Cocharacter a;  // dominant canonical form, last coordinate 0

    DoubleCosetKey(int64_t prime, int dim, Cocharacter coch)
        : p(prime), d(dim), a(std::move(coch)) {
        if (!is_prime_u64(static_cast<uint64_t>(p))) throw std::invalid_argument("p must be prime");
        if (a.d() != d) throw std::invalid_argument("cocharacter dimension mismatch");
        if (!a.is_dominant()) throw std::invalid_argument("cocharacter must be dominant");
        for (int64_t x : a.coords())
            if (x < 0) throw std::invalid_argument("canonical dominant coordinates must be >= 0");
    }
};

struct CosetRepresentative {
    LatMat matrix;                   // canonical HNF, det = p^{sum a_i}
    std::vector<int64_t> diag_vals;  // valuations of the diagonal (Iwasawa A-part)
};

class ResourceGuardExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kCosetGuard = 1e7;

inline void check_enumeration_guard(const DoubleCosetKey& key) {
    double bound = std::pow(static_cast<double>(key.p),
                            static_cast<double>(two_rho_pairing(key.a)));
    if (bound > kCosetGuard)
        throw ResourceGuardExceeded("coset enumeration guard exceeded: p^<2rho,a> = " +
                                    std::to_string(bound));
}

namespace detail {

inline std::vector<int64_t> diag_valuations(const LatMat& h, int64_t p) {
    std::vector<int64_t> v(h.d);
    for (int i = 0; i < h.d; ++i) {
        int64_t x = h.at(i, i), e = 0;
        while (x % p == 0) {
            x /= p;
            ++e;
        }
        if (x != 1 && x != -1) throw std::logic_error("diagonal is not a p-power");
        v[i] = e;
    }
    return v;
}

// Lattices L with p Z^d <= L <= Z^d and L / p Z^d of dimension d-k, i.e.
// the single cosets of the minuscule double coset K omega_k K.
inline std::vector<LatMat> minuscule_cosets(int d, int k, int64_t p) {
    if (k == 0) return {LatMat::identity(d)};
    int s = d - k;  // subspace dimension over F_p
    std::vector<LatMat> out;
    // Row-reduced echelon bases of s-dim subspaces of F_p^d, by pivot set.
    std::vector<int> pivots(s);
    auto emit = [&](const std::vector<std::vector<int64_t>>& basis) {
        std::vector<std::vector<int64_t>> gens;
        for (const auto& b : basis) gens.push_back(b);
        for (int i = 0; i < d; ++i) {
            std::vector<int64_t> pe(d, 0);
            pe[i] = p;
            gens.push_back(pe);
        }
        out.push_back(lattice_canonical(d, std::move(gens)));
    };
    // Iterate pivot subsets.
    std::vector<int> idx(s);
    for (int i = 0; i < s; ++i) idx[i] = i;
    while (true) {
        // Free positions: non-pivot columns to the right of each pivot.
        std::vector<std::pair<int, int>> free_pos;
        for (int r = 0; r < s; ++r)
            for (int c = idx[r] + 1; c < d; ++c)
                if (std::find(idx.begin(), idx.end(), c) == idx.end())
                    free_pos.emplace_back(r, c);
        int64_t total = 1;
        for (size_t i = 0; i < free_pos.size(); ++i) total *= p;
        for (int64_t code = 0; code < total; ++code) {
            std::vector<std::vector<int64_t>> basis(s, std::vector<int64_t>(d, 0));
            for (int r = 0; r < s; ++r) basis[r][idx[r]] = 1;
            int64_t rem = code;
            for (auto [r, c] : free_pos) {
                basis[r][c] = rem % p;
                rem /= p;
            }
            emit(basis);
        }
        // next pivot combination
        int i = s - 1;
        while (i >= 0 && idx[i] == d - s + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < s; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

}  // namespace detail

// All single cosets gK inside K a K, as canonical HNF lattices.  The double
// coset is generated as a product of minuscule factors (a = sum c_k omega_k)
// and filtered by the exact elementary-divisor profile.
inline std::vector<CosetRepresentative> enumerate_cosets(const DoubleCosetKey& key) {
    check_enumeration_guard(key);
    const int d = key.d;
    const int64_t p = key.p;
    const auto& a = key.a.coords();

    std::unordered_set<LatMat, LatMatHash> current;
    current.insert(LatMat::identity(d));
    for (int k = 1; k < d; ++k) {
        int64_t mult = a[k - 1] - (k < d ? a[k] : 0);
        if (mult == 0) continue;
        auto factors = detail::minuscule_cosets(d, k, p);
        for (int64_t m = 0; m < mult; ++m) {
            std::unordered_set<LatMat, LatMatHash> next;
            next.reserve(current.size() * factors.size() / 2 + 16);
            for (const auto& g : current)
                for (const auto& f : factors) next.insert(lattice_canonical(lat_mul(g, f)));
            current = std::move(next);
        }
    }

    std::vector<int64_t> target(a.begin(), a.end());
    std::vector<CosetRepresentative> reps;
    for (const auto& g : current) {
        if (smith_p_exponents(g, p) != target) continue;
        reps.push_back({g, detail::diag_valuations(g, p)});
    }
    std::sort(reps.begin(), reps.end(),
              [](const CosetRepresentative& x, const CosetRepresentative& y) {
                  return x.matrix < y.matrix;
              });
    return reps;
}

inline int64_t coset_count(const DoubleCosetKey& key) {
    return static_cast<int64_t>(enumerate_cosets(key).size());
}

// coset_count / p^{<2 rho, a>}, the empirical volume comparison of Eq-two type.
inline Rat volume_ratio(const DoubleCosetKey& key) {
    Int denom = pow_int(Int(key.p), static_cast<unsigned>(two_rho_pairing(key.a)));
    return Rat(Int(coset_count(key)), denom);
}

// Denominator of the primitive projective representative: strip the p-power
// content, then read off the elementary-divisor spread p^{a_1 - a_d}.
inline Int coset_denominator(const CosetRepresentative& rep, const DoubleCosetKey& key) {
    auto exps = smith_p_exponents(rep.matrix, key.p);
    int64_t spread = exps.front() - exps.back();
    return pow_int(Int(key.p), static_cast<unsigned>(spread));
}

// Brute-force oracle: enumerate every canonical HNF matrix of determinant
// p^{|a|} (all diagonal profiles, all reduced entries) and filter by Smith
// profile.  Exponential in |a|; test use only.
inline std::vector<LatMat> enumerate_cosets_bruteforce(const DoubleCosetKey& key,
                                                       double candidate_guard = 2e7) {
    const int d = key.d;
    const int64_t p = key.p;
    int64_t total = 0;
    for (int64_t x : key.a.coords()) total += x;

    std::vector<LatMat> out;
    std::vector<int64_t> target(key.a.coords().begin(), key.a.coords().end());
    std::vector<int64_t> profile(d, 0);

    auto candidates_for_profile = [&](const std::vector<int64_t>& e) {
        double n = 1;
        for (int i = 0; i < d; ++i)
            n *= std::pow(static_cast<double>(p), static_cast<double>(e[i] * (d - 1 - i)));
        return n;
    };

    std::function<void(int, int64_t)> rec_profile = [&](int pos, int64_t rem) {
        if (pos == d - 1) {
            profile[pos] = rem;
            if (candidates_for_profile(profile) > candidate_guard)
                throw ResourceGuardExceeded("bruteforce candidate guard exceeded");
            // Enumerate reduced entries row by row.
            std::vector<int64_t> pivot(d);
            for (int i = 0; i < d; ++i) {
                pivot[i] = 1;
                for (int64_t k = 0; k < profile[i]; ++k) pivot[i] *= p;
            }
            int nfree = 0;
            for (int i = 0; i < d; ++i) nfree += d - 1 - i;
            std::vector<std::pair<int, int>> slots;
            for (int i = 0; i < d; ++i)
                for (int j = i + 1; j < d; ++j) slots.emplace_back(i, j);
            std::function<void(size_t, LatMat&)> rec_fill = [&](size_t si, LatMat& m) {
                if (si == slots.size()) {
                    if (smith_p_exponents(m, p) == target) out.push_back(m);
                    return;
                }
                auto [i, j] = slots[si];
                for (int64_t v = 0; v < pivot[i]; ++v) {
                    m.at(i, j) = v;
                    rec_fill(si + 1, m);
                }
                m.at(i, j) = 0;
            };
            LatMat m(d);
            for (int i = 0; i < d; ++i) m.at(i, i) = pivot[i];
            rec_fill(0, m);
            return;
        }
        for (int64_t e = 0; e <= rem; ++e) {
            profile[pos] = e;
            rec_profile(pos + 1, rem - e);
        }
    };
    rec_profile(0, total);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace heckelab
