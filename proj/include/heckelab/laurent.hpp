#pragma once

#include <heckelab/rational.hpp>
#include <heckelab/root_data.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace heckelab {

// ---------------------------------------------------------------------------
// Dense polynomial in one variable t over Q.
// ---------------------------------------------------------------------------
struct TPoly {
    std::vector<Rat> c;  // c[k] = coefficient of t^k

    TPoly() = default;
    explicit TPoly(Rat constant) : c{std::move(constant)} { trim(); }

    static TPoly monomial(const Rat& coef, int deg) {
        TPoly p;
        p.c.assign(deg + 1, Rat(0));
        p.c[deg] = coef;
        p.trim();
        return p;
    }

    bool is_zero() const { return c.empty(); }

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }

    TPoly& operator+=(const TPoly& o) {
        if (o.c.size() > c.size()) c.resize(o.c.size(), Rat(0));
        for (size_t i = 0; i < o.c.size(); ++i) c[i] += o.c[i];
        trim();
        return *this;
    }

    TPoly& operator-=(const TPoly& o) {
        if (o.c.size() > c.size()) c.resize(o.c.size(), Rat(0));
        for (size_t i = 0; i < o.c.size(); ++i) c[i] -= o.c[i];
        trim();
        return *this;
    }

    TPoly operator*(const TPoly& o) const {
        if (is_zero() || o.is_zero()) return TPoly();
        TPoly r;
        r.c.assign(c.size() + o.c.size() - 1, Rat(0));
        for (size_t i = 0; i < c.size(); ++i) {
            if (c[i] == 0) continue;
            for (size_t j = 0; j < o.c.size(); ++j) r.c[i + j] += c[i] * o.c[j];
        }
        r.trim();
        return r;
    }

    TPoly operator-() const {
        TPoly r = *this;
        for (auto& x : r.c) x = -x;
        return r;
    }

    // Exact division; throws if the remainder is nonzero.
    TPoly divided_by(const TPoly& o) const {
        if (o.is_zero()) throw std::domain_error("TPoly: division by zero");
        TPoly rem = *this, q;
        if (rem.c.size() >= o.c.size()) q.c.assign(rem.c.size() - o.c.size() + 1, Rat(0));
        while (!rem.is_zero() && rem.c.size() >= o.c.size()) {
            Rat f = rem.c.back() / o.c.back();
            size_t shift = rem.c.size() - o.c.size();
            q.c[shift] = f;
            for (size_t i = 0; i < o.c.size(); ++i) rem.c[shift + i] -= f * o.c[i];
            rem.trim();
        }
        if (!rem.is_zero()) throw std::domain_error("TPoly: inexact division");
        q.trim();
        return q;
    }

    Rat eval(const Rat& t) const {
        Rat acc = 0;
        for (size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
        return acc;
    }

    bool operator==(const TPoly& o) const { return c == o.c; }
};

// ---------------------------------------------------------------------------
// Exact scalars a + b*sqrt(p): the coefficient field of Satake transforms.
// ---------------------------------------------------------------------------
struct SqrtExt {
    Rat a{0}, b{0};  // value a + b sqrt(p)
    int64_t p = 0;   // 0 marks an untagged zero/rational

    SqrtExt() = default;
    SqrtExt(Rat ra, Rat rb, int64_t prime) : a(std::move(ra)), b(std::move(rb)), p(prime) {}
    static SqrtExt rational(Rat r) { return SqrtExt(std::move(r), Rat(0), 0); }

    bool is_zero() const { return a == 0 && b == 0; }

    int64_t common_p(const SqrtExt& o) const {
        if (p != 0 && o.p != 0 && p != o.p) throw std::invalid_argument("SqrtExt: prime mismatch");
        return p != 0 ? p : o.p;
    }

    SqrtExt operator+(const SqrtExt& o) const { return SqrtExt(a + o.a, b + o.b, common_p(o)); }
    SqrtExt operator-(const SqrtExt& o) const { return SqrtExt(a - o.a, b - o.b, common_p(o)); }
    SqrtExt operator-() const { return SqrtExt(-a, -b, p); }
    SqrtExt operator*(const SqrtExt& o) const {
        int64_t q = common_p(o);
        return SqrtExt(a * o.a + b * o.b * q, a * o.b + b * o.a, q);
    }
    SqrtExt inverse() const {
        Rat n = a * a - b * b * Rat(p);
        if (n == 0) throw std::domain_error("SqrtExt: not invertible");
        return SqrtExt(a / n, -b / n, p);
    }
    bool operator==(const SqrtExt& o) const { return a == o.a && b == o.b; }
    bool operator!=(const SqrtExt& o) const { return !(*this == o); }

    double value() const { return to_double(a) + to_double(b) * std::sqrt(static_cast<double>(p)); }
};

// r * p^{h/2} as an exact SqrtExt.
inline SqrtExt half_power(int64_t p, int64_t h, const Rat& r = Rat(1)) {
    Rat whole = pow_rat(Rat(p), h >= 0 ? h / 2 : -((-h + 1) / 2));
    if (h % 2 == 0) return SqrtExt(r * whole, Rat(0), p);
    // h odd: p^{h/2} = p^{(h-1)/2} * sqrt(p); for negative odd h, note
    // p^{-1/2} = sqrt(p)/p, handled by the floor in `whole`.
    if (h < 0) whole = pow_rat(Rat(p), -((-h + 1) / 2));
    return SqrtExt(Rat(0), r * whole, p);
}

// ---------------------------------------------------------------------------
// Multivariate polynomials with TPoly coefficients, exponents in Z_{>=0}^d.
// Working representation for the Hall-Littlewood symmetrization.
// ---------------------------------------------------------------------------
using ExpVec = std::vector<int64_t>;
using MPoly = std::map<ExpVec, TPoly>;

inline void mpoly_add_term(MPoly& p, const ExpVec& e, const TPoly& c) {
    if (c.is_zero()) return;
    auto it = p.find(e);
    if (it == p.end()) {
        p.emplace(e, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) p.erase(it);
    }
}

inline MPoly mpoly_mul(const MPoly& x, const MPoly& y) {
    MPoly r;
    for (const auto& [ex, cx] : x)
        for (const auto& [ey, cy] : y) {
            ExpVec e = ex;
            for (size_t i = 0; i < e.size(); ++i) e[i] += ey[i];
            mpoly_add_term(r, e, cx * cy);
        }
    return r;
}

// Exact division by (z_i - z_j) via synthetic division in z_i.
inline MPoly mpoly_div_linear(const MPoly& poly, int vi, int vj) {
    // Horner down the z_i powers: P_k = Q_{k-1} - z_j Q_k, so Q_{K-1} = P_K
    // and Q_{k-1} = P_k + z_j Q_k.
    MPoly q;
    int64_t maxk = 0;
    for (const auto& [e, c] : poly) maxk = std::max(maxk, e[vi]);
    // layers[k] = coefficient polynomial of z_i^k (in remaining variables).
    std::vector<MPoly> layers(maxk + 1);
    for (const auto& [e, c] : poly) {
        ExpVec rest = e;
        int64_t k = rest[vi];
        rest[vi] = 0;
        mpoly_add_term(layers[k], rest, c);
    }
    std::vector<MPoly> qlayers(maxk);  // quotient degrees 0..maxk-1
    MPoly carry;                       // Q_k while descending
    for (int64_t k = maxk; k >= 1; --k) {
        // Q_{k-1} = P_k + z_j * Q_k
        MPoly shifted;
        for (const auto& [e, c] : carry) {
            ExpVec e2 = e;
            e2[vj] += 1;
            mpoly_add_term(shifted, e2, c);
        }
        MPoly qk = layers[k];
        for (const auto& [e, c] : shifted) mpoly_add_term(qk, e, c);
        qlayers[k - 1] = qk;
        carry = std::move(qk);
    }
    // Remainder: P_0 + z_j * Q_0 must vanish.
    MPoly rem = layers[0];
    for (const auto& [e, c] : carry) {
        ExpVec e2 = e;
        e2[vj] += 1;
        mpoly_add_term(rem, e2, c);
    }
    if (!rem.empty()) throw std::logic_error("mpoly_div_linear: inexact division");
    for (int64_t k = 0; k < maxk; ++k)
        for (const auto& [e, c] : qlayers[k]) {
            ExpVec e2 = e;
            e2[vi] += k;
            mpoly_add_term(q, e2, c);
        }
    return q;
}

// ---------------------------------------------------------------------------
// Hall-Littlewood polynomial P_lambda(z; t) for GL_d, coefficients in Q[t].
// Returned as a map: dominant exponent mu -> coefficient of the orbit sum
// m_mu.  P_lambda = m_lambda + sum_{mu < lambda} K(t) m_mu.
// ---------------------------------------------------------------------------
inline std::map<ExpVec, TPoly> hall_littlewood_raw(int d, const ExpVec& lambda) {
    // F = z^lambda * prod_{i<j} (z_i - t z_j)
    MPoly f;
    f.emplace(lambda, TPoly(Rat(1)));
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            MPoly bin;
            ExpVec ei(d, 0), ej(d, 0);
            ei[i] = 1;
            ej[j] = 1;
            bin.emplace(ei, TPoly(Rat(1)));
            bin.emplace(ej, TPoly::monomial(Rat(-1), 1));
            f = mpoly_mul(f, bin);
        }
    // Antisymmetrize over S_d.
    std::vector<int> perm(d);
    for (int i = 0; i < d; ++i) perm[i] = i;
    MPoly anti;
    do {
        // sign of permutation
        int inv = 0;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                if (perm[i] > perm[j]) ++inv;
        bool neg = inv & 1;
        for (const auto& [e, c] : f) {
            ExpVec pe(d);
            for (int i = 0; i < d; ++i) pe[perm[i]] = e[i];
            mpoly_add_term(anti, pe, neg ? -c : c);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    // Divide by the Vandermonde determinant.
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) anti = mpoly_div_linear(anti, i, j);
    // Divide by v_lambda(t) = prod over part multiplicities of
    // prod_{k=1}^{m} (1 + t + ... + t^{k-1}).
    TPoly v(Rat(1));
    size_t i = 0;
    while (i < lambda.size()) {
        size_t j = i;
        while (j < lambda.size() && lambda[j] == lambda[i]) ++j;
        size_t mult = j - i;
        for (size_t k = 2; k <= mult; ++k) {
            TPoly geo;
            geo.c.assign(k, Rat(1));
            v = v * geo;
        }
        i = j;
    }
    std::map<ExpVec, TPoly> out;
    for (const auto& [e, c] : anti) {
        bool dominant = true;
        for (int k = 0; k + 1 < d; ++k)
            if (e[k] < e[k + 1]) dominant = false;
        if (!dominant) continue;
        out.emplace(e, c.divided_by(v));
    }
    return out;
}

// Process-wide cache keyed by (d, lambda); coefficients are p-independent.
inline const std::map<ExpVec, TPoly>& hall_littlewood(int d, const ExpVec& lambda) {
    static std::map<std::pair<int, ExpVec>, std::map<ExpVec, TPoly>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(d, lambda);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, hall_littlewood_raw(d, lambda)).first;
    return it->second;
}

}  // namespace heckelab
