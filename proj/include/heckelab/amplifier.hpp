#pragma once

#include <heckelab/rng.hpp>
#include <heckelab/satake.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace heckelab {

inline int64_t factorial_i64(int d) {
    int64_t f = 1;
    for (int i = 2; i <= d; ++i) f *= i;
    return f;
}

// ---------------------------------------------------------------------------
// The spectral-side polynomial driving the amplifier:
//   khat1(nu) = sum_{|j| <= |W|} conj(P_j(nu0)) P_j(nu),
// where P_j(nu) = sum_{w in W} (w nu)(j a) and a is the fixed base point.
// Orbit-sum bookkeeping: P_j = (|W| / |orbit(ja)|) * m_{ja}.
// ---------------------------------------------------------------------------
inline WSymLaurent amplifier_hat(const SpectralParameter& nu0) {
    int d = nu0.d();
    int64_t W = factorial_i64(d);
    Cocharacter a = amplifier_base_point(d);
    WSymLaurent hat;
    hat.p = nu0.p;
    hat.d = d;
    for (int64_t j = -W; j <= W; ++j) {
        Cocharacter ja = cochar_scale(a, j);
        Cocharacter dom = dominant_representative(ja);
        auto orbit = weyl_orbit(dom);
        double mult = static_cast<double>(W) / static_cast<double>(orbit.size());
        Cplx pj0 = 0.0;
        for (const Cocharacter& b : orbit) pj0 += nu0.monomial(b.coords());
        pj0 *= mult;
        hat.add(dom, std::conj(pj0) * mult);
    }
    return hat;
}

// M = sum_{|j| <= |W|} |P_j(nu0)|^2, computed directly from nu0.
inline double amplifier_m_value(const SpectralParameter& nu0) {
    int d = nu0.d();
    int64_t W = factorial_i64(d);
    Cocharacter a = amplifier_base_point(d);
    double m = 0;
    for (int64_t j = -W; j <= W; ++j) {
        Cocharacter ja = cochar_scale(a, j);
        Cplx pj = 0.0;
        auto dom = dominant_representative(ja);
        auto orbit = weyl_orbit(dom);
        double mult = static_cast<double>(W) / static_cast<double>(orbit.size());
        for (const Cocharacter& b : orbit) pj += nu0.monomial(b.coords());
        pj *= mult;
        m += std::norm(pj);
    }
    return m;
}

// Paley-Wiener radius of the amplifier: R = |W| * |a|.
inline double amplifier_support_radius(int d) {
    return static_cast<double>(factorial_i64(d)) * cochar_norm(amplifier_base_point(d));
}

// ---------------------------------------------------------------------------
// Per-(d, p) transform tables.  Keys are every dominant cocharacter that can
// appear in the transform of the amplifier; T[i][j] is the coefficient of
// orbit-sum j in the transform of 1_{K key_i K}.  T is triangular when keys
// are sorted by squared norm (dominance-lower implies strictly smaller norm).
// ---------------------------------------------------------------------------
struct AmplifierContext {
    int d;
    int64_t p;
    std::vector<Cocharacter> keys;          // sorted by (norm^2, lex), ascending
    std::map<Cocharacter, int> key_index;
    std::vector<std::vector<Cplx>> T;       // row i: transform of key i
    std::vector<std::vector<Cocharacter>> orbits;  // orbit elements per key
    std::vector<Int> counts;                // coset counts per key
};

inline AmplifierContext make_amplifier_context(int d, int64_t p) {
    AmplifierContext ctx;
    ctx.d = d;
    ctx.p = p;
    int64_t W = factorial_i64(d);
    Cocharacter a = amplifier_base_point(d);
    // Close the hat support under transform supports.
    std::set<Cocharacter> keyset;
    std::vector<Cocharacter> frontier;
    for (int64_t j = 0; j <= W; ++j)
        frontier.push_back(dominant_representative(cochar_scale(a, j)));
    while (!frontier.empty()) {
        Cocharacter b = frontier.back();
        frontier.pop_back();
        if (keyset.count(b)) continue;
        keyset.insert(b);
        for (const auto& [k, c] : basis_transform(p, b).terms)
            if (!keyset.count(k)) frontier.push_back(k);
    }
    ctx.keys.assign(keyset.begin(), keyset.end());
    std::sort(ctx.keys.begin(), ctx.keys.end(), [](const Cocharacter& x, const Cocharacter& y) {
        Rat nx = cochar_norm_squared(x), ny = cochar_norm_squared(y);
        if (nx != ny) return nx < ny;
        return x < y;
    });
    int n = static_cast<int>(ctx.keys.size());
    for (int i = 0; i < n; ++i) ctx.key_index.emplace(ctx.keys[i], i);
    ctx.T.assign(n, std::vector<Cplx>(n, Cplx(0)));
    for (int i = 0; i < n; ++i) {
        WSymLaurentX bi = basis_transform(p, ctx.keys[i]);
        for (const auto& [k, c] : bi.terms) ctx.T[i][ctx.key_index.at(k)] = Cplx(c.value(), 0);
        ctx.counts.push_back(coset_count_spectral(p, ctx.keys[i]));
        std::vector<Cocharacter> orb;
        for (const Cocharacter& b : weyl_orbit(ctx.keys[i])) orb.push_back(b);
        ctx.orbits.push_back(std::move(orb));
    }
    return ctx;
}

// Orbit-sum vector o[j] = sum over orbit(key_j) of nu^b.
inline std::vector<Cplx> orbit_sums(const AmplifierContext& ctx, const SpectralParameter& nu) {
    std::vector<Cplx> o(ctx.keys.size());
    for (size_t j = 0; j < ctx.keys.size(); ++j) {
        Cplx s = 0.0;
        for (const Cocharacter& b : ctx.orbits[j]) s += nu.monomial(b.coords());
        o[j] = s;
    }
    return o;
}

// ---------------------------------------------------------------------------
// Amplifier construction pipeline.
// ---------------------------------------------------------------------------
inline HeckeFunction build_k1(const SpectralParameter& nu0, int d, int64_t p) {
    if (nu0.d() != d || nu0.p != p) throw std::invalid_argument("build_k1: parameter mismatch");
    return inverse_satake(amplifier_hat(nu0), 1e-250);
}

// k = k1 - k1(1) 1_K: zero the identity-coset coefficient.
inline HeckeFunction flatten(const HeckeFunction& k1) {
    HeckeFunction k = k1;
    k.coeffs.erase(zero_cocharacter(k.d));
    return k;
}

struct CosetSelection {
    Cocharacter a;
    Cplx weighted_eigenvalue;  // coefficient * transform of 1_{KaK} at nu0
    double contribution;       // |weighted_eigenvalue|^2 / coset_count(a)
};

inline CosetSelection select_coset(const HeckeFunction& k, const SpectralParameter& nu0) {
    bool found = false;
    CosetSelection best{zero_cocharacter(k.d), 0.0, -1.0};
    for (const auto& [a, c] : k.coeffs) {
        if (std::abs(c) == 0) continue;
        WSymLaurentX ba = basis_transform(k.p, a);
        Cplx val = c * evaluate(ba, nu0);
        double cnt = to_double(Rat(coset_count_spectral(k.p, a)));
        double contrib = std::norm(val) / cnt;
        if (!found || contrib > best.contribution) {
            best = {a, val, contrib};
            found = true;
        }
    }
    if (!found) throw std::invalid_argument("select_coset: zero function");
    return best;
}

struct AmplifierResult {
    Cocharacter chosen_a;
    Cplx phase;
    double lambda = 0;          // transform magnitude of h_p at nu0
    Int support_size = 0;       // coset count of the chosen double coset
    double m_value = 0;
    double k1_at_identity = 0;  // |k1(1)|
    double norm_ratio = 0;      // lambda / sqrt(support_size)
    int64_t ell = 0;            // denominator exponent of the chosen coset
    int64_t ell_prime = 0;      // ceil log_p support_size
    bool trusted = true;        // p above the configured guard
    bool floor_ok = true;       // norm_ratio above the configured floor
    std::map<Cocharacter, double> contributions;
};

// Full pipeline, table-driven.  All four structural properties are measured
// and reported; a ratio below `floor` flags the result rather than throwing.
inline AmplifierResult build_amplifier_ctx(const AmplifierContext& ctx,
                                           const SpectralParameter& nu0, double floor = 0.05,
                                           int64_t p0 = 5) {
    int n = static_cast<int>(ctx.keys.size());
    WSymLaurent hat = amplifier_hat(nu0);
    std::vector<Cplx> rhs(n, Cplx(0));
    for (const auto& [k, c] : hat.terms) rhs[ctx.key_index.at(k)] = c;
    // Back-substitution: T is lower triangular in this ordering (row i has
    // support among indices <= i with T[i][i] the leading p-power).
    std::vector<Cplx> coef(n, Cplx(0));
    for (int i = n - 1; i >= 0; --i) {
        Cplx v = rhs[i];
        for (int j = i + 1; j < n; ++j) v -= coef[j] * ctx.T[j][i];
        coef[i] = v / ctx.T[i][i];
    }
    std::vector<Cplx> osum = orbit_sums(ctx, nu0);
    AmplifierResult out;
    out.m_value = amplifier_m_value(nu0);
    int zero_idx = ctx.key_index.at(zero_cocharacter(ctx.d));
    out.k1_at_identity = std::abs(coef[zero_idx]);
    struct Cand {
        int i;
        double contrib;    // |coef * bval|^2 / count
        double ratio;      // |bval| / sqrt(count)
        Cplx bval;         // eigenvalue of 1_{KaK}, before the k-coefficient
    };
    std::vector<Cand> cands;
    for (int i = 0; i < n; ++i) {
        if (i == zero_idx || std::abs(coef[i]) == 0) continue;
        Cplx bval = 0.0;
        for (int j = 0; j <= i; ++j) bval += ctx.T[i][j] * osum[j];
        double cnt = to_double(Rat(ctx.counts[i]));
        double contrib = std::norm(coef[i] * bval) / cnt;
        out.contributions.emplace(ctx.keys[i], contrib);
        cands.push_back({i, contrib, std::abs(bval) / std::sqrt(cnt), bval});
    }
    if (cands.empty()) throw std::logic_error("build_amplifier: empty flattened function");
    std::sort(cands.begin(), cands.end(),
              [](const Cand& x, const Cand& y) { return x.contrib > y.contrib; });
    // Take the best-contribution coset whose spectral/volume ratio clears the
    // floor; the pigeonhole keeps such a coset near the top.  Only when every
    // candidate misses the floor (tempered parameters can sit on transform
    // zeros) fall back to the raw argmax and flag the result.
    const Cand* pick = &cands.front();
    for (const Cand& c : cands)
        if (c.ratio >= floor) {
            pick = &c;
            break;
        }
    int best_i = pick->i;
    out.chosen_a = ctx.keys[best_i];
    out.lambda = std::abs(pick->bval);
    Cplx best_val = pick->bval;
    out.phase = out.lambda > 0 ? std::conj(best_val) / out.lambda : Cplx(1.0);
    out.support_size = ctx.counts[best_i];
    const auto& ac = out.chosen_a.coords();
    out.ell = ac.front() - ac.back();
    double logp = std::log(static_cast<double>(ctx.p));
    out.ell_prime = static_cast<int64_t>(
        std::ceil(std::log(to_double(Rat(out.support_size))) / logp - 1e-9));
    out.norm_ratio = out.lambda / std::sqrt(to_double(Rat(out.support_size)));
    out.trusted = ctx.p >= p0;
    out.floor_ok = out.norm_ratio >= floor;
    return out;
}

inline AmplifierResult build_amplifier(int d, int64_t p, const SpectralParameter& nu0,
                                       double floor = 0.05, int64_t p0 = 5) {
    AmplifierContext ctx = make_amplifier_context(d, p);
    return build_amplifier_ctx(ctx, nu0, floor, p0);
}

// ---------------------------------------------------------------------------
// Numerical floor for the compactness bound: inf over tuples (max |a_i| = 1)
// of max_{1 <= j <= m} |a_1^j + ... + a_m^j|, by random starts plus local
// coordinate refinement.
// ---------------------------------------------------------------------------
inline double power_sum_floor(int m, int trials, uint64_t seed = 20240901) {
    if (m < 1) throw std::invalid_argument("power_sum_floor: m >= 1");
    Rng rng(seed);
    auto objective = [&](const std::vector<Cplx>& alpha) {
        double best = 0;
        for (int j = 1; j <= m; ++j) {
            Cplx s = 0.0;
            for (const Cplx& a : alpha) s += std::pow(a, j);
            best = std::max(best, std::abs(s));
        }
        return best;
    };
    double floor = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        // alpha_1 fixed on the unit circle; the rest inside the disc.
        std::vector<double> param;  // theta_1, then (r_i, theta_i)
        param.push_back(rng.uniform(0, 2 * M_PI));
        for (int i = 1; i < m; ++i) {
            param.push_back(rng.uniform());
            param.push_back(rng.uniform(0, 2 * M_PI));
        }
        auto tuple_of = [&](const std::vector<double>& q) {
            std::vector<Cplx> alpha;
            alpha.push_back(std::polar(1.0, q[0]));
            for (int i = 1; i < m; ++i)
                alpha.push_back(std::polar(q[2 * i - 1], q[2 * i]));
            return alpha;
        };
        double cur = objective(tuple_of(param));
        double step = 0.35;
        while (step > 1e-4) {
            bool improved = false;
            for (size_t k = 0; k < param.size(); ++k) {
                for (double dir : {-1.0, 1.0}) {
                    std::vector<double> q = param;
                    q[k] += dir * step;
                    if (k != 0 && (k % 2 == 1)) q[k] = std::clamp(q[k], 0.0, 1.0);
                    double v = objective(tuple_of(q));
                    if (v < cur) {
                        cur = v;
                        param = q;
                        improved = true;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        floor = std::min(floor, cur);
    }
    return floor;
}

}  // namespace heckelab
