#pragma once

#include <heckelab/hecke_cosets.hpp>
#include <heckelab/laurent.hpp>
#include <heckelab/root_data.hpp>

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace heckelab {

using Cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Unramified principal-series parameter for PGL_d(Q_p): d unit-normalized
// torus values z_1..z_d with product 1.  Tempered means all |z_i| = 1.
// ---------------------------------------------------------------------------
struct SpectralParameter {
    int64_t p;
    std::vector<Cplx> z;

    SpectralParameter(int64_t prime, std::vector<Cplx> zs) : p(prime), z(std::move(zs)) {
        if (z.size() < 2) throw std::invalid_argument("SpectralParameter: need d >= 2");
        Cplx prod = 1.0;
        for (const Cplx& x : z) prod *= x;
        if (std::abs(prod - 1.0) > 1e-9)
            throw std::invalid_argument("SpectralParameter: product of z_i must be 1");
    }

    int d() const { return static_cast<int>(z.size()); }

    bool is_tempered(double tol = 1e-9) const {
        for (const Cplx& x : z)
            if (std::abs(std::abs(x) - 1.0) > tol) return false;
        return true;
    }

    Cplx monomial(const std::vector<int64_t>& e) const {
        Cplx acc = 1.0;
        for (size_t i = 0; i < z.size(); ++i) {
            int64_t k = e[i];
            if (k == 0) continue;
            Cplx base = k > 0 ? z[i] : 1.0 / z[i];
            for (int64_t s = 0; s < std::abs(k); ++s) acc *= base;
        }
        return acc;
    }
};

// Tempered parameter from angles theta_1..theta_{d-1}; the last coordinate
// balances the product to 1.
inline SpectralParameter tempered_parameter(int64_t p, int d, const std::vector<double>& theta) {
    if (static_cast<int>(theta.size()) != d - 1)
        throw std::invalid_argument("tempered_parameter: need d-1 angles");
    std::vector<Cplx> z;
    double sum = 0;
    for (double t : theta) {
        z.push_back(std::polar(1.0, t));
        sum += t;
    }
    z.push_back(std::polar(1.0, -sum));
    return SpectralParameter(p, std::move(z));
}

// Trivial-representation parameter: z_i = p^{(d+1-2i)/2}.
inline SpectralParameter trivial_parameter(int64_t p, int d) {
    std::vector<Cplx> z;
    double sp = std::sqrt(static_cast<double>(p));
    for (int i = 1; i <= d; ++i) z.push_back(std::pow(sp, d + 1 - 2 * i));
    return SpectralParameter(p, std::move(z));
}

// ---------------------------------------------------------------------------
// Bi-invariant functions and W-symmetric Laurent polynomials, keyed by
// dominant cocharacter orbits; coefficients are a template scalar (complex
// doubles for numerics, SqrtExt for exact identities).
// ---------------------------------------------------------------------------
template <typename C>
struct OrbitPoly {
    int64_t p = 0;
    int d = 0;
    std::map<Cocharacter, C> terms;  // keys are dominant representatives

    void add(const Cocharacter& key, const C& c) {
        Cocharacter k = dominant_representative(key);
        auto it = terms.find(k);
        if (it == terms.end())
            terms.emplace(k, c);
        else
            it->second = it->second + c;
    }
};

// Compactly supported bi-invariant function: coefficients of indicator
// functions 1_{K a K}, keyed by the dominant cocharacter a.
template <typename C>
struct BiInvariantFn {
    int64_t p = 0;
    int d = 0;
    std::map<Cocharacter, C> coeffs;

    void add(const Cocharacter& a, const C& c) {
        if (!a.is_dominant()) throw std::invalid_argument("BiInvariantFn: key must be dominant");
        auto it = coeffs.find(a);
        if (it == coeffs.end())
            coeffs.emplace(a, c);
        else
            it->second = it->second + c;
    }
};

using HeckeFunction = BiInvariantFn<Cplx>;
using ExactHeckeFunction = BiInvariantFn<SqrtExt>;
using WSymLaurent = OrbitPoly<Cplx>;
using WSymLaurentX = OrbitPoly<SqrtExt>;

namespace detail {

inline bool nonzero(const Cplx& c) { return std::abs(c) > 0; }
inline bool nonzero(const SqrtExt& c) { return !c.is_zero(); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Exact basis transforms.  basis_transform(p, a) is the spherical transform
// of 1_{K a K}: a W-symmetric Laurent polynomial with leading orbit term
// p^{<rho,a>} m_a, computed from the Hall-Littlewood polynomial at t = 1/p.
// ---------------------------------------------------------------------------
inline WSymLaurentX basis_transform(int64_t p, const Cocharacter& a) {
    static std::map<std::pair<int64_t, Cocharacter>, WSymLaurentX> cache;
    static std::mutex mu;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find({p, a});
        if (it != cache.end()) return it->second;
    }
    if (!a.is_dominant()) throw std::invalid_argument("basis_transform: a must be dominant");
    int d = a.d();
    ExpVec lambda(a.coords().begin(), a.coords().end());  // canonical: lambda_d = 0
    const auto& hl = hall_littlewood(d, lambda);
    Rat tp(1, p);
    int64_t twist = two_rho_pairing_raw(a.coords());  // <2 rho, a>
    WSymLaurentX out;
    out.p = p;
    out.d = d;
    for (const auto& [mu, coef] : hl) {
        Rat c = coef.eval(tp);
        if (c == 0) continue;
        out.add(Cocharacter(std::vector<int64_t>(mu.begin(), mu.end())),
                half_power(p, twist, c));
    }
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(std::make_pair(p, a), out);
    return out;
}

inline WSymLaurent to_complex(const WSymLaurentX& x) {
    WSymLaurent out;
    out.p = x.p;
    out.d = x.d;
    for (const auto& [k, c] : x.terms) out.terms.emplace(k, Cplx(c.value(), 0.0));
    return out;
}

// ---------------------------------------------------------------------------
// Spherical transform of a bi-invariant function, two routes.
// ---------------------------------------------------------------------------
inline WSymLaurentX satake_transform(const ExactHeckeFunction& f) {
    WSymLaurentX out;
    out.p = f.p;
    out.d = f.d;
    for (const auto& [a, c] : f.coeffs) {
        if (!detail::nonzero(c)) continue;
        WSymLaurentX ba = basis_transform(f.p, a);
        for (const auto& [k, bc] : ba.terms) out.add(k, c * bc);
    }
    return out;
}

inline WSymLaurent satake_transform(const HeckeFunction& f) {
    WSymLaurent out;
    out.p = f.p;
    out.d = f.d;
    for (const auto& [a, c] : f.coeffs) {
        if (!detail::nonzero(c)) continue;
        WSymLaurent ba = to_complex(basis_transform(f.p, a));
        for (const auto& [k, bc] : ba.terms) out.add(k, c * bc);
    }
    return out;
}

// Enumeration route: transform 1_{K a K} directly from coset representatives.
// coeff(z^b) = p^{-<rho,b>} N(a,b), with N(a,b) the number of single cosets
// whose triangular representative has diagonal valuations b.  Checks that
// the result is W-symmetric; subject to the enumeration resource guard.
inline WSymLaurentX basis_transform_enumerated(const DoubleCosetKey& key) {
    auto cosets = enumerate_cosets(key);
    std::map<std::vector<int64_t>, int64_t> counts;
    for (const auto& rep : cosets) counts[rep.diag_vals] += 1;
    // Accumulate per exact exponent first, then fold into orbits with a
    // symmetry check.
    std::map<Cocharacter, std::map<std::vector<int64_t>, SqrtExt>> orbits;
    for (const auto& [b, n] : counts) {
        SqrtExt c = half_power(key.p, -two_rho_pairing_raw(b), Rat(n));
        orbits[dominant_representative(Cocharacter(b))][b] = c;
    }
    WSymLaurentX out;
    out.p = key.p;
    out.d = key.d;
    for (const auto& [dom, members] : orbits) {
        size_t orbit_size = weyl_orbit(dom).size();
        if (members.size() != orbit_size)
            throw std::logic_error("basis_transform_enumerated: orbit not fully populated");
        const SqrtExt& first = members.begin()->second;
        for (const auto& [b, c] : members)
            if (c != first) throw std::logic_error("basis_transform_enumerated: not W-symmetric");
        out.add(dom, first);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation and elementary invariants.
// ---------------------------------------------------------------------------
inline Cplx evaluate(const WSymLaurent& f, const SpectralParameter& nu) {
    if (nu.d() != f.d) throw std::invalid_argument("evaluate: dimension mismatch");
    Cplx acc = 0.0;
    for (const auto& [dom, c] : f.terms) {
        Cplx orbit_sum = 0.0;
        for (const Cocharacter& b : weyl_orbit(dom)) orbit_sum += nu.monomial(b.coords());
        acc += c * orbit_sum;
    }
    return acc;
}

inline Cplx evaluate(const WSymLaurentX& f, const SpectralParameter& nu) {
    return evaluate(to_complex(f), nu);
}

// Exact evaluation at the trivial parameter: z^b = p^{<2rho,b>/2} termwise.
inline SqrtExt evaluate_trivial(const WSymLaurentX& f) {
    SqrtExt acc = SqrtExt::rational(Rat(0));
    for (const auto& [dom, c] : f.terms)
        for (const Cocharacter& b : weyl_orbit(dom))
            acc = acc + c * half_power(f.p, two_rho_pairing_raw(b.coords()));
    return acc;
}

// |K a K / K| computed spectrally: the transform of 1_{K a K} evaluated at
// the trivial parameter.  Exact; no enumeration, so no resource guard.
inline Int coset_count_spectral(int64_t p, const Cocharacter& a) {
    SqrtExt v = evaluate_trivial(basis_transform(p, a));
    if (v.b != 0 || !is_integral(v.a))
        throw std::logic_error("coset_count_spectral: non-integral value");
    return numerator(v.a);
}

// coset_count / p^{<2 rho, a>} without enumeration.
inline Rat volume_ratio_spectral(int64_t p, const Cocharacter& a) {
    Int denom = pow_int(Int(p), static_cast<unsigned>(two_rho_pairing(a)));
    return Rat(coset_count_spectral(p, a), denom);
}

// Normalized spherical function value: transform of 1_{K a K} at nu divided
// by the coset count.
inline Cplx spherical_value(int64_t p, const Cocharacter& a, const SpectralParameter& nu) {
    WSymLaurentX ba = basis_transform(p, a);
    Cplx num = evaluate(ba, nu);
    double den = to_double(Rat(coset_count_spectral(p, a)));
    return num / den;
}

// Largest cocharacter norm in the support of the transform.
template <typename C>
double support_radius(const OrbitPoly<C>& f) {
    double r = 0;
    for (const auto& [k, c] : f.terms)
        if (detail::nonzero(c)) r = std::max(r, cochar_norm(k));
    return r;
}

template <typename C>
double support_radius(const BiInvariantFn<C>& f) {
    double r = 0;
    for (const auto& [k, c] : f.coeffs)
        if (detail::nonzero(c)) r = std::max(r, cochar_norm(k));
    return r;
}

// ---------------------------------------------------------------------------
// Convolution of basis elements via coset multiplication (resource-guarded),
// and bilinear extension.  Multiplicities are exact integers; the PGL center
// is absorbed by dropping the common p-power from representatives.
// ---------------------------------------------------------------------------
inline std::map<Cocharacter, Int> convolve_basis(int64_t p, int d, const Cocharacter& a,
                                                 const Cocharacter& b) {
    DoubleCosetKey ka{p, d, a}, kb{p, d, b};
    auto xs = enumerate_cosets(ka);
    auto ys = enumerate_cosets(kb);
    // Count canonical products g = x * y; the multiplicity of each single
    // coset gK is constant along a double coset, so group by SNF class.
    std::unordered_map<LatMat, int64_t, LatMatHash> prod_mult;
    for (const auto& x : xs)
        for (const auto& y : ys) {
            LatMat g = lat_mul(x.matrix, y.matrix);
            LatMat can = lattice_canonical(g);
            prod_mult[can] += 1;
        }
    std::map<Cocharacter, std::pair<int64_t, Int>> classes;  // class -> (mult, #cosets)
    for (const auto& [g, m] : prod_mult) {
        auto sm = smith_p_exponents(g, p);
        Cocharacter cls(sm);
        auto it = classes.find(cls);
        if (it == classes.end())
            classes.emplace(cls, std::make_pair(m, Int(1)));
        else {
            if (it->second.first != m)
                throw std::logic_error("convolve_basis: multiplicity not constant on class");
            it->second.second += 1;
        }
    }
    std::map<Cocharacter, Int> out;
    for (const auto& [cls, mc] : classes) {
        // Sanity: the class must account for all of its cosets.
        if (mc.second != coset_count_spectral(p, cls))
            throw std::logic_error("convolve_basis: class only partially covered");
        out.emplace(cls, Int(mc.first));
    }
    return out;
}

template <typename C>
BiInvariantFn<C> convolve(const BiInvariantFn<C>& f, const BiInvariantFn<C>& g,
                          const std::function<C(const Int&)>& lift) {
    if (f.p != g.p || f.d != g.d) throw std::invalid_argument("convolve: mismatched functions");
    BiInvariantFn<C> out;
    out.p = f.p;
    out.d = f.d;
    for (const auto& [a, ca] : f.coeffs) {
        if (!detail::nonzero(ca)) continue;
        for (const auto& [b, cb] : g.coeffs) {
            if (!detail::nonzero(cb)) continue;
            for (const auto& [cls, mult] : convolve_basis(f.p, f.d, a, b))
                out.add(cls, ca * cb * lift(mult));
        }
    }
    return out;
}

inline HeckeFunction convolve(const HeckeFunction& f, const HeckeFunction& g) {
    return convolve<Cplx>(f, g, [](const Int& m) { return Cplx(to_double(Rat(m)), 0.0); });
}

inline ExactHeckeFunction convolve(const ExactHeckeFunction& f, const ExactHeckeFunction& g) {
    return convolve<SqrtExt>(f, g, [](const Int& m) { return SqrtExt::rational(Rat(m)); });
}

// ---------------------------------------------------------------------------
// Inverse transform: peel orbit terms from the dominance-maximal end.  The
// transform of 1_{K b K} is p^{<rho,b>} m_b plus dominance-lower orbit terms,
// and dominance-lower implies strictly smaller norm, so selecting a maximal
// squared-norm key (lex tie-break) always isolates a fresh basis coefficient.
// ---------------------------------------------------------------------------
inline HeckeFunction inverse_satake(const WSymLaurent& f, double tol = 1e-9) {
    HeckeFunction out;
    out.p = f.p;
    out.d = f.d;
    std::map<Cocharacter, Cplx> work = f.terms;
    auto prune = [&]() {
        for (auto it = work.begin(); it != work.end();)
            it = std::abs(it->second) <= tol ? work.erase(it) : std::next(it);
    };
    prune();
    while (!work.empty()) {
        auto best = work.begin();
        Rat bn = cochar_norm_squared(best->first);
        for (auto it = std::next(work.begin()); it != work.end(); ++it) {
            Rat n = cochar_norm_squared(it->first);
            if (n > bn || (n == bn && best->first < it->first)) {
                best = it;
                bn = n;
            }
        }
        Cocharacter b = best->first;
        WSymLaurent bb = to_complex(basis_transform(f.p, b));
        Cplx lead = bb.terms.at(b);
        Cplx c = best->second / lead;
        out.add(b, c);
        for (const auto& [k, v] : bb.terms) {
            auto it = work.find(k);
            if (it == work.end())
                work.emplace(k, -c * v);
            else
                it->second -= c * v;
        }
        work.erase(b);  // eliminated exactly by construction
        prune();
    }
    return out;
}

inline ExactHeckeFunction inverse_satake(const WSymLaurentX& f) {
    ExactHeckeFunction out;
    out.p = f.p;
    out.d = f.d;
    std::map<Cocharacter, SqrtExt> work = f.terms;
    auto prune = [&]() {
        for (auto it = work.begin(); it != work.end();)
            it = it->second.is_zero() ? work.erase(it) : std::next(it);
    };
    prune();
    while (!work.empty()) {
        auto best = work.begin();
        Rat bn = cochar_norm_squared(best->first);
        for (auto it = std::next(work.begin()); it != work.end(); ++it) {
            Rat n = cochar_norm_squared(it->first);
            if (n > bn || (n == bn && best->first < it->first)) {
                best = it;
                bn = n;
            }
        }
        Cocharacter b = best->first;
        WSymLaurentX bb = basis_transform(f.p, b);
        SqrtExt c = best->second * bb.terms.at(b).inverse();
        out.add(b, c);
        for (const auto& [k, v] : bb.terms) {
            auto it = work.find(k);
            if (it == work.end())
                work.emplace(k, -(c * v));
            else
                it->second = it->second - c * v;
        }
        prune();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Plancherel measure on the tempered torus.  Density proportional to
// prod_{i<j} |1 - z_j/z_i|^2 / |1 - (1/p) z_j/z_i|^2, normalized to a
// probability measure by the same quadrature grid.
// ---------------------------------------------------------------------------
inline double plancherel_density_raw(int64_t p, const std::vector<Cplx>& z) {
    int d = static_cast<int>(z.size());
    double t = 1.0 / static_cast<double>(p);
    double acc = 1.0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            Cplx r = z[j] / z[i];
            acc *= std::norm(1.0 - r) / std::norm(1.0 - t * r);
        }
    return acc;
}

// Limit density as p grows: pure |Weyl denominator|^2.
inline double plancherel_density_limit_raw(const std::vector<Cplx>& z) {
    int d = static_cast<int>(z.size());
    double acc = 1.0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) acc *= std::norm(1.0 - z[j] / z[i]);
    return acc;
}

// Mean of fn against the normalized density over an n^{d-1} uniform grid.
inline double plancherel_grid_mean(int64_t p, int d, int n,
                                   const std::function<double(const SpectralParameter&)>& fn,
                                   bool limit_density = false) {
    std::vector<int> idx(d - 1, 0);
    double num = 0, den = 0;
    const double step = 2.0 * M_PI / n;
    while (true) {
        std::vector<double> theta(d - 1);
        for (int i = 0; i < d - 1; ++i) theta[i] = (idx[i] + 0.5) * step;
        SpectralParameter nu = tempered_parameter(p, d, theta);
        double w = limit_density ? plancherel_density_limit_raw(nu.z)
                                 : plancherel_density_raw(p, nu.z);
        den += w;
        num += w * fn(nu);
        int k = 0;
        while (k < d - 1 && ++idx[k] == n) idx[k++] = 0;
        if (k == d - 1) break;
    }
    return num / den;
}

// Adaptive integral of fn d(mu_p): grid doubling until successive values
// agree within rel_tol (plus a small absolute floor).
inline double plancherel_integral(int64_t p, int d,
                                  const std::function<double(const SpectralParameter&)>& fn,
                                  double rel_tol = 1e-10, int n0 = 24, int max_n = 3072) {
    double prev = plancherel_grid_mean(p, d, n0, fn);
    for (int n = n0 * 2; n <= max_n; n *= 2) {
        double cur = plancherel_grid_mean(p, d, n, fn);
        double scale = std::max({std::abs(cur), std::abs(prev), 1.0});
        if (std::abs(cur - prev) <= rel_tol * scale) return cur;
        prev = cur;
    }
    return prev;
}

// Hermitian pairing <fhat, ghat> in L^2(mu_p).
inline double plancherel_inner(const WSymLaurent& fhat, const WSymLaurent& ghat,
                               double rel_tol = 1e-10) {
    if (fhat.p != ghat.p || fhat.d != ghat.d)
        throw std::invalid_argument("plancherel_inner: mismatch");
    return plancherel_integral(fhat.p, fhat.d, [&](const SpectralParameter& nu) {
        return std::real(evaluate(fhat, nu) * std::conj(evaluate(ghat, nu)));
    }, rel_tol);
}

// Sup-norm gap between the normalized p-density and its large-p limit over a
// fixed tempered grid.
inline double plancherel_limit_gap(int64_t p, int d, int n = 96) {
    std::vector<int> idx(d - 1, 0);
    const double step = 2.0 * M_PI / n;
    double zp = 0, zl = 0;
    std::vector<double> wp, wl;
    while (true) {
        std::vector<double> theta(d - 1);
        for (int i = 0; i < d - 1; ++i) theta[i] = (idx[i] + 0.5) * step;
        SpectralParameter nu = tempered_parameter(p, d, theta);
        wp.push_back(plancherel_density_raw(p, nu.z));
        wl.push_back(plancherel_density_limit_raw(nu.z));
        zp += wp.back();
        zl += wl.back();
        int k = 0;
        while (k < d - 1 && ++idx[k] == n) idx[k++] = 0;
        if (k == d - 1) break;
    }
    double gap = 0;
    for (size_t i = 0; i < wp.size(); ++i)
        gap = std::max(gap, std::abs(wp[i] / zp - wl[i] / zl) * wp.size());
    return gap;
}

}  // namespace heckelab
