#pragma once

#include <heckelab/hecke_cosets.hpp>
#include <heckelab/matrix.hpp>
#include <heckelab/rational.hpp>
#include <heckelab/rng.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace heckelab {

using AlgebraElement = std::vector<Rat>;

// ---------------------------------------------------------------------------
// Finite-dimensional Q-algebra given by structure constants, with a fixed
// full-rank lattice and a Euclidean Gram form.
// ---------------------------------------------------------------------------
struct AlgebraSpec {
    int dim = 0;     // Q-dimension (n^2 for a degree-n algebra)
    int degree = 0;  // n
    std::vector<Rat> structure;  // c[(i*dim + j)*dim + k]: e_i e_j = sum_k c e_k
    AlgebraElement unit;
    RationalMatrix lattice_basis;  // rows are lattice basis vectors
    RationalMatrix gram;

    const Rat& c(int i, int j, int k) const { return structure[(i * dim + j) * dim + k]; }

    AlgebraElement multiply(const AlgebraElement& x, const AlgebraElement& y) const {
        AlgebraElement r(dim, Rat(0));
        for (int i = 0; i < dim; ++i) {
            if (x[i] == 0) continue;
            for (int j = 0; j < dim; ++j) {
                if (y[j] == 0) continue;
                Rat f = x[i] * y[j];
                for (int k = 0; k < dim; ++k) {
                    const Rat& s = c(i, j, k);
                    if (s != 0) r[k] += f * s;
                }
            }
        }
        return r;
    }

    Rat norm_squared(const AlgebraElement& x) const {
        Rat acc = 0;
        for (int i = 0; i < dim; ++i) {
            if (x[i] == 0) continue;
            for (int j = 0; j < dim; ++j) acc += x[i] * gram(i, j) * x[j];
        }
        return acc;
    }

    void validate() const {
        if (static_cast<int>(structure.size()) != dim * dim * dim)
            throw std::invalid_argument("AlgebraSpec: structure tensor size");
        if (lattice_basis.dim() != dim || gram.dim() != dim)
            throw std::invalid_argument("AlgebraSpec: matrix dims");
        if (det(lattice_basis) == 0)
            throw std::invalid_argument("AlgebraSpec: singular lattice basis");
        AlgebraElement ei(dim, Rat(0)), ej(dim, Rat(0)), ek(dim, Rat(0));
        for (int i = 0; i < dim; ++i) {
            std::fill(ei.begin(), ei.end(), Rat(0));
            ei[i] = 1;
            if (multiply(unit, ei) != ei || multiply(ei, unit) != ei)
                throw std::invalid_argument("AlgebraSpec: unit fails");
            for (int j = 0; j < dim; ++j) {
                std::fill(ej.begin(), ej.end(), Rat(0));
                ej[j] = 1;
                AlgebraElement ij = multiply(ei, ej);
                for (int k = 0; k < dim; ++k) {
                    std::fill(ek.begin(), ek.end(), Rat(0));
                    ek[k] = 1;
                    if (multiply(ij, ek) != multiply(ei, multiply(ej, ek)))
                        throw std::invalid_argument("AlgebraSpec: not associative");
                }
            }
        }
    }
};

// ---------------------------------------------------------------------------
// Shipped instances: full matrix algebras with the integral lattice, and the
// rational Hamilton quaternions with the standard order.
// ---------------------------------------------------------------------------
inline AlgebraSpec matrix_algebra(int n) {
    AlgebraSpec s;
    s.degree = n;
    s.dim = n * n;
    s.structure.assign(s.dim * s.dim * s.dim, Rat(0));
    // basis E_{ab}, index a*n + b; E_{ab} E_{cd} = [b == c] E_{ad}
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    if (b != c) continue;
                    int i = a * n + b, j = c * n + d, k = a * n + d;
                    s.structure[(i * s.dim + j) * s.dim + k] = 1;
                }
    s.unit.assign(s.dim, Rat(0));
    for (int a = 0; a < n; ++a) s.unit[a * n + a] = 1;
    s.lattice_basis = RationalMatrix::identity(s.dim);
    s.gram = RationalMatrix::identity(s.dim);
    return s;
}

inline AlgebraSpec quaternion_algebra() {
    AlgebraSpec s;
    s.degree = 2;
    s.dim = 4;
    s.structure.assign(64, Rat(0));
    // basis 1, i, j, k
    auto set = [&](int a, int b, int c, int sign) {
        s.structure[(a * 4 + b) * 4 + c] = sign;
    };
    set(0, 0, 0, 1); set(0, 1, 1, 1); set(0, 2, 2, 1); set(0, 3, 3, 1);
    set(1, 0, 1, 1); set(2, 0, 2, 1); set(3, 0, 3, 1);
    set(1, 1, 0, -1); set(2, 2, 0, -1); set(3, 3, 0, -1);
    set(1, 2, 3, 1); set(2, 1, 3, -1);
    set(2, 3, 1, 1); set(3, 2, 1, -1);
    set(3, 1, 2, 1); set(1, 3, 2, -1);
    s.unit = {Rat(1), Rat(0), Rat(0), Rat(0)};
    s.lattice_basis = RationalMatrix::identity(4);
    s.gram = RationalMatrix::identity(4);
    return s;
}

// ---------------------------------------------------------------------------
// Denominator with respect to the lattice: minimal m with m x in the lattice.
// ---------------------------------------------------------------------------
inline std::vector<Rat> lattice_coordinates(const AlgebraElement& x, const AlgebraSpec& spec) {
    // Solve c * B = x for the coordinate row c (B rows are basis vectors).
    RationalMatrix bt = transpose(spec.lattice_basis);
    RationalMatrix inv = inverse(bt);
    std::vector<Rat> c(spec.dim, Rat(0));
    for (int i = 0; i < spec.dim; ++i)
        for (int j = 0; j < spec.dim; ++j) c[i] += inv(i, j) * x[j];
    return c;
}

inline Int lattice_denominator(const AlgebraElement& x, const AlgebraSpec& spec) {
    Int m = 1;
    for (const Rat& c : lattice_coordinates(x, spec)) m = lcm_int(m, denom_rational(c));
    return m;
}

// ---------------------------------------------------------------------------
// G(x_1..x_s) = sum of squared s x s minors of the coordinate matrix; an
// exact rank detector that is polynomial in the coordinates.
// ---------------------------------------------------------------------------
inline Rat minors_polynomial_G(const std::vector<AlgebraElement>& xs) {
    if (xs.empty()) return Rat(1);
    int s = static_cast<int>(xs.size());
    int n = static_cast<int>(xs[0].size());
    if (s > n) throw std::invalid_argument("minors_polynomial_G: too many vectors");
    std::vector<int> cols(s);
    for (int i = 0; i < s; ++i) cols[i] = i;
    Rat acc = 0;
    while (true) {
        RationalMatrix m(s);
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) m(i, j) = xs[i][cols[j]];
        Rat d = det(m);
        acc += d * d;
        int i = s - 1;
        while (i >= 0 && cols[i] == n - s + i) --i;
        if (i < 0) break;
        ++cols[i];
        for (int j = i + 1; j < s; ++j) cols[j] = cols[j - 1] + 1;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Exact span bookkeeping and unital algebra closure.
// ---------------------------------------------------------------------------
class ExactSpan {
public:
    // Returns true if v was independent (and is now part of the span).
    bool add(AlgebraElement v) {
        for (const auto& [piv, row] : rows_) {
            if (v[piv] == 0) continue;
            Rat f = v[piv];
            for (size_t j = 0; j < v.size(); ++j) v[j] -= f * row[j];
        }
        for (size_t j = 0; j < v.size(); ++j)
            if (v[j] != 0) {
                Rat f = v[j];
                for (auto& x : v) x /= f;
                rows_.emplace_back(static_cast<int>(j), std::move(v));
                return true;
            }
        return false;
    }

    bool contains(AlgebraElement v) const {
        for (const auto& [piv, row] : rows_) {
            if (v[piv] == 0) continue;
            Rat f = v[piv];
            for (size_t j = 0; j < v.size(); ++j) v[j] -= f * row[j];
        }
        for (const Rat& x : v)
            if (x != 0) return false;
        return true;
    }

    int dim() const { return static_cast<int>(rows_.size()); }
    std::vector<AlgebraElement> basis() const {
        std::vector<AlgebraElement> b;
        for (const auto& [piv, row] : rows_) b.push_back(row);
        return b;
    }

private:
    std::vector<std::pair<int, AlgebraElement>> rows_;
};

struct SubalgebraReport {
    std::vector<AlgebraElement> generated_basis;
    int dim = 0;
    bool proper = false;
    std::vector<Rat> certificate;  // witness G-values (nonzero rank witness,
                                   // then the vanishing closure checks)
    bool condition_checked = false;
    bool condition_holds = false;
    bool counterexample = false;
};

inline SubalgebraReport algebra_closure(const std::vector<AlgebraElement>& gens,
                                        const AlgebraSpec& spec) {
    ExactSpan span;
    span.add(spec.unit);
    for (const auto& g : gens) {
        if (static_cast<int>(g.size()) != spec.dim)
            throw std::invalid_argument("algebra_closure: element dim mismatch");
        span.add(g);
    }
    // Multiply basis pairs until the span stabilizes; the dimension strictly
    // grows each round, so this ends within dim steps.
    bool grew = true;
    while (grew && span.dim() < spec.dim) {
        grew = false;
        auto basis = span.basis();
        for (const auto& x : basis)
            for (const auto& y : basis)
                if (span.add(spec.multiply(x, y))) grew = true;
    }
    SubalgebraReport rep;
    rep.generated_basis = span.basis();
    rep.dim = span.dim();
    rep.proper = rep.dim < spec.dim;
    rep.certificate.push_back(minors_polynomial_G(rep.generated_basis));  // nonzero
    if (rep.dim < spec.dim) {
        // Vanishing witnesses: products stay in the span.
        auto basis = rep.generated_basis;
        auto probe = basis;
        probe.push_back(spec.multiply(basis.front(), basis.back()));
        rep.certificate.push_back(minors_polynomial_G(probe));  // zero
    }
    return rep;
}

// Distance squared from x to the Q-span of the given basis, in the Gram form.
inline Rat span_distance_squared(const AlgebraElement& x,
                                 const std::vector<AlgebraElement>& sbasis,
                                 const AlgebraSpec& spec) {
    int s = static_cast<int>(sbasis.size());
    if (s == 0) return spec.norm_squared(x);
    // Normal equations (S G S^T) a = S G x.
    RationalMatrix m(s);
    std::vector<Rat> rhs(s, Rat(0));
    auto gdot = [&](const AlgebraElement& u, const AlgebraElement& v) {
        Rat acc = 0;
        for (int i = 0; i < spec.dim; ++i)
            for (int j = 0; j < spec.dim; ++j) acc += u[i] * spec.gram(i, j) * v[j];
        return acc;
    };
    for (int i = 0; i < s; ++i) {
        rhs[i] = gdot(sbasis[i], x);
        for (int j = 0; j < s; ++j) m(i, j) = gdot(sbasis[i], sbasis[j]);
    }
    RationalMatrix inv = inverse(m);
    Rat proj = 0;
    for (int i = 0; i < s; ++i) {
        Rat a = 0;
        for (int j = 0; j < s; ++j) a += inv(i, j) * rhs[j];
        proj += a * rhs[i];
    }
    return gdot(x, x) - proj;
}

// Default exponent/threshold for the near-subalgebra condition, derived from
// the minor-degree bookkeeping of the G construction: monomials of length up
// to dim have denominators M^dim and norms ~ R^dim, and G is a sum of
// squared (sigma+1)-minors, giving exponent 2*dim*(sigma+1); the threshold
// absorbs the minor count and factorial growth.
inline int64_t near_subalgebra_exponent(int dim, int sigma) {
    return static_cast<int64_t>(2) * dim * (sigma + 1);
}

inline Rat near_subalgebra_threshold(int dim, int sigma) {
    Int fact = 1;
    for (int i = 2; i <= sigma + 1; ++i) fact *= i;
    Int binom = 1;
    for (int i = 0; i < sigma + 1; ++i) binom = binom * (dim - i) / (i + 1);
    return Rat(1, fact * fact * binom * pow_int(Int(2), static_cast<unsigned>(dim)));
}

inline SubalgebraReport near_subalgebra_test(const std::vector<AlgebraElement>& points,
                                             const std::vector<AlgebraElement>& s_basis,
                                             const Rat& eps, const Rat& R, const Int& M,
                                             const AlgebraSpec& spec, int64_t c_exp = 0,
                                             Rat c_thresh = Rat(0)) {
    int sigma = static_cast<int>(s_basis.size());
    if (c_exp == 0) c_exp = near_subalgebra_exponent(spec.dim, sigma);
    if (c_thresh == 0) c_thresh = near_subalgebra_threshold(spec.dim, sigma);
    std::vector<int> bad;
    for (size_t i = 0; i < points.size(); ++i) {
        const auto& x = points[i];
        bool ok = spec.norm_squared(x) <= R * R &&
                  span_distance_squared(x, s_basis, spec) <= eps * eps &&
                  lattice_denominator(x, spec) <= M;
        if (!ok) bad.push_back(static_cast<int>(i));
    }
    if (!bad.empty()) {
        std::string msg = "near_subalgebra_test: points violate the entry conditions:";
        for (int i : bad) msg += " " + std::to_string(i);
        throw std::invalid_argument(msg);
    }
    SubalgebraReport rep = algebra_closure(points, spec);
    rep.condition_checked = true;
    Rat lhs = eps;
    Rat rm = pow_rat(R, c_exp) * Rat(pow_int(M, static_cast<unsigned>(c_exp)));
    lhs *= rm;
    rep.condition_holds = lhs < c_thresh;
    rep.counterexample = rep.condition_holds && !rep.proper;
    return rep;
}

// ---------------------------------------------------------------------------
// Plane toy model: three rational points near a unit segment must be exactly
// colinear once the near-colinearity scale beats the denominator bound.
// ---------------------------------------------------------------------------
struct PlanePoint {
    Rat x, y;
};

inline Rat triangle_area(const PlanePoint& a, const PlanePoint& b, const PlanePoint& c) {
    Rat cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if (cross < 0) cross = -cross;
    return cross / 2;
}

inline bool colinear_toy(const PlanePoint& p1, const PlanePoint& p2, const PlanePoint& p3,
                         const Int& M, double eps) {
    for (const PlanePoint* p : {&p1, &p2, &p3}) {
        if (denom_rational(p->x) > M || denom_rational(p->y) > M)
            throw std::invalid_argument("colinear_toy: denominator exceeds M");
    }
    // Near a common unit segment: pairwise distances at most 1 + 2 eps and
    // the thin direction (height over the longest side) at most ~eps.
    auto distsq = [](const PlanePoint& a, const PlanePoint& b) {
        return to_double((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
    };
    double d12 = distsq(p1, p2), d13 = distsq(p1, p3), d23 = distsq(p2, p3);
    double longest = std::sqrt(std::max({d12, d13, d23}));
    double diameter_cap = 1.0 + 2.0 * eps;
    if (longest > diameter_cap)
        throw std::invalid_argument("colinear_toy: points not near a unit segment");
    double area = to_double(triangle_area(p1, p2, p3));
    if (longest > 0 && 2.0 * area / longest > 2.0 * eps + 1e-15)
        throw std::invalid_argument("colinear_toy: points not within eps of a segment");
    return triangle_area(p1, p2, p3) == 0;
}

// ---------------------------------------------------------------------------
// Integral lift: alpha' = K * d(alpha) * alpha with alpha' L + L alpha'
// inside the lattice L, K minimal.
// ---------------------------------------------------------------------------
struct LiftResult {
    AlgebraElement lifted;
    Int scale;  // K * d(alpha)
    Int k;      // the multiplication constant K alone
};

inline LiftResult clear_denominator_lift(const AlgebraElement& alpha, const AlgebraSpec& spec,
                                         int64_t k_limit = 1 << 20) {
    Int d = lattice_denominator(alpha, spec);
    auto maps_lattice_in = [&](const AlgebraElement& a) {
        auto b = spec.lattice_basis;
        for (int i = 0; i < spec.dim; ++i) {
            AlgebraElement e(spec.dim);
            for (int j = 0; j < spec.dim; ++j) e[j] = b(i, j);
            if (lattice_denominator(spec.multiply(a, e), spec) != 1) return false;
            if (lattice_denominator(spec.multiply(e, a), spec) != 1) return false;
        }
        return true;
    };
    for (Int k = 1; k <= k_limit; ++k) {
        AlgebraElement cand(spec.dim);
        for (int j = 0; j < spec.dim; ++j) cand[j] = alpha[j] * Rat(k * d);
        if (maps_lattice_in(cand)) return {cand, Int(k * d), k};
    }
    throw std::domain_error("clear_denominator_lift: no K within limit");
}

// ---------------------------------------------------------------------------
// Bad primes of an integral element: prime divisors of the discriminant of
// the minimal polynomial of left multiplication.
// ---------------------------------------------------------------------------
struct BadPrimesReport {
    bool degenerate = false;  // minimal polynomial degree below the algebra degree
    std::vector<Rat> min_poly;  // monic, ascending coefficients
    Int discriminant = 0;
    std::vector<Int> primes;
    double log_norm = 0;
};

namespace detail {

inline Int int_pollard_rho(const Int& n, Rng& rng) {
    if (n % 2 == 0) return 2;
    while (true) {
        Int x = Int(rng.next()) % n, c = Int(rng.next()) % n, y = x, d = 1;
        while (d == 1) {
            x = (x * x + c) % n;
            y = (y * y + c) % n;
            y = (y * y + c) % n;
            Int diff = x > y ? Int(x - y) : Int(y - x);
            if (diff == 0) break;
            d = gcd(diff, n);
        }
        if (d != 1 && d != n) return d;
    }
}

inline void factor_into(Int n, std::set<Int>& out, Rng& rng, int digit_guard) {
    if (n <= 1) return;
    for (int64_t q = 2; q < 100000 && Int(q) * q <= n; ++q) {
        while (n % q == 0) {
            out.insert(Int(q));
            n /= q;
        }
    }
    if (n == 1) return;
    if (n.str().size() > static_cast<size_t>(digit_guard))
        throw std::domain_error("factor_into: integer exceeds the digit guard");
    std::vector<Int> stack{n};
    while (!stack.empty()) {
        Int m = stack.back();
        stack.pop_back();
        if (m == 1) continue;
        bool prime = m < Int("18446744073709551615") &&
                     is_prime_u64(m.convert_to<uint64_t>());
        if (!prime && m >= Int("18446744073709551615"))
            throw std::domain_error("factor_into: factor too large to certify");
        if (prime) {
            out.insert(m);
            continue;
        }
        Int f = int_pollard_rho(m, rng);
        stack.push_back(f);
        stack.push_back(Int(m / f));
    }
}

}  // namespace detail

// Minimal polynomial of a rational square matrix, monic, ascending coeffs.
inline std::vector<Rat> minimal_polynomial(const RationalMatrix& m) {
    int n = m.dim();
    std::vector<std::vector<Rat>> powers;  // flattened powers of m
    RationalMatrix cur = RationalMatrix::identity(n);
    for (int k = 0;; ++k) {
        std::vector<Rat> flat;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) flat.push_back(cur(i, j));
        powers.push_back(flat);
        if (rank_over_Q(powers) < static_cast<int>(powers.size())) {
            // Solve sum_{i<k} a_i m^i = -m^k exactly by least-order relation.
            powers.pop_back();
            int deg = k;
            RationalMatrix sys(deg);
            // Use deg independent coordinates: pick pivot columns by rank.
            // Simple route: solve the (n^2 x deg) overdetermined system via
            // normal equations; exact because a solution exists.
            std::vector<Rat> rhs(deg, Rat(0));
            for (int a = 0; a < deg; ++a) {
                for (int b = 0; b < deg; ++b) {
                    Rat acc = 0;
                    for (size_t t = 0; t < flat.size(); ++t)
                        acc += powers[a][t] * powers[b][t];
                    sys(a, b) = acc;
                }
                Rat acc = 0;
                for (size_t t = 0; t < flat.size(); ++t) acc -= powers[a][t] * flat[t];
                rhs[a] = acc;
            }
            RationalMatrix inv = inverse(sys);
            std::vector<Rat> coeffs(deg + 1, Rat(0));
            coeffs[deg] = 1;
            for (int a = 0; a < deg; ++a)
                for (int b = 0; b < deg; ++b) coeffs[a] += inv(a, b) * rhs[b];
            return coeffs;
        }
        cur = cur * m;
    }
}

// Resultant of f and g by Sylvester determinant.
inline Rat resultant(const std::vector<Rat>& f, const std::vector<Rat>& g) {
    int df = static_cast<int>(f.size()) - 1, dg = static_cast<int>(g.size()) - 1;
    int n = df + dg;
    if (n == 0) return Rat(1);
    RationalMatrix s(n);
    for (int r = 0; r < dg; ++r)
        for (int c = 0; c <= df; ++c) s(r, r + c) = f[df - c];
    for (int r = 0; r < df; ++r)
        for (int c = 0; c <= dg; ++c) s(dg + r, r + c) = g[dg - c];
    return det(s);
}

inline Rat poly_discriminant(const std::vector<Rat>& f) {
    int d = static_cast<int>(f.size()) - 1;
    if (d < 1) throw std::invalid_argument("poly_discriminant: constant polynomial");
    if (d == 1) return Rat(1);
    std::vector<Rat> fp(d);
    for (int i = 1; i <= d; ++i) fp[i - 1] = f[i] * i;
    Rat res = resultant(f, fp);
    Rat sign = (static_cast<int64_t>(d) * (d - 1) / 2) % 2 == 0 ? Rat(1) : Rat(-1);
    return sign * res / f[d];
}

inline BadPrimesReport bad_primes(const AlgebraElement& alpha, const AlgebraSpec& spec,
                                  int digit_guard = 120) {
    if (lattice_denominator(alpha, spec) != 1)
        throw std::invalid_argument("bad_primes: element not integral; lift first");
    RationalMatrix left(spec.dim);
    for (int j = 0; j < spec.dim; ++j) {
        AlgebraElement ej(spec.dim, Rat(0));
        ej[j] = 1;
        AlgebraElement col = spec.multiply(alpha, ej);
        for (int i = 0; i < spec.dim; ++i) left(i, j) = col[i];
    }
    BadPrimesReport rep;
    rep.min_poly = minimal_polynomial(left);
    rep.log_norm = 0.5 * std::log(std::max(1.0, to_double(spec.norm_squared(alpha))));
    int deg = static_cast<int>(rep.min_poly.size()) - 1;
    if (deg < spec.degree) {
        rep.degenerate = true;
        return rep;
    }
    Rat disc = poly_discriminant(rep.min_poly);
    if (disc == 0) {
        rep.degenerate = true;
        return rep;
    }
    if (!is_integral(disc))
        throw std::logic_error("bad_primes: non-integral discriminant for integral element");
    rep.discriminant = numerator(disc);
    Int n = rep.discriminant < 0 ? Int(-rep.discriminant) : rep.discriminant;
    std::set<Int> primes;
    Rng rng(0x9d1fu);
    detail::factor_into(n, primes, rng, digit_guard);
    rep.primes.assign(primes.begin(), primes.end());
    return rep;
}

}  // namespace heckelab
