#pragma once

#include <heckelab/matrix.hpp>
#include <heckelab/rational.hpp>
#include <heckelab/rng.hpp>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace heckelab {

// ---------------------------------------------------------------------------
// Finite metric-measure model: exact distances, exact probability measure.
// ---------------------------------------------------------------------------
struct FiniteModel {
    int n = 0;
    std::vector<std::vector<Rat>> dist;  // full symmetric matrix
    std::vector<Rat> measure;

    void validate() const {
        if (static_cast<int>(dist.size()) != n || static_cast<int>(measure.size()) != n)
            throw std::invalid_argument("FiniteModel: size mismatch");
        Rat total = 0;
        for (const Rat& m : measure) {
            if (m < 0) throw std::invalid_argument("FiniteModel: negative measure");
            total += m;
        }
        if (total != 1) throw std::invalid_argument("FiniteModel: measure must sum to 1");
        for (int i = 0; i < n; ++i) {
            if (dist[i][i] != 0) throw std::invalid_argument("FiniteModel: nonzero diagonal");
            for (int j = 0; j < n; ++j) {
                if (dist[i][j] != dist[j][i])
                    throw std::invalid_argument("FiniteModel: asymmetric metric");
                if (i != j && dist[i][j] <= 0)
                    throw std::invalid_argument("FiniteModel: non-positive distance");
                for (int k = 0; k < n; ++k)
                    if (dist[i][j] > dist[i][k] + dist[k][j])
                        throw std::invalid_argument("FiniteModel: triangle inequality fails");
            }
        }
    }
};

// Balls at radii r0, 2 r0, 4 r0, 6 r0; the product sets of the group-side
// statement become radius doublings on the metric side.
struct BallFamily {
    Rat r0;
    std::vector<std::vector<int>> b0, b, b2, b3;
    Rat mult30;  // max |B3| / min |B0|

    static BallFamily build(const FiniteModel& model, const Rat& r0) {
        BallFamily f;
        f.r0 = r0;
        auto fill = [&](std::vector<std::vector<int>>& out, const Rat& r) {
            out.assign(model.n, {});
            for (int x = 0; x < model.n; ++x)
                for (int y = 0; y < model.n; ++y)
                    if (model.dist[x][y] <= r) out[x].push_back(y);
        };
        fill(f.b0, r0);
        fill(f.b, r0 * 2);
        fill(f.b2, r0 * 4);
        fill(f.b3, r0 * 6);
        size_t min0 = f.b0[0].size(), max3 = f.b3[0].size();
        for (int x = 0; x < model.n; ++x) {
            min0 = std::min(min0, f.b0[x].size());
            max3 = std::max(max3, f.b3[x].size());
        }
        f.mult30 = Rat(Int(max3), Int(min0));
        return f;
    }
};

inline bool sets_intersect(const std::vector<int>& a, const std::vector<int>& b) {
    // inputs sorted ascending by construction
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return true;
        if (a[i] < b[j]) ++i; else ++j;
    }
    return false;
}

inline Rat set_measure(const FiniteModel& model, const std::vector<int>& s) {
    Rat acc = 0;
    for (int x : s) acc += model.measure[x];
    return acc;
}

// ---------------------------------------------------------------------------
// Greedy maximal packing of disjoint B0 balls; maximality forces the B-balls
// of the chosen centers to cover, with packing-bounded multiplicity.
// ---------------------------------------------------------------------------
struct CoverResult {
    std::vector<int> centers;
    bool covers = false;
    int max_multiplicity = 0;  // centers met by one zB
    double mult30 = 0;
    bool multiplicity_ok = false;
};

inline CoverResult maximal_separated_cover(const FiniteModel& model, const BallFamily& fam) {
    CoverResult res;
    for (int x = 0; x < model.n; ++x) {
        bool disjoint = true;
        for (int c : res.centers)
            if (sets_intersect(fam.b0[x], fam.b0[c])) {
                disjoint = false;
                break;
            }
        if (disjoint) res.centers.push_back(x);
    }
    res.covers = true;
    for (int z = 0; z < model.n; ++z) {
        bool hit = false;
        int met = 0;
        for (int c : res.centers) {
            if (model.dist[z][c] <= fam.r0 * 2) hit = true;
            if (sets_intersect(fam.b[z], fam.b[c])) ++met;
        }
        if (!hit) res.covers = false;
        res.max_multiplicity = std::max(res.max_multiplicity, met);
    }
    res.mult30 = to_double(fam.mult30);
    res.multiplicity_ok = Rat(res.max_multiplicity) <= fam.mult30;
    return res;
}

// ---------------------------------------------------------------------------
// Square-root covering inequality:
//   sum_i nu(B(y_i))^{1/2}  <=  mult30 * sqrt(#{(i,j): B2(y_i) n B2(y_j) != 0})
// The right side constant comes out of the packing proof with constant 1.
// ---------------------------------------------------------------------------
struct Cov2Result {
    double lhs = 0;
    double rhs = 0;
    int64_t pair_count = 0;
    bool ok = false;
};

inline Cov2Result cov2_check(const FiniteModel& model, const std::vector<int>& ys,
                             const BallFamily& fam) {
    Cov2Result res;
    for (int y : ys) res.lhs += std::sqrt(to_double(set_measure(model, fam.b[y])));
    for (int yi : ys)
        for (int yj : ys)
            if (sets_intersect(fam.b2[yi], fam.b2[yj])) ++res.pair_count;
    res.rhs = to_double(fam.mult30) * std::sqrt(static_cast<double>(res.pair_count));
    res.ok = res.lhs <= res.rhs + 1e-9;
    return res;
}

// ---------------------------------------------------------------------------
// Correspondences: weighted sums of measure-preserving isometries with an
// eigenfunction attached.
// ---------------------------------------------------------------------------
struct Correspondence {
    std::vector<std::vector<int>> arrows;  // each a permutation of the points
    std::vector<std::complex<double>> weights;
    std::vector<std::complex<double>> psi;
    std::complex<double> lambda = 0;

    // Max pointwise residual of lambda psi(x) = sum_s h_s psi(x.s).
    double eigen_residual() const {
        double worst = 0, scale = std::abs(lambda);
        for (const auto& v : psi) scale = std::max(scale, std::abs(v));
        for (size_t x = 0; x < psi.size(); ++x) {
            std::complex<double> acc = 0;
            for (size_t s = 0; s < arrows.size(); ++s) acc += weights[s] * psi[arrows[s][x]];
            worst = std::max(worst, std::abs(acc - lambda * psi[x]));
        }
        return worst / std::max(scale, 1e-300);
    }

    void validate(const FiniteModel& model, double tol = 1e-12) const {
        for (const auto& w : weights)
            if (std::abs(w) > 1 + 1e-12)
                throw std::invalid_argument("Correspondence: |h_s| must be <= 1");
        for (const auto& perm : arrows) {
            std::vector<char> seen(model.n, 0);
            for (int v : perm) {
                if (v < 0 || v >= model.n || seen[v])
                    throw std::invalid_argument("Correspondence: arrow not a permutation");
                seen[v] = 1;
            }
            for (int x = 0; x < model.n; ++x) {
                if (model.measure[perm[x]] != model.measure[x])
                    throw std::invalid_argument("Correspondence: not measure preserving");
                for (int y = 0; y < model.n; ++y)
                    if (model.dist[perm[x]][perm[y]] != model.dist[x][y])
                        throw std::invalid_argument("Correspondence: not an isometry");
            }
        }
        if (eigen_residual() > tol)
            throw std::invalid_argument("Correspondence: eigen identity residual too large");
    }
};

// mu_psi(E) = sum_{x in E} |psi(x)|^2 nu(x), normalized to a probability.
inline double eigen_mass(const FiniteModel& model, const Correspondence& corr,
                         const std::vector<int>& set) {
    double total = 0, part = 0;
    for (int x = 0; x < model.n; ++x)
        total += std::norm(corr.psi[x]) * to_double(model.measure[x]);
    for (int x : set) part += std::norm(corr.psi[x]) * to_double(model.measure[x]);
    if (total == 0) throw std::invalid_argument("eigen_mass: zero eigenfunction");
    return part / total;
}

struct MassBoundResult {
    double mass = 0;
    double bound = 0;
    int64_t pair_count = 0;
    bool lambda_zero = false;
    bool ok = false;
};

// mu_psi(xB) * |Lambda|^2 <= mult30^2 * #{(s,s'): (xB2)s n (xB2)s' != 0}.
// Triangle inequality in L^2 plus the covering inequality, constant 1.
inline MassBoundResult mass_bound_check(const FiniteModel& model, const Correspondence& corr,
                                        int x, const BallFamily& fam) {
    MassBoundResult res;
    res.mass = eigen_mass(model, corr, fam.b[x]);
    double lam2 = std::norm(corr.lambda);
    if (lam2 == 0) {
        res.lambda_zero = true;
        return res;
    }
    size_t S = corr.arrows.size();
    std::vector<std::vector<int>> translated(S);
    for (size_t s = 0; s < S; ++s) {
        for (int z : fam.b2[x]) translated[s].push_back(corr.arrows[s][z]);
        std::sort(translated[s].begin(), translated[s].end());
    }
    for (size_t s = 0; s < S; ++s)
        for (size_t t = 0; t < S; ++t)
            if (sets_intersect(translated[s], translated[t])) ++res.pair_count;
    double m30 = to_double(fam.mult30);
    res.bound = m30 * m30 / lam2 * static_cast<double>(res.pair_count);
    res.ok = res.mass <= res.bound + 1e-9;
    return res;
}

struct IntersectionProfile {
    int64_t pairs_total = 0;
    double per_s_average = 0;
    int64_t worst_case = 0;
};

inline IntersectionProfile average_intersection_profile(const FiniteModel& model, int x,
                                                        const BallFamily& fam,
                                                        const std::vector<std::vector<int>>& S) {
    IntersectionProfile prof;
    std::vector<std::vector<int>> translated(S.size());
    for (size_t s = 0; s < S.size(); ++s) {
        for (int z : fam.b2[x]) translated[s].push_back(S[s][z]);
        std::sort(translated[s].begin(), translated[s].end());
    }
    for (size_t s = 0; s < S.size(); ++s) {
        int64_t row = 0;
        for (size_t t = 0; t < S.size(); ++t)
            if (sets_intersect(translated[s], translated[t])) ++row;
        prof.pairs_total += row;
        prof.worst_case = std::max(prof.worst_case, row);
    }
    prof.per_s_average =
        S.empty() ? 0.0 : static_cast<double>(prof.pairs_total) / static_cast<double>(S.size());
    return prof;
}

// ---------------------------------------------------------------------------
// Ball-mass decay: fit log mass against log radius; positive slope expected
// for spread-out eigenfunctions.
// ---------------------------------------------------------------------------
struct DecayRow {
    double eps;
    double mass;
};

struct DecayResult {
    std::vector<DecayRow> table;
    double exponent = 0;
    bool degenerate = false;
};

inline DecayResult tube_decay_experiment(const FiniteModel& model, const Correspondence& corr,
                                         int x, const std::vector<Rat>& radii) {
    DecayResult res;
    std::vector<double> lx, ly;
    for (const Rat& r : radii) {
        std::vector<int> ball;
        for (int y = 0; y < model.n; ++y)
            if (model.dist[x][y] <= r) ball.push_back(y);
        double m = eigen_mass(model, corr, ball);
        res.table.push_back({to_double(r), m});
        if (m > 0 && m < 1) {
            lx.push_back(std::log(to_double(r)));
            ly.push_back(std::log(m));
        }
    }
    if (lx.size() < 2) {
        res.degenerate = true;
        return res;
    }
    double mx = 0, my = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0) {
        res.degenerate = true;
        return res;
    }
    res.exponent = sxy / sxx;
    return res;
}

// ---------------------------------------------------------------------------
// Model generators.
// ---------------------------------------------------------------------------

// Random integer grid points under the L1 metric, random rational measure.
inline FiniteModel random_l1_model(Rng& rng, int n, int grid = 50, int dim = 3) {
    FiniteModel m;
    m.n = n;
    std::vector<std::vector<int64_t>> pts;
    std::set<std::vector<int64_t>> seen;
    while (static_cast<int>(pts.size()) < n) {
        std::vector<int64_t> p(dim);
        for (auto& c : p) c = rng.range(0, grid - 1);
        if (seen.insert(p).second) pts.push_back(p);
    }
    m.dist.assign(n, std::vector<Rat>(n, Rat(0)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int64_t acc = 0;
            for (int k = 0; k < dim; ++k) acc += std::abs(pts[i][k] - pts[j][k]);
            m.dist[i][j] = Rat(acc);
        }
    std::vector<Int> w(n);
    Int total = 0;
    for (int i = 0; i < n; ++i) {
        w[i] = 1 + rng.below(100);
        total += w[i];
    }
    m.measure.resize(n);
    for (int i = 0; i < n; ++i) m.measure[i] = Rat(w[i], total);
    return m;
}

// Z/N with the circular metric, uniform measure; rotations are isometries.
inline FiniteModel cycle_model(int n) {
    FiniteModel m;
    m.n = n;
    m.dist.assign(n, std::vector<Rat>(n, Rat(0)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int64_t d = std::abs(i - j);
            m.dist[i][j] = Rat(std::min(d, n - d));
        }
    m.measure.assign(n, Rat(1, n));
    return m;
}

inline std::vector<int> rotation_permutation(int n, int shift) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = (i + shift % n + n) % n;
    return perm;
}

// Character eigenfunction for a circulant correspondence on Z/N: the exact
// spectrum of sum_s h_s (rotation by s).
inline Correspondence circulant_correspondence(int n, const std::vector<int>& shifts,
                                               const std::vector<std::complex<double>>& weights,
                                               int character) {
    Correspondence corr;
    corr.weights = weights;
    for (int s : shifts) corr.arrows.push_back(rotation_permutation(n, s));
    for (int x = 0; x < n; ++x)
        corr.psi.push_back(std::polar(1.0, 2.0 * M_PI * character * x / n));
    corr.lambda = 0;
    for (size_t i = 0; i < shifts.size(); ++i)
        corr.lambda += weights[i] * std::polar(1.0, 2.0 * M_PI * character * shifts[i] / n);
    return corr;
}

// Hypercube {0,1}^k with the Hamming metric; bit flips are isometric
// involutions and the +-1 characters are exact eigenfunctions.
inline FiniteModel hypercube_model(int k) {
    FiniteModel m;
    m.n = 1 << k;
    m.dist.assign(m.n, std::vector<Rat>(m.n, Rat(0)));
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j)
            m.dist[i][j] = Rat(__builtin_popcount(static_cast<unsigned>(i ^ j)));
    m.measure.assign(m.n, Rat(1, m.n));
    return m;
}

inline Correspondence hypercube_correspondence(int k, const std::vector<int>& bits,
                                               const std::vector<std::complex<double>>& weights,
                                               unsigned character_mask) {
    Correspondence corr;
    corr.weights = weights;
    int n = 1 << k;
    for (int b : bits) {
        std::vector<int> perm(n);
        for (int x = 0; x < n; ++x) perm[x] = x ^ (1 << b);
        corr.arrows.push_back(perm);
    }
    for (int x = 0; x < n; ++x) {
        int sign = __builtin_popcount(static_cast<unsigned>(x) & character_mask) % 2 ? -1 : 1;
        corr.psi.push_back(static_cast<double>(sign));
    }
    corr.lambda = 0;
    for (size_t i = 0; i < bits.size(); ++i) {
        int sign = (character_mask >> bits[i]) & 1u ? -1 : 1;
        corr.lambda += weights[i] * static_cast<double>(sign);
    }
    return corr;
}

// Dense symmetric eigensolve of H = sum_s h_s P_s for real weights: every
// eigenpair satisfies the correspondence identity by definition; the
// residual is certified before use.
inline std::vector<Correspondence> dense_eigen_correspondences(
    const FiniteModel& model, const std::vector<std::vector<int>>& arrows,
    const std::vector<double>& weights, double residual_tol = 1e-12) {
    int n = model.n;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (size_t s = 0; s < arrows.size(); ++s)
        for (int x = 0; x < n; ++x) h(arrows[s][x], x) += weights[s];
    if (!h.isApprox(h.transpose(), 1e-14))
        throw std::invalid_argument("dense_eigen_correspondences: operator not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("dense_eigen_correspondences: eigensolve failed");
    std::vector<Correspondence> out;
    for (int k = 0; k < n; ++k) {
        Correspondence corr;
        corr.arrows = arrows;
        for (double w : weights) corr.weights.emplace_back(w, 0.0);
        corr.lambda = solver.eigenvalues()(k);
        for (int x = 0; x < n; ++x) corr.psi.emplace_back(solver.eigenvectors()(x, k), 0.0);
        if (corr.eigen_residual() > residual_tol)
            throw std::runtime_error("dense_eigen_correspondences: residual too large");
        out.push_back(std::move(corr));
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON wire format: {n, dist: lower triangle of "num/den", measure,
// translates: permutation arrays}.
// ---------------------------------------------------------------------------
inline nlohmann::ordered_json model_to_json(const FiniteModel& m,
                                            const std::vector<std::vector<int>>& translates = {}) {
    nlohmann::ordered_json j;
    j["n"] = m.n;
    nlohmann::ordered_json tri = nlohmann::ordered_json::array();
    for (int i = 0; i < m.n; ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (int k = 0; k < i; ++k) row.push_back(rat_to_string(m.dist[i][k]));
        tri.push_back(row);
    }
    j["dist"] = tri;
    nlohmann::ordered_json meas = nlohmann::ordered_json::array();
    for (const Rat& x : m.measure) meas.push_back(rat_to_string(x));
    j["measure"] = meas;
    j["translates"] = translates;
    return j;
}

inline FiniteModel model_from_json(const nlohmann::json& j,
                                   std::vector<std::vector<int>>* translates = nullptr) {
    FiniteModel m;
    m.n = j.at("n").get<int>();
    m.dist.assign(m.n, std::vector<Rat>(m.n, Rat(0)));
    const auto& tri = j.at("dist");
    for (int i = 0; i < m.n; ++i)
        for (int k = 0; k < i; ++k) {
            Rat v = rat_from_string(tri[i][k].get<std::string>());
            m.dist[i][k] = v;
            m.dist[k][i] = v;
        }
    for (const auto& x : j.at("measure"))
        m.measure.push_back(rat_from_string(x.get<std::string>()));
    if (translates && j.contains("translates"))
        *translates = j.at("translates").get<std::vector<std::vector<int>>>();
    m.validate();
    return m;
}

}  // namespace heckelab
