#pragma once

#include <heckelab/rational.hpp>

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

namespace heckelab {

// Element of the cocharacter lattice of PGL_d: an integer d-vector modulo
// the diagonal Z(1,...,1), stored canonically with last coordinate 0.
class Cocharacter {
public:
    Cocharacter() = default;
    explicit Cocharacter(std::vector<int64_t> coords) : c_(std::move(coords)) {
        if (c_.empty()) throw std::invalid_argument("Cocharacter: empty");
        canonicalize();
    }

    int d() const { return static_cast<int>(c_.size()); }
    const std::vector<int64_t>& coords() const { return c_; }
    int64_t operator[](int i) const { return c_[i]; }

    bool is_zero() const {
        for (int64_t x : c_)
            if (x != 0) return false;
        return true;
    }

    bool is_dominant() const {
        for (size_t i = 0; i + 1 < c_.size(); ++i)
            if (c_[i] < c_[i + 1]) return false;
        return true;
    }

    bool operator==(const Cocharacter& o) const { return c_ == o.c_; }
    bool operator!=(const Cocharacter& o) const { return c_ != o.c_; }
    bool operator<(const Cocharacter& o) const { return c_ < o.c_; }

private:
    void canonicalize() {
        int64_t last = c_.back();
        for (auto& x : c_) x -= last;
    }
    std::vector<int64_t> c_;
};

inline Cocharacter zero_cocharacter(int d) {
    return Cocharacter(std::vector<int64_t>(d, 0));
}

inline Cocharacter dominant_representative(const Cocharacter& c) {
    std::vector<int64_t> v = c.coords();
    std::sort(v.begin(), v.end(), std::greater<int64_t>());
    return Cocharacter(std::move(v));
}

inline std::set<Cocharacter> weyl_orbit(const Cocharacter& c) {
    std::vector<int64_t> v = c.coords();
    std::sort(v.begin(), v.end());
    std::set<Cocharacter> orbit;
    do {
        orbit.insert(Cocharacter(v));
    } while (std::next_permutation(v.begin(), v.end()));
    return orbit;
}

// Exact squared norm of the W-invariant form normalized so that each type-A
// root coweight e_i - e_j has squared norm 1: |c|^2 = (1/2) sum (x_i - xbar)^2.
inline Rat cochar_norm_squared(const Cocharacter& c) {
    int d = c.d();
    Int sum = 0;
    for (int64_t x : c.coords()) sum += x;
    Rat mean(sum, d);
    Rat acc = 0;
    for (int64_t x : c.coords()) {
        Rat dev = Rat(x) - mean;
        acc += dev * dev;
    }
    return acc / 2;
}

inline double cochar_norm(const Cocharacter& c) {
    return std::sqrt(to_double(cochar_norm_squared(c)));
}

// <2 rho, c> as a linear functional: sum (d+1-2i) x_i, i = 1..d.  The
// coefficients sum to zero, so this is well defined on the PGL quotient
// and W-invariant only after passing to the dominant representative.
inline int64_t two_rho_pairing_raw(const std::vector<int64_t>& coords) {
    int d = static_cast<int>(coords.size());
    int64_t acc = 0;
    for (int i = 0; i < d; ++i) acc += static_cast<int64_t>(d - 1 - 2 * i) * coords[i];
    return acc;
}

inline int64_t two_rho_pairing(const Cocharacter& c) {
    return two_rho_pairing_raw(dominant_representative(c).coords());
}

// Twice the coroot of a maximal-length root, scaled so that |a| = 4 under the
// length-1 root normalization: coordinates (4, 0, ..., 0, -4).
inline Cocharacter amplifier_base_point(int d) {
    if (d < 2) throw std::invalid_argument("amplifier_base_point: d >= 2 required");
    std::vector<int64_t> v(d, 0);
    v.front() = 4;
    v.back() = -4;
    Cocharacter a(std::move(v));
    if (cochar_norm_squared(a) != 16)
        throw std::logic_error("amplifier_base_point: norm checksum failed");
    return a;
}

inline Cocharacter cochar_scale(const Cocharacter& c, int64_t k) {
    std::vector<int64_t> v = c.coords();
    for (auto& x : v) x *= k;
    return Cocharacter(std::move(v));
}

inline Cocharacter cochar_add(const Cocharacter& a, const Cocharacter& b) {
    std::vector<int64_t> v = a.coords();
    for (size_t i = 0; i < v.size(); ++i) v[i] += b.coords()[i];
    return Cocharacter(std::move(v));
}

}  // namespace heckelab
