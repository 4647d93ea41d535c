#pragma once

#include <heckelab/rational.hpp>

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <utility>
#include <vector>

namespace heckelab {

// Dense square matrix over an exact scalar type.
template <typename T>
class SquareMatrix {
public:
    SquareMatrix() : dim_(0) {}
    explicit SquareMatrix(int dim, const T& fill = T(0)) : dim_(dim), e_(dim * dim, fill) {
        if (dim <= 0) throw std::invalid_argument("SquareMatrix: dim must be positive");
    }

    static SquareMatrix identity(int dim) {
        SquareMatrix m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = T(1);
        return m;
    }

    int dim() const { return dim_; }
    T& operator()(int i, int j) { return e_[i * dim_ + j]; }
    const T& operator()(int i, int j) const { return e_[i * dim_ + j]; }

    bool operator==(const SquareMatrix& o) const { return dim_ == o.dim_ && e_ == o.e_; }
    bool operator!=(const SquareMatrix& o) const { return !(*this == o); }
    bool operator<(const SquareMatrix& o) const {
        if (dim_ != o.dim_) return dim_ < o.dim_;
        return e_ < o.e_;
    }

    SquareMatrix operator*(const SquareMatrix& o) const {
        if (dim_ != o.dim_) throw std::invalid_argument("matrix product: dim mismatch");
        SquareMatrix r(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int k = 0; k < dim_; ++k) {
                const T& a = (*this)(i, k);
                if (a == T(0)) continue;
                for (int j = 0; j < dim_; ++j) r(i, j) += a * o(k, j);
            }
        return r;
    }

    SquareMatrix operator+(const SquareMatrix& o) const {
        SquareMatrix r(dim_);
        for (int i = 0; i < dim_ * dim_; ++i) r.e_[i] = e_[i] + o.e_[i];
        return r;
    }

    SquareMatrix scaled(const T& c) const {
        SquareMatrix r(dim_);
        for (int i = 0; i < dim_ * dim_; ++i) r.e_[i] = e_[i] * c;
        return r;
    }

    const std::vector<T>& entries() const { return e_; }
    std::vector<T>& entries() { return e_; }

private:
    int dim_;
    std::vector<T> e_;
};

using RationalMatrix = SquareMatrix<Rat>;
using IntegerMatrix = SquareMatrix<Int>;

// lcm of the entry denominators; 1 iff the matrix is integral.
inline Int denom_matrix(const RationalMatrix& g) {
    Int m = 1;
    for (const Rat& x : g.entries()) m = lcm_int(m, denom_rational(x));
    return m;
}

template <typename T>
SquareMatrix<T> transpose(const SquareMatrix<T>& m) {
    SquareMatrix<T> r(m.dim());
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) r(j, i) = m(i, j);
    return r;
}

inline Rat det(const RationalMatrix& m) {
    int n = m.dim();
    RationalMatrix a = m;
    Rat d = 1;
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (a(r, c) != 0) {
                piv = r;
                break;
            }
        if (piv < 0) return Rat(0);
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(c, j));
            d = -d;
        }
        d *= a(c, c);
        Rat inv = 1 / a(c, c);
        for (int r = c + 1; r < n; ++r) {
            if (a(r, c) == 0) continue;
            Rat f = a(r, c) * inv;
            for (int j = c; j < n; ++j) a(r, j) -= f * a(c, j);
        }
    }
    return d;
}

inline Int det(const IntegerMatrix& m) {
    RationalMatrix q(m.dim());
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) q(i, j) = Rat(m(i, j));
    Rat d = det(q);
    return numerator(d);
}

inline RationalMatrix inverse(const RationalMatrix& m) {
    int n = m.dim();
    RationalMatrix a = m;
    RationalMatrix inv = RationalMatrix::identity(n);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (a(r, c) != 0) {
                piv = r;
                break;
            }
        if (piv < 0) throw std::domain_error("inverse: singular matrix");
        if (piv != c)
            for (int j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(c, j));
                std::swap(inv(piv, j), inv(c, j));
            }
        Rat f = 1 / a(c, c);
        for (int j = 0; j < n; ++j) {
            a(c, j) *= f;
            inv(c, j) *= f;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c || a(r, c) == 0) continue;
            Rat g = a(r, c);
            for (int j = 0; j < n; ++j) {
                a(r, j) -= g * a(c, j);
                inv(r, j) -= g * inv(c, j);
            }
        }
    }
    return inv;
}

// Row-operation Hermite normal form: M = U * H with U unimodular and H
// upper triangular, positive diagonal, entries above each pivot reduced
// into [0, pivot). Deterministic canonical form of the row span.
inline std::pair<IntegerMatrix, IntegerMatrix> hermite_normal_form(const IntegerMatrix& m) {
    int n = m.dim();
    if (det(m) == 0) throw std::domain_error("hermite_normal_form: singular matrix");
    IntegerMatrix h = m;
    IntegerMatrix v = IntegerMatrix::identity(n);  // v * m = h throughout
    for (int c = 0; c < n; ++c) {
        // Clear entries below the pivot with Euclidean row steps.
        for (int r = c + 1; r < n; ++r) {
            while (h(r, c) != 0) {
                if (h(c, c) == 0 || (h(r, c) != 0 && abs(h(r, c)) < abs(h(c, c)))) {
                    for (int j = 0; j < n; ++j) {
                        std::swap(h(c, j), h(r, j));
                        std::swap(v(c, j), v(r, j));
                    }
                }
                if (h(r, c) == 0) break;
                Int q = h(r, c) / h(c, c);
                for (int j = 0; j < n; ++j) {
                    h(r, j) -= q * h(c, j);
                    v(r, j) -= q * v(c, j);
                }
            }
        }
        if (h(c, c) < 0) {
            for (int j = 0; j < n; ++j) {
                h(c, j) = -h(c, j);
                v(c, j) = -v(c, j);
            }
        }
        // Reduce the entries above the pivot.
        for (int r = 0; r < c; ++r) {
            Int q = h(r, c) >= 0 ? Int(h(r, c) / h(c, c))
                                 : Int(-((-h(r, c) + h(c, c) - 1) / h(c, c)));
            if (q == 0) continue;
            for (int j = 0; j < n; ++j) {
                h(r, j) -= q * h(c, j);
                v(r, j) -= q * v(c, j);
            }
        }
    }
    // M = U H with U = V^{-1}; invert the unimodular V exactly.
    RationalMatrix vq(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) vq(i, j) = Rat(v(i, j));
    RationalMatrix uq = inverse(vq);
    IntegerMatrix u(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (!is_integral(uq(i, j))) throw std::logic_error("hnf: non-integral inverse");
            u(i, j) = numerator(uq(i, j));
        }
    return {h, u};
}

// Exact rank of a family of rational row vectors (fraction-free after
// clearing denominators).
inline int rank_over_Q(const std::vector<std::vector<Rat>>& vectors) {
    if (vectors.empty()) return 0;
    size_t cols = vectors[0].size();
    for (const auto& v : vectors)
        if (v.size() != cols) throw std::invalid_argument("rank_over_Q: length mismatch");
    std::vector<std::vector<Int>> rows;
    rows.reserve(vectors.size());
    for (const auto& v : vectors) {
        Int m = 1;
        for (const Rat& x : v) m = lcm_int(m, denom_rational(x));
        std::vector<Int> r(cols);
        for (size_t j = 0; j < cols; ++j) r[j] = numerator(Rat(v[j] * m));
        rows.push_back(std::move(r));
    }
    int rank = 0;
    size_t col = 0;
    size_t nrows = rows.size();
    // Bareiss-style elimination; previous pivot divides exactly.
    Int prev = 1;
    while (rank < static_cast<int>(nrows) && col < cols) {
        int piv = -1;
        for (size_t r = rank; r < nrows; ++r)
            if (rows[r][col] != 0) {
                piv = static_cast<int>(r);
                break;
            }
        if (piv < 0) {
            ++col;
            continue;
        }
        std::swap(rows[rank], rows[piv]);
        for (size_t r = rank + 1; r < nrows; ++r) {
            for (size_t j = col + 1; j < cols; ++j)
                rows[r][j] = (rows[rank][col] * rows[r][j] - rows[r][col] * rows[rank][j]) / prev;
            rows[r][col] = 0;
        }
        prev = rows[rank][col];
        ++rank;
        ++col;
    }
    return rank;
}

// JSON wire format: matrices as arrays of arrays of "num/den" strings.
inline nlohmann::ordered_json matrix_to_json(const RationalMatrix& m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int i = 0; i < m.dim(); ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (int j = 0; j < m.dim(); ++j) row.push_back(rat_to_string(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

inline RationalMatrix matrix_from_json(const nlohmann::json& j) {
    int n = static_cast<int>(j.size());
    RationalMatrix m(n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(j[i].size()) != n)
            throw std::invalid_argument("matrix_from_json: not square");
        for (int k = 0; k < n; ++k) m(i, k) = rat_from_string(j[i][k].get<std::string>());
    }
    return m;
}

inline nlohmann::ordered_json matrix_to_json(const IntegerMatrix& m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int i = 0; i < m.dim(); ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (int j = 0; j < m.dim(); ++j) row.push_back(m(i, j).str());
        rows.push_back(row);
    }
    return rows;
}

}  // namespace heckelab
