#ifndef QLAT_MATRIX_HPP
#define QLAT_MATRIX_HPP

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "core.hpp"

namespace qlat {

namespace detail {

inline void mul_acc(i64& acc, i64 a, i64 b) { acc = checked_add(acc, checked_mul(a, b)); }

template <class T>
void mul_acc(T& acc, const T& a, const T& b) {
    acc += a * b;
}

}  // namespace detail

/// Dense row-major matrix. Basis matrices store vectors as columns.
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0))
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(std::initializer_list<std::initializer_list<T>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& r : init) {
            if (r.size() != cols_) throw std::invalid_argument("ragged matrix initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    static Matrix from_columns(const std::vector<std::vector<T>>& cols, std::size_t rows) {
        Matrix m(rows, cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (cols[j].size() != rows) throw std::invalid_argument("column length mismatch");
            for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::vector<T> column(std::size_t j) const {
        std::vector<T> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    void set_column(std::size_t j, const std::vector<T>& c) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
    }

    const std::vector<T>& data() const { return data_; }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    bool is_symmetric() const {
        if (rows_ != cols_) return false;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j)
                if ((*this)(i, j) != (*this)(j, i)) return false;
        return true;
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
    }

    void swap_cols(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product dimension mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T& aik = a(i, k);
                if (aik == T(0)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) detail::mul_acc(c(i, j), aik, b(k, j));
            }
        return c;
    }

    friend std::vector<T> operator*(const Matrix& a, const std::vector<T>& x) {
        if (a.cols_ != x.size()) throw std::invalid_argument("matrix-vector dimension mismatch");
        std::vector<T> y(a.rows_, T(0));
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < a.cols_; ++j) detail::mul_acc(y[i], a(i, j), x[j]);
        return y;
    }

    friend std::ostream& operator<<(std::ostream& os, const Matrix& m) {
        for (std::size_t i = 0; i < m.rows_; ++i) {
            for (std::size_t j = 0; j < m.cols_; ++j) os << (j ? " " : "") << m(i, j);
            os << '\n';
        }
        return os;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using IntMatrix = Matrix<i64>;
using BigMatrix = Matrix<Int>;
using RatMatrix = Matrix<Rational>;

inline BigMatrix to_big(const IntMatrix& m) {
    BigMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = to_int(m(i, j));
    return r;
}

inline IntMatrix to_small(const BigMatrix& m) {
    IntMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = to_i64(m(i, j));
    return r;
}

inline RatMatrix to_rational(const BigMatrix& m) {
    RatMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Rational(m(i, j));
    return r;
}

inline RatMatrix to_rational(const IntMatrix& m) { return to_rational(to_big(m)); }

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
    T s(0);
    for (std::size_t i = 0; i < a.size(); ++i) detail::mul_acc(s, a[i], b[i]);
    return s;
}

/// x^T M y.
template <class T>
T bilinear(const Matrix<T>& m, const std::vector<T>& x, const std::vector<T>& y) {
    return dot(x, m * y);
}

/// Determinant by fraction-free (Bareiss) elimination.
inline Int determinant(BigMatrix a) {
    const std::size_t n = a.rows();
    if (n != a.cols()) throw std::invalid_argument("determinant of non-square matrix");
    if (n == 0) return Int(1);
    Int sign = 1;
    Int prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t piv = k + 1;
            while (piv < n && a(piv, k) == 0) ++piv;
            if (piv == n) return Int(0);
            a.swap_rows(k, piv);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Int v = a(i, j) * a(k, k) - a(i, k) * a(k, j);
                mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
                a(i, j) = v;
            }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

inline Int determinant(const IntMatrix& a) { return determinant(to_big(a)); }

inline Rational determinant(RatMatrix a) {
    const std::size_t n = a.rows();
    Rational det = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && a(piv, k) == 0) ++piv;
        if (piv == n) return Rational(0);
        if (piv != k) {
            a.swap_rows(k, piv);
            det = -det;
        }
        det *= a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a(i, k) == 0) continue;
            Rational f = a(i, k) / a(k, k);
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return det;
}

/// Rank over Q.
inline std::size_t rank(RatMatrix a) {
    std::size_t r = 0;
    for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
        std::size_t piv = r;
        while (piv < a.rows() && a(piv, c) == 0) ++piv;
        if (piv == a.rows()) continue;
        a.swap_rows(r, piv);
        for (std::size_t i = r + 1; i < a.rows(); ++i) {
            if (a(i, c) == 0) continue;
            Rational f = a(i, c) / a(r, c);
            for (std::size_t j = c; j < a.cols(); ++j) a(i, j) -= f * a(r, j);
        }
        ++r;
    }
    return r;
}

inline std::size_t rank(const BigMatrix& a) { return rank(to_rational(a)); }

/// Inverse over Q; throws on singular input.
inline RatMatrix inverse(const RatMatrix& m) {
    const std::size_t n = m.rows();
    RatMatrix a = m;
    RatMatrix inv = RatMatrix::identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && a(piv, c) == 0) ++piv;
        if (piv == n) throw std::domain_error("inverse of singular matrix");
        a.swap_rows(c, piv);
        inv.swap_rows(c, piv);
        Rational d = a(c, c);
        for (std::size_t j = 0; j < n; ++j) {
            a(c, j) /= d;
            inv(c, j) /= d;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a(i, c) == 0) continue;
            Rational f = a(i, c);
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) -= f * a(c, j);
                inv(i, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

/// Row-style Hermite normal form. Returns the nonzero rows (an echelon basis of the
/// row lattice) with positive pivots and entries above each pivot reduced into [0, pivot).
/// If `transform` is given it receives a unimodular U with U * A = [H; 0].
inline BigMatrix hermite_rows(BigMatrix a, BigMatrix* transform = nullptr, std::size_t col_limit = SIZE_MAX) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    BigMatrix u = BigMatrix::identity(m);
    const std::size_t ncols = std::min(n, col_limit);
    std::size_t r = 0;
    for (std::size_t c = 0; c < ncols && r < m; ++c) {
        // Combine rows below r into row r by extended gcd steps.
        for (std::size_t i = r + 1; i < m; ++i) {
            if (a(i, c) == 0) continue;
            if (a(r, c) == 0) {
                a.swap_rows(r, i);
                u.swap_rows(r, i);
                continue;
            }
            Int g, s, t;
            mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a(r, c).get_mpz_t(), a(i, c).get_mpz_t());
            Int ar = a(r, c) / g;
            Int ai = a(i, c) / g;
            for (std::size_t j = 0; j < n; ++j) {
                Int x = a(r, j), y = a(i, j);
                a(r, j) = s * x + t * y;
                a(i, j) = ar * y - ai * x;
            }
            for (std::size_t j = 0; j < m; ++j) {
                Int x = u(r, j), y = u(i, j);
                u(r, j) = s * x + t * y;
                u(i, j) = ar * y - ai * x;
            }
        }
        if (a(r, c) == 0) continue;
        if (a(r, c) < 0) {
            for (std::size_t j = 0; j < n; ++j) a(r, j) = -a(r, j);
            for (std::size_t j = 0; j < m; ++j) u(r, j) = -u(r, j);
        }
        for (std::size_t i = 0; i < r; ++i) {
            Int q = floor_div(a(i, c), a(r, c));
            if (q == 0) continue;
            for (std::size_t j = 0; j < n; ++j) a(i, j) -= q * a(r, j);
            for (std::size_t j = 0; j < m; ++j) u(i, j) -= q * u(r, j);
        }
        ++r;
    }
    if (transform) *transform = u;
    if (col_limit != SIZE_MAX) return a;
    BigMatrix h(r, n);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = a(i, j);
    return h;
}

/// Basis (as columns) of the lattice spanned by the columns of `gens`.
inline BigMatrix column_span_basis(const BigMatrix& gens) {
    return hermite_rows(gens.transpose()).transpose();
}

/// Basis (as columns) of {x in Z^n : A x = 0}; the result is in row-HNF order.
inline BigMatrix integer_kernel(const BigMatrix& a) {
    const std::size_t k = a.rows();
    const std::size_t n = a.cols();
    BigMatrix aug(n, k + n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) aug(i, j) = a(j, i);
        aug(i, k + i) = 1;
    }
    BigMatrix red = hermite_rows(aug, nullptr, k);
    std::vector<std::vector<Int>> rows;
    for (std::size_t i = 0; i < n; ++i) {
        bool zero = true;
        for (std::size_t j = 0; j < k; ++j)
            if (red(i, j) != 0) {
                zero = false;
                break;
            }
        if (!zero) continue;
        std::vector<Int> v(n);
        for (std::size_t j = 0; j < n; ++j) v[j] = red(i, k + j);
        rows.push_back(std::move(v));
    }
    BigMatrix kr(rows.size(), n);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < n; ++j) kr(i, j) = rows[i][j];
    if (rows.empty()) return BigMatrix(n, 0);
    return hermite_rows(kr).transpose();
}

/// Elementary divisors (Smith normal form diagonal, nonzero entries, ascending).
inline std::vector<Int> elementary_divisors(BigMatrix a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    std::vector<Int> d;
    std::size_t t = 0;
    while (t < m && t < n) {
        // Smallest nonzero entry in the trailing block becomes the pivot.
        std::size_t pi = m, pj = n;
        for (std::size_t i = t; i < m; ++i)
            for (std::size_t j = t; j < n; ++j)
                if (a(i, j) != 0 && (pi == m || abs(a(i, j)) < abs(a(pi, pj)))) {
                    pi = i;
                    pj = j;
                }
        if (pi == m) break;
        a.swap_rows(t, pi);
        a.swap_cols(t, pj);
        bool clean = false;
        while (!clean) {
            clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (a(i, t) == 0) continue;
                Int q = floor_div(a(i, t), a(t, t));
                for (std::size_t j = t; j < n; ++j) a(i, j) -= q * a(t, j);
                if (a(i, t) != 0) {
                    a.swap_rows(t, i);
                    clean = false;
                }
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (a(t, j) == 0) continue;
                Int q = floor_div(a(t, j), a(t, t));
                for (std::size_t i = t; i < m; ++i) a(i, j) -= q * a(i, t);
                if (a(t, j) != 0) {
                    a.swap_cols(t, j);
                    clean = false;
                }
            }
            if (!clean) continue;
            // Pivot must divide the remaining block.
            for (std::size_t i = t + 1; i < m && clean; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (a(i, j) % a(t, t) != 0) {
                        for (std::size_t jj = t; jj < n; ++jj) a(t, jj) += a(i, jj);
                        clean = false;
                        break;
                    }
        }
        d.push_back(abs(a(t, t)));
        ++t;
    }
    std::sort(d.begin(), d.end());
    return d;
}

/// Primitive integer vector on the rational line through `v` (sign of the first nonzero entry kept).
inline std::vector<Int> primitive_integer_vector(const std::vector<Rational>& v) {
    Int den = 1;
    for (const auto& x : v) den = lcm(den, x.get_den());
    std::vector<Int> w(v.size());
    Int g = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        Rational s = v[i] * den;
        w[i] = s.get_num();
        g = gcd(g, w[i]);
    }
    if (g != 0)
        for (auto& x : w) x /= g;
    return w;
}

/// Integral basis (columns) of (span of the rational columns of `basis`) intersected with Z^n.
inline BigMatrix saturate(const RatMatrix& basis) {
    const std::size_t n = basis.rows();
    const std::size_t r = basis.cols();
    BigMatrix ints(n, r);
    for (std::size_t j = 0; j < r; ++j) {
        std::vector<Rational> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = basis(i, j);
        auto w = primitive_integer_vector(col);
        for (std::size_t i = 0; i < n; ++i) ints(i, j) = w[i];
    }
    // Annihilator of the span, then its kernel.
    BigMatrix ann = integer_kernel(ints.transpose());  // n x (n - rank)
    if (ann.cols() == 0) return BigMatrix::identity(n);
    return integer_kernel(ann.transpose());
}

}  // namespace qlat

#endif
