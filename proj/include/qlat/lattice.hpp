#ifndef QLAT_LATTICE_HPP
#define QLAT_LATTICE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "arith.hpp"
#include "matrix.hpp"

namespace qlat {

/// Integral quadratic lattice given by its doubled Gram matrix B:
/// B_ij = Q(e_i + e_j) - Q(e_i) - Q(e_j), so B_ii = 2 Q(e_i) and Q(x) = x^T B x / 2.
/// Rank 0 is allowed.
class QuadraticLattice {
public:
    QuadraticLattice() = default;

    explicit QuadraticLattice(IntMatrix gram) : gram_(std::move(gram)) {
        if (gram_.rows() != gram_.cols()) throw std::invalid_argument("Gram matrix must be square");
        if (!gram_.is_symmetric()) throw std::invalid_argument("Gram matrix must be symmetric");
        for (std::size_t i = 0; i < gram_.rows(); ++i)
            if (gram_(i, i) % 2 != 0) throw std::invalid_argument("doubled Gram matrix must have even diagonal");
        disc_ = determinant(gram_);
        if (disc_ == 0) throw std::invalid_argument("degenerate quadratic lattice");
    }

    explicit QuadraticLattice(const BigMatrix& gram) : QuadraticLattice(to_small(gram)) {}

    /// Lattice with Q(x) = sum of coeffs[i] * x_i^2.
    static QuadraticLattice diagonal(const std::vector<i64>& coeffs) {
        IntMatrix g(coeffs.size(), coeffs.size());
        for (std::size_t i = 0; i < coeffs.size(); ++i) g(i, i) = checked_mul(2, coeffs[i]);
        return QuadraticLattice(g);
    }

    /// Z^n with the sum-of-squares form.
    static QuadraticLattice standard(std::size_t n) { return diagonal(std::vector<i64>(n, 1)); }

    /// E8 with the root Gram doubled: roots have Q = 2.
    static QuadraticLattice e8() {
        static const int cartan[8][8] = {
            {2, -1, 0, 0, 0, 0, 0, 0},  {-1, 2, -1, 0, 0, 0, 0, 0}, {0, -1, 2, -1, 0, 0, 0, -1},
            {0, 0, -1, 2, -1, 0, 0, 0}, {0, 0, 0, -1, 2, -1, 0, 0}, {0, 0, 0, 0, -1, 2, -1, 0},
            {0, 0, 0, 0, 0, -1, 2, 0},  {0, 0, -1, 0, 0, 0, 0, 2}};
        IntMatrix g(8, 8);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) g(i, j) = 2 * cartan[i][j];
        return QuadraticLattice(g);
    }

    /// The hyperbolic plane Q(x, y) = x y.
    static QuadraticLattice hyperbolic_plane() { return QuadraticLattice(IntMatrix{{0, 1}, {1, 0}}); }

    std::size_t rank() const { return gram_.rows(); }
    const IntMatrix& gram() const { return gram_; }
    i64 gram(std::size_t i, std::size_t j) const { return gram_(i, j); }

    /// det(B).
    const Int& discriminant() const { return disc_; }

    /// x^T B y (twice the bilinear form).
    i64 pairing(const Vec& x, const Vec& y) const { return bilinear(gram_, x, y); }

    i64 evaluate(const Vec& x) const {
        if (x.size() != rank()) throw std::invalid_argument("evaluate: dimension mismatch");
        return bilinear(gram_, x, x) / 2;
    }

    /// Q(e_i).
    i64 norm(std::size_t i) const { return gram_(i, i) / 2; }

    bool is_positive_definite() const {
        const std::size_t n = rank();
        for (std::size_t k = 1; k <= n; ++k) {
            BigMatrix minor(k, k);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) minor(i, j) = to_int(gram_(i, j));
            if (determinant(minor) <= 0) return false;
        }
        return true;
    }

    /// Lattice spanned by the columns of `basis` (in this lattice's coordinates).
    QuadraticLattice sublattice(const BigMatrix& basis) const {
        BigMatrix b = to_big(gram_);
        return QuadraticLattice(basis.transpose() * b * basis);
    }

    QuadraticLattice transformed(const IntMatrix& t) const { return sublattice(to_big(t)); }

    friend bool operator==(const QuadraticLattice& a, const QuadraticLattice& b) { return a.gram_ == b.gram_; }

private:
    IntMatrix gram_;
    Int disc_ = 1;
};

inline QuadraticLattice orthogonal_sum(const QuadraticLattice& a, const QuadraticLattice& b) {
    const std::size_t n = a.rank(), m = b.rank();
    IntMatrix g(n + m, n + m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i, j) = a.gram(i, j);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) g(n + i, n + j) = b.gram(i, j);
    return QuadraticLattice(g);
}

/// A rational subspace of L (x) Q, given by any rational basis (columns).
class RationalSubspace {
public:
    RationalSubspace(std::size_t ambient_rank, RatMatrix basis) : basis_(std::move(basis)) {
        if (basis_.rows() != ambient_rank) throw std::invalid_argument("subspace basis has wrong length");
        if (rank(basis_) != basis_.cols()) throw std::invalid_argument("subspace basis vectors are dependent");
    }

    static RationalSubspace span(std::size_t ambient_rank, const std::vector<Vec>& vectors) {
        RatMatrix b(ambient_rank, vectors.size());
        for (std::size_t j = 0; j < vectors.size(); ++j)
            for (std::size_t i = 0; i < ambient_rank; ++i) b(i, j) = Rational(to_int(vectors[j][i]));
        return RationalSubspace(ambient_rank, b);
    }

    std::size_t dimension() const { return basis_.cols(); }
    const RatMatrix& basis() const { return basis_; }

    /// Integral basis of the subspace intersected with Z^n.
    BigMatrix saturated_basis() const {
        if (dimension() == 0) return BigMatrix(basis_.rows(), 0);
        return saturate(basis_);
    }

private:
    RatMatrix basis_;
};

inline i64 evaluate(const QuadraticLattice& L, const Vec& x) { return L.evaluate(x); }
inline Int discriminant(const QuadraticLattice& L) { return L.discriminant(); }

namespace detail {

/// Exact decomposition Q(x) = sum_i q_i (x_i + sum_{j>i} mu_ij x_j)^2.
struct QuadraticCompletion {
    std::vector<Rational> q;
    RatMatrix mu;
};

inline QuadraticCompletion complete_squares(const QuadraticLattice& L) {
    const std::size_t n = L.rank();
    RatMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = ratio(to_int(L.gram(i, j)), 2);
    QuadraticCompletion c{std::vector<Rational>(n), RatMatrix(n, n)};
    for (std::size_t i = 0; i < n; ++i) {
        if (a(i, i) <= 0) throw std::domain_error("lattice is not positive definite");
        c.q[i] = a(i, i);
        for (std::size_t j = i + 1; j < n; ++j) c.mu(i, j) = a(i, j) / a(i, i);
        for (std::size_t k = i + 1; k < n; ++k)
            for (std::size_t l = i + 1; l < n; ++l) a(k, l) -= c.mu(i, k) * a(i, l);
    }
    return c;
}

}  // namespace detail

/// All nonzero x with Q(x) <= bound, both signs, sorted lexicographically.
/// Bounded backtracking on the completed-square form; the floating bounds only
/// prune with a safety margin and every candidate is checked exactly.
inline std::vector<Vec> short_vectors(const QuadraticLattice& L, i64 bound, NodeCounter* counter = nullptr) {
    const std::size_t n = L.rank();
    std::vector<Vec> out;
    if (n == 0 || bound <= 0) return out;
    auto comp = detail::complete_squares(L);
    std::vector<long double> q(n);
    std::vector<std::vector<long double>> mu(n, std::vector<long double>(n, 0.0L));
    for (std::size_t i = 0; i < n; ++i) {
        q[i] = static_cast<long double>(comp.q[i].get_d());
        for (std::size_t j = i + 1; j < n; ++j) mu[i][j] = static_cast<long double>(comp.mu(i, j).get_d());
    }
    const long double slack = 1e-7L * (1.0L + static_cast<long double>(bound));
    Vec x(n, 0);
    std::vector<long double> remaining(n + 1);
    remaining[n] = static_cast<long double>(bound) + slack;
    NodeCounter local;
    NodeCounter& ctr = counter ? *counter : local;

    // Iterative depth-first enumeration from the last coordinate down.
    std::vector<i64> hi(n), cur(n);
    std::vector<long double> center(n);
    auto setup = [&](std::size_t i) {
        long double c = 0;
        for (std::size_t j = i + 1; j < n; ++j) c -= mu[i][j] * static_cast<long double>(x[j]);
        center[i] = c;
        long double r = remaining[i + 1];
        if (r < 0) r = 0;
        long double w = std::sqrt(r / q[i]) + 1e-9L;
        cur[i] = static_cast<i64>(std::ceil(c - w));
        hi[i] = static_cast<i64>(std::floor(c + w));
        x[i] = cur[i];
    };
    std::size_t i = n - 1;
    setup(i);
    while (true) {
        if (x[i] > hi[i]) {
            if (i == n - 1) break;
            ++i;
            ++x[i];
            continue;
        }
        ctr.tick();
        long double d = static_cast<long double>(x[i]) - center[i];
        long double used = q[i] * d * d;
        remaining[i] = remaining[i + 1] - used;
        if (remaining[i] < -slack) {
            ++x[i];
            continue;
        }
        if (i == 0) {
            bool zero = std::all_of(x.begin(), x.end(), [](i64 v) { return v == 0; });
            if (!zero) {
                i64 val = L.evaluate(x);
                if (val <= bound) out.push_back(x);
            }
            ++x[0];
            continue;
        }
        --i;
        setup(i);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Smallest nonzero value of Q.
inline i64 minimum(const QuadraticLattice& L) {
    if (L.rank() == 0) throw std::invalid_argument("minimum of a rank-0 lattice");
    if (!L.is_positive_definite()) throw std::domain_error("minimum: lattice is not positive definite");
    i64 bound = L.norm(0);
    for (std::size_t i = 1; i < L.rank(); ++i) bound = std::min(bound, L.norm(i));
    i64 best = bound;
    for (const auto& v : short_vectors(L, bound)) best = std::min(best, L.evaluate(v));
    return best;
}

/// Number of vectors of each norm 1..bound.
inline std::vector<std::uint64_t> norm_histogram(const QuadraticLattice& L, i64 bound) {
    std::vector<std::uint64_t> h(static_cast<std::size_t>(bound) + 1, 0);
    for (const auto& v : short_vectors(L, bound)) ++h[static_cast<std::size_t>(L.evaluate(v))];
    return h;
}

/// Matrix of the reflection w -> w - (w^T B d / Q(d)) d; rejects isotropic d.
inline RatMatrix reflection(const QuadraticLattice& L, const std::vector<Rational>& delta) {
    const std::size_t n = L.rank();
    if (delta.size() != n) throw std::invalid_argument("reflection: dimension mismatch");
    RatMatrix b = to_rational(L.gram());
    std::vector<Rational> bd(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) bd[i] += b(i, j) * delta[j];
    Rational qd = 0;
    for (std::size_t i = 0; i < n; ++i) qd += delta[i] * bd[i];
    qd /= 2;
    if (qd == 0) throw std::invalid_argument("reflection: isotropic vector");
    RatMatrix r = RatMatrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r(i, j) -= delta[i] * bd[j] / qd;
    return r;
}

/// Integral basis (columns) of S-perp intersected with L, in row-HNF order.
inline BigMatrix orthogonal_complement_basis(const QuadraticLattice& L, const RationalSubspace& S) {
    const std::size_t n = L.rank();
    const std::size_t k = S.dimension();
    RatMatrix b = to_rational(L.gram());
    RatMatrix sbs = S.basis().transpose() * b * S.basis();
    if (k > 0 && determinant(sbs) == 0) throw std::invalid_argument("orthogonal_complement: degenerate subspace");
    if (k == 0) return BigMatrix::identity(n);
    // Rows: (B s_j)^T with denominators cleared.
    BigMatrix a(k, n);
    RatMatrix bs = b * S.basis();
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<Rational> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = bs(i, j);
        auto w = primitive_integer_vector(col);
        for (std::size_t i = 0; i < n; ++i) a(j, i) = w[i];
    }
    return integer_kernel(a);
}

inline QuadraticLattice orthogonal_complement(const QuadraticLattice& L, const RationalSubspace& S) {
    BigMatrix c = orthogonal_complement_basis(L, S);
    if (c.cols() == 0) return QuadraticLattice();
    return L.sublattice(c);
}

/// v_p of det of the doubled Gram of the saturated Z-basis of Z (kInfiniteValuation when degenerate).
inline long val_of_subspace(const QuadraticLattice& L, const RationalSubspace& Z, const Int& p) {
    BigMatrix w = Z.saturated_basis();
    BigMatrix g = w.transpose() * to_big(L.gram()) * w;
    Int d = determinant(g);
    return valuation(d, p);
}

/// True iff the columns span a saturated sublattice (all elementary divisors equal 1).
inline bool is_saturated(const BigMatrix& columns) {
    if (rank(columns) != columns.cols()) throw std::invalid_argument("is_saturated: dependent columns");
    for (const auto& d : elementary_divisors(columns))
        if (d != 1) return false;
    return true;
}

inline bool is_saturated(const IntMatrix& columns) { return is_saturated(to_big(columns)); }

/// LLL reduction (delta = 99/100) of a positive definite lattice with exact rational arithmetic.
/// Returns the unimodular transform T (new basis = columns of T).
inline BigMatrix lll_transform(const QuadraticLattice& L) {
    const std::size_t n = L.rank();
    BigMatrix t = BigMatrix::identity(n);
    if (n <= 1) return t;
    BigMatrix g = to_big(L.gram());
    const Rational delta(99, 100);

    auto gram_schmidt = [&](std::vector<Rational>& bstar, RatMatrix& mu) {
        bstar.assign(n, Rational(0));
        mu = RatMatrix(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                Rational s = Rational(g(i, j));
                for (std::size_t k = 0; k < j; ++k) s -= mu(j, k) * mu(i, k) * bstar[k];
                mu(i, j) = s / bstar[j];
            }
            Rational s = Rational(g(i, i));
            for (std::size_t k = 0; k < i; ++k) s -= mu(i, k) * mu(i, k) * bstar[k];
            bstar[i] = s;
        }
    };
    // b_k <- b_k - q b_j
    auto sub = [&](std::size_t k, std::size_t j, const Int& q) {
        for (std::size_t i = 0; i < n; ++i) t(i, k) -= q * t(i, j);
        for (std::size_t i = 0; i < n; ++i) g(i, k) -= q * g(i, j);
        for (std::size_t i = 0; i < n; ++i) g(k, i) -= q * g(j, i);
    };
    auto swap = [&](std::size_t a, std::size_t b) {
        t.swap_cols(a, b);
        g.swap_cols(a, b);
        g.swap_rows(a, b);
    };

    std::vector<Rational> bstar;
    RatMatrix mu;
    gram_schmidt(bstar, mu);
    std::size_t k = 1;
    while (k < n) {
        for (std::size_t jj = k; jj-- > 0;) {
            Int q = round_nearest(mu(k, jj));
            if (q != 0) {
                sub(k, jj, q);
                gram_schmidt(bstar, mu);
            }
        }
        if (bstar[k] < (delta - mu(k, k - 1) * mu(k, k - 1)) * bstar[k - 1]) {
            swap(k, k - 1);
            gram_schmidt(bstar, mu);
            k = std::max<std::size_t>(k - 1, 1);
        } else {
            ++k;
        }
    }
    return t;
}

/// LLL-reduced lattice with basis vectors additionally sorted by norm.
inline std::pair<QuadraticLattice, BigMatrix> lll_reduce(const QuadraticLattice& L) {
    BigMatrix t = lll_transform(L);
    QuadraticLattice r = L.sublattice(t);
    std::vector<std::size_t> order(r.rank());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r.norm(a) < r.norm(b); });
    BigMatrix p(r.rank(), r.rank());
    for (std::size_t j = 0; j < order.size(); ++j) p(order[j], j) = 1;
    BigMatrix tt = t * p;
    return {L.sublattice(tt), tt};
}

/// Diagonal entries of a rational diagonalization of a nondegenerate symmetric matrix.
inline std::vector<Rational> rational_diagonal(RatMatrix a) {
    const std::size_t n = a.rows();
    std::vector<Rational> d;
    std::vector<bool> done(n, false);
    auto add_multiple = [&](std::size_t k, std::size_t i, const Rational& f) {
        for (std::size_t l = 0; l < n; ++l) a(l, k) += f * a(l, i);
        for (std::size_t l = 0; l < n; ++l) a(k, l) += f * a(i, l);
    };
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t piv = n;
        for (std::size_t i = 0; i < n && piv == n; ++i)
            if (!done[i] && a(i, i) != 0) piv = i;
        if (piv == n) {
            // All remaining diagonal entries vanish: mix two basis vectors.
            for (std::size_t i = 0; i < n && piv == n; ++i)
                for (std::size_t j = i + 1; j < n && piv == n; ++j)
                    if (!done[i] && !done[j] && a(i, j) != 0) {
                        add_multiple(i, j, Rational(1));
                        piv = i;
                    }
            if (piv == n) throw std::invalid_argument("rational_diagonal: degenerate form");
        }
        Rational dp = a(piv, piv);
        for (std::size_t k = 0; k < n; ++k)
            if (!done[k] && k != piv && a(k, piv) != 0) add_multiple(k, piv, -a(k, piv) / dp);
        d.push_back(dp);
        done[piv] = true;
    }
    return d;
}

inline std::vector<Rational> rational_diagonal(const QuadraticLattice& L) {
    RatMatrix a(L.rank(), L.rank());
    for (std::size_t i = 0; i < L.rank(); ++i)
        for (std::size_t j = 0; j < L.rank(); ++j) a(i, j) = ratio(to_int(L.gram(i, j)), 2);
    return rational_diagonal(a);
}

/// (positive, negative) counts.
inline std::pair<std::size_t, std::size_t> signature(const QuadraticLattice& L) {
    std::size_t pos = 0, neg = 0;
    for (const auto& d : rational_diagonal(L)) (d > 0 ? pos : neg)++;
    return {pos, neg};
}

}  // namespace qlat

#endif
