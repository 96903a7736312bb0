#ifndef QLAT_LIFTING_HPP
#define QLAT_LIFTING_HPP

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "arith.hpp"
#include "lattice.hpp"

namespace qlat {

enum class Tri { No, Yes, Inconclusive };

inline const char* to_string(Tri t) {
    switch (t) {
        case Tri::No: return "no";
        case Tri::Yes: return "yes";
        default: return "inconclusive";
    }
}

struct OracleResult {
    Tri result;
    long precision;  // k in the search modulo p^k
    std::uint64_t nodes;
};

namespace detail {

using i128 = __int128;

inline i128 mod128(i128 x, i128 m) {
    x %= m;
    return x < 0 ? x + m : x;
}

inline long val128(i128 x, i64 p, long cap) {
    long v = 0;
    if (x == 0) return cap;
    while (v < cap && x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

inline i128 inv_mod128(i128 a, i128 m) {
    i128 r0 = mod128(a, m), r1 = m, s0 = 1, s1 = 0;
    while (r1 != 0) {
        i128 q = r0 / r1;
        i128 t = r0 - q * r1;
        r0 = r1;
        r1 = t;
        t = s0 - q * s1;
        s0 = s1;
        s1 = t;
    }
    if (r0 != 1) throw std::logic_error("inv_mod128: not a unit");
    return mod128(s0, m);
}

struct LocalSmith {
    std::vector<long> vals;  // valuations of the pivots below the precision
    bool consistent = true;
};

/// Diagonalizes a (rows x cols, row-major) over Z / p^prec with minimal-valuation pivots.
/// With a right-hand side, also decides solvability of a z = rhs modulo p^prec.
inline LocalSmith local_smith(std::vector<i128> a, std::size_t rows, std::size_t cols, std::vector<i128> rhs, i64 p,
                              long prec) {
    i128 pk = 1;
    for (long i = 0; i < prec; ++i) pk *= p;
    for (auto& x : a) x = mod128(x, pk);
    for (auto& x : rhs) x = mod128(x, pk);
    const bool with_rhs = !rhs.empty();
    LocalSmith out;
    std::vector<std::size_t> colmap(cols);
    for (std::size_t c = 0; c < cols; ++c) colmap[c] = c;
    auto at = [&](std::size_t r, std::size_t c) -> i128& { return a[r * cols + colmap[c]]; };
    std::size_t s = 0;
    for (; s < rows && s < cols; ++s) {
        long best = prec;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = s; i < rows && best > 0; ++i)
            for (std::size_t j = s; j < cols; ++j) {
                long v = val128(at(i, j), p, prec);
                if (v < best) {
                    best = v;
                    bi = i;
                    bj = j;
                    if (v == 0) break;
                }
            }
        if (best >= prec) break;
        if (bi != s) {
            for (std::size_t c = 0; c < cols; ++c) std::swap(a[bi * cols + c], a[s * cols + c]);
            if (with_rhs) std::swap(rhs[bi], rhs[s]);
        }
        std::swap(colmap[bj], colmap[s]);
        i128 ppow = 1;
        for (long i = 0; i < best; ++i) ppow *= p;
        i128 unit = at(s, s) / ppow;
        i128 uinv = inv_mod128(unit, pk);
        for (std::size_t c = s; c < cols; ++c) at(s, c) = mod128(at(s, c) * uinv, pk);
        if (with_rhs) rhs[s] = mod128(rhs[s] * uinv, pk);
        for (std::size_t i = s + 1; i < rows; ++i) {
            i128 w = at(i, s) / ppow;
            if (w == 0) continue;
            for (std::size_t c = s; c < cols; ++c) at(i, c) = mod128(at(i, c) - w * at(s, c), pk);
            if (with_rhs) rhs[i] = mod128(rhs[i] - w * rhs[s], pk);
        }
        out.vals.push_back(best);
    }
    if (with_rhs) {
        for (std::size_t i = 0; i < rows; ++i) {
            long need = i < out.vals.size() ? out.vals[i] : prec;
            if (val128(rhs[i], p, prec) < need) out.consistent = false;
        }
    }
    return out;
}

/// Row-echelon basis of a subspace of F_p^N.
class ModPEchelon {
public:
    explicit ModPEchelon(i64 p) : p_(p) {}

    /// Reduces v against the basis; adds it and returns true when independent.
    bool add(std::vector<i64> v) {
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            i64 c = v[pivots_[k]];
            if (c == 0) continue;
            for (std::size_t j = 0; j < v.size(); ++j) v[j] = mod_pos(v[j] - c * rows_[k][j], p_);
        }
        std::size_t piv = 0;
        while (piv < v.size() && v[piv] == 0) ++piv;
        if (piv == v.size()) return false;
        i64 inv = static_cast<i64>(inv_mod128(v[piv], p_));
        for (auto& x : v) x = mod_pos(x * inv, p_);
        for (auto& r : rows_) {
            i64 c = r[piv];
            if (c == 0) continue;
            for (std::size_t j = 0; j < r.size(); ++j) r[j] = mod_pos(r[j] - c * v[j], p_);
        }
        rows_.push_back(std::move(v));
        pivots_.push_back(piv);
        return true;
    }

private:
    i64 p_;
    std::vector<std::vector<i64>> rows_;
    std::vector<std::size_t> pivots_;
};

struct ModPSolution {
    bool consistent = false;
    std::vector<i64> particular;
    std::vector<std::vector<i64>> kernel;
};

/// Solves a x = rhs over F_p (a is rows x cols, row-major).
inline ModPSolution solve_mod_p(std::vector<i64> a, std::size_t rows, std::size_t cols, std::vector<i64> rhs, i64 p) {
    ModPSolution sol;
    std::vector<std::size_t> pivcols;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = rows;
        for (std::size_t i = r; i < rows; ++i)
            if (a[i * cols + c] != 0) {
                piv = i;
                break;
            }
        if (piv == rows) continue;
        if (piv != r) {
            for (std::size_t j = 0; j < cols; ++j) std::swap(a[piv * cols + j], a[r * cols + j]);
            std::swap(rhs[piv], rhs[r]);
        }
        i64 inv = static_cast<i64>(inv_mod128(a[r * cols + c], p));
        for (std::size_t j = 0; j < cols; ++j) a[r * cols + j] = mod_pos(a[r * cols + j] * inv, p);
        rhs[r] = mod_pos(rhs[r] * inv, p);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r) continue;
            i64 f = a[i * cols + c];
            if (f == 0) continue;
            for (std::size_t j = 0; j < cols; ++j) a[i * cols + j] = mod_pos(a[i * cols + j] - f * a[r * cols + j], p);
            rhs[i] = mod_pos(rhs[i] - f * rhs[r], p);
        }
        pivcols.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (rhs[i] != 0) return sol;
    sol.consistent = true;
    sol.particular.assign(cols, 0);
    for (std::size_t k = 0; k < r; ++k) sol.particular[pivcols[k]] = rhs[k];
    std::vector<bool> is_piv(cols, false);
    for (auto c : pivcols) is_piv[c] = true;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_piv[f]) continue;
        std::vector<i64> v(cols, 0);
        v[f] = 1;
        for (std::size_t k = 0; k < r; ++k) v[pivcols[k]] = mod_pos(-a[k * cols + f], p);
        sol.kernel.push_back(std::move(v));
    }
    return sol;
}

/// Basis mod p of {A : G A + A^T G = 0}, the Lie algebra of the orthogonal group of G.
inline std::vector<std::vector<i64>> orthogonal_lie_basis(const std::vector<i64>& g, std::size_t n, i64 p) {
    std::vector<std::vector<i64>> out;
    if (n < 2) return out;
    BigMatrix eq(n * (n + 1) / 2, n * n);
    std::size_t row = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j, ++row)
            for (std::size_t s = 0; s < n; ++s) {
                eq(row, s * n + j) += Int(static_cast<long>(g[i * n + s]));
                eq(row, s * n + i) += Int(static_cast<long>(g[s * n + j]));
            }
    BigMatrix ker = integer_kernel(eq);
    for (std::size_t c = 0; c < ker.cols(); ++c) {
        std::vector<i64> v(n * n);
        for (std::size_t k = 0; k < n * n; ++k) v[k] = to_i64(mod_pos(ker(k, c), Int(static_cast<long>(p))));
        out.push_back(std::move(v));
    }
    return out;
}

/// (rank, Legendre symbol of the discriminant of the nondegenerate quotient) of G mod an odd p.
inline std::pair<std::size_t, int> fp_space_invariants(std::vector<i64> g, std::size_t n, i64 p) {
    for (auto& x : g) x = mod_pos(x, p);
    std::vector<bool> done(n, false);
    std::size_t rk = 0;
    i64 det = 1;
    while (true) {
        std::size_t piv = n;
        for (std::size_t i = 0; i < n && piv == n; ++i)
            if (!done[i] && g[i * n + i] != 0) piv = i;
        if (piv == n) {
            for (std::size_t i = 0; i < n && piv == n; ++i)
                for (std::size_t j = i + 1; j < n && piv == n; ++j)
                    if (!done[i] && !done[j] && g[i * n + j] != 0) {
                        for (std::size_t l = 0; l < n; ++l) g[l * n + i] = mod_pos(g[l * n + i] + g[l * n + j], p);
                        for (std::size_t l = 0; l < n; ++l) g[i * n + l] = mod_pos(g[i * n + l] + g[j * n + l], p);
                        piv = i;
                    }
            if (piv == n) break;
        }
        const i64 d = g[piv * n + piv];
        const i64 inv = static_cast<i64>(inv_mod128(d, p));
        for (std::size_t k = 0; k < n; ++k) {
            if (done[k] || k == piv) continue;
            const i64 f = mod_pos(-g[k * n + piv] * inv, p);
            for (std::size_t l = 0; l < n; ++l) g[l * n + k] = mod_pos(g[l * n + k] + f * g[l * n + piv], p);
            for (std::size_t l = 0; l < n; ++l) g[k * n + l] = mod_pos(g[k * n + l] + f * g[piv * n + l], p);
        }
        det = static_cast<i64>(mod128(static_cast<i128>(det) * d, p));
        done[piv] = true;
        ++rk;
    }
    return {rk, legendre_symbol(Int(static_cast<long>(det)), Int(static_cast<long>(p)))};
}

/// Depth-first search for embeddings M with M^T G M = H modulo growing powers of p.
/// Nodes are matrices mod p^j solving the equations mod p^j. A node whose Jacobian has all
/// elementary divisors below p^j is decided by one linear congruence (Hensel); otherwise its
/// lifts are enumerated modulo the tangent directions of O(G) x O(H), which come from exact
/// Cayley transforms and so never change the answer.
class LiftingSearch {
public:
    LiftingSearch(std::vector<i64> g, std::size_t n, std::vector<i64> h, std::size_t m, i64 p, long kmax,
                  long tmax, bool even_mode, bool require_unimodular, NodeCounter& counter)
        : g_(std::move(g)), h_(std::move(h)), n_(n), m_(m), p_(p), kmax_(kmax), tmax_(tmax), even_(even_mode),
          unimodular_(require_unimodular), counter_(counter) {
        for (std::size_t i = 0; i < m_; ++i)
            for (std::size_t j = i; j < m_; ++j) eqs_.push_back({i, j});
        left_lie_ = orthogonal_lie_basis(g_, n_, p_);
        right_lie_ = orthogonal_lie_basis(h_, m_, p_);
    }

    bool run() {
        std::vector<i128> M(n_ * m_, 0);
        return columns(M, 0);
    }

private:
    std::size_t N() const { return n_ * m_; }
    std::size_t K() const { return eqs_.size(); }

    std::vector<i128> times_g(const std::vector<i128>& M) const {
        std::vector<i128> C(N(), 0);
        for (std::size_t c = 0; c < m_; ++c)
            for (std::size_t r = 0; r < n_; ++r) {
                i128 s = 0;
                for (std::size_t t = 0; t < n_; ++t) s += static_cast<i128>(g_[r * n_ + t]) * M[t + n_ * c];
                C[r + n_ * c] = s;
            }
        return C;
    }

    std::vector<i128> residual(const std::vector<i128>& M, const std::vector<i128>& C) const {
        std::vector<i128> F(K());
        for (std::size_t e = 0; e < K(); ++e) {
            auto [i, j] = eqs_[e];
            i128 s = 0;
            for (std::size_t r = 0; r < n_; ++r) s += M[r + n_ * i] * C[r + n_ * j];
            s -= h_[i * m_ + j];
            if (even_ && i == j) s /= 2;
            F[e] = s;
        }
        return F;
    }

    std::vector<i128> jacobian(const std::vector<i128>& C) const {
        std::vector<i128> J(K() * N(), 0);
        for (std::size_t e = 0; e < K(); ++e) {
            auto [i, j] = eqs_[e];
            for (std::size_t r = 0; r < n_; ++r) {
                if (i == j) {
                    J[e * N() + r + n_ * i] = even_ ? C[r + n_ * i] : 2 * C[r + n_ * i];
                } else {
                    J[e * N() + r + n_ * i] = C[r + n_ * j];
                    J[e * N() + r + n_ * j] = C[r + n_ * i];
                }
            }
        }
        return J;
    }

    i128 ppow(long e) const {
        i128 x = 1;
        for (long i = 0; i < e; ++i) x *= p_;
        return x;
    }

    bool columns(std::vector<i128>& M, std::size_t c) {
        if (c == m_) {
            if (unimodular_) {
                BigMatrix Mb(n_, m_);
                for (std::size_t k = 0; k < N(); ++k) Mb(k % n_, k / n_) = Int(static_cast<long>(M[k]));
                if (determinant(Mb) % p_ == 0) return false;
            }
            return search(M, 1);
        }
        return p_ == 2 ? columns_two(M, c) : columns_odd(M, c);
    }

    i128 pair(const i128* x, const i128* y) const {
        i128 s = 0;
        for (std::size_t r = 0; r < n_; ++r)
            for (std::size_t q = 0; q < n_; ++q) s += x[r] * g_[r * n_ + q] * y[q];
        return s;
    }

    bool try_column(std::vector<i128>& M, std::size_t c, const std::vector<i128>& x) {
        for (std::size_t r = 0; r < n_; ++r) M[r + n_ * c] = x[r];
        if (unimodular_) {
            // An embedding invertible over Z_p has columns independent mod p.
            ModPEchelon ech(p_);
            for (std::size_t i = 0; i <= c; ++i) {
                std::vector<i64> v(n_);
                for (std::size_t r = 0; r < n_; ++r) v[r] = static_cast<i64>(mod128(M[r + n_ * i], p_));
                if (!ech.add(std::move(v))) return false;
            }
        }
        return columns(M, c + 1);
    }

    bool columns_two(std::vector<i128>& M, std::size_t c) {
        i64 total = 1;
        for (std::size_t i = 0; i < n_; ++i) total = checked_mul(total, p_);
        std::vector<i128> x(n_);
        for (i64 code = 0; code < total; ++code) {
            counter_.tick();
            for (std::size_t i = 0; i < n_; ++i) x[i] = (code >> i) & 1;
            i128 d = pair(x.data(), x.data()) - h_[c * m_ + c];
            if (even_) d /= 2;
            if (mod128(d, p_) != 0) continue;
            bool ok = true;
            for (std::size_t i = 0; i < c && ok; ++i) ok = mod128(pair(&M[n_ * i], x.data()) - h_[i * m_ + c], p_) == 0;
            if (ok && try_column(M, c, x)) return true;
        }
        return false;
    }

    /// Odd p: the pairings with earlier columns cut out an affine space; on it the norm
    /// equation is solved for the last coordinate by a square root mod p.
    bool columns_odd(std::vector<i128>& M, std::size_t c) {
        std::vector<i64> a(c * n_), rhs(c);
        for (std::size_t i = 0; i < c; ++i) {
            for (std::size_t r = 0; r < n_; ++r) {
                i128 s = 0;
                for (std::size_t q = 0; q < n_; ++q) s += g_[r * n_ + q] * M[q + n_ * i];
                a[i * n_ + r] = static_cast<i64>(mod128(s, p_));
            }
            rhs[i] = mod_pos(h_[i * m_ + c], p_);
        }
        ModPSolution sol = solve_mod_p(a, c, n_, rhs, p_);
        if (!sol.consistent) return false;
        const std::size_t d = sol.kernel.size();
        std::vector<i128> y(n_), x(n_), last(n_);
        auto value = [&](const std::vector<i128>& v) { return mod128(pair(v.data(), v.data()) - h_[c * m_ + c], p_); };
        if (d == 0) {
            for (std::size_t r = 0; r < n_; ++r) x[r] = sol.particular[r];
            counter_.tick();
            return value(x) == 0 && try_column(M, c, x);
        }
        for (std::size_t r = 0; r < n_; ++r) last[r] = sol.kernel[d - 1][r];
        const i128 qa = mod128(pair(last.data(), last.data()), p_);
        std::vector<i64> t(d - 1, 0);
        while (true) {
            counter_.tick();
            for (std::size_t r = 0; r < n_; ++r) {
                i128 v = sol.particular[r];
                for (std::size_t k = 0; k + 1 < d; ++k) v += t[k] * sol.kernel[k][r];
                y[r] = mod128(v, p_);
            }
            const i128 qb = mod128(2 * pair(y.data(), last.data()), p_);
            const i128 qc = value(y);
            for (i64 s : roots(qa, qb, qc)) {
                for (std::size_t r = 0; r < n_; ++r) x[r] = mod128(y[r] + s * last[r], p_);
                if (try_column(M, c, x)) return true;
            }
            std::size_t k = 0;
            while (k + 1 < d && ++t[k] == p_) t[k++] = 0;
            if (k + 1 == d) break;
        }
        return false;
    }

    /// Roots of a s^2 + b s + c mod the odd prime p.
    std::vector<i64> roots(i128 a, i128 b, i128 c) {
        std::vector<i64> out;
        if (a == 0) {
            if (b == 0) {
                if (c == 0)
                    for (i64 s = 0; s < p_; ++s) out.push_back(s);
                return out;
            }
            out.push_back(static_cast<i64>(mod128(-c * inv_mod128(b, p_), p_)));
            return out;
        }
        i128 disc = mod128(b * b - 4 * a * c, p_);
        i128 inv2a = inv_mod128(2 * a, p_);
        for (i64 r : square_roots(static_cast<i64>(disc))) {
            i64 s = static_cast<i64>(mod128((r - b) * inv2a, p_));
            if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
        }
        return out;
    }

    std::vector<i64> square_roots(i64 v) {
        if (sqrt_table_.empty()) {
            sqrt_table_.assign(static_cast<std::size_t>(p_), -1);
            for (i64 r = 0; r < p_; ++r) {
                auto sq = static_cast<std::size_t>(static_cast<i128>(r) * r % p_);
                if (sqrt_table_[sq] < 0) sqrt_table_[sq] = r;
            }
        }
        i64 r = sqrt_table_[static_cast<std::size_t>(v)];
        if (r < 0) return {};
        if (r == 0) return {0};
        return {r, p_ - r};
    }

    bool search(const std::vector<i128>& M, long j) {
        counter_.tick();
        const auto C = times_g(M);
        const auto F = residual(M, C);
        const auto J = jacobian(C);
        const i128 pj = ppow(j);
        LocalSmith ls = local_smith(J, K(), N(), {}, p_, j);
        if (ls.vals.size() == K()) {
            long t = *std::max_element(ls.vals.begin(), ls.vals.end());
            long r = 2 * t + 1 - j;
            if (r <= 0) return true;
            std::vector<i128> rhs(K());
            for (std::size_t e = 0; e < K(); ++e) rhs[e] = -(F[e] / pj);
            return local_smith(J, K(), N(), rhs, p_, r).consistent;
        }
        // Every true embedding has all elementary divisors of its Jacobian below p^(t_max + 1).
        if (j > tmax_ || j >= kmax_) return false;
        std::vector<i64> Jp(K() * N()), rhs(K());
        for (std::size_t k = 0; k < Jp.size(); ++k) Jp[k] = static_cast<i64>(mod128(J[k], p_));
        for (std::size_t e = 0; e < K(); ++e) rhs[e] = static_cast<i64>(mod128(-(F[e] / pj), p_));
        ModPSolution sol = solve_mod_p(Jp, K(), N(), rhs, p_);
        if (!sol.consistent) return false;
        std::vector<std::vector<i64>> free = sol.kernel;
        if (p_ != 2 || j >= 2) free = quotient_by_symmetries(M, sol.kernel);
        const std::size_t d = free.size();
        std::vector<i64> digits(d, 0);
        std::vector<i128> next(N());
        while (true) {
            for (std::size_t k = 0; k < N(); ++k) {
                i128 x = sol.particular[k];
                for (std::size_t l = 0; l < d; ++l) x += digits[l] * free[l][k];
                next[k] = M[k] + pj * mod128(x, p_);
            }
            if (search(next, j + 1)) return true;
            std::size_t l = 0;
            while (l < d && ++digits[l] == p_) digits[l++] = 0;
            if (l == d) break;
        }
        return false;
    }

    std::vector<std::vector<i64>> quotient_by_symmetries(const std::vector<i128>& M,
                                                         const std::vector<std::vector<i64>>& kernel) const {
        ModPEchelon ech(p_);
        std::vector<i64> Mp(N());
        for (std::size_t k = 0; k < N(); ++k) Mp[k] = static_cast<i64>(mod128(M[k], p_));
        for (const auto& A : left_lie_) {
            std::vector<i64> v(N(), 0);
            for (std::size_t c = 0; c < m_; ++c)
                for (std::size_t r = 0; r < n_; ++r) {
                    i64 s = 0;
                    for (std::size_t t = 0; t < n_; ++t) s += A[r * n_ + t] * Mp[t + n_ * c];
                    v[r + n_ * c] = mod_pos(s, p_);
                }
            ech.add(std::move(v));
        }
        for (const auto& A : right_lie_) {
            std::vector<i64> v(N(), 0);
            for (std::size_t c = 0; c < m_; ++c)
                for (std::size_t r = 0; r < n_; ++r) {
                    i64 s = 0;
                    for (std::size_t t = 0; t < m_; ++t) s += Mp[r + n_ * t] * A[t * m_ + c];
                    v[r + n_ * c] = mod_pos(s, p_);
                }
            ech.add(std::move(v));
        }
        std::vector<std::vector<i64>> out;
        for (const auto& k : kernel)
            if (ech.add(k)) out.push_back(k);
        return out;
    }

    std::vector<i64> g_, h_;
    std::size_t n_, m_;
    i64 p_;
    long kmax_, tmax_;
    bool even_, unimodular_;
    NodeCounter& counter_;
    std::vector<std::pair<std::size_t, std::size_t>> eqs_;
    std::vector<std::vector<i64>> left_lie_, right_lie_;
    std::vector<i64> sqrt_table_;
};

}  // namespace detail

/// Decides whether source (x) Z_p embeds isometrically into target (x) Z_p by searching
/// solutions of M^T B M = B' modulo p^k, k = 2 v_p(2 disc(target) disc(source)) + 3, with a
/// Hensel certificate. Independent of the Jordan symbol code. Inconclusive when the node
/// budget runs out or p^k does not fit the 128-bit search arithmetic.
inline OracleResult lifting_oracle_embeds(const QuadraticLattice& source, const QuadraticLattice& target, const Int& p,
                                          std::uint64_t budget = Budget::global().nodes) {
    if (!is_prime(p)) throw std::invalid_argument("lifting_oracle_embeds: p must be prime");
    const std::size_t n = target.rank(), m = source.rank();
    if (m > n) throw std::invalid_argument("lifting_oracle_embeds: source rank exceeds target rank");
    Int prod = 2 * target.discriminant() * source.discriminant();
    const long k = 2 * valuation(prod, p) + 3;
    OracleResult out{Tri::Inconclusive, k, 0};
    if (m == 0) {
        out.result = Tri::Yes;
        return out;
    }
    const i64 pi = to_i64(p);

    long s = kInfiniteValuation;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (target.gram(i, j) != 0) s = std::min(s, valuation(to_int(target.gram(i, j)), p));
    i64 ps = 1;
    for (long i = 0; i < s; ++i) ps *= pi;
    std::vector<i64> g(n * n), h(m * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g[i * n + j] = target.gram(i, j) / ps;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            if (source.gram(i, j) % ps != 0) {
                out.result = Tri::No;
                return out;
            }
            h[i * m + j] = source.gram(i, j) / ps;
        }
    bool even_mode = false;
    if (pi == 2) {
        even_mode = true;
        for (std::size_t i = 0; i < n; ++i) even_mode = even_mode && g[i * n + i] % 2 == 0;
        if (even_mode)
            for (std::size_t i = 0; i < m; ++i)
                if (h[i * m + i] % 2 != 0) {
                    out.result = Tri::No;
                    return out;
                }
    }
    bool unimodular = false;
    if (m == n) {
        // det(M)^2 = det(B') / det(B) and the rational spaces must agree.
        const Place v = Place::prime(p);
        Rational ratio = Rational(source.discriminant()) / Rational(target.discriminant());
        if (!is_local_square(ratio, v)) {
            out.result = Tri::No;
            return out;
        }
        auto hasse = [&](const QuadraticLattice& L) {
            auto d = rational_diagonal(L);
            int hs = 1;
            for (std::size_t i = 0; i < d.size(); ++i)
                for (std::size_t j = i + 1; j < d.size(); ++j) hs *= hilbert_symbol(d[i], d[j], v);
            return hs;
        };
        if (hasse(source) != hasse(target)) {
            out.result = Tri::No;
            return out;
        }
        // An isometry is invertible over Z_p, so the p-parts of the elementary divisors agree.
        auto pparts = [&](const QuadraticLattice& L) {
            std::vector<long> v;
            for (const auto& e : elementary_divisors(to_big(L.gram()))) v.push_back(valuation(e, p));
            std::sort(v.begin(), v.end());
            return v;
        };
        if (pparts(source) != pparts(target)) {
            out.result = Tri::No;
            return out;
        }
        unimodular = valuation(source.discriminant(), p) == valuation(target.discriminant(), p);
        // ... and reduces mod p to an isometry of quadratic spaces over F_p.
        if (unimodular && pi != 2 && detail::fp_space_invariants(g, n, pi) != detail::fp_space_invariants(h, m, pi)) {
            out.result = Tri::No;
            return out;
        }
    }
    // Hensel index bound for true embeddings: the Jacobian at M contains det(B') (times 2 when the
    // diagonal equations are not halved) in every direction.
    Int hdet = 1;
    {
        BigMatrix hb(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) hb(i, j) = to_int(h[i * m + j]);
        hdet = determinant(hb);
    }
    const long tmax = valuation(hdet, p) + (pi == 2 && !even_mode ? 1 : 0);
    {
        // Residuals are sums of n^2 products entry * gram * entry with entries below p^(tmax + 2),
        // and congruences are solved modulo at most p^(2 tmax + 1).
        i64 gmax = 1;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) gmax = std::max<i64>(gmax, std::abs(g[i * n + j]));
        Int limit = isqrt((Int(1) << 124) / (Int(static_cast<long>(n * n)) * Int(static_cast<long>(gmax))));
        long depth = std::max(std::min(k, tmax + 2), 2 * tmax + 1);
        if (pow(p, static_cast<unsigned long>(depth)) > limit) return out;
    }
    NodeCounter counter(budget, "lifting oracle");
    try {
        detail::LiftingSearch search(g, n, h, m, pi, k, tmax, even_mode, unimodular, counter);
        out.result = search.run() ? Tri::Yes : Tri::No;
    } catch (const BudgetExhausted&) {
        out.result = Tri::Inconclusive;
    }
    out.nodes = counter.count();
    return out;
}

inline OracleResult lifting_oracle_embeds(const QuadraticLattice& source, const QuadraticLattice& target, long p,
                                          std::uint64_t budget = Budget::global().nodes) {
    return lifting_oracle_embeds(source, target, Int(p), budget);
}

}  // namespace qlat

#endif
