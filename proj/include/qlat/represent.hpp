#ifndef QLAT_REPRESENT_HPP
#define QLAT_REPRESENT_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "genus.hpp"
#include "isometry.hpp"

namespace qlat {

/// Isometric embedding of `source` into `target`: matrix^T B_target matrix = B_source.
struct Embedding {
    QuadraticLattice source;
    QuadraticLattice target;
    IntMatrix matrix;  // rank(target) x rank(source)
};

/// Classical discriminant: det(B) / 2 in odd rank, (-1)^(m/2) det(B) in even rank.
/// For (d) this is d; for a x^2 + b x y + c y^2 it is b^2 - 4ac.
inline Int classical_discriminant(const QuadraticLattice& L) {
    const std::size_t m = L.rank();
    if (m % 2 == 1) return L.discriminant() / 2;
    return (m / 2) % 2 == 0 ? L.discriminant() : Int(-L.discriminant());
}

/// true iff the columns of the embedding span a saturated sublattice.
inline bool is_primitive(const Embedding& e) {
    if (e.matrix.cols() == 0) return true;
    bool prim = is_saturated(e.matrix);
    if (!prim && is_squarefree(abs(classical_discriminant(e.source))))
        throw std::logic_error("is_primitive: non-primitive embedding of a squarefree-discriminant lattice");
    return prim;
}

/// All embeddings, built column by column in order of decreasing source norm; each
/// column runs over target vectors of the right norm with the required pairings.
/// Sorted by the matrix entries in column-major order.
inline std::vector<Embedding> enumerate_embeddings(const QuadraticLattice& src, const QuadraticLattice& tgt,
                                                   NodeCounter* counter = nullptr) {
    const std::size_t m = src.rank(), n = tgt.rank();
    if (!tgt.is_positive_definite() || (m > 0 && !src.is_positive_definite()))
        throw std::domain_error("enumerate_embeddings: lattices must be positive definite");
    std::vector<Embedding> out;
    if (m == 0) {
        out.push_back({src, tgt, IntMatrix(n, 0)});
        return out;
    }
    if (m > n) return out;
    NodeCounter local(Budget::global().nodes, "embedding enumeration");
    NodeCounter& ctr = counter ? *counter : local;
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return src.norm(a) > src.norm(b); });
    detail::VectorPool pool(tgt, src.norm(perm.front()), &ctr);
    std::vector<std::size_t> img(m);
    auto rec = [&](auto&& self, std::size_t k) -> void {
        if (k == m) {
            IntMatrix mat(n, m);
            for (std::size_t c = 0; c < m; ++c)
                for (std::size_t r = 0; r < n; ++r) mat(r, perm[c]) = pool.vecs[img[c]][r];
            out.push_back({src, tgt, std::move(mat)});
            return;
        }
        for (std::size_t w : pool.of_norm(src.norm(perm[k]))) {
            ctr.tick();
            bool ok = true;
            for (std::size_t l = 0; l < k && ok; ++l) ok = pool.pairing(w, img[l]) == src.gram(perm[k], perm[l]);
            if (!ok) continue;
            img[k] = w;
            self(self, k + 1);
        }
    };
    rec(rec, 0);
    auto key = [](const IntMatrix& a) {
        std::vector<i64> k;
        for (std::size_t c = 0; c < a.cols(); ++c)
            for (std::size_t r = 0; r < a.rows(); ++r) k.push_back(a(r, c));
        return k;
    };
    std::sort(out.begin(), out.end(), [&](const Embedding& a, const Embedding& b) { return key(a.matrix) < key(b.matrix); });
    const BigMatrix bt = to_big(tgt.gram()), bs = to_big(src.gram());
    for (const auto& e : out) {
        BigMatrix mm = to_big(e.matrix);
        if (!(mm.transpose() * bt * mm == bs)) throw std::logic_error("enumerate_embeddings: invalid embedding");
    }
    return out;
}

namespace detail {

/// Pairwise orthogonal w_1..w_n in L together with the cosets of L modulo their span.
/// A coset is recorded by the numerators a_i = B(x, w_i) mod b_i, where b_i = B(w_i, w_i).
struct OrthogonalFrame {
    std::vector<Vec> w;
    std::vector<i64> b;
    std::vector<std::vector<i64>> cosets;
};

inline std::optional<OrthogonalFrame> orthogonal_frame(const QuadraticLattice& L, std::size_t max_cosets,
                                                       NodeCounter& ctr) {
    const std::size_t n = L.rank();
    OrthogonalFrame f;
    std::vector<std::vector<Rational>> span;
    for (std::size_t k = 0; k < n; ++k) {
        BigMatrix basis;
        if (span.empty()) {
            basis = BigMatrix::identity(n);
        } else {
            RatMatrix sb(n, span.size());
            for (std::size_t j = 0; j < span.size(); ++j)
                for (std::size_t i = 0; i < n; ++i) sb(i, j) = span[j][i];
            basis = orthogonal_complement_basis(L, RationalSubspace(n, sb));
        }
        QuadraticLattice K = L.sublattice(basis);
        auto [R, T] = lll_reduce(K);
        i64 mn = minimum(R);
        Vec best;
        for (const auto& v : short_vectors(R, mn, &ctr))
            if (R.evaluate(v) == mn) {
                best = v;
                break;
            }
        BigMatrix tb = basis * T;
        Vec w(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            Int s = 0;
            for (std::size_t j = 0; j < best.size(); ++j) s += tb(i, j) * to_int(best[j]);
            w[i] = to_i64(s);
        }
        std::vector<Rational> wr(n);
        for (std::size_t i = 0; i < n; ++i) wr[i] = Rational(to_int(w[i]));
        span.push_back(wr);
        f.b.push_back(L.pairing(w, w));
        f.w.push_back(std::move(w));
    }
    Int prod = 1;
    for (i64 x : f.b) prod *= to_int(x);
    Int idx2 = prod / L.discriminant();
    Int idx = isqrt(idx2);
    if (idx * idx != idx2) throw std::logic_error("orthogonal_frame: index is not an integer");
    if (idx > Int(static_cast<unsigned long>(max_cosets))) return std::nullopt;
    std::vector<std::vector<i64>> gens;
    for (std::size_t j = 0; j < n; ++j) {
        Vec e(n, 0);
        e[j] = 1;
        std::vector<i64> a(n);
        for (std::size_t i = 0; i < n; ++i) a[i] = mod_pos(L.pairing(e, f.w[i]), f.b[i]);
        gens.push_back(a);
    }
    std::set<std::vector<i64>> seen{std::vector<i64>(n, 0)};
    std::vector<std::vector<i64>> queue{std::vector<i64>(n, 0)};
    for (std::size_t q = 0; q < queue.size(); ++q)
        for (const auto& g : gens) {
            std::vector<i64> nx(n);
            for (std::size_t i = 0; i < n; ++i) nx[i] = (queue[q][i] + g[i]) % f.b[i];
            if (seen.insert(nx).second) queue.push_back(nx);
        }
    if (Int(static_cast<unsigned long>(queue.size())) != idx) throw std::logic_error("orthogonal_frame: coset count mismatch");
    f.cosets = std::move(queue);
    std::sort(f.cosets.begin(), f.cosets.end());
    return f;
}

}  // namespace detail

namespace detail {

/// Expected number of lattice points with Q <= N: volume of the ellipsoid x^T B x <= 2N.
inline double ball_points(const QuadraticLattice& L, i64 max_norm) {
    const double n = static_cast<double>(L.rank());
    const double vol = std::pow(M_PI, n / 2) / std::tgamma(n / 2 + 1);
    return vol * std::pow(2.0 * static_cast<double>(max_norm), n / 2) / std::sqrt(L.discriminant().get_d());
}

}  // namespace detail

namespace detail {

/// Theta coefficients through an orthogonal frame, or none when the frame has more than
/// max_cosets cosets or the estimated work (cosets x rank x array length) exceeds max_work.
/// Partial sums are dense arrays up to dense_limit entries, sparse above.
inline std::optional<std::vector<Int>> theta_by_frame(const QuadraticLattice& L, i64 max_norm, NodeCounter& ctr,
                                                      std::size_t max_cosets = 4096,
                                                      std::size_t dense_limit = std::size_t(1) << 22,
                                                      double max_work = 1e300) {
    const std::size_t n = L.rank();
    std::vector<Int> out(static_cast<std::size_t>(max_norm) + 1, 0);
    auto frame = orthogonal_frame(L, max_cosets, ctr);
    if (!frame) return std::nullopt;
    i64 den = 1;
    for (i64 b : frame->b) den = std::lcm(den, 2 * b);
    const std::size_t size = static_cast<std::size_t>(checked_mul(max_norm, den)) + 1;
    if (static_cast<double>(frame->cosets.size()) * static_cast<double>(n) * static_cast<double>(size) > max_work)
        return std::nullopt;
    // exponent of (a + k b)^2 / (2 b), scaled by den
    std::map<std::pair<std::size_t, i64>, std::vector<std::size_t>> series;
    auto terms = [&](std::size_t i, i64 a) -> const std::vector<std::size_t>& {
        auto key = std::make_pair(i, a);
        auto it = series.find(key);
        if (it != series.end()) return it->second;
        std::vector<std::size_t> t;
        const i64 b = frame->b[i];
        const i64 lim = checked_mul(2 * b, max_norm);
        const i64 scale = den / (2 * b);
        for (i64 s = a - b * ((a + isqrt(Int(static_cast<long>(lim))).get_si()) / b + 1);; s += b) {
            if (s > 0 && s * s > lim) break;
            if (s * s <= lim) t.push_back(static_cast<std::size_t>(s * s * scale));
        }
        std::sort(t.begin(), t.end());
        return series.emplace(key, std::move(t)).first->second;
    };
    auto add_out = [&](std::size_t e, i64 c) {
        if (e % static_cast<std::size_t>(den) != 0) throw std::logic_error("theta_series: non-integral norm");
        out[e / static_cast<std::size_t>(den)] += to_int(c);
    };
    if (size > dense_limit) {
        for (const auto& c : frame->cosets) {
            std::vector<std::pair<std::size_t, i64>> acc{{0, 1}};
            for (std::size_t i = 0; i < n && !acc.empty(); ++i) {
                const auto& t = terms(i, c[i]);
                std::map<std::size_t, i64> m;
                for (const auto& [e, cnt] : acc)
                    for (std::size_t s : t) {
                        if (e + s >= size) break;
                        auto& slot = m[e + s];
                        slot = checked_add(slot, cnt);
                    }
                ctr.tick(acc.size() * t.size() + 1);
                acc.assign(m.begin(), m.end());
            }
            for (const auto& [e, cnt] : acc) add_out(e, cnt);
        }
        return out;
    }
    std::vector<i64> acc(size), next(size);
    for (const auto& c : frame->cosets) {
        std::fill(acc.begin(), acc.end(), 0);
        acc[0] = 1;
        std::size_t top = 0;
        bool empty = false;
        for (std::size_t i = 0; i < n && !empty; ++i) {
            const auto& t = terms(i, c[i]);
            if (t.empty()) {
                empty = true;
                break;
            }
            std::fill(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(std::min(size, top + t.back() + 1)), 0);
            std::size_t ntop = 0;
            for (std::size_t e = 0; e <= top; ++e) {
                if (acc[e] == 0) continue;
                for (std::size_t s : t) {
                    if (e + s >= size) break;
                    next[e + s] = checked_add(next[e + s], acc[e]);
                    ntop = std::max(ntop, e + s);
                }
            }
            ctr.tick(top + 1);
            std::swap(acc, next);
            top = ntop;
        }
        for (std::size_t e = 0; e <= top && !empty; ++e)
            if (acc[e] != 0) add_out(e, acc[e]);
    }
    return out;
}

}  // namespace detail

/// Number of vectors of each norm 0..max_norm (index = norm). Small balls are enumerated;
/// larger ones go through an orthogonal frame (enumeration again if it has too many cosets).
inline std::vector<Int> theta_series(const QuadraticLattice& L, i64 max_norm, NodeCounter* counter = nullptr) {
    if (!L.is_positive_definite() && L.rank() > 0) throw std::domain_error("theta_series: lattice is not positive definite");
    if (max_norm < 0) throw std::invalid_argument("theta_series: negative bound");
    NodeCounter local(Budget::global().nodes, "theta series");
    NodeCounter& ctr = counter ? *counter : local;
    const double points = L.rank() > 0 && max_norm > 0 ? detail::ball_points(L, max_norm) : 0;
    if (points >= 2e5)
        if (auto t = detail::theta_by_frame(L, max_norm, ctr, 4096, std::size_t(1) << 22, 50 * points)) return *t;
    std::vector<Int> out(static_cast<std::size_t>(max_norm) + 1, 0);
    out[0] = 1;
    for (const auto& v : short_vectors(L, max_norm, &ctr)) out[static_cast<std::size_t>(L.evaluate(v))] += 1;
    return out;
}

/// Primitive counts from total counts: r*(d) = sum over k^2 | d of mu(k) r(d / k^2).
inline std::vector<Int> primitive_from_total(const std::vector<Int>& total) {
    std::vector<Int> out(total.size(), 0);
    for (std::size_t d = 1; d < total.size(); ++d)
        for (std::size_t k = 1; k * k <= d; ++k) {
            if (d % (k * k) != 0) continue;
            auto f = factor(Int(static_cast<unsigned long>(k)));
            bool sqfree = std::all_of(f.begin(), f.end(), [](const auto& pe) { return pe.second == 1; });
            if (!sqfree) continue;
            if (f.size() % 2 == 0) out[d] += total[d / (k * k)];
            else out[d] -= total[d / (k * k)];
        }
    return out;
}

inline Int representation_count(const QuadraticLattice& src, const QuadraticLattice& tgt, NodeCounter* counter = nullptr) {
    if (src.rank() == 0) return 1;
    if (src.rank() > tgt.rank()) return 0;
    if (src.rank() == 1) {
        if (!src.is_positive_definite()) throw std::domain_error("representation_count: source is not positive definite");
        return theta_series(tgt, src.norm(0), counter).back();
    }
    return static_cast<unsigned long>(enumerate_embeddings(src, tgt, counter).size());
}

inline Int primitive_representation_count(const QuadraticLattice& src, const QuadraticLattice& tgt,
                                          NodeCounter* counter = nullptr) {
    if (src.rank() == 0) return 1;
    if (src.rank() > tgt.rank()) return 0;
    if (src.rank() == 1) {
        if (!src.is_positive_definite()) throw std::domain_error("primitive_representation_count: source is not positive definite");
        return primitive_from_total(theta_series(tgt, src.norm(0), counter)).back();
    }
    Int c = 0;
    for (const auto& e : enumerate_embeddings(src, tgt, counter))
        if (is_primitive(e)) c += 1;
    return c;
}

struct ClassCounts {
    bool all_represented = false;
    std::vector<std::size_t> classes;
    std::vector<Int> counts;  // primitive counts, aligned with `classes`
};

/// Primitive representation counts of L' by each class of one spinor block.
inline ClassCounts represented_by_every_class(const QuadraticLattice& src, const GenusRecord& rec, std::size_t block) {
    if (!rec.complete) throw std::invalid_argument("represented_by_every_class: genus record is incomplete");
    if (block >= rec.spinor_partition.size()) throw std::out_of_range("represented_by_every_class: no such spinor block");
    ClassCounts out;
    out.classes = rec.spinor_partition[block];
    if (src.rank() > rec.classes.front().rank()) {
        out.counts.assign(out.classes.size(), 0);
        return out;
    }
    out.all_represented = true;
    for (std::size_t c : out.classes) {
        out.counts.push_back(primitive_representation_count(src, rec.classes[c]));
        if (out.counts.back() == 0) out.all_represented = false;
    }
    return out;
}

struct WeightedCounts {
    Rational r_tilde;          // sum r_i / |Aut_i|
    std::vector<Int> counts;   // r_i per class
    Rational g;                // mass

    /// r_i g / r_tilde.
    Rational ratio(std::size_t i) const {
        if (r_tilde == 0) throw std::domain_error("WeightedCounts::ratio: no representations in the genus");
        return Rational(counts[i]) * g / r_tilde;
    }
};

inline WeightedCounts weighted_counts_from(const std::vector<Int>& counts, const GenusRecord& rec) {
    WeightedCounts w{Rational(0), counts, mass(rec)};
    for (std::size_t i = 0; i < counts.size(); ++i) w.r_tilde += ratio(counts[i], rec.aut_orders[i]);
    w.r_tilde.canonicalize();
    return w;
}

inline WeightedCounts weighted_counts(const QuadraticLattice& src, const GenusRecord& rec, bool primitive = false) {
    std::vector<Int> counts;
    for (const auto& c : rec.classes)
        counts.push_back(primitive ? primitive_representation_count(src, c) : representation_count(src, c));
    return weighted_counts_from(counts, rec);
}

}  // namespace qlat

#endif
