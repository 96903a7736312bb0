#ifndef QLAT_ISOMETRY_HPP
#define QLAT_ISOMETRY_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lattice.hpp"

namespace qlat {

namespace detail {

/// Short vectors of a lattice with B v cached, indexed by norm.
struct VectorPool {
    i64 bound = 0;
    std::vector<Vec> vecs;
    std::vector<Vec> bvecs;
    std::map<i64, std::vector<std::size_t>> by_norm;
    std::map<Vec, std::size_t> index;

    VectorPool() = default;

    VectorPool(const QuadraticLattice& L, i64 b, NodeCounter* counter = nullptr) : bound(b) {
        vecs = short_vectors(L, b, counter);
        const std::size_t n = L.rank();
        bvecs.reserve(vecs.size());
        for (std::size_t k = 0; k < vecs.size(); ++k) {
            Vec bv(n, 0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) detail::mul_acc(bv[i], L.gram(i, j), vecs[k][j]);
            bvecs.push_back(std::move(bv));
            by_norm[L.evaluate(vecs[k])].push_back(k);
            index.emplace(vecs[k], k);
        }
    }

    i64 pairing(std::size_t a, std::size_t b) const {
        i64 s = 0;
        for (std::size_t i = 0; i < vecs[b].size(); ++i) detail::mul_acc(s, bvecs[a][i], vecs[b][i]);
        return s;
    }

    const std::vector<std::size_t>& of_norm(i64 q) const {
        static const std::vector<std::size_t> empty;
        auto it = by_norm.find(q);
        return it == by_norm.end() ? empty : it->second;
    }

    std::vector<std::uint64_t> histogram(i64 upto) const {
        std::vector<std::uint64_t> h(static_cast<std::size_t>(upto) + 1, 0);
        for (const auto& [q, idx] : by_norm)
            if (q <= upto) h[static_cast<std::size_t>(q)] = idx.size();
        return h;
    }
};

/// Backtracking over images of the source basis among pool vectors with matching
/// norms and pairings.
class ImageSearch {
public:
    ImageSearch(const IntMatrix& source_gram, const VectorPool& pool, NodeCounter& counter)
        : a_(source_gram), pool_(pool), counter_(counter) {}

    /// Extends img[0..k) to a full list of images; returns false if impossible.
    bool extend(std::vector<std::size_t>& img, std::size_t k) {
        const std::size_t n = a_.rows();
        if (k == n) return true;
        img.resize(n);
        for (std::size_t w : pool_.of_norm(a_(k, k) / 2)) {
            counter_.tick();
            bool ok = true;
            for (std::size_t j = 0; j < k && ok; ++j) ok = pool_.pairing(w, img[j]) == a_(k, j);
            if (!ok) continue;
            img[k] = w;
            if (extend(img, k + 1)) return true;
        }
        return false;
    }

    /// Number of complete extensions of img[0..k).
    std::uint64_t count(std::vector<std::size_t>& img, std::size_t k) {
        const std::size_t n = a_.rows();
        if (k == n) return 1;
        img.resize(n);
        std::uint64_t total = 0;
        for (std::size_t w : pool_.of_norm(a_(k, k) / 2)) {
            counter_.tick();
            bool ok = true;
            for (std::size_t j = 0; j < k && ok; ++j) ok = pool_.pairing(w, img[j]) == a_(k, j);
            if (!ok) continue;
            img[k] = w;
            total += count(img, k + 1);
        }
        return total;
    }

    IntMatrix matrix(const std::vector<std::size_t>& img) const {
        const std::size_t n = a_.rows();
        IntMatrix m(pool_.vecs.empty() ? n : pool_.vecs[0].size(), n);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < m.rows(); ++i) m(i, k) = pool_.vecs[img[k]][i];
        return m;
    }

private:
    const IntMatrix& a_;
    const VectorPool& pool_;
    NodeCounter& counter_;
};

inline i64 max_basis_norm(const QuadraticLattice& L) {
    i64 b = 0;
    for (std::size_t i = 0; i < L.rank(); ++i) b = std::max(b, L.norm(i));
    return b;
}

inline BigMatrix unimodular_inverse(const BigMatrix& t) {
    RatMatrix inv = inverse(to_rational(t));
    BigMatrix out(t.rows(), t.cols());
    for (std::size_t i = 0; i < t.rows(); ++i)
        for (std::size_t j = 0; j < t.cols(); ++j) {
            if (inv(i, j).get_den() != 1) throw std::logic_error("unimodular_inverse: not unimodular");
            out(i, j) = inv(i, j).get_num();
        }
    return out;
}

}  // namespace detail

struct AutomorphismGroup {
    Int order;
    std::vector<IntMatrix> generators;  // g^T B g = B in the lattice's own basis

    bool has_improper() const {
        for (const auto& g : generators)
            if (determinant(g) == -1) return true;
        return false;
    }
};

/// Stabilizer chain on an LLL-reduced basis e_1..e_n: |Aut| is the product over i of the
/// orbit length of e_i under the pointwise stabilizer of e_1..e_{i-1}. Orbits grow by
/// backtracking for automorphisms that send e_i to each candidate not yet reached.
inline AutomorphismGroup automorphism_group(const QuadraticLattice& L, NodeCounter* counter = nullptr) {
    if (!L.is_positive_definite()) throw std::domain_error("automorphism_group: lattice is not positive definite");
    const std::size_t n = L.rank();
    AutomorphismGroup out{Int(1), {}};
    if (n == 0) return out;
    NodeCounter local(Budget::global().nodes, "automorphism search");
    NodeCounter& ctr = counter ? *counter : local;
    auto [R, T] = lll_reduce(L);
    detail::VectorPool pool(R, detail::max_basis_norm(R), &ctr);
    detail::ImageSearch search(R.gram(), pool, ctr);
    std::vector<std::size_t> unit(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec e(n, 0);
        e[i] = 1;
        unit[i] = pool.index.at(e);
    }
    std::vector<IntMatrix> gens;
    std::vector<std::size_t> gen_level;
    auto closure = [&](std::set<std::size_t> seeds, std::size_t level) {
        std::vector<std::size_t> queue(seeds.begin(), seeds.end());
        for (std::size_t q = 0; q < queue.size(); ++q)
            for (std::size_t g = 0; g < gens.size(); ++g) {
                if (gen_level[g] < level) continue;
                Vec img = gens[g] * pool.vecs[queue[q]];
                std::size_t idx = pool.index.at(img);
                if (seeds.insert(idx).second) queue.push_back(idx);
            }
        return seeds;
    };
    for (std::size_t i = n; i-- > 0;) {
        std::set<std::size_t> orbit = closure({unit[i]}, i);
        std::set<std::size_t> excluded;
        for (std::size_t w : pool.of_norm(R.norm(i))) {
            bool fits = true;
            for (std::size_t j = 0; j < i && fits; ++j) fits = pool.bvecs[w][j] == R.gram(i, j);
            if (!fits || orbit.count(w) || excluded.count(w)) continue;
            std::vector<std::size_t> img(unit.begin(), unit.begin() + static_cast<std::ptrdiff_t>(i));
            img.push_back(w);
            if (search.extend(img, i + 1)) {
                gens.push_back(search.matrix(img));
                gen_level.push_back(i);
                orbit = closure(orbit, i);
            } else {
                auto more = closure({w}, i);
                excluded.insert(more.begin(), more.end());
            }
        }
        out.order *= static_cast<unsigned long>(orbit.size());
    }
    BigMatrix tinv = detail::unimodular_inverse(T);
    for (const auto& g : gens) out.generators.push_back(to_small(T * to_big(g) * tinv));
    return out;
}

inline Int automorphism_order(const QuadraticLattice& L) { return automorphism_group(L).order; }

/// Plain enumeration of all automorphisms (every leaf of the image search). Exponential;
/// intended as an independent check on small lattices.
inline std::uint64_t count_automorphisms_exhaustive(const QuadraticLattice& L, NodeCounter* counter = nullptr) {
    if (!L.is_positive_definite()) throw std::domain_error("lattice is not positive definite");
    if (L.rank() == 0) return 1;
    NodeCounter local(Budget::global().nodes, "automorphism enumeration");
    NodeCounter& ctr = counter ? *counter : local;
    auto R = lll_reduce(L).first;
    detail::VectorPool pool(R, detail::max_basis_norm(R), &ctr);
    detail::ImageSearch search(R.gram(), pool, ctr);
    std::vector<std::size_t> img;
    return search.count(img, 0);
}

namespace detail {

/// Isometry between reduced lattices: columns of the result are coordinates in `target`
/// of the images of the basis of `source`.
inline std::optional<IntMatrix> find_isometry_reduced(const QuadraticLattice& source, const QuadraticLattice& /*target*/,
                                                      const VectorPool& target_pool, NodeCounter& ctr) {
    ImageSearch search(source.gram(), target_pool, ctr);
    std::vector<std::size_t> img;
    if (!search.extend(img, 0)) return std::nullopt;
    return search.matrix(img);
}

}  // namespace detail

/// An integer matrix T with T^T B1 T = B2, or none. Rejects early on discriminant,
/// minimum and the short-vector norm histogram.
inline std::optional<BigMatrix> is_isometric(const QuadraticLattice& l1, const QuadraticLattice& l2,
                                             NodeCounter* counter = nullptr) {
    if (l1.rank() != l2.rank()) throw std::invalid_argument("is_isometric: rank mismatch");
    const std::size_t n = l1.rank();
    if (n == 0) return BigMatrix(0, 0);
    if (!l1.is_positive_definite() || !l2.is_positive_definite())
        throw std::domain_error("is_isometric: lattices must be positive definite");
    if (l1.discriminant() != l2.discriminant()) return std::nullopt;
    NodeCounter local(Budget::global().nodes, "isometry search");
    NodeCounter& ctr = counter ? *counter : local;
    auto [r1, t1] = lll_reduce(l1);
    auto [r2, t2] = lll_reduce(l2);
    const i64 bound = std::max(detail::max_basis_norm(r1), detail::max_basis_norm(r2));
    detail::VectorPool p1(r1, bound, &ctr), p2(r2, bound, &ctr);
    if (p1.histogram(bound) != p2.histogram(bound)) return std::nullopt;
    auto u = detail::find_isometry_reduced(r2, r1, p1, ctr);
    if (!u) return std::nullopt;
    // r2 = t2^T B2 t2 and r2 = u^T (t1^T B1 t1) u, so T = t1 u t2^{-1}.
    return t1 * to_big(*u) * detail::unimodular_inverse(t2);
}

}  // namespace qlat

#endif
