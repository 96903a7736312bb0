#ifndef QLAT_TESTS_SUPPORT_HPP
#define QLAT_TESTS_SUPPORT_HPP

#include <algorithm>
#include <random>
#include <vector>

#include <qlat/qlat.hpp>

namespace qtest {

using namespace qlat;

inline i64 uniform(std::mt19937_64& rng, i64 lo, i64 hi) { return std::uniform_int_distribution<i64>(lo, hi)(rng); }

inline i64 nonzero(std::mt19937_64& rng, i64 lo, i64 hi) {
    i64 v = 0;
    while (v == 0) v = uniform(rng, lo, hi);
    return v;
}

/// Product of random elementary column operations and signed swaps; det = +-1.
inline IntMatrix random_unimodular(std::mt19937_64& rng, std::size_t n, int steps = 8, i64 range = 2) {
    IntMatrix t = IntMatrix::identity(n);
    if (n < 2) {
        if (n == 1 && uniform(rng, 0, 1)) t(0, 0) = -1;
        return t;
    }
    for (int s = 0; s < steps; ++s) {
        std::size_t i = uniform(rng, 0, n - 1), j = uniform(rng, 0, n - 2);
        if (j >= i) ++j;
        i64 c = nonzero(rng, -range, range);
        for (std::size_t r = 0; r < n; ++r) t(r, j) = checked_add(t(r, j), checked_mul(c, t(r, i)));
    }
    if (uniform(rng, 0, 1)) {
        for (std::size_t r = 0; r < n; ++r) t(r, 0) = -t(r, 0);
    }
    return t;
}

/// Positive definite lattice with a random reduced-ish Gram: diagonal form moved by a small unimodular.
inline QuadraticLattice random_definite(std::mt19937_64& rng, std::size_t n, i64 maxcoef = 6, int steps = 4) {
    std::vector<i64> c(n);
    for (auto& x : c) x = uniform(rng, 1, maxcoef);
    QuadraticLattice d = QuadraticLattice::diagonal(c);
    return d.transformed(random_unimodular(rng, n, steps, 1));
}

/// Positive definite even Gram (B) with random off-diagonal entries; diagonal dominant.
inline QuadraticLattice random_gram(std::mt19937_64& rng, std::size_t n, i64 off = 3) {
    IntMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) g(i, j) = g(j, i) = uniform(rng, -off, off);
    for (std::size_t i = 0; i < n; ++i) {
        i64 s = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) s += g(i, j) < 0 ? -g(i, j) : g(i, j);
        i64 d = s + uniform(rng, 1, 4);
        g(i, i) = d % 2 ? d + 1 : d;
    }
    return QuadraticLattice(g);
}

/// All x with |x_i| <= box, Q(x) <= bound, x != 0: brute force.
inline std::vector<Vec> box_vectors(const QuadraticLattice& L, i64 box, i64 bound) {
    const std::size_t n = L.rank();
    std::vector<Vec> out;
    Vec x(n, -box);
    while (true) {
        bool zero = std::all_of(x.begin(), x.end(), [](i64 v) { return v == 0; });
        if (!zero && L.evaluate(x) <= bound) out.push_back(x);
        std::size_t k = 0;
        while (k < n && x[k] == box) x[k++] = -box;
        if (k == n) break;
        ++x[k];
    }
    return out;
}


/// |Aut(L)| as the product over levels i = 0..n-1 of the number of vectors w such that some
/// automorphism fixes e_0..e_{i-1} and sends e_i to w. Each candidate is checked by its own
/// backtracking; the vector pool is scanned in reverse enumeration order.
class AutCounter {
public:
    explicit AutCounter(const QuadraticLattice& L) : R_(lll_reduce(L).first), n_(R_.rank()) {
        i64 bound = 0;
        for (std::size_t i = 0; i < n_; ++i) bound = std::max(bound, R_.norm(i));
        pool_ = short_vectors(R_, bound);
        std::reverse(pool_.begin(), pool_.end());
        for (std::size_t i = 0; i < n_; ++i) {
            units_.emplace_back(n_, 0);
            units_.back()[i] = 1;
        }
    }

    Int order() {
        Int total = 1;
        std::vector<const Vec*> img;
        for (std::size_t i = 0; i < n_; ++i) {
            std::uint64_t orbit = 0;
            for (const auto& w : pool_) {
                if (!fits(img, w, i)) continue;
                img.push_back(&w);
                if (extend(img)) ++orbit;
                img.pop_back();
            }
            total *= static_cast<unsigned long>(orbit);
            img.push_back(&unit(i));
        }
        return total;
    }

private:
    const Vec& unit(std::size_t i) const { return units_[i]; }

    bool fits(const std::vector<const Vec*>& img, const Vec& w, std::size_t k) const {
        if (R_.evaluate(w) != R_.norm(k)) return false;
        for (std::size_t j = 0; j < img.size(); ++j)
            if (R_.pairing(*img[j], w) != R_.gram(j, k)) return false;
        return true;
    }

    bool extend(std::vector<const Vec*>& img) const {
        const std::size_t k = img.size();
        if (k == n_) return true;
        for (const auto& w : pool_) {
            if (!fits(img, w, k)) continue;
            img.push_back(&w);
            bool ok = extend(img);
            img.pop_back();
            if (ok) return true;
        }
        return false;
    }

    QuadraticLattice R_;
    std::size_t n_;
    std::vector<Vec> pool_;
    std::vector<Vec> units_;
};

}  // namespace qtest

#endif
