#ifndef QLAT_GENUS_HPP
#define QLAT_GENUS_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gram_io.hpp"
#include "isometry.hpp"
#include "local.hpp"

namespace qlat {

namespace detail {

inline i64 inv_mod(i64 a, i64 p) { return static_cast<i64>(inv_mod128(mod_pos(a, p), p)); }

/// Q over F_p: coefficient c[i*n+j] is Q(e_i) for i == j and B_ij for i < j.
struct FormModP {
    std::size_t n;
    i64 p;
    std::vector<i64> c;

    FormModP(const QuadraticLattice& L, i64 prime) : n(L.rank()), p(prime), c(n * n, 0) {
        for (std::size_t i = 0; i < n; ++i) {
            c[i * n + i] = mod_pos(L.norm(i), p);
            for (std::size_t j = i + 1; j < n; ++j) c[i * n + j] = mod_pos(L.gram(i, j), p);
        }
    }

    i64 operator()(const Vec& x) const {
        i64 s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (x[i] == 0) continue;
            i64 row = 0;
            for (std::size_t j = i; j < n; ++j) row += c[i * n + j] * x[j];
            s = (s + (row % p) * x[i]) % p;
        }
        return s;
    }
};

/// Scales x mod p so that its first nonzero entry is 1; false for the zero vector.
inline bool normalize_line(Vec& x, i64 p) {
    std::size_t k = 0;
    while (k < x.size() && x[k] == 0) ++k;
    if (k == x.size()) return false;
    const i64 inv = inv_mod(x[k], p);
    for (std::size_t i = k; i < x.size(); ++i) x[i] = x[i] * inv % p;
    return true;
}

inline std::uint64_t line_code(const Vec& x, i64 p) {
    std::uint64_t c = 0;
    for (std::size_t i = x.size(); i-- > 0;) c = c * static_cast<std::uint64_t>(p) + static_cast<std::uint64_t>(x[i]);
    return c;
}

inline Vec decode_line(std::uint64_t c, std::size_t n, i64 p) {
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = static_cast<i64>(c % static_cast<std::uint64_t>(p));
        c /= static_cast<std::uint64_t>(p);
    }
    return x;
}

/// p^n, or 0 if it exceeds 2^62.
inline std::uint64_t line_space_size(std::size_t n, i64 p) {
    std::uint64_t t = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (t > (std::uint64_t(1) << 62) / static_cast<std::uint64_t>(p)) return 0;
        t *= static_cast<std::uint64_t>(p);
    }
    return t;
}

/// Calls f(x) for every isotropic line mod p, x normalized.
template <class F>
void for_each_isotropic_line(const QuadraticLattice& L, i64 p, NodeCounter& ctr, F&& f) {
    const std::size_t n = L.rank();
    FormModP q(L, p);
    Vec x(n);
    for (std::size_t lead = 0; lead < n; ++lead) {
        std::fill(x.begin(), x.end(), 0);
        x[lead] = 1;
        while (true) {
            ctr.tick();
            if (q(x) == 0) f(x);
            std::size_t i = n;
            while (i-- > lead + 1) {
                if (++x[i] < p) break;
                x[i] = 0;
            }
            if (i == lead) break;
        }
    }
}

/// One representative per orbit of Aut(L) on the isotropic lines mod p.
inline std::vector<Vec> isotropic_orbit_reps(const QuadraticLattice& L, i64 p, const std::vector<IntMatrix>& gens,
                                             NodeCounter& ctr) {
    const std::size_t n = L.rank();
    const std::uint64_t total = line_space_size(n, p);
    if (total == 0) throw std::length_error("isotropic_orbit_reps: line space too large");
    std::vector<bool> seen(total, false);
    std::vector<std::vector<i64>> gp;
    for (const auto& g : gens) {
        std::vector<i64> m(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m[i * n + j] = mod_pos(g(i, j), p);
        gp.push_back(std::move(m));
    }
    std::vector<Vec> reps;
    std::vector<std::uint64_t> queue;
    Vec y(n);
    for_each_isotropic_line(L, p, ctr, [&](const Vec& x) {
        std::uint64_t c = line_code(x, p);
        if (seen[c]) return;
        seen[c] = true;
        reps.push_back(x);
        queue.assign(1, c);
        while (!queue.empty()) {
            Vec z = decode_line(queue.back(), n, p);
            queue.pop_back();
            for (const auto& m : gp) {
                ctr.tick();
                for (std::size_t i = 0; i < n; ++i) {
                    i64 s = 0;
                    for (std::size_t j = 0; j < n; ++j) s += m[i * n + j] * z[j];
                    y[i] = s % p;
                }
                normalize_line(y, p);
                std::uint64_t cy = line_code(y, p);
                if (!seen[cy]) {
                    seen[cy] = true;
                    queue.push_back(cy);
                }
            }
        }
    });
    return reps;
}

/// Up to `count` distinct isotropic lines mod p drawn at random (deterministic seed).
inline std::vector<Vec> sampled_isotropic_lines(const QuadraticLattice& L, i64 p, std::size_t count, std::uint64_t seed,
                                                NodeCounter& ctr) {
    const std::size_t n = L.rank();
    FormModP q(L, p);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<i64> coord(0, p - 1);
    std::set<std::uint64_t> seen;
    std::vector<Vec> out;
    const std::uint64_t tries = static_cast<std::uint64_t>(count) * static_cast<std::uint64_t>(p) * 20;
    Vec x(n);
    for (std::uint64_t t = 0; t < tries && out.size() < count; ++t) {
        ctr.tick();
        for (auto& v : x) v = coord(rng);
        if (!normalize_line(x, p) || q(x) != 0) continue;
        if (seen.insert(line_code(x, p)).second) out.push_back(x);
    }
    return out;
}

/// Kneser neighbor N = L_v + Z v'/p, where L_v = {x : B(x, v) = 0 mod p} and v' = v mod p
/// with Q(v') = 0 mod p^2. Computed as the span of p L_v and v', scaled down by p.
inline QuadraticLattice kneser_neighbor(const QuadraticLattice& L, const Vec& v, i64 p) {
    const std::size_t n = L.rank();
    Vec bv(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        i128 s = 0;
        for (std::size_t j = 0; j < n; ++j) s += static_cast<i128>(L.gram(i, j)) * v[j];
        bv[i] = static_cast<i64>(mod128(s, p));
    }
    std::size_t k = 0;
    while (k < n && bv[k] == 0) ++k;
    if (k == n) throw std::invalid_argument("kneser_neighbor: v is in the radical mod p");
    const i64 inv = inv_mod(bv[k], p);
    i128 qv = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) qv += static_cast<i128>(L.gram(i, j)) * v[i] * v[j];
    qv /= 2;
    if (mod128(qv, p) != 0) throw std::invalid_argument("kneser_neighbor: v is not isotropic mod p");
    const i64 c = static_cast<i64>(mod128(-(qv / p) * inv, p));
    BigMatrix gens(n, n + 1);
    for (std::size_t j = 0, col = 0; j < n; ++j) {
        if (j == k) continue;
        gens(j, col) = p;
        gens(k, col) = -(Int(static_cast<long>(bv[j] * inv % p)) * p);
        ++col;
    }
    gens(k, n - 1) = Int(static_cast<long>(p)) * p;
    for (std::size_t i = 0; i < n; ++i) gens(i, n) = static_cast<long>(v[i]);
    gens(k, n) += Int(static_cast<long>(p)) * c;
    BigMatrix basis = column_span_basis(gens);
    BigMatrix g = basis.transpose() * to_big(L.gram()) * basis;
    const Int p2 = Int(static_cast<long>(p)) * p;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (g(i, j) % p2 != 0) throw std::logic_error("kneser_neighbor: non-integral neighbor");
            g(i, j) /= p2;
        }
    return QuadraticLattice(g);
}

inline void assert_same_genus(const QuadraticLattice& a, const QuadraticLattice& b) {
    if (a.rank() != b.rank() || a.discriminant() != b.discriminant())
        throw std::logic_error("neighbor changed rank or discriminant");
    if (signature(a) != signature(b)) throw std::logic_error("neighbor changed the signature");
    for (const auto& p : prime_divisors(2 * a.discriminant()))
        if (!local_isometric(a, b, p))
            throw std::logic_error("neighbor is not locally isometric at p = " + p.get_str());
}

inline void check_neighbor_prime(const QuadraticLattice& L, long p) {
    if (p < 3 || !is_prime(Int(p))) throw std::invalid_argument("p_neighbors: p must be an odd prime");
    if (L.discriminant() % p == 0) throw std::invalid_argument("p_neighbors: p divides the discriminant");
    if (!L.is_positive_definite()) throw std::domain_error("p_neighbors: lattice is not positive definite");
}

/// The smallest `count` odd primes not dividing disc(L), starting after `after`.
inline std::vector<long> valid_odd_primes(const QuadraticLattice& L, std::size_t count, long after = 2) {
    std::vector<long> out;
    for (long p = after + 1; out.size() < count; ++p)
        if (p > 2 && is_prime(Int(p)) && L.discriminant() % p != 0) out.push_back(p);
    return out;
}

}  // namespace detail

/// Kneser p-neighbors of L, one per isotropic line mod p.
inline std::vector<QuadraticLattice> p_neighbors(const QuadraticLattice& L, long p) {
    detail::check_neighbor_prime(L, p);
    std::vector<QuadraticLattice> out;
    if (L.rank() < 2) return out;
    NodeCounter ctr(Budget::global().nodes, "p_neighbors");
    detail::for_each_isotropic_line(L, p, ctr, [&](const Vec& v) {
        QuadraticLattice n = detail::kneser_neighbor(L, v, p);
        detail::assert_same_genus(L, n);
        out.push_back(std::move(n));
    });
    return out;
}

struct NeighborEdge {
    std::size_t from;
    std::size_t to;
    long prime;
};

enum class Stability { NotChecked, Stable, StableSampled, Extended };

inline const char* to_string(Stability s) {
    switch (s) {
        case Stability::NotChecked: return "not-checked";
        case Stability::Stable: return "stable";
        case Stability::StableSampled: return "stable-sampled";
        case Stability::Extended: return "extended";
    }
    return "?";
}

struct GenusRecord {
    std::vector<QuadraticLattice> classes;
    std::vector<Int> aut_orders;
    std::vector<i64> minima;
    Rational mass;
    std::vector<std::vector<std::size_t>> spinor_partition;
    std::vector<long> neighbor_primes_used;
    bool complete = true;
    Stability stability = Stability::NotChecked;
    std::string note;
    std::vector<NeighborEdge> edges;  // neighbor steps found during enumeration

    std::size_t size() const { return classes.size(); }

    std::size_t spinor_block(std::size_t cls) const {
        for (std::size_t b = 0; b < spinor_partition.size(); ++b)
            for (std::size_t c : spinor_partition[b])
                if (c == cls) return b;
        throw std::out_of_range("class not in the spinor partition");
    }
};

struct GenusOptions {
    std::size_t base_primes = 3;
    std::size_t extra_primes = 2;
    std::size_t max_classes = 5000;
    std::uint64_t full_line_limit = std::uint64_t(1) << 26;  // larger line spaces are sampled
    std::size_t sampled_lines = 200;
    std::uint64_t node_budget = Budget::global().nodes;
};

namespace detail {

/// Neighbor closure with classes deduplicated by invariants and then isometry.
class GenusExplorer {
public:
    struct Entry {
        QuadraticLattice rep;  // LLL reduced
        i64 min;
        std::vector<std::uint64_t> hist;
        VectorPool pool;
        std::optional<AutomorphismGroup> aut;
        std::set<long> expanded;
    };

    GenusExplorer(const QuadraticLattice& base, const GenusOptions& opt, NodeCounter& ctr)
        : base_(base), opt_(opt), ctr_(ctr) {
        hist_bound_ = max_basis_norm(lll_reduce(base).first);
    }

    std::size_t add_or_find(const QuadraticLattice& cand, bool check_genus = true) {
        QuadraticLattice r = lll_reduce(cand).first;
        const i64 need = max_basis_norm(r);
        VectorPool own(r, std::max(need, hist_bound_), &ctr_);
        auto hist = own.histogram(hist_bound_);
        i64 mn = own.by_norm.begin()->first;
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            Entry& e = entries_[i];
            if (e.min != mn || e.hist != hist) continue;
            if (e.pool.bound < need) e.pool = VectorPool(e.rep, need, &ctr_);
            if (find_isometry_reduced(r, e.rep, e.pool, ctr_)) return i;
        }
        if (entries_.size() >= opt_.max_classes) throw BudgetExhausted("genus enumeration: class limit reached");
        if (check_genus) assert_same_genus(base_, r);
        entries_.push_back(Entry{r, mn, hist, std::move(own), std::nullopt, {}});
        return entries_.size() - 1;
    }

    const AutomorphismGroup& aut(std::size_t i) {
        if (!entries_[i].aut) entries_[i].aut = automorphism_group(entries_[i].rep, &ctr_);
        return *entries_[i].aut;
    }

    /// Adds the p-neighbors of class i (one per Aut-orbit of lines, or a sample when the
    /// line space is large). Returns false if lines were sampled.
    bool expand(std::size_t i, long p) {
        entries_[i].expanded.insert(p);
        if (entries_[i].rep.rank() < 2) return true;
        const std::size_t n = entries_[i].rep.rank();
        const std::uint64_t total = line_space_size(n, p);
        std::vector<Vec> lines;
        bool full = total != 0 && total <= opt_.full_line_limit;
        if (full) {
            const auto gens = aut(i).generators;
            lines = isotropic_orbit_reps(entries_[i].rep, p, gens, ctr_);
        } else {
            lines = sampled_isotropic_lines(entries_[i].rep, p, opt_.sampled_lines,
                                            static_cast<std::uint64_t>(p) * 1000003u + i, ctr_);
        }
        for (const auto& v : lines) {
            QuadraticLattice nb = kneser_neighbor(entries_[i].rep, v, p);
            std::size_t j = add_or_find(nb);
            edges_.push_back({i, j, p});
        }
        return full;
    }

    /// Expands every class at every prime in `primes` until nothing new appears.
    bool close(const std::vector<long>& primes) {
        bool full = true;
        for (std::size_t i = 0; i < entries_.size(); ++i)
            for (long p : primes)
                if (!entries_[i].expanded.count(p)) full = expand(i, p) && full;
        return full;
    }

    std::vector<Entry>& entries() { return entries_; }
    const std::vector<NeighborEdge>& edges() const { return edges_; }
    i64 hist_bound() const { return hist_bound_; }

private:
    QuadraticLattice base_;
    GenusOptions opt_;
    NodeCounter& ctr_;
    i64 hist_bound_;
    std::vector<Entry> entries_;
    std::vector<NeighborEdge> edges_;
};

/// F_2 coordinates of square classes at the primes dividing 2 disc(L): two bits at odd p
/// (valuation parity, nonresidue), three at 2 (valuation parity, u = 3 mod 4, u = +-3 mod 8).
class SpinorLabels {
public:
    explicit SpinorLabels(const QuadraticLattice& L) {
        primes_ = prime_divisors(2 * L.discriminant());
        for (const auto& p : primes_) {
            offset_.push_back(dim_);
            dim_ += p == 2 ? 3 : 2;
        }
        if (dim_ > 63) throw std::length_error("SpinorLabels: too many primes");
        for (std::size_t k = 0; k < primes_.size(); ++k) {
            const SquareClassGroup kernel = local_spinor_kernel(L, primes_[k]);
            for (const auto& c : kernel.elements())
                add_relation(encode_at(Rational(c.representative()), k));
            add_relation(diagonal(Rational(primes_[k])));
        }
        proper_rank_ = basis_.size();
        add_relation(improper_shift(L));
    }

    /// Image of the idele that is p at the prime p (p outside the support) and 1 elsewhere.
    std::uint64_t neighbor_shift(long p) const { return reduce(diagonal(Rational(p))); }

    std::uint64_t reduce(std::uint64_t x) const {
        for (const auto& [pivot, row] : basis_)
            if (x >> pivot & 1) x ^= row;
        return x;
    }

    /// Number of proper spinor genera in the genus, and after merging by improper isometries.
    std::uint64_t proper_count() const { return std::uint64_t(1) << (dim_ - proper_rank_); }
    std::uint64_t count() const { return std::uint64_t(1) << (dim_ - basis_.size()); }

private:
    std::uint64_t encode_at(const Rational& a, std::size_t k) const {
        const Int& p = primes_[k];
        long e;
        Int u = strip(square_class_integer(a), p, e);
        std::uint64_t bits = static_cast<std::uint64_t>(e & 1);
        if (p == 2) {
            int m = unit_mod8(u);
            bits |= static_cast<std::uint64_t>(m % 4 == 3) << 1;
            bits |= static_cast<std::uint64_t>(m == 3 || m == 5) << 2;
        } else {
            bits |= static_cast<std::uint64_t>(legendre_symbol(u, p) == -1) << 1;
        }
        return bits << offset_[k];
    }

    std::uint64_t diagonal(const Rational& a) const {
        std::uint64_t x = 0;
        for (std::size_t k = 0; k < primes_.size(); ++k) x |= encode_at(a, k);
        return x;
    }

    /// Square classes of Q(w_p) for local reflections tau_{w_p} in O(L_p); an improper
    /// global isometry shifts the proper label by this vector (modulo the relations).
    std::uint64_t improper_shift(const QuadraticLattice& L) const {
        std::uint64_t x = 0;
        for (std::size_t k = 0; k < primes_.size(); ++k) {
            const Int& p = primes_[k];
            auto pieces = jordan_pieces(jordan_input(L, p), p);
            const JordanPiece* one = nullptr;
            for (const auto& pc : pieces)
                if (pc.unit_block.rows() == 1) {
                    one = &pc;
                    break;
                }
            Rational q;
            if (p != 2) {
                q = pieces.front().unit_block(0, 0) * Rational(pow(p, static_cast<unsigned long>(pieces.front().scale)));
            } else {
                // Pieces are of B; Q(w) = B(w, w) / 2 and tau_w is integral when v_2(B(w, w)) equals the scale.
                Rational b;
                long s;
                if (one) {
                    b = one->unit_block(0, 0);
                    s = one->scale;
                } else {
                    const auto& pc = pieces.front();
                    const auto& m = pc.unit_block;
                    s = pc.scale;
                    if (valuation(m(0, 0), Int(2)) == 1) b = m(0, 0);
                    else if (valuation(m(1, 1), Int(2)) == 1) b = m(1, 1);
                    else b = m(0, 0) + 2 * m(0, 1) + m(1, 1);
                }
                q = b * Rational(pow(Int(2), static_cast<unsigned long>(s))) / 2;
            }
            x |= encode_at(q, k);
        }
        return x;
    }

    void add_relation(std::uint64_t x) {
        x = reduce(x);
        if (x == 0) return;
        std::size_t pivot = 63 - static_cast<std::size_t>(__builtin_clzll(x));
        for (auto& [pv, row] : basis_)
            if (row >> pivot & 1) row ^= x;
        basis_.emplace_back(pivot, x);
    }

    std::vector<Int> primes_;
    std::vector<std::size_t> offset_;
    std::size_t dim_ = 0;
    std::size_t proper_rank_ = 0;
    std::vector<std::pair<std::size_t, std::uint64_t>> basis_;
};

inline std::vector<std::vector<std::size_t>> partition_from_edges(const std::vector<QuadraticLattice>& classes,
                                                                  const std::vector<NeighborEdge>& edges) {
    const std::size_t n = classes.size();
    SpinorLabels labels(classes.front());
    if (labels.count() == 1 || n == 1) {
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        return {all};
    }
    std::vector<std::optional<std::uint64_t>> lab(n);
    lab[0] = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& e : edges) {
            const std::uint64_t s = labels.neighbor_shift(e.prime);
            for (auto [a, b] : {std::pair{e.from, e.to}, std::pair{e.to, e.from}}) {
                if (!lab[a]) continue;
                const std::uint64_t expect = labels.reduce(*lab[a] ^ s);
                if (!lab[b]) {
                    lab[b] = expect;
                    changed = true;
                } else if (*lab[b] != expect) {
                    throw std::logic_error("spinor labels disagree along neighbor paths");
                }
            }
        }
    }
    std::map<std::uint64_t, std::size_t> block_of;
    std::vector<std::vector<std::size_t>> blocks;
    for (std::size_t i = 0; i < n; ++i) {
        if (!lab[i]) throw std::logic_error("class not connected to the first class by neighbor steps");
        auto [it, fresh] = block_of.emplace(*lab[i], blocks.size());
        if (fresh) blocks.emplace_back();
        blocks[it->second].push_back(i);
    }
    return blocks;
}

inline Rational mass_of(const std::vector<Int>& orders) {
    Rational m(0);
    for (const auto& a : orders) m += ratio(1, a);
    m.canonicalize();
    return m;
}

}  // namespace detail

/// Sum of 1/|Aut| over the classes.
inline Rational mass(const GenusRecord& record) {
    if (!record.complete) throw std::invalid_argument("mass: genus record is incomplete");
    return detail::mass_of(record.aut_orders);
}

/// Partition into spinor genera (proper spinor genera merged along improper isometries).
/// Uses the enumeration's neighbor steps when present and recomputes them otherwise.
inline std::vector<std::vector<std::size_t>> spinor_genus_partition(const GenusRecord& record,
                                                                    const GenusOptions& opt = {}) {
    if (!record.complete) throw std::invalid_argument("spinor_genus_partition: genus record is incomplete");
    if (record.classes.empty()) throw std::invalid_argument("spinor_genus_partition: empty record");
    if (record.classes.front().rank() < 3) throw std::invalid_argument("spinor_genus_partition: rank must be >= 3");
    if (!record.edges.empty() || record.classes.size() == 1 ||
        detail::SpinorLabels(record.classes.front()).count() == 1)
        return detail::partition_from_edges(record.classes, record.edges);
    NodeCounter ctr(opt.node_budget, "spinor genus partition");
    detail::GenusExplorer ex(record.classes.front(), opt, ctr);
    for (const auto& c : record.classes) ex.add_or_find(c, false);
    const std::size_t known = ex.entries().size();
    std::vector<long> primes = record.neighbor_primes_used;
    if (primes.empty()) primes = detail::valid_odd_primes(record.classes.front(), opt.base_primes);
    ex.close(primes);
    if (ex.entries().size() != known) throw std::logic_error("spinor_genus_partition: record is missing classes");
    // Entries follow the record order; translate duplicates (isometric inputs) would be a bug.
    if (known != record.classes.size()) throw std::logic_error("spinor_genus_partition: record has isometric classes");
    return detail::partition_from_edges(record.classes, ex.edges());
}

/// Genus of L by neighbor closure at the three smallest odd primes not dividing disc(L),
/// followed by a stability pass at two further primes. Classes are sorted by minimum,
/// norm histogram and reduced Gram matrix.
inline GenusRecord enumerate_genus(const QuadraticLattice& L, const GenusOptions& opt = {}) {
    if (!L.is_positive_definite()) throw std::domain_error("enumerate_genus: lattice is not positive definite");
    if (L.rank() == 0) throw std::invalid_argument("enumerate_genus: rank 0");
    GenusRecord rec;
    NodeCounter ctr(opt.node_budget, "genus enumeration");
    detail::GenusExplorer ex(L, opt, ctr);
    auto base = detail::valid_odd_primes(L, opt.base_primes);
    auto extra = detail::valid_odd_primes(L, opt.extra_primes, base.back());
    try {
        ex.add_or_find(L, false);
        ex.close(base);
        rec.neighbor_primes_used = base;
        if (opt.extra_primes > 0) {
            const std::size_t before = ex.entries().size();
            std::vector<long> all = base;
            all.insert(all.end(), extra.begin(), extra.end());
            bool full = ex.close(all);
            rec.neighbor_primes_used = all;
            if (ex.entries().size() != before) rec.stability = Stability::Extended;
            else rec.stability = full ? Stability::Stable : Stability::StableSampled;
        }
        for (std::size_t i = 0; i < ex.entries().size(); ++i) ex.aut(i);
    } catch (const BudgetExhausted& e) {
        rec.complete = false;
        rec.note = e.what();
    }
    auto& es = ex.entries();
    i64 hb = ex.hist_bound();
    for (const auto& e : es) hb = std::max(hb, detail::max_basis_norm(e.rep));
    std::vector<std::vector<std::uint64_t>> hist(es.size());
    for (std::size_t i = 0; i < es.size(); ++i) {
        if (es[i].pool.bound < hb) {
            NodeCounter hc(opt.node_budget, "histogram");
            es[i].pool = detail::VectorPool(es[i].rep, hb, &hc);
        }
        hist[i] = es[i].pool.histogram(hb);
    }
    std::vector<std::size_t> order(es.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto gram_key = [&](std::size_t i) {
        std::vector<i64> k;
        const auto& g = es[i].rep.gram();
        for (std::size_t r = 0; r < g.rows(); ++r)
            for (std::size_t c = 0; c < g.cols(); ++c) k.push_back(g(r, c));
        return k;
    };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (es[a].min != es[b].min) return es[a].min < es[b].min;
        if (hist[a] != hist[b]) return hist[a] > hist[b];
        return gram_key(a) < gram_key(b);
    });
    std::vector<std::size_t> where(es.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        where[order[k]] = k;
        const auto& e = es[order[k]];
        rec.classes.push_back(e.rep);
        rec.minima.push_back(e.min);
        if (e.aut) rec.aut_orders.push_back(e.aut->order);
    }
    for (const auto& ed : ex.edges()) rec.edges.push_back({where[ed.from], where[ed.to], ed.prime});
    if (!rec.complete) return rec;
    rec.mass = detail::mass_of(rec.aut_orders);
    for (std::size_t i = 0; i < rec.classes.size(); ++i)
        for (std::size_t j = i + 1; j < rec.classes.size(); ++j) detail::assert_same_genus(rec.classes[i], rec.classes[j]);
    if (L.rank() >= 3) {
        rec.spinor_partition = spinor_genus_partition(rec, opt);
    } else {
        for (std::size_t i = 0; i < rec.classes.size(); ++i) rec.spinor_partition.push_back({i});
    }
    return rec;
}

/// Writes class_000.gram, ... and genus.csv (index, |Aut|, minimum, spinor block).
inline void write_genus(const GenusRecord& rec, const std::string& dir) {
    if (!rec.complete) throw std::invalid_argument("write_genus: genus record is incomplete");
    std::filesystem::create_directories(dir);
    std::ofstream csv(std::filesystem::path(dir) / "genus.csv");
    if (!csv) throw std::runtime_error("cannot write genus.csv in " + dir);
    csv << "index,aut,minimum,spinor_block\n";
    for (std::size_t i = 0; i < rec.classes.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "class_%03zu.gram", i);
        write_gram_file((std::filesystem::path(dir) / name).string(), rec.classes[i]);
        csv << i << ',' << rec.aut_orders[i] << ',' << rec.minima[i] << ',' << rec.spinor_block(i) << '\n';
    }
}

/// Reads a directory written by write_genus. Neighbor steps are not stored, so
/// spinor_genus_partition recomputes them for such records.
inline GenusRecord read_genus(const std::string& dir) {
    GenusRecord rec;
    std::ifstream csv(std::filesystem::path(dir) / "genus.csv");
    if (!csv) throw std::runtime_error("cannot open genus.csv in " + dir);
    std::string line;
    std::getline(csv, line);
    std::map<std::size_t, std::vector<std::size_t>> blocks;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string idx, aut, mn, blk;
        if (!std::getline(ss, idx, ',') || !std::getline(ss, aut, ',') || !std::getline(ss, mn, ',') ||
            !std::getline(ss, blk, ','))
            throw std::runtime_error("genus.csv: malformed line '" + line + "'");
        const std::size_t i = std::stoul(idx);
        if (i != rec.classes.size()) throw std::runtime_error("genus.csv: indices must be consecutive");
        char name[32];
        std::snprintf(name, sizeof name, "class_%03zu.gram", i);
        rec.classes.push_back(read_gram_file((std::filesystem::path(dir) / name).string()));
        rec.aut_orders.emplace_back(aut);
        rec.minima.push_back(std::stoll(mn));
        blocks[std::stoul(blk)].push_back(i);
    }
    if (rec.classes.empty()) throw std::runtime_error("genus.csv: no classes");
    for (auto& [b, members] : blocks) rec.spinor_partition.push_back(members);
    rec.mass = detail::mass_of(rec.aut_orders);
    rec.neighbor_primes_used = detail::valid_odd_primes(rec.classes.front(), 3);
    return rec;
}

}  // namespace qlat

#endif
