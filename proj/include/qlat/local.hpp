#ifndef QLAT_LOCAL_HPP
#define QLAT_LOCAL_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "arith.hpp"
#include "lattice.hpp"
#include "lifting.hpp"

namespace qlat {

/// One piece of a p-adic Jordan splitting: p^scale times a unimodular 1x1 or 2x2 block.
struct JordanPiece {
    long scale;
    RatMatrix unit_block;
};

/// Jordan splitting by symmetric minimal-valuation pivoting over Z_(p).
/// At p = 2, 2x2 pieces appear when every diagonal entry has larger valuation than some off-diagonal one.
inline std::vector<JordanPiece> jordan_pieces(RatMatrix a, const Int& p) {
    const std::size_t n = a.rows();
    std::vector<bool> active(n, true);
    std::vector<JordanPiece> pieces;
    auto add_multiple = [&](std::size_t k, std::size_t i, const Rational& f) {
        if (f == 0) return;
        for (std::size_t l = 0; l < n; ++l) a(l, k) += f * a(l, i);
        for (std::size_t l = 0; l < n; ++l) a(k, l) += f * a(i, l);
    };
    auto pow_p = [&](long e) { return Rational(pow(p, static_cast<unsigned long>(e))); };
    auto scaled = [&](const Rational& x, long e) -> Rational {
        if (e >= 0) return x / pow_p(e);
        return x * pow_p(-e);
    };
    std::size_t left = n;
    while (left > 0) {
        long m = kInfiniteValuation;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (active[i] && active[j] && a(i, j) != 0) m = std::min(m, valuation(a(i, j), p));
        if (m == kInfiniteValuation) throw std::invalid_argument("jordan_pieces: degenerate form");
        std::size_t piv = n;
        for (std::size_t i = 0; i < n && piv == n; ++i)
            if (active[i] && a(i, i) != 0 && valuation(a(i, i), p) == m) piv = i;
        std::size_t pj = n;
        if (piv == n) {
            for (std::size_t i = 0; i < n && piv == n; ++i)
                for (std::size_t j = i + 1; j < n && piv == n; ++j)
                    if (active[i] && active[j] && a(i, j) != 0 && valuation(a(i, j), p) == m) {
                        piv = i;
                        pj = j;
                    }
            if (p != 2) {
                // e_i + e_j has diagonal valuation m when p is odd.
                add_multiple(piv, pj, Rational(1));
                pj = n;
            }
        }
        if (pj == n) {
            Rational d = a(piv, piv);
            for (std::size_t k = 0; k < n; ++k)
                if (active[k] && k != piv) add_multiple(k, piv, -a(k, piv) / d);
            RatMatrix blk(1, 1);
            blk(0, 0) = scaled(d, m);
            pieces.push_back({m, blk});
            active[piv] = false;
            --left;
        } else {
            const std::size_t i = piv, j = pj;
            Rational pii = a(i, i), pij = a(i, j), pjj = a(j, j);
            Rational det = pii * pjj - pij * pij;
            for (std::size_t k = 0; k < n; ++k) {
                if (!active[k] || k == i || k == j) continue;
                Rational ci = (a(k, i) * pjj - a(k, j) * pij) / det;
                Rational cj = (a(k, j) * pii - a(k, i) * pij) / det;
                add_multiple(k, i, -ci);
                add_multiple(k, j, -cj);
            }
            RatMatrix blk(2, 2);
            blk(0, 0) = scaled(pii, m);
            blk(0, 1) = blk(1, 0) = scaled(pij, m);
            blk(1, 1) = scaled(pjj, m);
            pieces.push_back({m, blk});
            active[i] = active[j] = false;
            left -= 2;
        }
    }
    std::stable_sort(pieces.begin(), pieces.end(),
                     [](const JordanPiece& x, const JordanPiece& y) { return x.scale < y.scale; });
    return pieces;
}

/// The matrix whose Jordan splitting defines the symbol: B / 2 at odd p, B at p = 2.
/// Consequently the scales satisfy sum(scale * rank) = v_p(disc) at every p (the factor
/// 2^-n of B / 2 is a unit at odd p); the p = 2 symbol is that of the lattice scaled by 2.
inline RatMatrix jordan_input(const QuadraticLattice& L, const Int& p) {
    RatMatrix a(L.rank(), L.rank());
    for (std::size_t i = 0; i < L.rank(); ++i)
        for (std::size_t j = 0; j < L.rank(); ++j)
            a(i, j) = p == 2 ? Rational(to_int(L.gram(i, j))) : ratio(to_int(L.gram(i, j)), 2);
    return a;
}

struct JordanBlock {
    long scale;
    long rank;
    SquareClass det_class;  // class of the unit determinant
    bool odd = false;       // p = 2 only: type I
    int oddity = 0;         // p = 2 only: mod 8, zero for even blocks

    /// det of the unit part mod 8 (p = 2 only).
    int det_mod8() const {
        const Int& r = det_class.representative();
        if (r == 1) return 1;
        if (r == -5) return 3;
        if (r == 5) return 5;
        return 7;
    }

    friend bool operator==(const JordanBlock& a, const JordanBlock& b) {
        return a.scale == b.scale && a.rank == b.rank && a.det_class == b.det_class && a.odd == b.odd &&
               a.oddity == b.oddity;
    }
};

struct JordanSymbol {
    Int prime;
    std::vector<JordanBlock> blocks;

    long total_rank() const {
        long r = 0;
        for (const auto& b : blocks) r += b.rank;
        return r;
    }

    long weighted_scale_sum() const {
        long s = 0;
        for (const auto& b : blocks) s += b.scale * b.rank;
        return s;
    }

    friend bool operator==(const JordanSymbol& a, const JordanSymbol& b) {
        return a.prime == b.prime && a.blocks == b.blocks;
    }

    friend std::ostream& operator<<(std::ostream& os, const JordanSymbol& s) {
        os << "p=" << s.prime << ":";
        for (const auto& b : s.blocks) {
            os << " (" << b.scale << "," << b.rank << "," << b.det_class;
            if (s.prime == 2) os << "," << (b.odd ? "I" : "II") << "," << b.oddity;
            os << ")";
        }
        return os;
    }
};

namespace detail {

/// Oddity of an odd unimodular Z_2-form from rank, det mod 8 and the Hasse invariant of any
/// rational diagonalization: with k units = 3 mod 4 and j units = 3, 5 mod 8 in a
/// Z_2-diagonalization, the oddity is rank + 2k + 4(j + k) mod 8.
inline int oddity_from_invariants(long rank, int det_mod8, int hasse) {
    int k_mod2 = (det_mod8 == 3 || det_mod8 == 7) ? 1 : 0;
    int k_mod4 = (hasse == -1 ? 2 : 0) + k_mod2;
    int j_mod2 = (det_mod8 == 3 || det_mod8 == 5) ? 1 : 0;
    long t = rank + 2 * k_mod4 + 4 * (j_mod2 + k_mod4);
    return static_cast<int>(((t % 8) + 8) % 8);
}

}  // namespace detail

inline JordanSymbol jordan_symbol_from_pieces(const std::vector<JordanPiece>& pieces, const Int& p) {
    JordanSymbol sym{p, {}};
    const Place place = Place::prime(p);
    std::size_t i = 0;
    while (i < pieces.size()) {
        const long s = pieces[i].scale;
        std::size_t j = i;
        long rank = 0;
        Rational det = 1;
        bool odd = false;
        std::vector<Rational> diag;
        while (j < pieces.size() && pieces[j].scale == s) {
            const auto& blk = pieces[j].unit_block;
            rank += static_cast<long>(blk.rows());
            det *= determinant(blk);
            if (blk.rows() == 1) odd = true;
            for (const auto& d : rational_diagonal(blk)) diag.push_back(d);
            ++j;
        }
        JordanBlock b{s, rank, SquareClass(det, place)};
        if (p == 2) {
            b.odd = odd;
            if (odd) {
                int h = 1;
                for (std::size_t x = 0; x < diag.size(); ++x)
                    for (std::size_t y = x + 1; y < diag.size(); ++y) h *= hilbert_symbol(diag[x], diag[y], place);
                b.oddity = detail::oddity_from_invariants(rank, b.det_mod8(), h);
            }
        }
        sym.blocks.push_back(b);
        i = j;
    }
    return sym;
}

inline JordanSymbol jordan_decompose(const QuadraticLattice& L, const Int& p) {
    if (!is_prime(p)) throw std::invalid_argument("jordan_decompose: p must be prime");
    return jordan_symbol_from_pieces(jordan_pieces(jordan_input(L, p), p), p);
}

inline JordanSymbol jordan_decompose(const QuadraticLattice& L, long p) { return jordan_decompose(L, Int(p)); }

/// Canonical 2-adic symbol entry: (scale, rank, sign or det, type, oddity).
struct TwoAdicEntry {
    long scale;
    long rank;
    int det;
    int type;
    int oddity;
    friend bool operator==(const TwoAdicEntry&, const TwoAdicEntry&) = default;
};

namespace detail {

/// Maximal runs of consecutive-scale odd blocks.
inline std::vector<std::vector<std::size_t>> compartments(const std::vector<TwoAdicEntry>& sym) {
    std::vector<std::vector<std::size_t>> out;
    std::size_t i = 0;
    while (i < sym.size()) {
        if (sym[i].type == 1) {
            long v = sym[i].scale;
            std::vector<std::size_t> c;
            while (i < sym.size() && sym[i].type == 1 && sym[i].scale == v) {
                c.push_back(i);
                ++i;
                ++v;
            }
            out.push_back(c);
        } else {
            ++i;
        }
    }
    return out;
}

/// Maximal runs in which each adjacent pair of scales (missing scales count as even) has an odd member.
inline std::vector<std::vector<std::size_t>> trains(const std::vector<TwoAdicEntry>& sym) {
    std::vector<std::vector<std::size_t>> out;
    if (sym.empty()) return out;
    std::vector<std::size_t> cur{0};
    for (std::size_t i = 1; i < sym.size(); ++i) {
        const auto& prev = sym[i - 1];
        const auto& c = sym[i];
        long gap = c.scale - prev.scale;
        bool split = gap > 2 || (gap == 2 && c.type * prev.type == 0) || (prev.type == 0 && c.type == 0);
        if (split) {
            out.push_back(cur);
            cur = {i};
        } else {
            cur.push_back(i);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace detail

/// Canonical 2-adic symbol after oddity fusion and sign walking.
inline std::vector<TwoAdicEntry> canonical_two_adic_symbol(const JordanSymbol& sym) {
    if (sym.prime != 2) throw std::invalid_argument("canonical_two_adic_symbol: prime must be 2");
    std::vector<TwoAdicEntry> s;
    for (const auto& b : sym.blocks) s.push_back({b.scale, b.rank, b.det_mod8(), b.odd ? 1 : 0, b.oddity});
    for (auto& e : s) e.det = (e.det == 1 || e.det == 7) ? 1 : -1;
    auto comps = detail::compartments(s);
    for (const auto& c : comps) {
        int o = 0;
        for (auto i : c) o += s[i].oddity;
        for (auto i : c) s[i].oddity = 0;
        s[c.front()].oddity = ((o % 8) + 8) % 8;
    }
    for (const auto& t : detail::trains(s)) {
        const std::size_t len = t.size();
        for (std::size_t k = 0; k + 1 < len; ++k) {
            std::size_t t1 = t[len - k - 1];
            if (s[t1].det == -1) {
                s[t1].det = 1;
                s[t1 - 1].det *= -1;
                for (const auto& c : comps) {
                    bool hit = std::find(c.begin(), c.end(), t1 - 1) != c.end() ||
                               std::find(c.begin(), c.end(), t1) != c.end();
                    if (hit) s[c.front()].oddity = (s[c.front()].oddity + 4) % 8;
                }
            }
        }
    }
    return s;
}

/// Local isometry of L1 and L2 over Z_p via Jordan symbols (canonical 2-adic symbols at p = 2).
inline bool local_isometric(const QuadraticLattice& a, const QuadraticLattice& b, const Int& p) {
    if (a.rank() != b.rank()) throw std::invalid_argument("local_isometric: rank mismatch");
    if (a.rank() == 0) return true;
    JordanSymbol sa = jordan_decompose(a, p), sb = jordan_decompose(b, p);
    if (p != 2) return sa == sb;
    return canonical_two_adic_symbol(sa) == canonical_two_adic_symbol(sb);
}

inline bool local_isometric(const QuadraticLattice& a, const QuadraticLattice& b, long p) {
    return local_isometric(a, b, Int(p));
}

/// Tri-state local representability: true iff source (x) Z_p embeds isometrically in target (x) Z_p.
/// Odd p not dividing disc(target) with rank(target) >= 2 rank(source) + 1 is decided directly
/// (the target then contains rank(source) hyperbolic planes); everything else goes to the lifting oracle.
inline Tri locally_representable(const QuadraticLattice& source, const QuadraticLattice& target, const Int& p,
                                 std::uint64_t budget = Budget::global().nodes) {
    if (source.rank() > target.rank()) throw std::invalid_argument("locally_representable: source rank exceeds target");
    if (source.rank() == 0) return Tri::Yes;
    if (p != 2 && target.discriminant() % p != 0 && target.rank() >= 2 * source.rank() + 1) return Tri::Yes;
    return lifting_oracle_embeds(source, target, p, budget).result;
}

inline Tri locally_representable(const QuadraticLattice& s, const QuadraticLattice& t, long p) {
    return locally_representable(s, t, Int(p));
}

inline bool representable_at_infinity(const QuadraticLattice& source, const QuadraticLattice& target) {
    auto [ps, ns] = signature(source);
    auto [pt, nt] = signature(target);
    return ps <= pt && ns <= nt;
}

/// prod_{i<j} (d_i, d_j)_v.
inline int hasse_invariant(const std::vector<Rational>& diag, const Place& v) {
    int h = 1;
    for (std::size_t i = 0; i < diag.size(); ++i)
        for (std::size_t j = i + 1; j < diag.size(); ++j) h *= hilbert_symbol(diag[i], diag[j], v);
    return h;
}

inline Rational product(const std::vector<Rational>& diag) {
    Rational d = 1;
    for (const auto& x : diag) d *= x;
    return d;
}

/// Isotropy of a diagonal form over Q_v: criteria in dimensions up to 4, and true in
/// dimension >= 5 at finite places.
inline bool is_isotropic_local(const std::vector<Rational>& diag, const Place& v) {
    for (const auto& d : diag)
        if (d == 0) throw std::invalid_argument("is_isotropic_local: zero coefficient");
    const std::size_t k = diag.size();
    if (v.is_infinite()) {
        bool pos = false, neg = false;
        for (const auto& d : diag) (d > 0 ? pos : neg) = true;
        return pos && neg;
    }
    switch (k) {
        case 0:
        case 1:
            return false;
        case 2:
            return is_local_square(-diag[0] * diag[1], v);
        case 3:
            return hasse_invariant(diag, v) == hilbert_symbol(Rational(-1), -product(diag), v);
        case 4:
            if (!is_local_square(product(diag), v)) return true;
            return hasse_invariant(diag, v) == hilbert_symbol(Rational(-1), Rational(-1), v);
        default:
            return true;
    }
}

/// True iff the diagonal form represents the class of c over Q_v.
inline bool represents_locally(const std::vector<Rational>& diag, const Rational& c, const Place& v) {
    if (diag.size() == 1) return SquareClass(diag[0], v) == SquareClass(c, v);
    auto f = diag;
    f.push_back(-c);
    return is_isotropic_local(f, v);
}

/// Isotropy decided by splitting f = <d1, d2> + rest and searching a common represented class.
/// Uses only the dimension <= 4 criteria, so it is an independent check of the dimension >= 5 shortcut.
inline bool isotropic_by_splitting(const std::vector<Rational>& diag, const Place& v) {
    if (diag.size() <= 4 || v.is_infinite()) return is_isotropic_local(diag, v);
    std::vector<Rational> head(diag.begin(), diag.begin() + 2);
    std::vector<Rational> rest(diag.begin() + 2, diag.end());
    if (is_isotropic_local(head, v) || isotropic_by_splitting(rest, v)) return true;
    for (const auto& c : SquareClass::all(v)) {
        Rational cv(c.representative());
        if (!represents_locally(head, cv, v)) continue;
        auto r = rest;
        r.push_back(cv);
        if (isotropic_by_splitting(r, v)) return true;
    }
    return false;
}

/// Spinor norms of SO of the rational space over Q_p (p odd): the subgroup generated by
/// products of pairs of represented square classes.
inline SquareClassGroup spinor_norm_image(const std::vector<Rational>& diag, const Int& p) {
    if (p == 2) throw std::invalid_argument("spinor_norm_image: p must be odd");
    const Place v = Place::prime(p);
    std::vector<SquareClass> rep;
    for (const auto& c : SquareClass::all(v))
        if (represents_locally(diag, Rational(c.representative()), v)) rep.push_back(c);
    SquareClassGroup g(v);
    for (std::size_t i = 0; i < rep.size(); ++i)
        for (std::size_t j = 0; j < rep.size(); ++j) g.add(rep[i] * rep[j]);
    return g;
}

/// Spinor norms of proper integral automorphisms of L (x) Z_p ("automorphous" square classes),
/// read off a Jordan splitting: pairwise products of the splitting's norms, supplemented by
/// the unit classes when a window of scales carries enough rank, and the 2-adic pair rules.
inline SquareClassGroup local_spinor_kernel(const QuadraticLattice& L, const Int& p) {
    const Place v = Place::prime(p);
    SquareClassGroup g(v);
    auto pieces = jordan_pieces(jordan_input(L, p), p);
    auto pw = [&](long e) { return Rational(pow(p, static_cast<unsigned long>(e))); };
    if (p != 2) {
        std::vector<Rational> norms;
        bool big_block = false;
        for (const auto& pc : pieces) norms.push_back(pc.unit_block(0, 0) * pw(pc.scale));
        JordanSymbol sym = jordan_symbol_from_pieces(pieces, p);
        for (const auto& b : sym.blocks) big_block = big_block || b.rank >= 2;
        for (std::size_t i = 0; i < norms.size(); ++i)
            for (std::size_t j = i + 1; j < norms.size(); ++j) g.add(SquareClass(norms[i] * norms[j], v));
        if (big_block) g.add(SquareClass(Rational(smallest_nonresidue(p)), v));
        return g;
    }
    std::vector<Rational> ones;  // 2^s u for 1x1 pieces
    std::vector<Rational> all;
    for (const auto& pc : pieces) {
        if (pc.unit_block.rows() == 1) {
            Rational x = pc.unit_block(0, 0) * pw(pc.scale);
            ones.push_back(x);
            all.push_back(x);
        } else {
            Rational q = pc.unit_block(0, 1) * pw(pc.scale);
            for (int u : {1, 3, 5, 7}) all.push_back(2 * q * u);
        }
    }
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) g.add(SquareClass(all[i] * all[j], v));
    auto add_units = [&] {
        for (int u : {3, 5, 7}) g.add(SquareClass(Rational(u), v));
    };
    // Rank >= 3 within a window of four consecutive scales.
    JordanSymbol sym = jordan_symbol_from_pieces(pieces, p);
    for (std::size_t k = 0; k < sym.blocks.size(); ++k) {
        long r = 0;
        for (std::size_t l = k; l < sym.blocks.size() && l < k + 3; ++l)
            if (sym.blocks[l].scale - sym.blocks[k].scale < 4) r += sym.blocks[l].rank;
        if (r >= 3) add_units();
    }
    std::stable_sort(ones.begin(), ones.end(),
                     [&](const Rational& a, const Rational& b) { return valuation(a, p) < valuation(b, p); });
    for (std::size_t i = 0; i < ones.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            Rational r = ones[i] / ones[j];
            long e = valuation(r, p);
            Rational unit = r / pw(e);
            int u = static_cast<int>(mod_pos(square_class_integer(unit), Int(8)).get_si());
            if (e == 0 && u == 1) g.add(SquareClass(Rational(2), v));
            if (e == 0 && u == 5) g.add(SquareClass(Rational(6), v));
            if (e == 0 || e == 2 || e == 4) g.add(SquareClass(Rational(5), v));
            if ((e == 1 || e == 3) && (u == 1 || u == 5)) g.add(SquareClass(Rational(3), v));
            if ((e == 1 || e == 3) && (u == 3 || u == 7)) g.add(SquareClass(Rational(7), v));
        }
    return g;
}

}  // namespace qlat

#endif
