#ifndef QLAT_HARNESS_HPP
#define QLAT_HARNESS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "genus.hpp"
#include "linnik.hpp"
#include "local.hpp"
#include "represent.hpp"

namespace qlat {

struct PlaceResult {
    long prime;  // 0 for the real place
    Tri result;
};

struct LocalSuiteResult {
    Tri result = Tri::Yes;
    std::vector<PlaceResult> places;

    /// e.g. "inf:Y;2:Y;5:N"
    std::string summary() const {
        std::string s;
        for (const auto& pr : places) {
            if (!s.empty()) s += ';';
            s += pr.prime == 0 ? std::string("inf") : std::to_string(pr.prime);
            s += ':';
            s += pr.result == Tri::Yes ? 'Y' : pr.result == Tri::No ? 'N' : '?';
        }
        return s;
    }
};

/// Representability over R and over Z_p for every p | 2 disc(L) disc(L').
inline LocalSuiteResult local_test_suite(const QuadraticLattice& src, const QuadraticLattice& tgt) {
    LocalSuiteResult out;
    const bool inf = representable_at_infinity(src, tgt);
    out.places.push_back({0, inf ? Tri::Yes : Tri::No});
    if (!inf) out.result = Tri::No;
    Int prod = 2 * tgt.discriminant();
    if (src.rank() > 0) prod *= src.discriminant();
    for (const auto& p : prime_divisors(prod)) {
        Tri r = src.rank() > tgt.rank() ? Tri::No : locally_representable(src, tgt, p);
        out.places.push_back({p.get_si(), r});
        if (r == Tri::No) out.result = Tri::No;
        else if (r == Tri::Inconclusive && out.result == Tri::Yes) out.result = Tri::Inconclusive;
    }
    return out;
}

/// Index (in the record) of the class whose isometry class contains L.
inline std::size_t class_index_of(const QuadraticLattice& L, const GenusRecord& rec) {
    for (std::size_t i = 0; i < rec.classes.size(); ++i)
        if (rec.classes[i].discriminant() == L.discriminant() && is_isometric(rec.classes[i], L)) return i;
    throw std::invalid_argument("lattice is not isometric to any class of the record");
}

struct HsiaResult {
    bool success = false;
    std::optional<std::size_t> class_index;
};

namespace detail {

/// Primitive counts of candidates by classes; rank-1 candidates use cached theta series.
class CountCache {
public:
    CountCache(const GenusRecord& rec, i64 max_norm) : rec_(rec), max_norm_(max_norm) {}

    Int primitive(const QuadraticLattice& src, std::size_t cls) {
        if (src.rank() == 1 && src.norm(0) <= max_norm_) {
            auto it = prim_.find(cls);
            if (it == prim_.end())
                it = prim_.emplace(cls, primitive_from_total(theta_series(rec_.classes[cls], max_norm_))).first;
            return it->second[static_cast<std::size_t>(src.norm(0))];
        }
        return primitive_representation_count(src, rec_.classes[cls]);
    }

private:
    const GenusRecord& rec_;
    i64 max_norm_;
    std::map<std::size_t, std::vector<Int>> prim_;
};

inline HsiaResult hsia_search(const QuadraticLattice& src, const GenusRecord& rec, std::size_t block, CountCache& cache) {
    HsiaResult out;
    if (src.rank() == 0) {
        out.success = true;
        out.class_index = rec.spinor_partition.at(block).front();
        return out;
    }
    for (std::size_t c : rec.spinor_partition.at(block))
        if (cache.primitive(src, c) > 0) {
            out.success = true;
            out.class_index = c;
            return out;
        }
    return out;
}

}  // namespace detail

/// Some class of the given spinor block that primitively represents L'. Requires L' to pass
/// the local tests against the first class and to have squarefree classical discriminant.
inline HsiaResult hsia_check(const QuadraticLattice& src, const GenusRecord& rec, std::size_t block = 0) {
    if (!rec.complete) throw std::invalid_argument("hsia_check: genus record is incomplete");
    detail::CountCache cache(rec, src.rank() == 1 ? src.norm(0) : 0);
    if (src.rank() == 0) return detail::hsia_search(src, rec, block, cache);
    if (!is_squarefree(abs(classical_discriminant(src))))
        throw std::invalid_argument("hsia_check: discriminant is not squarefree");
    if (local_test_suite(src, rec.classes.front()).result != Tri::Yes)
        throw std::invalid_argument("hsia_check: not everywhere locally representable");
    return detail::hsia_search(src, rec, block, cache);
}

struct ExperimentRow {
    std::size_t id;
    Int disc;
    i64 minimum;
    std::string local;
    std::vector<Int> counts;  // primitive counts per class of the block
    bool all_classes_represented = false;
    bool good = false;        // codim >= 7 and val <= 1 at the auxiliary prime
    bool budget_exhausted = false;
    bool hsia_success = false;
    QuadraticLattice candidate;
};

struct ExperimentReport {
    std::size_t rank = 0;                 // n
    std::size_t m = 0;
    long auxiliary_prime = 0;
    std::vector<std::size_t> block;       // classes of the spinor block of L
    std::vector<ExperimentRow> rows;      // candidates passing the local tests
    std::size_t failed_local = 0;
    std::vector<QuadraticLattice> inconclusive;
    std::vector<std::size_t> exceptions;  // row ids not represented by every class
    i64 threshold = 0;                    // largest minimum among exceptions (0 if none)
    std::vector<std::size_t> red_flags;   // row ids where no class of the block represents

    bool has_red_flag() const { return !red_flags.empty(); }

    void write_csv(std::ostream& os) const {
        os << "candidate_id,disc,minimum,locally_representable,class_counts,all_classes_represented,good\n";
        for (const auto& r : rows) {
            os << r.id << ',' << r.disc << ',' << r.minimum << ',' << r.local << ',';
            if (r.budget_exhausted) {
                os << "budget";
            } else {
                for (std::size_t i = 0; i < r.counts.size(); ++i) os << (i ? ";" : "") << r.counts[i];
            }
            os << ',' << (r.all_classes_represented ? 1 : 0) << ',' << (r.good ? 1 : 0) << '\n';
        }
    }

    std::string csv() const {
        std::ostringstream os;
        write_csv(os);
        return os.str();
    }
};

/// Rank-1 candidates (d) with d squarefree, or reduced primitive binary forms with squarefree
/// classical discriminant D, |D| <= bound. Ordered by |disc|, then Gram matrix.
inline std::vector<QuadraticLattice> builtin_candidates(std::size_t m, i64 bound) {
    std::vector<QuadraticLattice> out;
    if (m == 1) {
        for (i64 d = 1; d <= bound; ++d)
            if (is_squarefree(Int(static_cast<long>(d)))) out.push_back(QuadraticLattice::diagonal({d}));
    } else if (m == 2) {
        for (i64 n = 3; n <= bound; ++n) {
            if (!is_squarefree(Int(static_cast<long>(n))) || mod_pos(-n, 4) != 1) continue;
            const i64 D = -n;
            for (i64 a = 1; 3 * a * a <= n; ++a)
                for (i64 b = -a + 1; b <= a; ++b) {
                    if ((b * b - D) % (4 * a) != 0) continue;
                    i64 c = (b * b - D) / (4 * a);
                    if (c < a || (b < 0 && a == c)) continue;
                    out.push_back(QuadraticLattice(IntMatrix{{2 * a, b}, {b, 2 * c}}));
                }
        }
    } else {
        throw std::invalid_argument("builtin_candidates: only m = 1 and m = 2 are generated; pass candidates explicitly");
    }
    return out;
}

/// Runs the local tests and per-class primitive counts for each candidate.
inline ExperimentReport local_global_experiment(const QuadraticLattice& L, const GenusRecord& rec,
                                                std::vector<QuadraticLattice> candidates) {
    if (!rec.complete) throw std::invalid_argument("local_global_experiment: genus record is incomplete");
    ExperimentReport rep;
    rep.rank = L.rank();
    const std::size_t home = class_index_of(L, rec);
    const std::size_t block = rec.spinor_block(home);
    rep.block = rec.spinor_partition[block];
    rep.auxiliary_prime = detail::valid_odd_primes(L, 1).front();
    auto key = [](const QuadraticLattice& c) {
        std::vector<i64> k;
        for (std::size_t i = 0; i < c.rank(); ++i)
            for (std::size_t j = 0; j < c.rank(); ++j) k.push_back(c.gram(i, j));
        return k;
    };
    std::stable_sort(candidates.begin(), candidates.end(), [&](const QuadraticLattice& a, const QuadraticLattice& b) {
        Int da = abs(a.discriminant()), db = abs(b.discriminant());
        if (da != db) return da < db;
        return key(a) < key(b);
    });
    i64 max_norm = 0;
    for (const auto& c : candidates) {
        if (c.rank() != candidates.front().rank()) throw std::invalid_argument("candidates must share one rank");
        if (c.rank() == 1) max_norm = std::max(max_norm, c.norm(0));
    }
    rep.m = candidates.empty() ? 0 : candidates.front().rank();
    detail::CountCache cache(rec, max_norm);
    const Int aux(rep.auxiliary_prime);
    for (std::size_t id = 0; id < candidates.size(); ++id) {
        const auto& c = candidates[id];
        LocalSuiteResult loc = local_test_suite(c, L);
        if (loc.result == Tri::No) {
            ++rep.failed_local;
            continue;
        }
        if (loc.result == Tri::Inconclusive) {
            rep.inconclusive.push_back(c);
            continue;
        }
        ExperimentRow row;
        row.id = id;
        row.disc = c.discriminant();
        row.minimum = c.rank() > 0 ? minimum(c) : 0;
        row.local = loc.summary();
        row.candidate = c;
        row.good = L.rank() >= c.rank() + 7 && (c.rank() == 0 || valuation(c.discriminant(), aux) <= 1);
        try {
            row.all_classes_represented = true;
            for (std::size_t cls : rep.block) {
                row.counts.push_back(cache.primitive(c, cls));
                if (row.counts.back() == 0) row.all_classes_represented = false;
            }
            row.hsia_success = std::any_of(row.counts.begin(), row.counts.end(), [](const Int& x) { return x > 0; });
        } catch (const BudgetExhausted&) {
            row.budget_exhausted = true;
            row.all_classes_represented = false;
            row.counts.clear();
        }
        if (!row.budget_exhausted) {
            if (!row.all_classes_represented) {
                rep.exceptions.push_back(id);
                rep.threshold = std::max(rep.threshold, row.minimum);
            }
            if (!row.hsia_success && is_squarefree(abs(classical_discriminant(c)))) rep.red_flags.push_back(id);
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

inline ExperimentReport local_global_experiment(const QuadraticLattice& L, std::size_t m, i64 bound) {
    GenusRecord rec = enumerate_genus(L);
    if (!rec.complete) throw std::runtime_error("local_global_experiment: genus enumeration incomplete: " + rec.note);
    return local_global_experiment(L, rec, builtin_candidates(m, bound));
}

struct RatioRow {
    i64 lo, hi;            // minimum range [lo, hi)
    std::size_t class_index;
    std::size_t samples;
    double mean, min, max; // of r g / r~
};

/// Per dyadic range of candidate minimum and per class of the block: statistics of
/// r g / r~, where r~ and g are weighted over the block.
inline std::vector<RatioRow> asymptotic_ratio_report(const ExperimentReport& rep, const GenusRecord& rec) {
    std::vector<RatioRow> out;
    std::map<std::pair<i64, std::size_t>, std::vector<Rational>> cells;
    for (const auto& row : rep.rows) {
        if (row.budget_exhausted || row.minimum <= 0) continue;
        Rational rt(0), g(0);
        for (std::size_t k = 0; k < rep.block.size(); ++k) {
            rt += ratio(row.counts[k], rec.aut_orders[rep.block[k]]);
            g += ratio(1, rec.aut_orders[rep.block[k]]);
        }
        if (rt == 0) continue;
        i64 lo = 1;
        while (lo * 2 <= row.minimum) lo *= 2;
        for (std::size_t k = 0; k < rep.block.size(); ++k) {
            Rational r = Rational(row.counts[k]) * g / rt;
            r.canonicalize();
            cells[{lo, rep.block[k]}].push_back(r);
        }
    }
    for (const auto& [key, vals] : cells) {
        Rational sum(0);
        for (const auto& v : vals) sum += v;
        sum /= static_cast<unsigned long>(vals.size());
        auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
        out.push_back({key.first, key.first * 2, key.second, vals.size(), sum.get_d(), mn->get_d(), mx->get_d()});
    }
    return out;
}

inline std::vector<RatioRow> asymptotic_ratio_report(const QuadraticLattice& L, std::size_t m, i64 bound) {
    GenusRecord rec = enumerate_genus(L);
    if (!rec.complete) throw std::runtime_error("asymptotic_ratio_report: genus enumeration incomplete: " + rec.note);
    return asymptotic_ratio_report(local_global_experiment(L, rec, builtin_candidates(m, bound)), rec);
}

}  // namespace qlat

#endif
