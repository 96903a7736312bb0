#ifndef QLAT_ARITH_HPP
#define QLAT_ARITH_HPP

#include <algorithm>
#include <compare>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"

namespace qlat {

/// Value returned by valuation() for zero.
inline constexpr long kInfiniteValuation = std::numeric_limits<long>::max();

inline bool is_prime(const Int& n) {
    if (n < 2) return false;
    return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

inline long valuation(const Int& n, const Int& p) {
    if (p < 2) throw std::invalid_argument("valuation: p must be a prime");
    if (n == 0) return kInfiniteValuation;
    Int m = abs(n);
    long e = 0;
    while (mpz_divisible_p(m.get_mpz_t(), p.get_mpz_t())) {
        mpz_divexact(m.get_mpz_t(), m.get_mpz_t(), p.get_mpz_t());
        ++e;
    }
    return e;
}

inline long valuation(const Rational& q, const Int& p) {
    if (q == 0) return kInfiniteValuation;
    return valuation(q.get_num(), p) - valuation(q.get_den(), p);
}

/// Prime factorization of |n| (n != 0) by trial division; fine for the discriminant sizes used here.
inline std::map<Int, long> factor(const Int& n) {
    if (n == 0) throw std::invalid_argument("factor: zero");
    std::map<Int, long> f;
    Int m = abs(n);
    for (Int p = 2; p * p <= m; p = (p == 2 ? Int(3) : p + 2)) {
        while (mpz_divisible_p(m.get_mpz_t(), p.get_mpz_t())) {
            ++f[p];
            m /= p;
        }
    }
    if (m > 1) ++f[m];
    return f;
}

inline std::vector<Int> prime_divisors(const Int& n) {
    std::vector<Int> ps;
    for (const auto& [p, e] : factor(n)) ps.push_back(p);
    return ps;
}

inline bool is_squarefree(const Int& n) {
    if (n == 0) throw std::invalid_argument("is_squarefree: zero");
    for (const auto& [p, e] : factor(n))
        if (e > 1) return false;
    return true;
}

inline int legendre_symbol(const Int& a, const Int& p) {
    if (p == 2) throw std::invalid_argument("legendre_symbol: p must be an odd prime");
    if (p < 3) throw std::invalid_argument("legendre_symbol: p must be an odd prime");
    Int r = mod_pos(a, p);
    return mpz_legendre(r.get_mpz_t(), p.get_mpz_t());
}

/// Smallest positive quadratic nonresidue modulo the odd prime p.
inline Int smallest_nonresidue(const Int& p) {
    for (Int a = 2;; ++a)
        if (legendre_symbol(a, p) == -1) return a;
}

/// A place of Q: a prime or the real place.
class Place {
public:
    static Place infinity() { return Place(Int(0)); }
    static Place prime(const Int& p) {
        if (!is_prime(p)) throw std::invalid_argument("Place::prime: " + p.get_str() + " is not prime");
        return Place(p);
    }
    static Place prime(long p) { return prime(Int(p)); }

    bool is_infinite() const { return p_ == 0; }
    const Int& p() const {
        if (is_infinite()) throw std::logic_error("the real place has no prime");
        return p_;
    }

    friend bool operator==(const Place& a, const Place& b) { return a.p_ == b.p_; }
    friend bool operator<(const Place& a, const Place& b) { return a.p_ < b.p_; }

    friend std::ostream& operator<<(std::ostream& os, const Place& v) {
        if (v.is_infinite()) return os << "inf";
        return os << v.p_;
    }

private:
    explicit Place(Int p) : p_(std::move(p)) {}
    Int p_;
};

/// Integer with the same square class as q (num * den).
inline Int square_class_integer(const Rational& q) { return q.get_num() * q.get_den(); }

namespace detail {

/// (n mod 8) for n odd, as 1, 3, 5 or 7.
inline int unit_mod8(const Int& u) { return static_cast<int>(mod_pos(u, Int(8)).get_si()); }

inline Int strip(const Int& a, const Int& p, long& v) {
    v = valuation(a, p);
    Int u = a;
    for (long i = 0; i < v; ++i) mpz_divexact(u.get_mpz_t(), u.get_mpz_t(), p.get_mpz_t());
    return u;
}

}  // namespace detail

/// Hilbert symbol (a, b)_v by the standard case formulas.
inline int hilbert_symbol(const Rational& a, const Rational& b, const Place& v) {
    if (a == 0 || b == 0) throw std::invalid_argument("hilbert_symbol: zero argument");
    if (v.is_infinite()) return (a < 0 && b < 0) ? -1 : 1;
    const Int& p = v.p();
    long alpha, beta;
    Int u = detail::strip(square_class_integer(a), p, alpha);
    Int w = detail::strip(square_class_integer(b), p, beta);
    if (p == 2) {
        int um = detail::unit_mod8(u), wm = detail::unit_mod8(w);
        int eps_u = ((um - 1) / 2) & 1, eps_w = ((wm - 1) / 2) & 1;
        int om_u = ((um * um - 1) / 8) & 1, om_w = ((wm * wm - 1) / 8) & 1;
        int e = eps_u * eps_w + (alpha & 1) * om_w + (beta & 1) * om_u;
        return (e & 1) ? -1 : 1;
    }
    int s = 1;
    Int eps_p = (p - 1) / 2;
    if ((alpha & 1) && (beta & 1) && mpz_odd_p(eps_p.get_mpz_t())) s = -s;
    if (beta & 1) s *= legendre_symbol(u, p);
    if (alpha & 1) s *= legendre_symbol(w, p);
    return s;
}

/// Element of Q_v^* / (Q_v^*)^2 with a canonical representative:
/// odd p: one of {1, u, p, u p} with u the smallest positive nonresidue;
/// p = 2: one of {1, -5, 5, -1, 2, -10, 10, -2}; real place: +-1.
class SquareClass {
public:
    SquareClass(const Rational& a, const Place& v) : place_(v) {
        if (a == 0) throw std::invalid_argument("square_class of zero");
        if (v.is_infinite()) {
            rep_ = a < 0 ? -1 : 1;
            return;
        }
        const Int& p = v.p();
        long e;
        Int u = detail::strip(square_class_integer(a), p, e);
        if (p == 2) {
            static const int unit_rep[8] = {0, 1, 0, -5, 0, 5, 0, -1};
            rep_ = unit_rep[detail::unit_mod8(u)];
        } else {
            rep_ = legendre_symbol(u, p) == 1 ? Int(1) : smallest_nonresidue(p);
        }
        if (e & 1) rep_ *= p;
    }

    const Place& place() const { return place_; }
    const Int& representative() const { return rep_; }

    bool is_trivial() const { return rep_ == 1; }

    /// Parity of the valuation (0 for units).
    int valuation_parity() const {
        if (place_.is_infinite()) return 0;
        return valuation(rep_, place_.p()) & 1;
    }

    SquareClass operator*(const SquareClass& o) const {
        if (!(place_ == o.place_)) throw std::invalid_argument("square classes at different places");
        return SquareClass(Rational(rep_ * o.rep_), place_);
    }

    friend bool operator==(const SquareClass& a, const SquareClass& b) {
        return a.place_ == b.place_ && a.rep_ == b.rep_;
    }
    friend bool operator<(const SquareClass& a, const SquareClass& b) {
        if (!(a.place_ == b.place_)) return a.place_ < b.place_;
        return a.rep_ < b.rep_;
    }

    friend std::ostream& operator<<(std::ostream& os, const SquareClass& c) { return os << c.rep_; }

    /// All square classes at the place, in canonical order.
    static std::vector<SquareClass> all(const Place& v) {
        std::vector<Int> reps;
        if (v.is_infinite()) {
            reps = {1, -1};
        } else if (v.p() == 2) {
            reps = {1, -5, 5, -1, 2, -10, 10, -2};
        } else {
            Int u = smallest_nonresidue(v.p());
            reps = {1, u, v.p(), u * v.p()};
        }
        std::vector<SquareClass> out;
        for (const auto& r : reps) out.emplace_back(Rational(r), v);
        return out;
    }

private:
    Place place_;
    Int rep_;
};

inline SquareClass square_class(const Rational& a, const Place& v) { return SquareClass(a, v); }

/// True iff a is a nonzero square in Q_v.
inline bool is_local_square(const Rational& a, const Place& v) { return SquareClass(a, v).is_trivial(); }

/// Subgroup of a local square-class group, kept as its full element set.
class SquareClassGroup {
public:
    explicit SquareClassGroup(Place v) : place_(std::move(v)) { elems_.insert(SquareClass(Rational(1), place_)); }

    const Place& place() const { return place_; }

    /// Adds a generator and closes under multiplication.
    void add(const SquareClass& g) {
        if (elems_.count(g)) return;
        std::set<SquareClass> next = elems_;
        for (const auto& e : elems_) next.insert(e * g);
        elems_ = std::move(next);
    }

    bool contains(const SquareClass& c) const { return elems_.count(c) > 0; }
    std::size_t order() const { return elems_.size(); }
    bool is_full() const { return elems_.size() == SquareClass::all(place_).size(); }
    const std::set<SquareClass>& elements() const { return elems_; }

    friend bool operator==(const SquareClassGroup& a, const SquareClassGroup& b) {
        return a.place_ == b.place_ && a.elems_ == b.elems_;
    }

private:
    Place place_;
    std::set<SquareClass> elems_;
};

}  // namespace qlat

#endif
