#ifndef QLAT_CORE_HPP
#define QLAT_CORE_HPP

#include <gmpxx.h>

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlat {

using Int = mpz_class;
using Rational = mpq_class;
using i64 = std::int64_t;
using Vec = std::vector<i64>;

/// Thrown when a search exceeds its configured node budget.
class BudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when an int64 kernel would overflow. Never caught silently.
class ArithmeticOverflow : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

inline i64 checked_add(i64 a, i64 b) {
    i64 r;
    if (__builtin_add_overflow(a, b, &r)) throw ArithmeticOverflow("int64 overflow in addition");
    return r;
}

inline i64 checked_sub(i64 a, i64 b) {
    i64 r;
    if (__builtin_sub_overflow(a, b, &r)) throw ArithmeticOverflow("int64 overflow in subtraction");
    return r;
}

inline i64 checked_mul(i64 a, i64 b) {
    i64 r;
    if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticOverflow("int64 overflow in multiplication");
    return r;
}

inline i64 to_i64(const Int& v) {
    if (!v.fits_slong_p()) throw ArithmeticOverflow("integer does not fit in int64: " + v.get_str());
    return v.get_si();
}

inline Int to_int(i64 v) {
    return Int(static_cast<long>(v));
}

/// Node budget for exponential searches. Read once from QLAT_BUDGET.
struct Budget {
    std::uint64_t nodes = 200'000'000;

    static Budget from_env() {
        Budget b;
        if (const char* s = std::getenv("QLAT_BUDGET")) {
            char* end = nullptr;
            unsigned long long v = std::strtoull(s, &end, 10);
            if (end != s && v > 0) b.nodes = v;
        }
        return b;
    }

    static const Budget& global() {
        static const Budget b = from_env();
        return b;
    }
};

/// Counts visited nodes and throws BudgetExhausted past the limit.
class NodeCounter {
public:
    explicit NodeCounter(std::uint64_t limit = Budget::global().nodes, std::string what = "search")
        : limit_(limit), what_(std::move(what)) {}

    void tick(std::uint64_t n = 1) {
        count_ += n;
        if (count_ > limit_) throw BudgetExhausted(what_ + ": node budget of " + std::to_string(limit_) + " exhausted");
    }

    std::uint64_t count() const { return count_; }
    std::uint64_t limit() const { return limit_; }

private:
    std::uint64_t count_ = 0;
    std::uint64_t limit_;
    std::string what_;
};

inline Int floor_div(const Int& a, const Int& b) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Int mod_pos(const Int& a, const Int& m) {
    Int r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline i64 mod_pos(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

inline Int gcd(const Int& a, const Int& b) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

inline Int lcm(const Int& a, const Int& b) {
    Int l;
    mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return l;
}

inline Int pow(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

/// floor(sqrt(n)) for n >= 0.
inline Int isqrt(const Int& n) {
    Int r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline bool is_perfect_square(const Int& n) {
    return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

/// a / b in lowest terms (GMP arithmetic needs canonical operands).
inline Rational ratio(const Int& a, const Int& b) {
    Rational q(a, b);
    q.canonicalize();
    return q;
}

/// Rounds to the nearest integer, halves toward +infinity.
inline Int round_nearest(const Rational& q) {
    Rational shifted = q + Rational(1, 2);
    return floor_div(shifted.get_num(), shifted.get_den());
}

}  // namespace qlat

#endif
