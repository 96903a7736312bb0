#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace qlat;

namespace {

bool trial_prime(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// ax^2 + by^2 = z^2 with the Holzer box, for squarefree coprime a, b
bool conic_solvable(long a, long b) {
    const long X = static_cast<long>(std::sqrt(std::abs(static_cast<double>(b)))) + 1;
    const long Y = static_cast<long>(std::sqrt(std::abs(static_cast<double>(a)))) + 1;
    const long Z = static_cast<long>(std::sqrt(std::abs(static_cast<double>(a * b)))) + 1;
    for (long x = 0; x <= X; ++x)
        for (long y = 0; y <= Y; ++y)
            for (long z = 0; z <= Z; ++z)
                if ((x || y || z) && a * x * x + b * y * y == z * z) return true;
    return false;
}

std::vector<Place> places_of(const Int& a, const Int& b) {
    std::vector<Place> v{Place::infinity(), Place::prime(2)};
    for (const auto& p : prime_divisors(a * b))
        if (p != 2) v.push_back(Place::prime(p));
    return v;
}

}  // namespace

TEST(Arith, FactorMultipliesBack) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        long n = qtest::uniform(rng, 2, 2'000'000);
        Int prod = 1;
        for (const auto& [p, e] : factor(Int(n))) {
            EXPECT_TRUE(trial_prime(p.get_si()));
            for (long i = 0; i < e; ++i) prod *= p;
            EXPECT_EQ(valuation(Int(n), p), e);
        }
        EXPECT_EQ(prod, n);
    }
}

TEST(Arith, SquarefreeAgainstDivisorScan) {
    for (long n = 1; n <= 3000; ++n) {
        bool sf = true;
        for (long k = 2; k * k <= n; ++k)
            if (n % (k * k) == 0) sf = false;
        EXPECT_EQ(is_squarefree(Int(n)), sf) << n;
    }
}

TEST(Arith, LegendreMatchesSquaresModP) {
    for (long p : {3L, 5L, 7L, 11L, 13L, 29L, 47L}) {
        std::vector<bool> sq(p, false);
        for (long x = 1; x < p; ++x) sq[x * x % p] = true;
        for (long a = 0; a < 3 * p; ++a) {
            int want = a % p == 0 ? 0 : (sq[a % p] ? 1 : -1);
            EXPECT_EQ(legendre_symbol(Int(a), Int(p)), want);
        }
        EXPECT_EQ(legendre_symbol(smallest_nonresidue(Int(p)), Int(p)), -1);
    }
}

TEST(Arith, HilbertSymbolMatchesConicSolvability) {
    std::mt19937_64 rng(5);
    int checked = 0;
    while (checked < 150) {
        long a = qtest::nonzero(rng, -60, 60), b = qtest::nonzero(rng, -60, 60);
        if (!is_squarefree(Int(std::abs(a))) || !is_squarefree(Int(std::abs(b))) || std::gcd(a, b) != 1) continue;
        bool all_one = true;
        for (const auto& v : places_of(Int(a), Int(b))) all_one = all_one && hilbert_symbol(Rational(a), Rational(b), v) == 1;
        EXPECT_EQ(all_one, conic_solvable(a, b)) << a << ' ' << b;
        ++checked;
    }
}

TEST(Arith, HilbertProductFormula) {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 300; ++t) {
        Rational a(qtest::nonzero(rng, -500, 500), qtest::uniform(rng, 1, 40));
        Rational b(qtest::nonzero(rng, -500, 500), qtest::uniform(rng, 1, 40));
        a.canonicalize();
        b.canonicalize();
        Int all = a.get_num() * a.get_den() * b.get_num() * b.get_den();
        int prod = 1;
        for (const auto& v : places_of(all, Int(1))) prod *= hilbert_symbol(a, b, v);
        EXPECT_EQ(prod, 1) << a << ' ' << b;
    }
}

TEST(Arith, HilbertSymbolIdentities) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 150; ++t) {
        Rational a(qtest::nonzero(rng, -200, 200)), b(qtest::nonzero(rng, -200, 200)), c(qtest::nonzero(rng, -200, 200));
        for (long p : {0L, 2L, 3L, 5L, 7L}) {
            Place v = p ? Place::prime(p) : Place::infinity();
            EXPECT_EQ(hilbert_symbol(a, b * c, v), hilbert_symbol(a, b, v) * hilbert_symbol(a, c, v));
            EXPECT_EQ(hilbert_symbol(a, -a, v), 1);
            EXPECT_EQ(hilbert_symbol(a, b, v), hilbert_symbol(b, a, v));
            if (a != 1) {
                EXPECT_EQ(hilbert_symbol(a, 1 - a, v), 1);
            }
        }
    }
}

TEST(Arith, SquareClassGroupSizes) {
    EXPECT_EQ(SquareClass::all(Place::infinity()).size(), 2u);
    EXPECT_EQ(SquareClass::all(Place::prime(2)).size(), 8u);
    EXPECT_EQ(SquareClass::all(Place::prime(3)).size(), 4u);
    EXPECT_EQ(SquareClass::all(Place::prime(47)).size(), 4u);
}

TEST(Arith, SquareClassOfSquaresIsTrivial) {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 100; ++t) {
        long x = qtest::nonzero(rng, -300, 300), y = qtest::uniform(rng, 1, 300);
        Rational q(x * x, y * y);
        q.canonicalize();
        for (long p : {2L, 3L, 5L, 11L}) EXPECT_TRUE(is_local_square(q, Place::prime(p)));
    }
    // 17 = 1 mod 8 is a 2-adic square; 5 is not
    EXPECT_TRUE(is_local_square(Rational(17), Place::prime(2)));
    EXPECT_FALSE(is_local_square(Rational(5), Place::prime(2)));
}

TEST(Arith, CheckedArithmeticOverflows) {
    EXPECT_THROW(checked_mul(i64(1) << 62, 4), ArithmeticOverflow);
    EXPECT_THROW(checked_add(std::numeric_limits<i64>::max(), 1), ArithmeticOverflow);
    EXPECT_EQ(checked_mul(-3, 7), -21);
}
