#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace qlat;

namespace {

int kronecker(long D, long a) {
    int r = 1;
    for (long p = 2; p * p <= a || a > 1; ++p) {
        if (p * p > a) p = a;
        while (a % p == 0) {
            a /= p;
            if (p == 2) {
                long m = ((D % 8) + 8) % 8;
                r *= (D % 2 == 0) ? 0 : (m == 1 || m == 7 ? 1 : -1);
            } else {
                r *= legendre_symbol(Int(D), Int(p));
            }
        }
    }
    return r;
}

bool fundamental(long D) {
    if (D % 4 == 0) {
        long m = D / 4;
        long mm = ((m % 4) + 4) % 4;
        return (mm == 2 || mm == 3) && is_squarefree(Int(std::abs(m)));
    }
    return ((D % 4) + 4) % 4 == 1 && is_squarefree(Int(std::abs(D)));
}

// h(D) = -(w / 2|D|) sum_{a<|D|} chi_D(a) a for fundamental D < 0
long analytic_class_number(long D) {
    long w = D == -3 ? 6 : D == -4 ? 4 : 2;
    long s = 0;
    for (long a = 1; a < -D; ++a) s += kronecker(D, a) * a;
    return -w * s / (2 * -D);
}

}  // namespace

TEST(Linnik, ClassNumbersMatchAnalyticFormula) {
    int checked = 0;
    for (long D = -3; D >= -1500; --D) {
        if (!fundamental(D)) continue;
        EXPECT_EQ(class_number(D), static_cast<std::uint64_t>(analytic_class_number(D))) << D;
        ++checked;
    }
    EXPECT_GT(checked, 400);
    EXPECT_THROW(class_number(-5), std::invalid_argument);
    EXPECT_THROW(class_number(5), std::invalid_argument);
}

TEST(Linnik, ReductionIsAnInvariantOfTheClass) {
    std::mt19937_64 rng(71);
    for (int t = 0; t < 200; ++t) {
        i64 a = qtest::uniform(rng, 1, 20), c = qtest::uniform(rng, a, 40), b = qtest::uniform(rng, -a + 1, a);
        if (b * b - 4 * a * c >= 0) continue;
        auto f = reduce_binary(a, b, c);
        // x -> p x + q y, y -> r x + s y with ps - qr = 1
        i64 p = qtest::uniform(rng, -3, 3), q = qtest::uniform(rng, -3, 3);
        if (std::gcd(p, q) != 1) continue;
        i64 r = 0, s = 0;
        for (r = -6; r <= 6; ++r) {
            bool found = false;
            for (s = -6; s <= 6; ++s)
                if (p * s - q * r == 1) {
                    found = true;
                    break;
                }
            if (found) break;
        }
        if (p * s - q * r != 1) continue;
        i64 A = a * p * p + b * p * r + c * r * r;
        i64 B = 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s;
        i64 C = a * q * q + b * q * s + c * s * s;
        auto g = reduce_binary(A, B, C);
        EXPECT_EQ(g, f);
        EXPECT_EQ(g.disc(), b * b - 4 * a * c);
        EXPECT_LE(std::abs(g.b), g.a);
        EXPECT_LE(g.a, g.c);
    }
}

TEST(Linnik, SphereCountsMatchThetaOfThreeSquares) {
    auto prim = primitive_from_total(theta_series(QuadraticLattice::standard(3), 600));
    for (i64 d = 1; d <= 600; ++d) EXPECT_EQ(Int(static_cast<long>(sphere_solutions(d).size())), prim[d]) << d;
}

TEST(Linnik, ComplementClassIsRotationInvariant) {
    auto rot = rotation_group();
    ASSERT_EQ(rot.size(), 24u);
    for (i64 d : {5L, 13L, 21L, 29L, 41L, 101L}) {
        for (const auto& s : sphere_solutions(d)) {
            auto f = complement_class(s, d);
            EXPECT_EQ(f.disc(), -4 * d);
            for (const auto& g : rot) {
                Triple t{};
                for (int i = 0; i < 3; ++i) t[i] = g[i][0] * s[0] + g[i][1] * s[1] + g[i][2] * s[2];
                EXPECT_EQ(complement_class(t, d), f);
            }
        }
    }
    EXPECT_THROW(complement_class({1, 1, 1}, 5), std::invalid_argument);
    EXPECT_THROW(complement_class({2, 2, 0}, 8), std::invalid_argument);
}

TEST(Linnik, GaussIdentityOnSmallRange) {
    auto rep = gauss_check(200);
    ASSERT_TRUE(rep.d_one.has_value());
    EXPECT_FALSE(rep.d_one->pass);
    EXPECT_EQ(rep.d_one->count, 6u);
    EXPECT_EQ(rep.d_one->twelve_h, 12u);
    EXPECT_TRUE(rep.all_pass());
    for (const auto& r : rep.rows) EXPECT_EQ(r.twelve_h, 12u * static_cast<std::uint64_t>(analytic_class_number(-4 * r.d)));
}
