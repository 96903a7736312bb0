#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace qlat;

namespace {

// a nontrivial zero of sum c_i x_i^2 over F_p
bool fp_isotropic(const std::vector<long>& c, long p) {
    const std::size_t n = c.size();
    if (n == 0) return false;
    std::vector<long> x(n, 0);
    while (true) {
        std::size_t k = 0;
        while (k < n && x[k] == p - 1) x[k++] = 0;
        if (k == n) return false;
        ++x[k];
        long s = 0;
        for (std::size_t i = 0; i < n; ++i) s = (s + c[i] * x[i] % p * x[i]) % p;
        if (s == 0) return true;
    }
}

// p odd: f = f0 + p f1 with unit diagonals is isotropic iff f0 or f1 is isotropic mod p
bool isotropic_oracle(const std::vector<long>& d, long p) {
    std::vector<long> f0, f1;
    for (long a : d) {
        long v = 0;
        while (a % p == 0) {
            a /= p;
            ++v;
        }
        (v % 2 ? f1 : f0).push_back(((a % p) + p) % p);
    }
    return fp_isotropic(f0, p) || fp_isotropic(f1, p);
}

std::vector<Rational> as_rationals(const std::vector<long>& d) {
    std::vector<Rational> out;
    for (long a : d) out.emplace_back(a);
    return out;
}

}  // namespace

TEST(Local, SumsOfThreeSquares) {
    auto i3 = QuadraticLattice::standard(3);
    EXPECT_EQ(locally_representable(QuadraticLattice::diagonal({5}), i3, 2), Tri::Yes);
    EXPECT_EQ(locally_representable(QuadraticLattice::diagonal({7}), i3, 2), Tri::No);
    EXPECT_EQ(locally_representable(QuadraticLattice::diagonal({7}), i3, 7), Tri::Yes);
    // n is a sum of three squares iff n is not 4^a (8b + 7)
    for (long n = 1; n <= 120; ++n) {
        long m = n;
        while (m % 4 == 0) m /= 4;
        Tri want = m % 8 == 7 ? Tri::No : Tri::Yes;
        EXPECT_EQ(locally_representable(QuadraticLattice::diagonal({n}), i3, 2), want) << n;
    }
}

TEST(Local, IsotropyMatchesReductionModP) {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 300; ++t) {
        std::size_t n = qtest::uniform(rng, 1, 5);
        std::vector<long> d(n);
        for (auto& a : d) a = qtest::nonzero(rng, -60, 60);
        for (long p : {3L, 5L, 7L, 11L})
            EXPECT_EQ(is_isotropic_local(as_rationals(d), Place::prime(p)), isotropic_oracle(d, p)) << "p=" << p;
    }
}

TEST(Local, FiveDimensionalShortcutAgreesWithSplitting) {
    std::mt19937_64 rng(32);
    for (int t = 0; t < 60; ++t) {
        std::vector<long> d(qtest::uniform(rng, 5, 7));
        for (auto& a : d) a = qtest::nonzero(rng, -50, 50);
        for (long p : {2L, 3L, 5L}) EXPECT_TRUE(isotropic_by_splitting(as_rationals(d), Place::prime(p)));
    }
}

TEST(Local, SpinorNormImageIsFullInDimensionThree) {
    std::mt19937_64 rng(33);
    for (int t = 0; t < 60; ++t) {
        std::vector<long> d(qtest::uniform(rng, 3, 6));
        for (auto& a : d) a = qtest::nonzero(rng, -50, 50);
        for (long p : {3L, 5L, 7L, 13L}) EXPECT_TRUE(spinor_norm_image(as_rationals(d), Int(p)).is_full());
    }
    // a binary form does not have full image
    EXPECT_FALSE(spinor_norm_image({Rational(1), Rational(1)}, Int(3)).is_full());
}

TEST(Local, HasseInvariantOfSumOfSquares) {
    // <1,...,1> has trivial Hasse invariant at every place
    for (std::size_t n = 1; n <= 6; ++n)
        for (long p : {2L, 3L, 5L}) EXPECT_EQ(hasse_invariant(std::vector<Rational>(n, Rational(1)), Place::prime(p)), 1);
    EXPECT_EQ(hasse_invariant({Rational(-1), Rational(-1)}, Place::prime(2)), -1);
}

TEST(Local, JordanSymbolsOfSmallForms) {
    auto s3 = jordan_decompose(QuadraticLattice::diagonal({1, 3, 9}), 3L);
    ASSERT_EQ(s3.blocks.size(), 3u);
    EXPECT_EQ(s3.total_rank(), 3);
    EXPECT_EQ(s3.weighted_scale_sum(), 3);
    auto s2 = jordan_decompose(QuadraticLattice::standard(4), 2L);
    ASSERT_EQ(s2.blocks.size(), 1u);
    EXPECT_TRUE(s2.blocks[0].odd);
    EXPECT_EQ(s2.blocks[0].oddity, 4);
    auto e8 = jordan_decompose(QuadraticLattice::e8(), 2L);
    ASSERT_EQ(e8.blocks.size(), 1u);
    EXPECT_FALSE(e8.blocks[0].odd);
}

TEST(Local, IsometryClassesOfDiagonalForms) {
    // <1,1> and <3,3> have the same det at 2 but differ in oddity; <1,1> and <5,5> are isometric over Z_2
    auto a = QuadraticLattice::diagonal({1, 1}), b = QuadraticLattice::diagonal({3, 3}), c = QuadraticLattice::diagonal({5, 5});
    EXPECT_FALSE(local_isometric(a, b, 2L));
    EXPECT_TRUE(local_isometric(a, c, 2L));
    // at 3, <1,2> vs <1,1>: different determinant class
    EXPECT_FALSE(local_isometric(QuadraticLattice::diagonal({1, 2}), a, 3L));
    EXPECT_TRUE(local_isometric(QuadraticLattice::diagonal({2, 2}), a, 3L));
}

TEST(Local, SymbolsAgreeWithLiftingOracle) {
    std::mt19937_64 rng(34);
    int disagreements = 0, inconclusive = 0, pairs = 0;
    for (int t = 0; t < 25; ++t) {
        std::size_t n = qtest::uniform(rng, 1, 3);
        std::vector<i64> c(n), c2(n);
        for (auto& x : c) x = qtest::uniform(rng, 1, 12);
        c2 = c;
        // move a prime factor between two coefficients
        if (n >= 2) {
            std::size_t i = qtest::uniform(rng, 0, n - 1), j = (i + 1) % n;
            i64 q = std::vector<i64>{1, 2, 3, 5}[qtest::uniform(rng, 0, 3)];
            c2[i] *= q;
            c2[j] *= q;
        }
        auto L1 = QuadraticLattice::diagonal(c).transformed(qtest::random_unimodular(rng, n, 3, 1));
        auto L2 = QuadraticLattice::diagonal(c2).transformed(qtest::random_unimodular(rng, n, 3, 1));
        for (const auto& p : prime_divisors(2 * L1.discriminant() * L2.discriminant())) {
            ++pairs;
            auto f = lifting_oracle_embeds(L1, L2, p), g = lifting_oracle_embeds(L2, L1, p);
            if (f.result == Tri::Inconclusive || g.result == Tri::Inconclusive) {
                ++inconclusive;
                continue;
            }
            bool oracle = f.result == Tri::Yes && g.result == Tri::Yes;
            if (oracle != local_isometric(L1, L2, p)) ++disagreements;
        }
    }
    EXPECT_GT(pairs, 25);
    EXPECT_EQ(inconclusive, 0);
    EXPECT_EQ(disagreements, 0);
}

TEST(Local, UnimodularReductionAssertedAgainstOracle) {
    // p odd, p not dividing 2 disc(L) disc(L'): the shortcut says yes; the oracle must agree
    std::mt19937_64 rng(35);
    int checked = 0;
    for (int t = 0; t < 40; ++t) {
        auto L = qtest::random_definite(rng, qtest::uniform(rng, 3, 4), 4, 3);
        i64 d = qtest::uniform(rng, 1, 40);
        if (!is_squarefree(Int(d))) continue;
        auto src = QuadraticLattice::diagonal({d});
        for (long p : {3L, 5L, 7L, 11L}) {
            if ((2 * L.discriminant() * src.discriminant()) % p == 0) continue;
            EXPECT_EQ(lifting_oracle_embeds(src, L, p).result, Tri::Yes);
            EXPECT_EQ(locally_representable(src, L, p), Tri::Yes);
            ++checked;
        }
    }
    EXPECT_GT(checked, 40);
}

TEST(Local, SpinorKernelOfUnimodularBlockIsFullAtOddP) {
    // a unimodular block of rank >= 2 at odd p: every unit class is a spinor norm
    auto g = local_spinor_kernel(QuadraticLattice::standard(3), Int(3));
    EXPECT_TRUE(g.contains(SquareClass(Rational(2), Place::prime(3))));
    EXPECT_TRUE(g.contains(SquareClass(Rational(1), Place::prime(3))));
}
