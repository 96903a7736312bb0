#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace qlat;

namespace {

Int hyperoctahedral(unsigned n) {
    Int r = 1;
    for (unsigned k = 1; k <= n; ++k) r *= 2 * k;
    return r;
}

}  // namespace

TEST(Isometry, StandardLatticeOrders) {
    for (unsigned n = 1; n <= 7; ++n) {
        auto L = QuadraticLattice::standard(n);
        EXPECT_EQ(automorphism_order(L), hyperoctahedral(n)) << n;
        EXPECT_EQ(qtest::AutCounter(L).order(), hyperoctahedral(n)) << n;
    }
    EXPECT_EQ(count_automorphisms_exhaustive(QuadraticLattice::standard(4)), 384u);
}

TEST(Isometry, HexagonalAndD4) {
    QuadraticLattice a2(IntMatrix{{2, -1}, {-1, 2}});
    EXPECT_EQ(automorphism_order(a2), 12);
    QuadraticLattice d4(IntMatrix{{4, -2, 0, 0}, {-2, 4, -2, -2}, {0, -2, 4, 0}, {0, -2, 0, 4}});
    EXPECT_EQ(automorphism_order(d4), 1152);
    EXPECT_EQ(qtest::AutCounter(d4).order(), 1152);
}

TEST(Isometry, OrderAgreesWithIndependentCounters) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 40; ++t) {
        auto L = qtest::random_gram(rng, qtest::uniform(rng, 1, 4), 2);
        Int a = automorphism_order(L);
        EXPECT_EQ(a, qtest::AutCounter(L).order());
        EXPECT_EQ(a, count_automorphisms_exhaustive(L));
    }
}

TEST(Isometry, GeneratorsAreAutomorphisms) {
    std::mt19937_64 rng(42);
    for (int t = 0; t < 20; ++t) {
        auto L = qtest::random_definite(rng, qtest::uniform(rng, 2, 5), 3, 6);
        auto g = automorphism_group(L);
        for (const auto& m : g.generators) {
            EXPECT_EQ(L.transformed(m), L);
            EXPECT_EQ(abs(determinant(m)), 1);
        }
    }
    EXPECT_TRUE(automorphism_group(QuadraticLattice::standard(3)).has_improper());
}

TEST(Isometry, FindsTransformsOfRandomBases) {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 60; ++t) {
        std::size_t n = qtest::uniform(rng, 1, 6);
        auto L = qtest::random_definite(rng, n, 5, 4);
        auto M = L.transformed(qtest::random_unimodular(rng, n, 10, 2));
        auto T = is_isometric(L, M);
        ASSERT_TRUE(T.has_value());
        EXPECT_EQ(L.sublattice(*T), M);
    }
}

TEST(Isometry, RejectsNonIsometricPairs) {
    // same determinant and rank, different minimum
    EXPECT_FALSE(is_isometric(QuadraticLattice::diagonal({1, 6}), QuadraticLattice::diagonal({2, 3})).has_value());
    // the genus of I9: same discriminant and local data, different root systems
    auto e8i1 = orthogonal_sum(QuadraticLattice::e8(), QuadraticLattice::standard(1));
    EXPECT_FALSE(is_isometric(QuadraticLattice::standard(9), e8i1).has_value());
    // x^2+y^2+16z^2 against its spinor-genus partner
    QuadraticLattice partner(IntMatrix{{4, 0, -2}, {0, 4, -2}, {-2, -2, 10}});
    EXPECT_FALSE(is_isometric(QuadraticLattice::diagonal({1, 1, 16}), partner).has_value());
}

TEST(Isometry, BudgetIsEnforced) {
    NodeCounter tiny(10, "test");
    EXPECT_THROW(automorphism_group(QuadraticLattice::e8(), &tiny), BudgetExhausted);
}
