#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "support.hpp"

using namespace qlat;

namespace {

i64 box_for(const QuadraticLattice& L, i64 bound) {
    RatMatrix inv = inverse(to_rational(L.gram()));
    double m = 0;
    for (std::size_t i = 0; i < L.rank(); ++i) m = std::max(m, inv(i, i).get_d());
    return static_cast<i64>(std::floor(std::sqrt(2.0 * bound * m) + 1e-9));
}

RatMatrix rational_unimodularish(std::mt19937_64& rng, std::size_t k) {
    while (true) {
        RatMatrix u(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) u(i, j) = ratio(qtest::uniform(rng, -3, 3), qtest::uniform(rng, 1, 3));
        if (determinant(u) != 0) return u;
    }
}

}  // namespace

TEST(Lattice, BasicInvariants) {
    EXPECT_EQ(QuadraticLattice::standard(9).discriminant(), 512);
    EXPECT_EQ(QuadraticLattice::e8().discriminant(), 256);
    EXPECT_EQ(QuadraticLattice::hyperbolic_plane().discriminant(), -1);
    EXPECT_EQ(minimum(QuadraticLattice::e8()), 2);
    EXPECT_EQ(minimum(QuadraticLattice::standard(5)), 1);
    EXPECT_EQ(minimum(QuadraticLattice::diagonal({3, 5, 7})), 3);
    EXPECT_THROW(QuadraticLattice(IntMatrix{{1, 0}, {0, 2}}), std::invalid_argument);
    EXPECT_THROW(QuadraticLattice(IntMatrix{{2, 2}, {2, 2}}), std::invalid_argument);
}

TEST(Lattice, E8RootCount) {
    // 240 roots, 2160 vectors of the next shell
    auto h = norm_histogram(QuadraticLattice::e8(), 4);
    EXPECT_EQ(h[2], 240u);
    EXPECT_EQ(h[4], 2160u);
}

TEST(Lattice, ShortVectorsMatchBoxSearch) {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 40; ++t) {
        auto L = qtest::random_gram(rng, qtest::uniform(rng, 1, 4));
        i64 bound = qtest::uniform(rng, 1, 12);
        auto sv = short_vectors(L, bound);
        auto bx = qtest::box_vectors(L, box_for(L, bound), bound);
        std::sort(sv.begin(), sv.end());
        std::sort(bx.begin(), bx.end());
        EXPECT_EQ(sv, bx);
    }
}

TEST(Lattice, SignatureOfIndefinite) {
    auto h = QuadraticLattice::hyperbolic_plane();
    EXPECT_EQ(signature(h), std::make_pair(std::size_t(1), std::size_t(1)));
    EXPECT_EQ(signature(orthogonal_sum(h, QuadraticLattice::standard(2))), std::make_pair(std::size_t(3), std::size_t(1)));
}

TEST(Lattice, ReflectionIsAnInvolutiveIsometry) {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 100; ++t) {
        std::size_t n = qtest::uniform(rng, 1, 5);
        auto L = qtest::random_gram(rng, n);
        std::vector<Rational> d(n);
        do {
            for (auto& x : d) x = ratio(qtest::uniform(rng, -4, 4), qtest::uniform(rng, 1, 3));
        } while (std::all_of(d.begin(), d.end(), [](const Rational& x) { return x == 0; }));
        RatMatrix r = reflection(L, d);
        RatMatrix b = to_rational(L.gram());
        EXPECT_EQ(r.transpose() * b * r, b);
        EXPECT_EQ(r * r, RatMatrix::identity(n));
        auto rd = r * d;
        for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(rd[i], -d[i]);
    }
    EXPECT_THROW(reflection(QuadraticLattice::hyperbolic_plane(), {Rational(1), Rational(0)}), std::invalid_argument);
}

TEST(Lattice, OrthogonalComplement) {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 50; ++t) {
        std::size_t n = qtest::uniform(rng, 2, 5);
        auto L = qtest::random_gram(rng, n);
        std::size_t k = qtest::uniform(rng, 1, n - 1);
        std::vector<Vec> vs;
        while (true) {
            vs.clear();
            for (std::size_t j = 0; j < k; ++j) {
                Vec v(n);
                for (auto& x : v) x = qtest::uniform(rng, -3, 3);
                vs.push_back(v);
            }
            RatMatrix m(n, k);
            for (std::size_t j = 0; j < k; ++j)
                for (std::size_t i = 0; i < n; ++i) m(i, j) = Rational(vs[j][i]);
            if (rank(m) == k) break;
        }
        auto S = RationalSubspace::span(n, vs);
        BigMatrix c = orthogonal_complement_basis(L, S);
        ASSERT_EQ(c.cols(), n - k);
        EXPECT_TRUE(is_saturated(c));
        BigMatrix b = to_big(L.gram());
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t col = 0; col < c.cols(); ++col) {
                Int s = 0;
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t e = 0; e < n; ++e) s += Int(vs[j][a]) * b(a, e) * c(e, col);
                EXPECT_EQ(s, 0);
            }
    }
}

TEST(Lattice, ValIsBasisInvariant) {
    std::mt19937_64 rng(24);
    for (int t = 0; t < 100; ++t) {
        std::size_t n = qtest::uniform(rng, 2, 5);
        auto L = qtest::random_gram(rng, n);
        std::size_t k = qtest::uniform(rng, 1, n);
        RatMatrix v(n, k);
        do {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < k; ++j) v(i, j) = ratio(qtest::uniform(rng, -3, 3), qtest::uniform(rng, 1, 2));
        } while (rank(v) != k);
        RationalSubspace a(n, v), b(n, v * rational_unimodularish(rng, k));
        for (long p : {2L, 3L, 5L}) EXPECT_EQ(val_of_subspace(L, a, Int(p)), val_of_subspace(L, b, Int(p)));
    }
}

TEST(Lattice, SaturationMatchesMinorGcd) {
    std::mt19937_64 rng(25);
    for (int t = 0; t < 100; ++t) {
        BigMatrix m(3, 2);
        do {
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 2; ++j) m(i, j) = qtest::uniform(rng, -6, 6);
        } while (rank(m) != 2);
        Int g = 0;
        for (std::size_t r1 = 0; r1 < 3; ++r1)
            for (std::size_t r2 = r1 + 1; r2 < 3; ++r2) g = gcd(g, Int(m(r1, 0) * m(r2, 1) - m(r1, 1) * m(r2, 0)));
        EXPECT_EQ(is_saturated(m), abs(g) == 1);
        RationalSubspace s(3, to_rational(m));
        BigMatrix sb = s.saturated_basis();
        EXPECT_TRUE(is_saturated(sb));
        EXPECT_EQ(rank(to_rational(sb)), 2u);
    }
}

TEST(Lattice, LllKeepsTheLattice) {
    std::mt19937_64 rng(26);
    for (int t = 0; t < 50; ++t) {
        std::size_t n = qtest::uniform(rng, 1, 6);
        auto L = qtest::random_definite(rng, n, 6, 12);
        auto [R, T] = lll_reduce(L);
        EXPECT_EQ(abs(determinant(T)), 1);
        EXPECT_EQ(R, L.sublattice(T));
        EXPECT_EQ(minimum(R), minimum(L));
    }
}

TEST(GramIo, RoundTripIsBitExact) {
    std::mt19937_64 rng(27);
    for (int t = 0; t < 50; ++t) {
        auto L = qtest::random_gram(rng, qtest::uniform(rng, 0, 6));
        std::string s = gram_string(L);
        std::istringstream in(s);
        auto back = read_gram(in);
        EXPECT_EQ(back, L);
        EXPECT_EQ(gram_string(back), s);
    }
}

TEST(GramIo, CommentsAndErrors) {
    std::istringstream in("# E2\n2\n  # rows follow\n2 1\n1 2\n");
    auto L = read_gram(in);
    EXPECT_EQ(L.discriminant(), 3);
    std::istringstream shortf("2\n2 1\n1\n");
    EXPECT_THROW(read_gram(shortf), std::runtime_error);
    std::istringstream extra("1\n2 3\n");
    EXPECT_THROW(read_gram(extra), std::runtime_error);
    std::istringstream odd("1\n3\n");
    EXPECT_THROW(read_gram(odd), std::invalid_argument);
}
