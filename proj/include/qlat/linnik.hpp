#ifndef QLAT_LINNIK_HPP
#define QLAT_LINNIK_HPP

#include <algorithm>
#include <array>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "arith.hpp"
#include "lattice.hpp"

namespace qlat {

/// Reduced positive definite binary form a x^2 + b x y + c y^2.
struct BinaryFormClass {
    i64 a, b, c;

    i64 disc() const { return b * b - 4 * a * c; }

    friend bool operator==(const BinaryFormClass& x, const BinaryFormClass& y) {
        return x.a == y.a && x.b == y.b && x.c == y.c;
    }
    friend bool operator<(const BinaryFormClass& x, const BinaryFormClass& y) {
        return std::tie(x.a, x.b, x.c) < std::tie(y.a, y.b, y.c);
    }
    friend std::ostream& operator<<(std::ostream& os, const BinaryFormClass& f) {
        return os << '(' << f.a << ',' << f.b << ',' << f.c << ')';
    }
};

/// Gauss reduction under SL_2(Z): |b| <= a <= c, with b >= 0 if |b| = a or a = c.
inline BinaryFormClass reduce_binary(i64 a, i64 b, i64 c) {
    if (a <= 0 || checked_sub(checked_mul(b, b), checked_mul(4, checked_mul(a, c))) >= 0)
        throw std::domain_error("reduce_binary: form is not positive definite");
    while (true) {
        if (b > a || b <= -a) {
            // translate x -> x + k y to bring b into (-a, a]
            i64 k = floor_div(Int(static_cast<long>(a - b)), Int(static_cast<long>(2 * a))).get_si();
            c = c + b * k + a * k * k;
            b = b + 2 * a * k;
        }
        if (a > c) {
            std::swap(a, c);
            b = -b;
            continue;
        }
        if (a == c && b < 0) b = -b;
        break;
    }
    return {a, b, c};
}

/// Number of reduced primitive forms of discriminant D.
inline std::uint64_t class_number(i64 D) {
    if (D >= 0 || mod_pos(D, 4) > 1) throw std::invalid_argument("class_number: need D < 0 and D = 0, 1 mod 4");
    std::uint64_t h = 0;
    const i64 N = -D;
    for (i64 a = 1; 3 * a * a <= N; ++a)
        for (i64 b = -a + 1; b <= a; ++b) {
            if ((b * b - D) % (4 * a) != 0) continue;
            i64 c = (b * b - D) / (4 * a);
            if (c < a) continue;
            if (b < 0 && a == c) continue;
            if (std::gcd(std::gcd(a, b < 0 ? -b : b), c) != 1) continue;
            ++h;
        }
    return h;
}

using Triple = std::array<i64, 3>;

/// Primitive (x, y, z) with x^2 + y^2 + z^2 = d, sorted lexicographically.
inline std::vector<Triple> sphere_solutions(i64 d) {
    if (d < 1) throw std::invalid_argument("sphere_solutions: d must be positive");
    std::vector<Triple> out;
    const i64 r = isqrt(Int(static_cast<long>(d))).get_si();
    for (i64 x = -r; x <= r; ++x)
        for (i64 y = -r; y <= r; ++y) {
            i64 rest = d - x * x - y * y;
            if (rest < 0) continue;
            i64 z = isqrt(Int(static_cast<long>(rest))).get_si();
            if (z * z != rest) continue;
            const std::vector<i64> zs = z == 0 ? std::vector<i64>{0} : std::vector<i64>{-z, z};
            for (i64 zz : zs)
                if (std::gcd(std::gcd(x, y), zz) == 1) out.push_back({x, y, zz});
        }
    std::sort(out.begin(), out.end());
    return out;
}

/// Reduced class of the binary form induced by x^2 + y^2 + z^2 on s-perp in Z^3, with the
/// basis (u, v) of s-perp chosen so that (s, u, v) is positively oriented. Discriminant -4d.
inline BinaryFormClass complement_class(const Triple& s, i64 d) {
    if (s[0] * s[0] + s[1] * s[1] + s[2] * s[2] != d) throw std::invalid_argument("complement_class: s is not on the sphere");
    if (std::gcd(std::gcd(s[0], s[1]), s[2]) != 1) throw std::invalid_argument("complement_class: s is not primitive");
    QuadraticLattice I3 = QuadraticLattice::standard(3);
    BigMatrix c = orthogonal_complement_basis(I3, RationalSubspace::span(3, {Vec{s[0], s[1], s[2]}}));
    // orient (s, u, v) positively so the class is an SO(3) invariant
    BigMatrix m(3, 3);
    for (std::size_t i = 0; i < 3; ++i) {
        m(i, 0) = static_cast<long>(s[i]);
        m(i, 1) = c(i, 0);
        m(i, 2) = c(i, 1);
    }
    if (determinant(m) < 0)
        for (std::size_t i = 0; i < 3; ++i) c(i, 1) = -c(i, 1);
    QuadraticLattice K = I3.sublattice(c);
    // Q(x e1 + y e2) = (B11 x^2 + 2 B12 x y + B22 y^2) / 2
    BinaryFormClass f = reduce_binary(K.norm(0), K.gram(0, 1), K.norm(1));
    if (f.disc() != -4 * d) throw std::logic_error("complement_class: discriminant is not -4d");
    return f;
}

/// The 24 determinant-one signed permutation matrices.
inline std::vector<std::array<std::array<i64, 3>, 3>> rotation_group() {
    std::vector<std::array<std::array<i64, 3>, 3>> out;
    std::array<int, 3> perm{0, 1, 2};
    do {
        for (int signs = 0; signs < 8; ++signs) {
            std::array<std::array<i64, 3>, 3> m{};
            for (int i = 0; i < 3; ++i) m[i][perm[i]] = (signs >> i & 1) ? -1 : 1;
            i64 det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                      m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
            if (det == 1) out.push_back(m);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

struct GaussRow {
    i64 d;
    std::uint64_t count;
    std::uint64_t twelve_h;
    bool pass;
};

struct GaussReport {
    std::vector<GaussRow> rows;           // squarefree d = 1 mod 4, 5 <= d <= d_max
    std::optional<GaussRow> d_one;        // reported apart: the identity excludes d = 1
    bool all_pass() const {
        return std::all_of(rows.begin(), rows.end(), [](const GaussRow& r) { return r.pass; });
    }
};

/// Compares the primitive sphere count of d with 12 h(-4d).
inline GaussReport gauss_check(i64 d_max) {
    GaussReport rep;
    if (d_max >= 1) {
        std::uint64_t c = sphere_solutions(1).size();
        std::uint64_t t = 12 * class_number(-4);
        rep.d_one = GaussRow{1, c, t, c == t};
    }
    for (i64 d = 5; d <= d_max; d += 4) {
        if (!is_squarefree(Int(static_cast<long>(d)))) continue;
        std::uint64_t c = sphere_solutions(d).size();
        std::uint64_t t = 12 * class_number(-4 * d);
        rep.rows.push_back({d, c, t, c == t});
    }
    return rep;
}

}  // namespace qlat

#endif
