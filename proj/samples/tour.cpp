// A short walk through the library: build I9, find its genus, count representations.

#include <iostream>

#include <qlat/qlat.hpp>

int main() {
    using namespace qlat;

    QuadraticLattice i9 = QuadraticLattice::standard(9);
    std::cout << "disc(I9) = " << i9.discriminant() << ", min = " << minimum(i9) << "\n";

    GenusRecord rec = enumerate_genus(i9);
    std::cout << "genus of I9: " << rec.size() << " classes, mass " << rec.mass << "\n";
    for (std::size_t i = 0; i < rec.size(); ++i)
        std::cout << "  class " << i << ": |Aut| = " << rec.aut_orders[i] << ", min = " << rec.minima[i] << "\n";

    QuadraticLattice e8i1 = orthogonal_sum(QuadraticLattice::e8(), QuadraticLattice::standard(1));
    std::cout << "class 1 isometric to E8+I1: " << (is_isometric(rec.classes[1], e8i1) ? "yes" : "no") << "\n";

    // sums of nine squares vs. the other class
    for (i64 d : {1, 2, 3, 7, 30}) {
        QuadraticLattice q = QuadraticLattice::diagonal({d});
        std::cout << "d = " << d << ": local " << local_test_suite(q, i9).summary() << ", primitive counts";
        for (const auto& c : rec.classes) std::cout << ' ' << primitive_representation_count(q, c);
        std::cout << "\n";
    }

    // (7) is not a sum of three squares; the obstruction sits at 2
    QuadraticLattice i3 = QuadraticLattice::standard(3);
    std::cout << "(7) in I3 at 2: " << to_string(locally_representable(QuadraticLattice::diagonal({7}), i3, 2)) << "\n";
}
