#include <gtest/gtest.h>

#include "support.hpp"

using namespace qlat;

namespace {

const GenusRecord& i8_genus() {
    static const GenusRecord rec = enumerate_genus(QuadraticLattice::standard(8));
    return rec;
}

const GenusRecord& ternary_genus() {
    static const GenusRecord rec = enumerate_genus(QuadraticLattice::diagonal({1, 1, 16}));
    return rec;
}

}  // namespace

TEST(Harness, ClassicalDiscriminant) {
    EXPECT_EQ(classical_discriminant(QuadraticLattice::diagonal({7})), 7);
    EXPECT_EQ(classical_discriminant(QuadraticLattice(IntMatrix{{2, 1}, {1, 4}})), -7);
    EXPECT_EQ(classical_discriminant(QuadraticLattice::standard(3)), 4);
}

TEST(Harness, LocalTestSuiteExamples) {
    auto i3 = QuadraticLattice::standard(3);
    auto five = local_test_suite(QuadraticLattice::diagonal({5}), i3);
    EXPECT_EQ(five.result, Tri::Yes);
    EXPECT_EQ(five.summary(), "inf:Y;2:Y;5:Y");
    auto seven = local_test_suite(QuadraticLattice::diagonal({7}), i3);
    EXPECT_EQ(seven.result, Tri::No);
    EXPECT_EQ(seven.summary(), "inf:Y;2:N;7:Y");
    EXPECT_EQ(local_test_suite(QuadraticLattice::diagonal({1}), QuadraticLattice::standard(9)).result, Tri::Yes);
    // a negative form fails at infinity
    auto neg = local_test_suite(QuadraticLattice::diagonal({-1}), i3);
    EXPECT_EQ(neg.places.front().result, Tri::No);
    EXPECT_EQ(neg.result, Tri::No);
}

TEST(Harness, HsiaCheck) {
    auto rec = enumerate_genus(QuadraticLattice::standard(3));
    auto r = hsia_check(QuadraticLattice::diagonal({5}), rec);
    EXPECT_TRUE(r.success);
    EXPECT_EQ(r.class_index, 0u);
    EXPECT_THROW(hsia_check(QuadraticLattice::diagonal({7}), rec), std::invalid_argument);
    EXPECT_THROW(hsia_check(QuadraticLattice::diagonal({4}), rec), std::invalid_argument);
    auto zero = hsia_check(QuadraticLattice(), rec);
    EXPECT_TRUE(zero.success);
    EXPECT_EQ(zero.class_index, 0u);
}

TEST(Harness, SingleClassGenusIsTrivial) {
    const auto& rec = i8_genus();
    auto rep = local_global_experiment(QuadraticLattice::standard(8), rec, builtin_candidates(1, 200));
    EXPECT_TRUE(rep.exceptions.empty());
    EXPECT_FALSE(rep.has_red_flag());
    EXPECT_EQ(rep.threshold, 0);
    for (const auto& row : rep.rows) {
        ASSERT_EQ(row.counts.size(), 1u);
        EXPECT_TRUE(row.all_classes_represented);
        EXPECT_TRUE(row.good);  // codim 7
        EXPECT_TRUE(hsia_check(row.candidate, rec).success);
    }
    for (const auto& r : asymptotic_ratio_report(rep, rec)) {
        EXPECT_EQ(r.mean, 1.0);
        EXPECT_EQ(r.min, 1.0);
        EXPECT_EQ(r.max, 1.0);
    }
}

TEST(Harness, ExceptionsAndRowInvariants) {
    const auto& rec = ternary_genus();
    auto L = QuadraticLattice::diagonal({1, 1, 16});
    auto rep = local_global_experiment(L, rec, builtin_candidates(1, 120));
    ASSERT_EQ(rep.block.size(), 1u);
    for (const auto& row : rep.rows) {
        for (const auto& c : row.counts)
            if (row.all_classes_represented) {
                EXPECT_GE(c, 1);
            }
        EXPECT_FALSE(row.good);  // codim 2
        EXPECT_EQ(local_test_suite(row.candidate, L).result, Tri::Yes);
    }
    // rows failing the local tests are filtered, never exceptions
    EXPECT_GT(rep.failed_local, 0u);
    for (auto id : rep.exceptions) {
        auto it = std::find_if(rep.rows.begin(), rep.rows.end(), [&](const ExperimentRow& r) { return r.id == id; });
        ASSERT_NE(it, rep.rows.end());
        EXPECT_FALSE(it->all_classes_represented);
        EXPECT_LE(it->minimum, rep.threshold);
    }
}

TEST(Harness, CodimensionFlagForUserCandidates) {
    // binary candidates in I8 are codimension 6: computed but not "good"
    std::vector<QuadraticLattice> cands{QuadraticLattice::diagonal({1, 1}), QuadraticLattice::diagonal({1, 2})};
    auto rep = local_global_experiment(QuadraticLattice::standard(8), i8_genus(), cands);
    ASSERT_EQ(rep.rows.size(), 2u);
    for (const auto& row : rep.rows) {
        EXPECT_FALSE(row.good);
        EXPECT_TRUE(row.all_classes_represented);
    }
    EXPECT_EQ(rep.rows[0].counts[0], 16 * 14);  // ordered pairs of orthogonal unit vectors
    EXPECT_THROW(builtin_candidates(3, 10), std::invalid_argument);
}

TEST(Harness, CsvIsDeterministic) {
    const auto& rec = ternary_genus();
    auto L = QuadraticLattice::diagonal({1, 1, 16});
    auto a = local_global_experiment(L, rec, builtin_candidates(1, 80)).csv();
    auto cands = builtin_candidates(1, 80);
    std::reverse(cands.begin(), cands.end());
    auto b = local_global_experiment(L, rec, cands).csv();
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.substr(0, a.find('\n')),
              "candidate_id,disc,minimum,locally_representable,class_counts,all_classes_represented,good");
}

TEST(Harness, BinaryCandidates) {
    auto c = builtin_candidates(2, 40);
    for (const auto& f : c) {
        Int D = classical_discriminant(f);
        EXPECT_LT(D, 0);
        EXPECT_TRUE(is_squarefree(abs(D)));
        EXPECT_LE(abs(D), 40);
    }
    // one candidate per reduced form: h(-3) + h(-7) + ... for squarefree |D| <= 40, D = 1 mod 4
    std::uint64_t want = 0;
    for (long n = 3; n <= 40; ++n)
        if (is_squarefree(Int(n)) && mod_pos(-n, 4L) == 1) want += class_number(-n);
    EXPECT_EQ(c.size(), want);
    // every such form has an odd cross term, so none embeds in a lattice with even pairings
    auto rep = local_global_experiment(QuadraticLattice::standard(8), i8_genus(), c);
    EXPECT_TRUE(rep.rows.empty());
    EXPECT_EQ(rep.failed_local, c.size());
}

TEST(Harness, EmptyCandidateSetGivesEmptyTable) {
    const auto& rec = i8_genus();
    auto rep = local_global_experiment(QuadraticLattice::standard(8), rec, {});
    EXPECT_TRUE(rep.rows.empty());
    EXPECT_TRUE(asymptotic_ratio_report(rep, rec).empty());
}

TEST(Harness, IncompleteRecordRejected) {
    GenusOptions opt;
    opt.node_budget = 20;
    auto rec = enumerate_genus(QuadraticLattice::standard(6), opt);
    ASSERT_FALSE(rec.complete);
    EXPECT_THROW(local_global_experiment(QuadraticLattice::standard(6), rec, builtin_candidates(1, 10)), std::invalid_argument);
    EXPECT_THROW(hsia_check(QuadraticLattice::diagonal({1}), rec), std::invalid_argument);
}
