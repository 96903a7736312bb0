// qlat command line: thin wrappers over the header library.
// Exit codes: 0 ok, 2 red flag, 1 usage or budget error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <qlat/qlat.hpp>

using namespace qlat;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRedFlag = 2;

void print_record(const GenusRecord& rec) {
    std::cout << "classes " << rec.size() << "\n";
    std::cout << "mass " << rec.mass << "\n";
    std::cout << "spinor_blocks " << rec.spinor_partition.size() << "\n";
    std::cout << "stability " << to_string(rec.stability) << "\n";
    std::cout << "index,aut,minimum,spinor_block\n";
    for (std::size_t i = 0; i < rec.size(); ++i)
        std::cout << i << ',' << rec.aut_orders[i] << ',' << rec.minima[i] << ',' << rec.spinor_block(i) << "\n";
}

int cmd_disc(const std::string& f) {
    std::cout << read_gram_file(f).discriminant() << "\n";
    return kOk;
}

int cmd_min(const std::string& f) {
    auto L = read_gram_file(f);
    if (!L.is_positive_definite()) {
        std::cerr << "min: lattice is not positive definite\n";
        return kUsage;
    }
    std::cout << minimum(L) << "\n";
    return kOk;
}

int cmd_genus(const std::string& f, const std::string& out) {
    GenusRecord rec = enumerate_genus(read_gram_file(f));
    if (!rec.complete) {
        std::cerr << "genus: incomplete: " << rec.note << "\n";
        return kUsage;
    }
    print_record(rec);
    if (!out.empty()) write_genus(rec, out);
    return kOk;
}

int cmd_spinor_genus(const std::string& dir) {
    GenusRecord rec = read_genus(dir);
    rec.spinor_partition = spinor_genus_partition(rec);
    for (std::size_t b = 0; b < rec.spinor_partition.size(); ++b) {
        std::cout << "block " << b << ":";
        for (auto c : rec.spinor_partition[b]) std::cout << ' ' << c;
        std::cout << "\n";
    }
    return kOk;
}

int cmd_local_rep(const std::string& src_file, const std::string& tgt_file, long p) {
    auto src = read_gram_file(src_file);
    auto tgt = read_gram_file(tgt_file);
    Tri r;
    if (p == 0) {
        auto suite = local_test_suite(src, tgt);
        std::cout << suite.summary() << "\n";
        r = suite.result;
    } else if (p < 0) {
        r = representable_at_infinity(src, tgt) ? Tri::Yes : Tri::No;
    } else {
        if (!is_prime(Int(p))) {
            std::cerr << "local-rep: " << p << " is not prime\n";
            return kUsage;
        }
        r = locally_representable(src, tgt, p);
    }
    std::cout << to_string(r) << "\n";
    return r == Tri::Inconclusive ? kUsage : kOk;
}

int cmd_represent(const std::string& src_file, const std::string& tgt_file, bool primitive) {
    auto src = read_gram_file(src_file);
    auto tgt = read_gram_file(tgt_file);
    std::cout << (primitive ? primitive_representation_count(src, tgt) : representation_count(src, tgt)) << "\n";
    return kOk;
}

int cmd_gauss(long dmax) {
    GaussReport rep = gauss_check(dmax);
    std::cout << "d,count,12h,pass\n";
    for (const auto& r : rep.rows) std::cout << r.d << ',' << r.count << ',' << r.twelve_h << ',' << (r.pass ? 1 : 0) << "\n";
    if (rep.d_one)
        std::cerr << "flag: d=1 has " << rep.d_one->count << " primitive points, 12h(-4) = " << rep.d_one->twelve_h
                  << " (excluded from the identity)\n";
    return rep.all_pass() ? kOk : kRedFlag;
}

int cmd_local_global(const std::string& f, std::size_t m, long bound, const std::vector<std::string>& cand_files,
                     const std::string& csv_out) {
    auto L = read_gram_file(f);
    GenusRecord rec = enumerate_genus(L);
    if (!rec.complete) {
        std::cerr << "local-global: genus incomplete: " << rec.note << "\n";
        return kUsage;
    }
    std::vector<QuadraticLattice> cands;
    if (!cand_files.empty()) {
        for (const auto& c : cand_files) cands.push_back(read_gram_file(c));
        for (const auto& c : cands)
            if (c.rank() != m) {
                std::cerr << "local-global: candidate rank differs from --m\n";
                return kUsage;
            }
    } else if (m <= 2) {
        cands = builtin_candidates(m, bound);
    } else {
        std::cerr << "local-global: m >= 3 needs --candidates\n";
        return kUsage;
    }
    ExperimentReport rep = local_global_experiment(L, rec, std::move(cands));
    if (csv_out.empty()) {
        rep.write_csv(std::cout);
    } else {
        std::ofstream os(csv_out);
        if (!os) {
            std::cerr << "cannot write " << csv_out << "\n";
            return kUsage;
        }
        rep.write_csv(os);
    }
    std::size_t budget_rows = 0;
    for (const auto& r : rep.rows) budget_rows += r.budget_exhausted;
    std::cerr << "rows " << rep.rows.size() << ", failed_local " << rep.failed_local << ", inconclusive "
              << rep.inconclusive.size() << ", exceptions " << rep.exceptions.size() << ", observed_threshold "
              << rep.threshold << ", budget_rows " << budget_rows << "\n";
    for (auto id : rep.red_flags) std::cerr << "RED FLAG: candidate " << id << " is represented by no class of the block\n";
    if (rep.has_red_flag()) return kRedFlag;
    return budget_rows ? kUsage : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qlat: integral quadratic lattices"};
    app.require_subcommand(1);

    std::string f1, f2, dir;
    long prime = 0;
    bool primitive = false;
    long dmax = 0, bound = 0;
    std::size_t m = 1;
    std::vector<std::string> cand_files;
    std::string csv_out;

    auto* disc = app.add_subcommand("disc", "determinant of the Gram matrix");
    disc->add_option("FILE", f1)->required()->check(CLI::ExistingFile);
    auto* mn = app.add_subcommand("min", "smallest nonzero value of Q");
    mn->add_option("FILE", f1)->required()->check(CLI::ExistingFile);
    auto* genus = app.add_subcommand("genus", "enumerate the classes in the genus");
    genus->add_option("FILE", f1)->required()->check(CLI::ExistingFile);
    genus->add_option("--out", dir, "write class_NNN.gram and genus.csv here");
    auto* spin = app.add_subcommand("spinor-genus", "spinor genus partition of a saved genus");
    spin->add_option("DIR", dir)->required()->check(CLI::ExistingDirectory);
    auto* lrep = app.add_subcommand("local-rep", "is SOURCE represented by TARGET locally");
    lrep->add_option("SOURCE", f1)->required()->check(CLI::ExistingFile);
    lrep->add_option("TARGET", f2)->required()->check(CLI::ExistingFile);
    lrep->add_option("-p", prime, "one place (prime, or -1 for the reals); default all relevant places");
    auto* rep = app.add_subcommand("represent", "number of representations of SOURCE by TARGET");
    rep->add_option("SOURCE", f1)->required()->check(CLI::ExistingFile);
    rep->add_option("TARGET", f2)->required()->check(CLI::ExistingFile);
    rep->add_flag("--primitive", primitive, "count primitive representations only");
    auto* gauss = app.add_subcommand("gauss-check", "primitive sums of three squares against 12 h(-4d)");
    gauss->add_option("--dmax", dmax)->required()->check(CLI::PositiveNumber);
    auto* lg = app.add_subcommand("local-global", "representation experiment over a genus");
    lg->add_option("FILE", f1)->required()->check(CLI::ExistingFile);
    lg->add_option("--m", m, "candidate rank")->required()->check(CLI::PositiveNumber);
    lg->add_option("--bound", bound, "d for m = 1, |disc| for m = 2")->required()->check(CLI::NonNegativeNumber);
    lg->add_option("--candidates", cand_files, "explicit candidate Gram files")->check(CLI::ExistingFile);
    lg->add_option("--csv", csv_out, "write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kOk : kUsage;
    }

    try {
        if (*disc) return cmd_disc(f1);
        if (*mn) return cmd_min(f1);
        if (*genus) return cmd_genus(f1, dir);
        if (*spin) return cmd_spinor_genus(dir);
        if (*lrep) return cmd_local_rep(f1, f2, prime);
        if (*rep) return cmd_represent(f1, f2, primitive);
        if (*gauss) return cmd_gauss(dmax);
        if (*lg) return cmd_local_global(f1, m, bound, cand_files, csv_out);
    } catch (const BudgetExhausted& e) {
        std::cerr << "budget exhausted: " << e.what() << " (raise QLAT_BUDGET)\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
