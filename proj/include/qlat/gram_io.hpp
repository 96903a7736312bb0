#ifndef QLAT_GRAM_IO_HPP
#define QLAT_GRAM_IO_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lattice.hpp"

namespace qlat {

/// Reads a Gram file: the dimension n, then n rows of B. Lines starting with '#'
/// (after optional whitespace) are comments.
inline IntMatrix read_gram_matrix(std::istream& in) {
    std::string line, body;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first != std::string::npos && line[first] == '#') continue;
        body += line;
        body += '\n';
    }
    std::istringstream ss(body);
    long long n;
    if (!(ss >> n) || n < 0) throw std::runtime_error("gram file: missing or invalid dimension");
    IntMatrix g(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i)
        for (long long j = 0; j < n; ++j) {
            long long v;
            if (!(ss >> v)) throw std::runtime_error("gram file: expected " + std::to_string(n * n) + " entries");
            g(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
        }
    std::string extra;
    if (ss >> extra) throw std::runtime_error("gram file: trailing data '" + extra + "'");
    return g;
}

inline QuadraticLattice read_gram(std::istream& in) { return QuadraticLattice(read_gram_matrix(in)); }

inline QuadraticLattice read_gram_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_gram(in);
}

inline void write_gram(std::ostream& out, const QuadraticLattice& L) {
    const std::size_t n = L.rank();
    out << n << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out << (j ? " " : "") << L.gram(i, j);
        out << '\n';
    }
}

inline std::string gram_string(const QuadraticLattice& L) {
    std::ostringstream os;
    write_gram(os, L);
    return os.str();
}

inline void write_gram_file(const std::string& path, const QuadraticLattice& L) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_gram(out, L);
}

}  // namespace qlat

#endif
