#include "qlat/io.hpp"

#include "qlat/arith.hpp"
#include "qlat/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qlat {

namespace {

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);
    return in;
}

} // namespace

IntegralLattice load_lattice(const std::string& path) {
    auto in = open_or_throw(path);
    int r = 0;
    if (!(in >> r) || r <= 0 || r > 64)
        throw input_error("bad rank in lattice file " + path);
    IMat g(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            long long v;
            if (!(in >> v))
                throw input_error("truncated Gram matrix in " + path);
            g(i, j) = v;
        }
    return IntegralLattice(g);
}

void save_lattice(const IntegralLattice& lat, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write file: " + path);
    out << lat.rank() << "\n";
    for (int i = 0; i < lat.rank(); ++i) {
        for (int j = 0; j < lat.rank(); ++j)
            out << lat.gram()(i, j) << (j + 1 == lat.rank() ? "" : " ");
        out << "\n";
    }
}

PeriodPoint load_period_point(const IntegralLattice& lat, const std::string& path,
                              double tolerance) {
    auto in = open_or_throw(path);
    const int r = lat.rank();
    RVec u(r), w(r);
    for (int i = 0; i < r; ++i)
        if (!(in >> u[i])) throw input_error("truncated u vector in " + path);
    for (int i = 0; i < r; ++i)
        if (!(in >> w[i])) throw input_error("truncated w vector in " + path);
    return PeriodPoint(lat, u, w, tolerance);
}

ChainModel load_chain_model(const std::string& path) {
    auto in = open_or_throw(path);
    int r = 0;
    if (!(in >> r) || r <= 0 || r > 64)
        throw input_error("bad rank in chain model " + path);
    IMat g(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            long long v;
            if (!(in >> v)) throw input_error("truncated Gram in " + path);
            g(i, j) = v;
        }
    long long p, aut;
    int e, n0, precision, lambda_rank;
    if (!(in >> p >> e >> n0 >> precision >> aut >> lambda_rank))
        throw input_error("truncated chain parameters in " + path);
    std::vector<std::vector<mpz_class>> gens;
    for (int i = 0; i < lambda_rank; ++i) {
        std::vector<mpz_class> row(static_cast<size_t>(r));
        for (int j = 0; j < r; ++j) {
            std::string tok;
            if (!(in >> tok)) throw input_error("truncated generator in " + path);
            row[static_cast<size_t>(j)] = mpz_class(tok);
        }
        gens.push_back(std::move(row));
    }
    return ChainModel(IntegralLattice(g), p, e, n0, precision, aut, std::move(gens));
}

std::map<std::string, std::string> load_config(const std::string& path) {
    auto in = open_or_throw(path);
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) out[key] = val;
    }
    return out;
}

std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

CsvWriter::CsvWriter(std::ostream& os, const std::string& config_string,
                     const std::vector<std::string>& columns)
    : os_(&os), width_(columns.size()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(config_string)));
    (*os_) << "# config " << buf << "\n";
    for (size_t i = 0; i < columns.size(); ++i)
        (*os_) << columns[i] << (i + 1 == columns.size() ? "" : ",");
    (*os_) << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_)
        throw error("internal: CSV row width mismatch");
    for (size_t i = 0; i < cells.size(); ++i)
        (*os_) << cells[i] << (i + 1 == cells.size() ? "" : ",");
    (*os_) << "\n";
}

} // namespace qlat
