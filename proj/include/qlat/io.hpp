#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "qlat/chain.hpp"
#include "qlat/lattice.hpp"
#include "qlat/period.hpp"

namespace qlat {

// Lattice file: line 1 = r, then r rows of r integers (bilinear Gram).
IntegralLattice load_lattice(const std::string& path);
void save_lattice(const IntegralLattice& lat, const std::string& path);

// Period-point file: two lines of r reals (u then w); the constructor
// re-orthonormalizes and validates the span.
PeriodPoint load_period_point(const IntegralLattice& lat, const std::string& path,
                              double tolerance = 1e-9);

// Chain-model file: rank, Gram rows, then "p e n0 precision aut lambda_rank"
// and lambda_rank generator rows.
ChainModel load_chain_model(const std::string& path);

// key=value lines; '#' starts a comment.
std::map<std::string, std::string> load_config(const std::string& path);

// 12 significant digits, locale-free.
std::string format_real(double x);

// CSV sink: comment line with the config hash, then a header row.
class CsvWriter {
public:
    CsvWriter(std::ostream& os, const std::string& config_string,
              const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);

private:
    std::ostream* os_;
    size_t width_;
};

} // namespace qlat
