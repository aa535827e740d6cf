#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qlat/chain.hpp"
#include "qlat/io.hpp"
#include "qlat/lattice.hpp"
#include "qlat/period.hpp"

namespace qlat {

struct ExperimentConfig {
    std::string lattice_path;
    std::string point_path;
    std::vector<std::string> chain_paths;
    i64 D = 1;
    int jmin = 1;
    int jmax = 22;
    double kappa = 0.0;
    double cusp_constant = 1.0;    // stand-in scale for the cusp-form error term
    double h_omega = 1.0;          // stand-in for h_omega(Y)
    double aut_arch = 1.0;         // |Aut| weight of the simulated place
    i64 P_trunc = 200;
    u64 seed = 1;
    int threads = 0;               // 0 = library default
    int shellmax = 8;
    u64 budget = u64(1) << 31;

    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_map(const std::map<std::string, std::string>& kv);
    std::string canonical() const;
    void apply_threads() const;
};

struct HeightLedgerRow {
    i64 m = 0;
    double archimedean_sum = 0;    // Phi_m / aut_arch
    double finite_sum = 0;         // sum over places of intersections log p
    double height_estimate = 0;    // (-c(m)/2) h_omega + cusp term
    double residual = 0;
    double uncertainty = 0;
};

struct LedgerWindow {
    i64 X = 0;
    double arch_aggregate = 0;
    double finite_aggregate = 0;
    double arch_normalized = 0;    // / (X^{(b+1)/2} log X)
    double finite_normalized = 0;
};

struct LedgerResult {
    std::vector<HeightLedgerRow> rows;
    std::vector<LedgerWindow> windows;
};

// Per-m ledger over m = D j^2, j in [jmin, jmax], with dyadic aggregates.
// Writes CSV when out != nullptr.
LedgerResult run_ledger(const ExperimentConfig& config, std::ostream* out);

} // namespace qlat
