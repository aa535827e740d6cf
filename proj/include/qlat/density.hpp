#pragma once

#include <optional>
#include <vector>

#include <gmpxx.h>

#include "qlat/jordan.hpp"
#include "qlat/lattice.hpp"

namespace qlat {

inline constexpr u64 DEFAULT_COUNT_BUDGET = 1000000000ULL;

// w_p(m): the level where mu_p(m, n) stabilizes.
int stabilization_level(i64 p, i64 m);

// Exact |{v in (Z/p^n)^r : Q(v) = m mod p^n}|. Orthogonal Z-components of
// the Gram matrix are counted independently (exhaustively) and combined by
// residue convolution; the budget bounds the per-component tuple count
// plus convolution work.
mpz_class count_brute(const IntegralLattice& lat, i64 p, int n, i64 m,
                      u64 budget = DEFAULT_COUNT_BUDGET, bool parallel = true);

// Reference path: one exhaustive sweep over all p^{nr} tuples.
mpz_class count_brute_full(const IntegralLattice& lat, i64 p, int n, i64 m,
                           u64 budget = DEFAULT_COUNT_BUDGET, bool parallel = false);

// Histogram over all residues c of #{v : Q(v) = c mod p^n} (component path).
std::vector<u64> count_histogram(const IntegralLattice& lat, i64 p, int n,
                                 u64 budget = DEFAULT_COUNT_BUDGET,
                                 bool parallel = true);

struct TypeCounts {
    u64 good = 0, bad = 0, zero = 0;
    u64 total() const { return good + bad + zero; }
};

// Exhaustive classification of the solutions mod p^n by Hanke type
// (requires n >= 1 and the Jordan splitting at p).
TypeCounts classify_solutions(const IntegralLattice& lat, i64 p, int n, i64 m,
                              u64 budget = DEFAULT_COUNT_BUDGET,
                              bool parallel = true);

struct DensityValue {
    i64 p = 0;
    i64 m = 0;
    int n = 0;
    mpq_class value;
    bool has_parts = false;
    mpq_class good, bad, zero;
};

// mu_p(m, n) = p^{-n(r-1)} N_m(p^n), exact. Uses the good/bad/zero
// recursion whenever every Jordan valuation at p is <= 1 (in particular for
// maximal lattices); otherwise falls back to brute-force counting.
DensityValue mu_p(const IntegralLattice& lat, i64 p, i64 m, int n,
                  bool want_parts = false, u64 budget = DEFAULT_COUNT_BUDGET);

// Same, computed directly on a Jordan splitting (all nu <= 1).
mpq_class mu_p_recursive(const JordanSplitting& js, i64 m, int n,
                         mpq_class* good_out = nullptr,
                         mpq_class* bad_out = nullptr,
                         mpq_class* zero_out = nullptr);

struct LocalLimit {
    i64 p = 0;
    i64 m = 0;
    int w = 0;
    mpq_class value;
};

// Stabilized local density mu_p(Q, m) = mu_p(m, w_p(m)).
LocalLimit mu_p_limit(const IntegralLattice& lat, i64 p, i64 m,
                      u64 budget = DEFAULT_COUNT_BUDGET);

// |w_p - sum_{n < w_p} mu_p(m,n) / mu_p(m,w_p)|, exact. Requires m
// representable by Q over Z (certified by a small search).
mpq_class check_count_identity(const IntegralLattice& lat, i64 p, i64 m);

// Small-support representability search used as the precondition check.
bool representable_in_search(const IntegralLattice& lat, i64 m, int box = 4);

struct SingularSeries {
    double value = 0;
    double error_bound = 0;     // relative tail bound
    std::vector<std::pair<i64, mpq_class>> factors;   // ascending p
};

// prod_{p <= P_trunc} mu_p(Q, m) with a documented p^{-3/2} tail estimate.
SingularSeries singular_series(const IntegralLattice& lat, i64 m, i64 P_trunc,
                               double tail_constant = 4.0,
                               u64 budget = DEFAULT_COUNT_BUDGET);

} // namespace qlat
