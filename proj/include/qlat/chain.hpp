#pragma once

#include <string>
#include <vector>

#include <gmpxx.h>

#include "qlat/density.hpp"
#include "qlat/enumerate.hpp"
#include "qlat/lattice.hpp"

namespace qlat {

// Synthetic stand-in for the nested lattices L_n of special endomorphisms
// mod P^n: L_n = (Lambda + p^k base_p) cap base with k = ceil((n - n0)/e),
// Lambda a saturated Z_p-sublattice given by generators mod p^precision.
struct ChainModel {
    IntegralLattice base;                      // positive definite, rank r'
    i64 p = 0;
    int e = 1;
    int n0 = 1;
    int precision = 64;
    i64 aut = 1;
    int lambda_rank = 0;
    std::vector<std::vector<mpz_class>> lambda_gens;   // lambda_rank vectors of length r'

    ChainModel(IntegralLattice base_, i64 p_, int e_, int n0_, int precision_,
               i64 aut_, std::vector<std::vector<mpz_class>> gens);

    int rank() const { return base.rank(); }
    int depth_k(int n) const;                  // ceil((n - n0)/e)
};

struct ChainLevel {
    int n = 0;
    int k = 0;
    IMat basis;           // columns, coordinates in the base basis
    mpz_class index;      // [base : L_n]
    IntegralLattice lat = scaled_line(1);   // placeholder until filled
};

ChainLevel chain_lattice(const ChainModel& model, int n);

struct MinimaProfile {
    int n = 0;
    Minima minima;
};

MinimaProfile minima_profile(const ChainModel& model, int n,
                             u64 budget = u64(1) << 31);

// (1/aut) sum_n #{v in L_n : Q(v) = m}, summed until three consecutive
// levels carry no vector with Q <= m.
mpq_class local_intersection(const ChainModel& model, i64 m,
                             u64 budget = u64(1) << 31);

// sum_{n=a}^{b_level} #{v in L_n : Q(v) in S_{D,X}},
// S_{D,X} = {m : X <= m < 2X, m/D a perfect square}.
mpz_class summed_counts(const ChainModel& model, i64 D, i64 X, int a,
                        int b_level, u64 budget = u64(1) << 31);

// sum over all levels (to exhaustion) of #{v in L_n \ 0 : Q(v) < X}.
mpz_class total_short_count(const ChainModel& model, i64 X,
                            u64 budget = u64(1) << 31);

struct DensityDiscBound {
    double lhs = 0;   // mu_inf(Q,1) mu_p(Q,m)
    double rhs = 0;   // p^r / |Disc(Q)|^{3/20}
};

// Singular-integral times local-density bound; the density uses the
// recursion when valid, otherwise brute force at the largest level within
// budget.
DensityDiscBound density_disc_bound(const IntegralLattice& lat_posdef, i64 p,
                                    i64 m, u64 budget = DEFAULT_COUNT_BUDGET);

// Exact singular integral at m = 1 of a positive definite form.
double mu_infinity_posdef(const IntegralLattice& lat);

// Certifies that no nonzero integer vector of sup-norm <= H lies in Lambda
// at some level K <= precision (sound: membership at precision implies
// membership at K). Returns the certifying level, or throws.
int verify_generic(const ChainModel& model, i64 H = 1000000,
                   u64 budget = u64(1) << 31);

} // namespace qlat
