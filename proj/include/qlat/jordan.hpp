#pragma once

#include <vector>

#include <gmpxx.h>

#include "qlat/lattice.hpp"

namespace qlat {

// One constituent (L_j, p^nu_j Q_j) of the p-adic splitting. unit_gram is
// the bilinear Gram of the unimodular quadratic block Q_j: dimension 1
// stores [2u] with u a p-adic unit, dimension 2 (p = 2 only) stores an
// even-diagonal matrix with odd off-diagonal entry. Entries are
// representatives mod p^precision.
struct JordanBlock {
    int nu = 0;
    int dim = 1;
    mpz_class g00, g01, g11;    // g01/g11 unused when dim == 1

    mpz_class quad_unit(const std::vector<mpz_class>& v) const;  // Q_j(v), exact
};

class JordanSplitting {
public:
    i64 prime = 0;
    int precision = 0;
    std::vector<JordanBlock> blocks;
    // columns = Jordan basis in the original coordinates, mod p^precision
    std::vector<std::vector<mpz_class>> transform;

    int rank() const;
    int s0() const;                       // #blocks with nu == 0
    int s1() const;
    int dim_of_scale(int nu) const;       // total dimension of the nu-part

    // Gram of blockdiag(p^{nu_j} U_j); equivalent to the input mod p^precision.
    std::vector<std::vector<mpz_class>> assembled_gram() const;
    // Entries reduced mod p^k into an i64 matrix (for residue counting).
    IMat assembled_gram_mod(int k) const;

    // The auxiliary splitting with nu' = 1 - nu. Requires all nu <= 1.
    JordanSplitting dual_form() const;

    // Inverse of the basis transform mod p (for solution-type classification).
    std::vector<std::vector<i64>> transform_inverse_mod_p() const;
};

JordanSplitting jordan_decompose(const IntegralLattice& lat, i64 p, int precision = 24);

// True iff all Jordan valuations are <= 1 and the p-part of the
// discriminant group has no nonzero isotropic element (exhaustive search,
// refused above p_part_cap elements).
bool is_maximal_at(const IntegralLattice& lat, i64 p, i64 p_part_cap = 1000000);
bool is_maximal_everywhere(const IntegralLattice& lat, i64 p_part_cap = 1000000);

} // namespace qlat
