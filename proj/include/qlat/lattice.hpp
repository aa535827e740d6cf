#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <gmpxx.h>

#include "qlat/arith.hpp"

namespace qlat {

using IMat = Eigen::Matrix<i64, Eigen::Dynamic, Eigen::Dynamic>;
using IVec = Eigen::Matrix<i64, Eigen::Dynamic, 1>;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Even integral lattice given by the Gram matrix of the bilinear form,
// gram(i,j) = (e_i.e_j). The quadratic form is Q(v) = v^T gram v / 2, so
// "even" is exactly "even diagonal".
class IntegralLattice {
public:
    IntegralLattice(IMat gram);

    int rank() const { return r_; }
    const IMat& gram() const { return gram_; }
    std::pair<int, int> signature() const { return sig_; }
    int b() const { return sig_.first; }            // positive index
    bool is_positive_definite() const { return sig_.second == 0; }
    bool is_gspin_signature() const { return sig_.second == 2 && sig_.first >= 3; }

    mpz_class det() const { return det_; }          // det(gram), nonzero
    mpz_class disc_abs() const { return abs(det_); }  // |L^v/L|

    // Q and the bilinear pairing on integer vectors (exact).
    mpz_class quad(const IVec& v) const;
    mpz_class pair(const IVec& v, const IVec& w) const;
    // Same over the reals.
    double quad(const RVec& v) const;
    double pair(const RVec& v, const RVec& w) const;

    RMat gram_real() const;

    IntegralLattice direct_sum(const IntegralLattice& other) const;
    IntegralLattice rescale(i64 c) const;           // Q -> cQ

    // Sublattice spanned by the columns of basis (r x r, det != 0).
    IntegralLattice sublattice(const IMat& basis) const;

private:
    int r_;
    IMat gram_;
    std::pair<int, int> sig_;
    mpz_class det_;
};

// Standard building blocks.
IntegralLattice hyperbolic_plane();                 // U, Gram [[0,1],[1,0]]
IntegralLattice scaled_line(i64 q);                 // <q>: Q(x) = q x^2, Gram [2q]
IntegralLattice unit_cube(int n);                   // Q = sum x_i^2, Gram 2I

struct DiscriminantGroup {
    std::vector<mpz_class> elementary_divisors;     // d_1 | d_2 | ..., all > 1
    // one rational generator per divisor, coordinates w.r.t. the lattice basis
    std::vector<std::vector<mpq_class>> representatives;
    std::vector<mpq_class> q_values;                // Q mod Z, in [0,1)
    mpz_class order;                                // |L^v/L|

    bool trivial() const { return elementary_divisors.empty(); }
};

DiscriminantGroup discriminant_group(const IntegralLattice& lat);

// Exact determinant of an integer matrix (fraction-free Gaussian elimination).
mpz_class integer_determinant(const IMat& m);

// Smith normal form of an integer matrix: returns (U, D, V) with U*A*V = D
// diagonal, d_1 | d_2 | ..., U and V unimodular.
struct SmithForm {
    std::vector<std::vector<mpz_class>> U, V;
    std::vector<mpz_class> diag;
};
SmithForm smith_normal_form(const IMat& a);

// Column-style Hermite normal form of an r x c integer matrix (c >= r,
// full row rank): returns an r x r basis of the column span, lower
// triangular with positive diagonal.
std::vector<std::vector<mpz_class>> column_hnf(
    const std::vector<std::vector<mpz_class>>& cols, int rows);

} // namespace qlat
