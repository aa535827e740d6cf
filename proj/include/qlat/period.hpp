#pragma once

#include "qlat/lattice.hpp"

namespace qlat {

// A negative-definite 2-plane in L_R spanned by u, w with Q(u) = Q(w) = -1
// and (u.w) = 0, stored to a stated tolerance.
class PeriodPoint {
public:
    // Raw spanning vectors are re-orthonormalized by Gram-Schmidt inside
    // the plane; rejects spans that are not negative definite.
    PeriodPoint(const IntegralLattice& lat, RVec u_raw, RVec w_raw,
                double tolerance = 1e-9);

    const RVec& u() const { return u_; }
    const RVec& w() const { return w_; }
    double tolerance() const { return tol_; }

    // Q(lambda_x) <= 0 and Q(lambda_{x perp}) >= 0 with
    // Q(lambda_x) + Q(lambda_perp) = Q(lambda).
    std::pair<double, double> project(const RVec& lambda) const;
    double q_x(const RVec& lambda) const;
    double q_x(const i64* v, int n) const;   // hot path for enumeration

private:
    const IntegralLattice* lat_;
    RVec u_, w_;
    RVec gu_, gw_;   // G u, G w: (lambda.u) = lambda . gu_
    double tol_;
};

// Positive definite majorant Q_x(v) = Q(v) - 2 Q(v_x). gram_real is the
// bilinear matrix, Q_x(v) = v^T gram_real v / 2.
class MajorantForm {
public:
    MajorantForm(const IntegralLattice& lat, const PeriodPoint& pt);
    const RMat& gram_real() const { return gram_; }
    double quad(const RVec& v) const { return 0.5 * v.dot(gram_ * v); }
    double min_eigenvalue() const { return min_eig_; }

private:
    RMat gram_;
    double min_eig_;
};

} // namespace qlat
