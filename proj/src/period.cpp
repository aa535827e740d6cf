#include "qlat/period.hpp"

#include "qlat/errors.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace qlat {

PeriodPoint::PeriodPoint(const IntegralLattice& lat, RVec u_raw, RVec w_raw,
                         double tolerance)
    : lat_(&lat), tol_(tolerance) {
    const int r = lat.rank();
    if (u_raw.size() != r || w_raw.size() != r)
        throw input_error("period point vectors have wrong dimension");

    double quu = lat.quad(u_raw);
    if (quu >= 0) throw input_error("period plane: Q(u) must be negative");
    u_ = u_raw / std::sqrt(-quu);

    // remove the u-component of w inside the plane
    double uw = lat.pair(u_, w_raw);          // (u.u) = -2
    RVec w0 = w_raw + 0.5 * uw * u_;
    double qww = lat.quad(w0);
    if (qww >= -tol_ * tol_)
        throw input_error("period plane span is not negative definite");
    w_ = w0 / std::sqrt(-qww);

    gu_ = lat.gram_real() * u_;
    gw_ = lat.gram_real() * w_;
}

std::pair<double, double> PeriodPoint::project(const RVec& lambda) const {
    double a = lambda.dot(gu_), b = lambda.dot(gw_);
    double qx = -0.25 * (a * a + b * b);
    return {qx, lat_->quad(lambda) - qx};
}

double PeriodPoint::q_x(const RVec& lambda) const {
    double a = lambda.dot(gu_), b = lambda.dot(gw_);
    return -0.25 * (a * a + b * b);
}

double PeriodPoint::q_x(const i64* v, int n) const {
    double a = 0, b = 0;
    for (int i = 0; i < n; ++i) {
        a += double(v[i]) * gu_[i];
        b += double(v[i]) * gw_[i];
    }
    return -0.25 * (a * a + b * b);
}

MajorantForm::MajorantForm(const IntegralLattice& lat, const PeriodPoint& pt) {
    RMat g = lat.gram_real();
    RVec gu = g * pt.u(), gw = g * pt.w();
    gram_ = g + gu * gu.transpose() + gw * gw.transpose();
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * gram_);
    min_eig_ = es.eigenvalues().minCoeff();
    if (min_eig_ <= 0)
        throw input_error("majorant form is not positive definite");
}

} // namespace qlat
