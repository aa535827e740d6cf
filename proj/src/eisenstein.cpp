#include "qlat/eisenstein.hpp"

#include "qlat/errors.hpp"
#include "qlat/jordan.hpp"

#include <algorithm>
#include <cmath>

namespace qlat {

mpq_class LpPolynomial::eval(const mpq_class& t) const {
    mpq_class acc = 0, tp = 1;
    for (const auto& c : coeffs) {
        acc += c * tp;
        tp *= t;
    }
    return acc;
}

mpq_class LpPolynomial::eval_derivative(const mpq_class& t) const {
    mpq_class acc = 0, tp = 1;
    for (size_t i = 1; i < coeffs.size(); ++i) {
        acc += mpq_class(i) * coeffs[i] * tp;
        tp *= t;
    }
    return acc;
}

LpPolynomial lp_polynomial(const IntegralLattice& lat, i64 p, i64 m) {
    if (m == 0) throw domain_error("L-polynomial needs m != 0");
    LpPolynomial out;
    out.p = p;
    out.m = m;
    out.w = stabilization_level(p, m);
    const int r = lat.rank();
    auto js = jordan_decompose(lat, p, std::max(24, out.w + 4));

    // exact counts N_m(p^n) from the density recursion
    std::vector<mpz_class> counts(static_cast<size_t>(out.w) + 1);
    for (int n = 0; n <= out.w; ++n) {
        mpq_class mu = mu_p_recursive(js, m, n);
        mpq_class scaled = mu * mpq_class(zpow(p, static_cast<i64>(n) * (r - 1)));
        scaled.canonicalize();
        if (scaled.get_den() != 1)
            throw error("internal: non-integral residue count");
        counts[static_cast<size_t>(n)] = scaled.get_num();
    }

    out.coeffs.assign(static_cast<size_t>(out.w) + 1, 0);
    mpz_class pr1 = zpow(p, r - 1);
    out.coeffs[0] = counts[0];   // = 1
    for (int n = 1; n <= out.w; ++n)
        out.coeffs[static_cast<size_t>(n)] =
            counts[static_cast<size_t>(n)] - pr1 * counts[static_cast<size_t>(n) - 1];
    return out;
}

DiscriminantData sigma_discriminant(const IntegralLattice& lat, i64 D) {
    const int r = lat.rank();
    DiscriminantData out;
    if (r % 2 == 0) {
        int sign = (r / 2) % 2 == 0 ? 1 : -1;
        out.d = sign * lat.det();
    } else {
        if (D <= 0) throw domain_error("D must be a positive integer");
        int sign = ((r + 1) / 2) % 2 == 0 ? 1 : -1;
        out.d = 2 * sign * D * lat.det();
    }
    out.d0 = fundamental_discriminant(out.d);
    return out;
}

int chi_d0(const IntegralLattice& lat, i64 D, i64 p) {
    auto dd = sigma_discriminant(lat, D);
    return kronecker(dd.d0, mpz_class(p));
}

namespace {

std::vector<i64> prime_support(const mpz_class& n) {
    std::vector<i64> out;
    mpz_class s = abs(n);
    for (i64 p = 2; s > 1; ++p) {
        if (p > 100000)
            throw unsupported_size_error("prime support has a factor above 10^5");
        if (!mpz_divisible_ui_p(s.get_mpz_t(), static_cast<unsigned long>(p))) continue;
        out.push_back(p);
        while (mpz_divisible_ui_p(s.get_mpz_t(), static_cast<unsigned long>(p))) s /= p;
    }
    return out;
}

} // namespace

SigmaData sigma_m(const IntegralLattice& lat, i64 D, i64 m) {
    if (m <= 0) throw domain_error("sigma_m needs m > 0");
    const int r = lat.rank();
    if (r % 2 == 1) {
        if (D <= 0 || m % D != 0 || !is_perfect_square(mpz_class(m / D)))
            throw domain_error("odd rank requires sqrt(m/D) integral");
    }
    auto dd = sigma_discriminant(lat, D);
    SigmaData out;
    out.m = m;
    out.d = dd.d;
    out.d0 = dd.d0;

    auto support = prime_support(2 * mpz_class(m) * lat.det());
    mpq_class value_exact = 1;
    double logderiv = 0;
    for (i64 p : support) {
        auto L = lp_polynomial(lat, p, m);
        int chi = kronecker(dd.d0, mpz_class(p));
        mpq_class t0(1, zpow(p, r - 1));     // p^{1-r}
        mpq_class Lval = L.eval(t0);
        mpq_class Lder = L.eval_derivative(t0);
        if (Lval <= 0)
            throw error("internal: nonpositive local L-value");

        // exact ratio p^{1-r} L'(p^{1-r}) / L(p^{1-r})
        mpq_class ratio = t0 * Lder / Lval;

        if (r % 2 == 0) {
            int k = 1 + (r - 2) / 2;          // k = 1 + b/2, integral here
            mpq_class denom = 1 - mpq_class(chi, zpow(p, k));
            denom.canonicalize();
            value_exact *= Lval / denom;
            mpq_class tail = mpq_class(chi) / (mpq_class(zpow(p, k)) - chi);
            logderiv -= (ratio.get_d() + tail.get_d()) * std::log(double(p));
        } else {
            // k = r/2 is half-integral; p^{1/2-k} = p^{(1-r)/2} and
            // p^{1-2k} = p^{1-r} stay rational
            mpq_class phalf(1, zpow(p, (r - 1) / 2));
            mpq_class pfull(1, zpow(p, r - 1));
            mpq_class num = 1 - mpq_class(chi) * phalf;
            mpq_class den = 1 - pfull;
            value_exact *= num / den * Lval;
            mpq_class t1 = mpq_class(chi) / (mpq_class(zpow(p, (r - 1) / 2)) - chi);
            mpq_class t2 = mpq_class(2) / (mpq_class(zpow(p, r - 1)) - 1);
            logderiv -= (ratio.get_d() - t1.get_d() + t2.get_d()) * std::log(double(p));
        }
    }
    value_exact.canonicalize();
    out.value_at_k = value_exact.get_d();
    out.logderiv_at_k = logderiv;
    return out;
}

CoefficientEstimate a_of_m(const IntegralLattice& lat, i64 m, i64 P_trunc,
                           u64 budget) {
    if (m <= 0) throw domain_error("a(m) needs m > 0");
    if (!lat.is_gspin_signature())
        throw domain_error("a(m) is defined for signature (b,2), b >= 3");
    const int b = lat.b();
    auto series = singular_series(lat, m, P_trunc, 4.0, budget);
    CoefficientEstimate out;
    out.m = m;
    out.P_trunc = P_trunc;
    out.a_value = std::pow(double(m), b / 2.0) * series.value;
    out.trunc_error = series.error_bound;
    double k = 1.0 + b / 2.0;
    double disc = lat.disc_abs().get_d();
    out.c_value = -out.a_value * 2.0 * std::pow(2.0 * M_PI, k)
                  / (std::tgamma(k) * std::sqrt(disc));
    return out;
}

double bprime_ratio(const IntegralLattice& lat, i64 D, i64 m, double kappa) {
    auto s = sigma_m(lat, D, m);
    return std::log(double(m)) + 2.0 * s.logderiv_at_k + kappa;
}

} // namespace qlat
