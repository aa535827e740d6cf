#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "common.hpp"
#include "qlat/density.hpp"
#include "qlat/eisenstein.hpp"
#include "qlat/errors.hpp"

#include <cmath>

using namespace qlat;
using qtest::l5;
using qtest::u6;

TEST_CASE("L-polynomial basics and the evaluation identity") {
    auto lat = l5();
    const int r = lat.rank();
    for (i64 p : {3, 5, 7}) {
        for (i64 m : {1, 2, 3, 9, 12, 45}) {
            auto L = lp_polynomial(lat, p, m);
            CHECK(L.w == stabilization_level(p, m));
            CHECK(static_cast<int>(L.coeffs.size()) == L.w + 1);
            CHECK(L.coeffs[0] == 1);
            // L(p^{1-r}) = N_m(p^w) p^{(1-r) w}, exactly
            mpq_class t0(1, zpow(p, r - 1));
            mpq_class lhs = L.eval(t0);
            auto muw = mu_p(lat, p, m, L.w);
            mpq_class rhs = muw.value * mpq_class(zpow(p, i64(L.w) * (r - 1)))
                            * mpq_class(1, zpow(p, static_cast<i64>(L.w) * (r - 1)));
            rhs.canonicalize();
            lhs.canonicalize();
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("degree-1 case: p odd, p not dividing m or det") {
    auto lat = l5();
    auto L = lp_polynomial(lat, 5, 2);   // w = 1
    REQUIRE(L.w == 1);
    // L(t) = 1 + (N_m(p) - p^{r-1}) t
    mpz_class n1 = count_brute(lat, 5, 1, 2);
    CHECK(L.coeffs[1] == n1 - zpow(5, 4));
}

TEST_CASE("L-polynomial counts pinned by the brute oracle") {
    auto lat = l5();
    auto L = lp_polynomial(lat, 3, 3);   // w_3(3) = 2
    REQUIRE(L.w == 2);
    mpz_class n1 = count_brute(lat, 3, 1, 3);
    mpz_class n2 = count_brute(lat, 3, 2, 3);
    CHECK(L.coeffs[1] == n1 - zpow(3, 4));
    CHECK(L.coeffs[2] == n2 - zpow(3, 4) * n1);
}

TEST_CASE("sigma discriminant and chi") {
    auto lat = l5();    // r = 5, det = 2
    auto dd = sigma_discriminant(lat, 1);
    CHECK(dd.d == -4);      // 2 * (-1)^3 * 1 * 2
    CHECK(dd.d0 == -4);
    CHECK(chi_d0(lat, 1, 3) == -1);
    CHECK(chi_d0(lat, 1, 5) == 1);
    CHECK(chi_d0(lat, 1, 2) == 0);   // p | d0

    // square d gives d0 = 1 and chi identically 1
    auto even = u6();   // r = 6, det = -1, d = (-1)^3 * (-1) = 1
    auto dd6 = sigma_discriminant(even, 1);
    CHECK(dd6.d == 1);
    CHECK(dd6.d0 == 1);
    CHECK(chi_d0(even, 1, 7) == 1);
}

namespace {

// independent evaluation of the sigma product straight from the displayed
// formula, recomputing counts by brute force
double sigma_direct(const IntegralLattice& lat, i64 D, i64 m) {
    const int r = lat.rank();
    auto dd = sigma_discriminant(lat, D);
    mpz_class supp = 2 * mpz_class(m) * lat.det();
    double value = 1;
    for (i64 p : primes_up_to(1000)) {
        if (!mpz_divisible_ui_p(supp.get_mpz_t(), static_cast<unsigned long>(p)))
            continue;
        int w = stabilization_level(p, m);
        std::vector<double> counts;
        for (int nn = 0; nn <= w; ++nn)
            counts.push_back(count_brute(lat, p, nn, m).get_d());
        double t = std::pow(double(p), 1.0 - r);
        double L = counts[static_cast<size_t>(w)] * std::pow(t, w);
        for (int nn = 0; nn < w; ++nn)
            L += (1.0 - std::pow(double(p), r - 1.0) * t) * counts[static_cast<size_t>(nn)]
                 * std::pow(t, nn);
        int chi = kronecker(dd.d0, mpz_class(p));
        double k = r / 2.0;
        if (r % 2 == 0) {
            value *= L / (1.0 - chi * std::pow(double(p), -k));
        } else {
            value *= (1.0 - chi * std::pow(double(p), 0.5 - k))
                     / (1.0 - std::pow(double(p), 1.0 - 2.0 * k)) * L;
        }
    }
    return value;
}

} // namespace

TEST_CASE("sigma_m against direct evaluation") {
    auto lat = l5();
    for (i64 m : {1, 4, 9, 16, 36}) {
        auto s = sigma_m(lat, 1, m);
        double direct = sigma_direct(lat, 1, m);
        CHECK(s.value_at_k == doctest::Approx(direct).epsilon(1e-9));
        CHECK(s.value_at_k > 0);
    }
    // m = 2: the support of 2 m det is the single prime 2
    auto s2 = sigma_m(lat, 2, 2);
    CHECK(s2.value_at_k == doctest::Approx(sigma_direct(lat, 2, 2)).epsilon(1e-9));
}

TEST_CASE("square-class precondition enforced for odd rank") {
    auto lat = l5();
    CHECK_THROWS_AS(sigma_m(lat, 1, 2), domain_error);
    CHECK_THROWS_AS(sigma_m(lat, 2, 4), domain_error);
    CHECK_NOTHROW(sigma_m(lat, 2, 8));    // 8/2 = 4 = 2^2
}

TEST_CASE("logderiv growth stays within the log log window") {
    auto lat = l5();
    double worst = 0;
    for (i64 j = 1; j <= 100; ++j) {
        i64 m = j * j;
        auto s = sigma_m(lat, 1, m);
        double denom = std::log(std::log(double(m) + 3.0));
        worst = std::max(worst, std::abs(s.logderiv_at_k) / denom);
    }
    CHECK(worst < 6.0);
}

TEST_CASE("a(m) and c(m)") {
    auto lat = l5();
    const double k = 2.5;
    for (i64 m : {1, 2, 5, 12}) {
        auto est = a_of_m(lat, m, 100);
        CHECK(est.a_value > 0);
        CHECK(est.c_value < 0);
        // the defining identity a(m) = -c(m) Gamma(k) sqrt|disc| / (2 (2pi)^k)
        double recon = -est.c_value * std::tgamma(k) * std::sqrt(2.0)
                       / (2.0 * std::pow(2 * M_PI, k));
        CHECK(est.a_value == doctest::Approx(recon).epsilon(1e-12));
    }
    // growth window: a(m)/m^{b/2} inside a fitted band
    double lo = 1e300, hi = 0;
    for (i64 m = 1; m <= 400; ++m) {
        auto est = a_of_m(lat, m, 500);
        double ratio = est.a_value / std::pow(double(m), 1.5);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    CHECK(lo > 0.25);
    CHECK(hi < 12.0);
}

TEST_CASE("doubling the truncation moves a(m) less than the reported bound") {
    auto lat = l5();
    for (i64 m : {1, 7, 45}) {
        auto c1 = a_of_m(lat, m, 100);
        auto c2 = a_of_m(lat, m, 200);
        CHECK(std::abs(c2.a_value - c1.a_value)
              <= c1.trunc_error * c1.a_value + 1e-12);
        CHECK(c2.trunc_error < c1.trunc_error);
    }
}

TEST_CASE("bprime ratio") {
    auto lat = l5();
    // kappa enters additively
    double r0 = bprime_ratio(lat, 1, 49, 0.0);
    double r1 = bprime_ratio(lat, 1, 49, 0.75);
    CHECK(r1 - r0 == doctest::Approx(0.75).epsilon(1e-12));
    // ratio / log m -> 1 along the square class
    double worst = 0;
    for (i64 j : {40, 80, 160, 300}) {
        i64 m = j * j;
        double ratio = bprime_ratio(lat, 1, m, 0.0);
        worst = std::max(worst, std::abs(ratio / std::log(double(m)) - 1.0));
    }
    CHECK(worst < 0.5);
    // |ratio - log m| / log log m bounded over the sweep
    double worst2 = 0;
    for (i64 j = 2; j <= 300; ++j) {
        i64 m = j * j;
        double ratio = bprime_ratio(lat, 1, m, 0.0);
        worst2 = std::max(worst2, std::abs(ratio - std::log(double(m)))
                                      / std::log(std::log(double(m))));
    }
    CHECK(worst2 < 12.0);
}
