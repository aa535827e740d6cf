#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "common.hpp"
#include "qlat/errors.hpp"

#include <cmath>

using namespace qlat;
using qtest::l5;
using qtest::quad_diag;

TEST_CASE("enumeration equals box brute force on L5") {
    auto lat = l5();
    auto pt = qtest::l5_point(lat);
    MajorantForm maj(lat, pt);
    for (i64 m : {1, 2, 3, 5, 8, 12}) {
        for (double T : {0.5, 1.0, 2.0}) {
            double c = double(m) * (1 + 2 * T);
            i64 box = static_cast<i64>(std::floor(std::sqrt(2 * c / maj.min_eigenvalue()))) + 1;
            auto oracle = qtest::box_representations(lat, pt, m, T, box);
            auto got = enumerate_representations(lat, pt, m, T);
            REQUIRE(got.size() == oracle.size());
            for (size_t i = 0; i < got.size(); ++i) CHECK(got[i] == oracle[i]);
        }
    }
}

TEST_CASE("negative and unrepresented m give the empty list") {
    auto lat = l5();
    auto pt = qtest::l5_point(lat);
    CHECK(enumerate_representations(lat, pt, -5, 1.0).empty());
}

TEST_CASE("L5 m=1 contains the e+f vector of the first plane") {
    auto lat = l5();
    auto pt = qtest::l5_point(lat);
    auto reps = enumerate_representations(lat, pt, 1, 50.0);
    IVec target(5);
    target << 1, 1, 0, 0, 0;
    bool found = false, found_neg = false;
    for (const auto& v : reps) {
        if (v == target) found = true;
        if (v == IVec(-target)) found_neg = true;
    }
    CHECK(found);
    CHECK(found_neg);
}

TEST_CASE("count is monotone in T") {
    auto lat = l5();
    auto pt = qtest::l5_point(lat);
    size_t prev = 0;
    for (double T : {0.25, 1.0, 3.0, 6.0}) {
        size_t n = enumerate_representations(lat, pt, 6, T).size();
        CHECK(n >= prev);
        prev = n;
    }
}

TEST_CASE("budget errors surface with an estimate") {
    auto lat = l5();
    auto pt = qtest::l5_point(lat);
    CHECK_THROWS_AS(enumerate_representations(lat, pt, 10000, 3.0, /*budget=*/100),
                    budget_error);
}

TEST_CASE("successive minima: quadratic diag(1,4)") {
    auto m = successive_minima(quad_diag({1, 4}));
    REQUIRE(m.mu.size() == 2);
    CHECK(m.mu[0] == doctest::Approx(1.0));
    CHECK(m.mu[1] == doctest::Approx(2.0));
    CHECK(m.a[0] == doctest::Approx(1.0));
    CHECK(m.a[1] == doctest::Approx(1.0));
    CHECK(m.a[2] == doctest::Approx(2.0));
    CHECK(m.mu_sq[0] == 1);
    CHECK(m.mu_sq[1] == 4);
}

TEST_CASE("successive minima: unit cube has all minima 1") {
    auto m = successive_minima(unit_cube(5));
    for (double mu : m.mu) CHECK(mu == doctest::Approx(1.0));
}

TEST_CASE("successive minima: sorted and Minkowski-bounded") {
    // random-ish positive definite 4-dim lattices
    std::vector<IntegralLattice> fam;
    {
        IMat g(4, 4);
        g << 4, 1, 0, 1,
             1, 6, 2, 0,
             0, 2, 8, 1,
             1, 0, 1, 10;
        fam.emplace_back(g);
        IMat h(4, 4);
        h << 2, 1, 1, 0,
             1, 4, 0, 1,
             1, 0, 6, 2,
             0, 1, 2, 12;
        fam.emplace_back(h);
    }
    for (const auto& lat : fam) {
        auto m = successive_minima(lat);
        for (size_t i = 0; i + 1 < m.mu.size(); ++i) CHECK(m.mu[i] <= m.mu[i + 1] + 1e-12);
        // Minkowski's second theorem: 2^r/r! <= V_r prod(mu_i)/covol <= 2^r
        int r = lat.rank();
        double vr = std::pow(M_PI, r / 2.0) / std::tgamma(r / 2.0 + 1.0);
        double covol = std::sqrt(lat.gram_real().determinant() / std::pow(2.0, r));
        double ratio = vr * m.a[static_cast<size_t>(r)] / covol;
        double rfact = std::tgamma(r + 1.0);
        CHECK(ratio <= std::pow(2.0, r) * (1 + 1e-9));
        CHECK(ratio >= std::pow(2.0, r) / rfact * (1 - 1e-9));
    }
}

TEST_CASE("minima need positive definite input") {
    CHECK_THROWS_AS(successive_minima(l5()), domain_error);
}

TEST_CASE("visit_short_vectors counts match direct box counts") {
    auto lat = unit_cube(3);
    // #{v : sum v_i^2 <= 9}: direct box count
    i64 expect = 0;
    for (i64 a = -3; a <= 3; ++a)
        for (i64 b = -3; b <= 3; ++b)
            for (i64 c = -3; c <= 3; ++c)
                if (a * a + b * b + c * c <= 9) ++expect;
    i64 got = 0;
    visit_short_vectors(lat, 9, 1 << 20, false, [&](int, const i64*, i64) { ++got; });
    CHECK(got == expect);
}
