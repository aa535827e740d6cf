#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "common.hpp"
#include "qlat/chain.hpp"
#include "qlat/errors.hpp"
#include "qlat/io.hpp"

#include <cmath>

using namespace qlat;

namespace {

ChainModel zero_model(i64 p = 5, int prec = 24) {
    return ChainModel(unit_cube(5), p, 1, 1, prec, 1, {});
}

ChainModel rank3_model() {
    std::vector<std::vector<mpz_class>> gens = {
        {1, 0, 0, 9724635, 13577263},
        {0, 1, 0, 5036141, 11938843},
        {0, 0, 1, 14221845, 7450581}};
    return ChainModel(unit_cube(5), 2, 1, 1, 24, 1, gens);
}

} // namespace

TEST_CASE("construction validates") {
    CHECK_THROWS_AS(ChainModel(unit_cube(3), 4, 1, 1, 8, 1, {}), input_error);
    CHECK_THROWS_AS(ChainModel(qtest::l5(), 5, 1, 1, 8, 1, {}), input_error);
    // non-saturated generators (both divisible by p)
    std::vector<std::vector<mpz_class>> gens = {{5, 10, 0}, {0, 5, 5}};
    CHECK_THROWS_AS(ChainModel(unit_cube(3), 5, 1, 1, 8, 1, gens), input_error);
}

TEST_CASE("scaled chain: Lambda = 0") {
    auto model = zero_model();
    // L_3 = 25 Z^5 (k = 2)
    auto lvl = chain_lattice(model, 3);
    CHECK(lvl.k == 2);
    CHECK(lvl.index == zpow(5, 10));
    IVec e = IVec::Zero(5);
    e[0] = 1;
    CHECK(lvl.lat.quad(lvl.basis.col(0).eval()) == 0 + 625);  // Q(25 e_i) = 625
    // minima all equal p^k
    auto prof = minima_profile(model, 3);
    for (double mu : prof.minima.mu) CHECK(mu == doctest::Approx(25.0));
}

TEST_CASE("full Lambda keeps the base lattice") {
    std::vector<std::vector<mpz_class>> gens = {
        {1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {0, 0, 1, 0, 0},
        {0, 0, 0, 1, 0}, {0, 0, 0, 0, 1}};
    ChainModel model(unit_cube(5), 3, 1, 1, 12, 1, gens);
    for (int n : {1, 3, 6}) {
        auto lvl = chain_lattice(model, n);
        CHECK(lvl.index == 1);
    }
}

TEST_CASE("generic rank-3 chain: index law and the HNF membership oracle") {
    auto model = rank3_model();
    for (int n = 2; n <= 8; ++n) {
        auto lvl = chain_lattice(model, n);
        int k = lvl.k;
        CHECK(lvl.index == zpow(2, k * 2));   // r' - rank = 5 - 3 = 2
        // membership oracle: every basis column reduces into Lambda mod p^k
        // (solve over F_p^k by column reduction against the generators)
        mpz_class pk = zpow(2, k);
        for (int c = 0; c < 5; ++c) {
            // v mod p^k must lie in the span of the generators mod p^k:
            // brute-force over the 2^{3} small combinations is wrong; instead
            // solve the linear system with Hermite reduction over Z/p^k via
            // exhaustive elimination on the 3 generators
            std::vector<mpz_class> v(5);
            for (int i = 0; i < 5; ++i) {
                v[static_cast<size_t>(i)] = mpz_class(lvl.basis(i, c)) % pk;
                if (v[static_cast<size_t>(i)] < 0) v[static_cast<size_t>(i)] += pk;
            }
            // gaussian elimination mod 2^k on [gens | v]
            std::vector<std::vector<mpz_class>> rows;
            for (const auto& g0 : model.lambda_gens) {
                std::vector<mpz_class> row(5);
                for (int i = 0; i < 5; ++i) {
                    row[static_cast<size_t>(i)] = g0[static_cast<size_t>(i)] % pk;
                    if (row[static_cast<size_t>(i)] < 0) row[static_cast<size_t>(i)] += pk;
                }
                rows.push_back(row);
            }
            // the first three coordinates of the generators form the identity,
            // so membership means: v - sum v_i g_i = 0 mod p^k
            std::vector<mpz_class> rem = v;
            for (int i = 0; i < 3; ++i) {
                mpz_class coeff = rem[static_cast<size_t>(i)];
                for (int j = 0; j < 5; ++j) {
                    rem[static_cast<size_t>(j)] =
                        (rem[static_cast<size_t>(j)] - coeff * rows[static_cast<size_t>(i)][static_cast<size_t>(j)]) % pk;
                    if (rem[static_cast<size_t>(j)] < 0) rem[static_cast<size_t>(j)] += pk;
                }
            }
            for (int j = 0; j < 5; ++j)
                CHECK(rem[static_cast<size_t>(j)] == 0);
        }
    }
}

TEST_CASE("nesting: L_{n+1} inside L_n") {
    auto model = rank3_model();
    for (int n = 1; n <= 6; ++n) {
        auto a = chain_lattice(model, n);
        auto b = chain_lattice(model, n + 1);
        // solve a.basis x = b.basis col over the rationals; must be integral
        Eigen::PartialPivLU<RMat> lu(a.basis.cast<double>());
        for (int c = 0; c < 5; ++c) {
            RVec x = lu.solve(b.basis.col(c).cast<double>());
            for (int i = 0; i < 5; ++i)
                CHECK(std::abs(x[i] - std::round(x[i])) < 1e-9);
        }
    }
}

TEST_CASE("precision exhaustion raises") {
    auto model = zero_model(5, 4);
    CHECK_THROWS_AS(chain_lattice(model, 6), precision_error);
}

TEST_CASE("local intersection: the scaled-cube values") {
    auto model = zero_model();
    // m = 1: only n = 1 contributes, vectors +-e_i
    CHECK(local_intersection(model, 1) == mpq_class(10));
    // m = 25: r_5(25) at n = 1 plus 10 at n = 2
    u64 r5 = 0;
    visit_short_vectors(unit_cube(5), 25, 1 << 20, false,
                        [&](int, const i64*, i64 q) { if (q == 25) ++r5; });
    CHECK(local_intersection(model, 25) == mpq_class(mpz_class(r5 + 10)));
    // m not represented: 7 = sum of five squares? yes; use m = 0 edge instead
    CHECK_THROWS_AS(local_intersection(model, 0), domain_error);
    // aut weight divides
    ChainModel weighted(unit_cube(5), 5, 1, 1, 24, 4, {});
    CHECK(local_intersection(weighted, 1) == mpq_class(10, 4));
}

TEST_CASE("eventually-empty certificate under genericity") {
    auto model = rank3_model();
    // counts terminate and the certificate reports a level
    CHECK_NOTHROW(local_intersection(model, 3));
    int level = verify_generic(model, 1000);
    CHECK(level >= 1);
    CHECK(level <= model.precision);
}

TEST_CASE("summed counts over the square class") {
    auto model = zero_model();
    // S_{1,X}: squares in [X, 2X)
    mpz_class s = summed_counts(model, 1, 16, 1, 3);
    // n=1: #{v: Q in {16, 25}} ; n=2: Q(5v) in [16,32) means Q(v) = 1 -> 10
    u64 direct = 0;
    visit_short_vectors(unit_cube(5), 31, 1 << 20, false,
                        [&](int, const i64*, i64 q) {
        if (q == 16 || q == 25) ++direct;
    });
    CHECK(s == mpz_class(direct + 10));
    CHECK(summed_counts(zero_model(), 7, 3, 1, 2) == 0);   // empty square class
    CHECK_THROWS_AS(summed_counts(model, 1, 16, 2, 2), domain_error);
}

TEST_CASE("EK counting inequality across computed levels") {
    auto model = rank3_model();
    for (int n = 1; n <= 10; ++n) {
        auto prof = minima_profile(model, n);
        auto lvl = chain_lattice(model, n);
        for (i64 X : {16, 64, 256}) {
            u64 cnt = 0;
            visit_short_vectors(lvl.lat, X, 1 << 22, false,
                                [&](int, const i64*, i64 q) { if (q > 0) ++cnt; });
            double bound = 0;
            for (int i = 0; i <= 5; ++i)
                bound += std::pow(double(X), i / 2.0)
                         / prof.minima.a[static_cast<size_t>(i)];
            CHECK(double(cnt) <= 40.0 * bound);
        }
    }
}

TEST_CASE("minima scalings of the decaying chain") {
    auto model = rank3_model();
    for (int n : {4, 8, 12}) {
        auto prof = minima_profile(model, n);
        double pk = std::pow(2.0, model.depth_k(n));
        for (double mu : prof.minima.mu) CHECK(mu <= 2.0 * pk);
        // disc growth: a_5 ~ sqrt(disc) >= p^{2k} sqrt(disc base)
        CHECK(prof.minima.a[5] >= 0.3 * pk * pk);
    }
}

TEST_CASE("density-discriminant bound directions") {
    // scaling direction: rescaled forms gain slack
    auto lat = unit_cube(5);
    auto b1 = density_disc_bound(lat, 3, 1);
    auto b4 = density_disc_bound(lat.rescale(4), 3, 4);
    CHECK(b1.lhs / b1.rhs >= b4.lhs / b4.rhs);
    // trivially satisfied case: unit form, p not dividing 2m
    auto b = density_disc_bound(lat, 7, 1);
    CHECK(b.lhs <= b.rhs);
    CHECK_THROWS_AS(density_disc_bound(unit_cube(4), 3, 1), domain_error);
}

TEST_CASE("chain model file round trip") {
    auto model = load_chain_model(std::string(QLAT_FIXTURES) + "/chain_rank3.cm");
    CHECK(model.p == 2);
    CHECK(model.lambda_rank == 3);
    CHECK(model.rank() == 5);
    auto lvl = chain_lattice(model, 3);
    CHECK(lvl.index == zpow(2, 4));
}
