#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "common.hpp"
#include "qlat/errors.hpp"
#include "qlat/jordan.hpp"

using namespace qlat;
using qtest::l5;
using qtest::u6;
using qtest::quad_diag;

namespace {

// Z_p-equivalence witness: T^t G T = assembled block Gram mod p^prec, with
// T invertible mod p.
void check_witness(const IntegralLattice& lat, const JordanSplitting& js) {
    const int r = lat.rank();
    mpz_class mod = zpow(js.prime, js.precision);
    auto asm_gram = js.assembled_gram();
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            mpz_class s = 0;
            for (int k = 0; k < r; ++k)
                for (int l = 0; l < r; ++l)
                    s += js.transform[static_cast<size_t>(k)][static_cast<size_t>(i)]
                         * mpz_class(lat.gram()(k, l))
                         * js.transform[static_cast<size_t>(l)][static_cast<size_t>(j)];
            mpz_class diff = s - asm_gram[static_cast<size_t>(i)][static_cast<size_t>(j)];
            CHECK(mpz_divisible_p(diff.get_mpz_t(), mod.get_mpz_t()));
        }
    CHECK_NOTHROW(js.transform_inverse_mod_p());
}

} // namespace

TEST_CASE("already-diagonal form at p = 3") {
    // quadratic diag (1, 3, 9): valuations 0,1,2 with unit blocks (1)
    auto lat = quad_diag({1, 3, 9});
    auto js = jordan_decompose(lat, 3);
    REQUIRE(js.blocks.size() == 3);
    CHECK(js.blocks[0].nu == 0);
    CHECK(js.blocks[1].nu == 1);
    CHECK(js.blocks[2].nu == 2);
    for (const auto& b : js.blocks) {
        CHECK(b.dim == 1);
        CHECK(b.g00 % 3 != 0);   // unit
    }
    check_witness(lat, js);
}

TEST_CASE("U at p = 2 is one 2-dimensional unimodular block") {
    auto lat = hyperbolic_plane();
    auto js = jordan_decompose(lat, 2);
    REQUIRE(js.blocks.size() == 1);
    CHECK(js.blocks[0].dim == 2);
    CHECK(js.blocks[0].nu == 0);
    CHECK(js.blocks[0].g01 % 2 != 0);
    check_witness(lat, js);
}

TEST_CASE("L5 at p = 3: five valuation-0 blocks (det is a 3-adic unit)") {
    auto lat = l5();
    auto js = jordan_decompose(lat, 3);
    REQUIRE(js.blocks.size() == 5);
    for (const auto& b : js.blocks) CHECK(b.nu == 0);
    check_witness(lat, js);
}

TEST_CASE("L5 at p = 2: all scales zero, <2> gives a 1-dim unit block") {
    auto lat = l5();
    auto js = jordan_decompose(lat, 2);
    int dim1 = 0, dim2 = 0;
    for (const auto& b : js.blocks) {
        CHECK(b.nu == 0);
        if (b.dim == 1) ++dim1;
        else ++dim2;
    }
    CHECK(dim1 == 1);
    CHECK(dim2 == 2);
    check_witness(lat, js);
}

TEST_CASE("witness holds on a family of lattices and primes") {
    std::vector<IntegralLattice> fam = {l5(), u6(), unit_cube(4),
                                        quad_diag({1, 2, 4, 8}), quad_diag({3, 5, 7})};
    for (const auto& lat : fam)
        for (i64 p : {2, 3, 5, 7}) {
            auto js = jordan_decompose(lat, p);
            CHECK(js.rank() == lat.rank());
            check_witness(lat, js);
            if (p != 2)
                for (const auto& b : js.blocks) CHECK(b.dim == 1);
            // scales ascend
            for (size_t i = 0; i + 1 < js.blocks.size(); ++i)
                CHECK(js.blocks[i].nu <= js.blocks[i + 1].nu);
        }
}

TEST_CASE("dual form flips scales") {
    auto js = jordan_decompose(l5(), 2);
    auto dual = js.dual_form();
    CHECK(dual.dim_of_scale(1) == 5);
    CHECK(dual.dim_of_scale(0) == 0);
}

TEST_CASE("insufficient precision raises") {
    auto lat = unit_cube(3).rescale(81);   // Q = 81 sum x_i^2
    CHECK_THROWS_AS(jordan_decompose(lat, 3, 3), precision_error);
}

TEST_CASE("maximality") {
    CHECK(is_maximal_at(l5(), 2));
    CHECK(is_maximal_at(l5(), 3));
    CHECK(is_maximal_at(u6(), 2));        // unimodular: trivial p-part
    CHECK(is_maximal_at(u6(), 5));

    // diag quadratic (1,-1) + U + U: dual vector (e1+e2)/2 is isotropic
    auto bad = quad_diag({1, -1}).direct_sum(hyperbolic_plane()).direct_sum(hyperbolic_plane());
    CHECK(!is_maximal_at(bad, 2));

    // scaled cube has valuations 2 at p = 2
    CHECK(!is_maximal_at(unit_cube(5).rescale(4), 2));

    CHECK(is_maximal_everywhere(l5()));
    CHECK(!is_maximal_everywhere(bad));
}
