#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qlat/arith.hpp"
#include "qlat/errors.hpp"

using namespace qlat;

TEST_CASE("valuations and powers") {
    CHECK(valuation(i64(12), 2) == 2);
    CHECK(valuation(i64(12), 3) == 1);
    CHECK(valuation(i64(-8), 2) == 3);
    CHECK(valuation(i64(0), 5) == VAL_INFINITY);
    CHECK(valuation(mpz_class("1024"), 2) == 10);
    CHECK(ipow(3, 4) == 81);
    CHECK(zpow(2, 70) == mpz_class("1180591620717411303424"));
}

TEST_CASE("primes") {
    auto ps = primes_up_to(30);
    CHECK(ps == std::vector<i64>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
    CHECK(is_prime(97));
    CHECK(!is_prime(91));
}

TEST_CASE("kronecker symbol against Euler criterion") {
    // odd prime oracle: (a|p) = a^{(p-1)/2} mod p
    for (i64 p : {3, 5, 7, 11, 13, 37}) {
        for (i64 a = -20; a <= 20; ++a) {
            i64 reduced = ((a % p) + p) % p;
            i64 expected;
            if (reduced == 0) {
                expected = 0;
            } else {
                i64 e = (p - 1) / 2, b = reduced, r = 1;
                while (e) {
                    if (e & 1) r = r * b % p;
                    b = b * b % p;
                    e >>= 1;
                }
                expected = (r == 1) ? 1 : -1;
            }
            CHECK(kronecker(a, p) == expected);
        }
    }
    // (a|2) is nonzero exactly for odd a, +1 iff a = +-1 mod 8
    CHECK(kronecker(i64(3), i64(2)) == -1);
    CHECK(kronecker(i64(7), i64(2)) == 1);
    CHECK(kronecker(i64(4), i64(2)) == 0);
}

TEST_CASE("fundamental discriminants") {
    CHECK(fundamental_discriminant(mpz_class(-4)) == -4);
    CHECK(fundamental_discriminant(mpz_class(5)) == 5);
    CHECK(fundamental_discriminant(mpz_class(8)) == 8);
    CHECK(fundamental_discriminant(mpz_class(12)) == 12);
    CHECK(fundamental_discriminant(mpz_class(18)) == 8);   // 18 = 9*2
    CHECK(fundamental_discriminant(mpz_class(-3)) == -3);
    CHECK(fundamental_discriminant(mpz_class(-18)) == -8);
    CHECK(fundamental_discriminant(mpz_class(16)) == 1);   // square
    CHECK(fundamental_discriminant(mpz_class(49)) == 1);
}

TEST_CASE("square part") {
    CHECK(square_part(mpz_class(72)) == 6);    // 72 = 36*2
    CHECK(square_part(mpz_class(7)) == 1);
    CHECK(square_part(mpz_class(49)) == 7);
    CHECK(is_perfect_square(mpz_class(144)));
    CHECK(!is_perfect_square(mpz_class(145)));
}

TEST_CASE("counter rng is a pure function of (seed, counter)") {
    CounterRng a(42), b(42), c(43);
    CHECK(a.bits(17) == b.bits(17));
    CHECK(a.bits(17) != c.bits(17));
    double x = a.uniform(5);
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    double sum = 0;
    for (u64 i = 0; i < 10000; ++i) sum += a.uniform(i);
    CHECK(sum / 10000 == doctest::Approx(0.5).epsilon(0.02));
}
