#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace qlat {

using i64 = std::int64_t;
using u64 = std::uint64_t;

// p-adic valuation; val_p(0) is represented by a large sentinel.
constexpr int VAL_INFINITY = 1 << 20;
int valuation(const mpz_class& n, i64 p);
int valuation(i64 n, i64 p);

i64 ipow(i64 base, int exp);          // throws on overflow past 2^62
mpz_class zpow(i64 base, int exp);

bool is_prime(i64 n);
std::vector<i64> primes_up_to(i64 bound);

// Kronecker symbol (a|n), fully general (n may be even, zero or negative).
int kronecker(const mpz_class& a, const mpz_class& n);
int kronecker(i64 a, i64 n);

// Fundamental discriminant of Q(sqrt(d)); returns 1 for square d.
mpz_class fundamental_discriminant(const mpz_class& d);

// Largest f with f^2 | n (n != 0).
mpz_class square_part(const mpz_class& n);
bool is_perfect_square(const mpz_class& n);

// FNV-1a, used to stamp CSV outputs with a config hash.
u64 fnv1a(const std::string& s);

// Counter-based generator: a fixed (seed, counter) pair always yields the
// same value, independent of call order or thread assignment.
struct CounterRng {
    u64 seed;
    explicit CounterRng(u64 s) : seed(s) {}
    u64 bits(u64 counter) const;
    double uniform(u64 counter) const;                  // [0,1)
    double uniform(u64 counter, double lo, double hi) const;
};

} // namespace qlat
