#include "qlat/arith.hpp"

#include "qlat/errors.hpp"

#include <cmath>
#include <limits>

namespace qlat {

int valuation(const mpz_class& n, i64 p) {
    if (n == 0) return VAL_INFINITY;
    mpz_class q, r, m = abs(n);
    mpz_class pp(p);
    int v = 0;
    while (true) {
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t(), pp.get_mpz_t());
        if (r != 0) break;
        m = q;
        ++v;
    }
    return v;
}

int valuation(i64 n, i64 p) {
    if (n == 0) return VAL_INFINITY;
    if (n < 0) n = -n;
    int v = 0;
    while (n % p == 0) { n /= p; ++v; }
    return v;
}

i64 ipow(i64 base, int exp) {
    i64 r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > (i64(1) << 62) / base)
            throw budget_error("integer power overflow", std::pow(double(base), exp),
                               double(i64(1) << 62));
        r *= base;
    }
    return r;
}

mpz_class zpow(i64 base, int exp) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base),
                  static_cast<unsigned long>(exp));
    return r;
}

bool is_prime(i64 n) {
    if (n < 2) return false;
    for (i64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<i64> primes_up_to(i64 bound) {
    std::vector<i64> out;
    if (bound < 2) return out;
    std::vector<bool> sieve(static_cast<size_t>(bound) + 1, true);
    for (i64 i = 2; i <= bound; ++i) {
        if (!sieve[static_cast<size_t>(i)]) continue;
        out.push_back(i);
        for (i64 j = i * i; j <= bound; j += i) sieve[static_cast<size_t>(j)] = false;
    }
    return out;
}

int kronecker(const mpz_class& a, const mpz_class& n) {
    return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t());
}

int kronecker(i64 a, i64 n) {
    return kronecker(mpz_class(a), mpz_class(n));
}

mpz_class square_part(const mpz_class& n) {
    // trial division; inputs here are desk scale
    mpz_class m = abs(n), f = 1;
    for (mpz_class d = 2; d * d * d * d <= m || d <= 3; ++d) {
        if (d * d > m) break;
        while (mpz_divisible_p(m.get_mpz_t(), mpz_class(d * d).get_mpz_t())) {
            m /= d * d;
            f *= d;
        }
    }
    // leftover perfect square (possible when m is a square of a prime)
    mpz_class s = sqrt(m);
    if (s * s == m) f *= s;
    return f;
}

bool is_perfect_square(const mpz_class& n) {
    if (n < 0) return false;
    return mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

mpz_class fundamental_discriminant(const mpz_class& d) {
    if (d == 0) throw domain_error("fundamental discriminant of 0");
    if (is_perfect_square(d)) return 1;
    mpz_class f = square_part(d);
    mpz_class d1 = d / (f * f);     // squarefree part, sign kept
    mpz_class mod4 = ((d1 % 4) + 4) % 4;
    return (mod4 == 1) ? d1 : 4 * d1;
}

u64 fnv1a(const std::string& s) {
    u64 h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// splitmix64 applied to seed^counter; statistically fine for Monte Carlo
// volume estimates and fully reproducible.
u64 CounterRng::bits(u64 counter) const {
    u64 z = seed + 0x9e3779b97f4a7c15ULL * (counter + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double CounterRng::uniform(u64 counter) const {
    return double(bits(counter) >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(u64 counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
}

} // namespace qlat
