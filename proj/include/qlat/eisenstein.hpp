#pragma once

#include <vector>

#include <gmpxx.h>

#include "qlat/density.hpp"
#include "qlat/lattice.hpp"

namespace qlat {

// L^{(p)}_m(t) = N_m(p^w) t^w + (1 - p^{r-1} t) sum_{n<w} N_m(p^n) t^n,
// exact integer coefficients (degree w = w_p(m)).
struct LpPolynomial {
    i64 p = 0;
    i64 m = 0;
    int w = 0;
    std::vector<mpz_class> coeffs;   // index = degree, size w + 1

    mpq_class eval(const mpq_class& t) const;
    mpq_class eval_derivative(const mpq_class& t) const;
};

LpPolynomial lp_polynomial(const IntegralLattice& lat, i64 p, i64 m);

// d and the fundamental discriminant d0 entering the sigma factors:
// d = (-1)^{r/2} det(L) for even r, 2 (-1)^{(r+1)/2} D det(L) for odd r.
struct DiscriminantData {
    mpz_class d;
    mpz_class d0;
};
DiscriminantData sigma_discriminant(const IntegralLattice& lat, i64 D);

// Kronecker symbol chi_{d0}(p).
int chi_d0(const IntegralLattice& lat, i64 D, i64 p);

struct SigmaData {
    i64 m = 0;
    mpz_class d, d0;
    double value_at_k = 0;        // sigma_m(k)
    double logderiv_at_k = 0;     // sigma'_m(k) / sigma_m(k)
};

// Finite Euler product over p | 2 m det(L) and its logarithmic derivative
// at s = k = 1 + b/2. For odd r the argument m must satisfy sqrt(m/D) in Z.
SigmaData sigma_m(const IntegralLattice& lat, i64 D, i64 m);

struct CoefficientEstimate {
    i64 m = 0;
    double a_value = 0;       // a(m) = m^{b/2} prod mu_p
    double c_value = 0;       // recovered Eisenstein coefficient, <= 0
    double trunc_error = 0;   // relative
    i64 P_trunc = 0;
};

CoefficientEstimate a_of_m(const IntegralLattice& lat, i64 m, i64 P_trunc,
                           u64 budget = DEFAULT_COUNT_BUDGET);

// log m + 2 sigma'_m(k)/sigma_m(k) + kappa; b'_m(k/2) = |c(m)| * this.
double bprime_ratio(const IntegralLattice& lat, i64 D, i64 m, double kappa);

} // namespace qlat
