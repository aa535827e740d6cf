#pragma once

#include <optional>
#include <vector>

#include "qlat/density.hpp"
#include "qlat/enumerate.hpp"
#include "qlat/lattice.hpp"
#include "qlat/period.hpp"

namespace qlat {

// Gauss hypergeometric kernels F(s,z) = H(s-1+k/2, s+1-k/2; 2s; z) and
// G(s,z) = (F(s,z) - 1)/z, evaluated with certified truncation. Near z = 1
// the logarithmic connection formula takes over.
struct HyperKernel {
    double k;                  // 1 + b/2
    double tol = 1e-12;
    int max_terms = 2000000;

    double F(double s, double z) const;
    double G(double s, double z) const;
};

// Closed form (2 pi)^k ((1+T)^{b/2} - 1) / (sqrt|L^v/L| Gamma(k)).
double volume_omega(const IntegralLattice& lat, double T);

// Monte Carlo of the defining epsilon-limit, counter-based RNG; exact over
// threading. Used as the oracle for the closed form.
double mc_volume_omega(const IntegralLattice& lat, const PeriodPoint& pt,
                       double T, u64 samples, u64 seed, double eps = 0.05,
                       bool parallel = true);

struct ArchReport {
    i64 m = 0;
    u64 count = 0;                // vectors with Q = m, |Q(v_x)| <= m
    double A = 0, A_mt = 0, A_er = 0;
    double phi_tilde = 0, R_x = 0, Phi = 0;
    double uncertainty = 0;
    std::vector<std::pair<IVec, double>> table;   // (vector, Q(v_x))
    bool table_complete = true;
};

// The singular sum A(m,x) = 2 sum log(m/|Q(v_x)|) with its main/error split
// (A_mt over |Q(v_x)| >= 1, A_er over 0 < |Q(v_x)| < 1).
ArchReport A_of_m(const IntegralLattice& lat, const PeriodPoint& pt, i64 m,
                  u64 budget = u64(1) << 31, size_t table_cap = 100000,
                  bool parallel = true);

struct PhiParts {
    double phi_tilde = 0;
    double r_x = 0;
    double tail = 0;          // estimated truncated-shell remainder
    double a_value = 0;       // a(m) used in R_x
    double a_rel_error = 0;
};

// Decomposition phi_m(x) = phi~_m(x,0) + R_x(0,m) over shells Theta_N,
// N <= shellmax, with the tail reported.
PhiParts phi_parts(const IntegralLattice& lat, const PeriodPoint& pt, i64 m,
                   int shellmax = 10000, i64 P_trunc = 200,
                   u64 budget = u64(1) << 31, bool parallel = true);

// Phi_m(x) = phi~ + R_x - |c(m)| (log m + 2 sigma'/sigma + kappa).
ArchReport Phi_m(const IntegralLattice& lat, const PeriodPoint& pt, i64 D,
                 i64 m, double kappa, int shellmax = 10000, i64 P_trunc = 200,
                 u64 budget = u64(1) << 31, bool parallel = true);

// count(m, T1) / count(m, T2); nullopt when the denominator vanishes.
std::optional<double> equidist_ratio(const IntegralLattice& lat,
                                     const PeriodPoint& pt, i64 m, double T1,
                                     double T2, u64 budget = u64(1) << 31,
                                     bool parallel = true);

struct SpherePair {
    IVec v, v2, w;            // w = v - v2
    double q_w_perp = 0;      // Q(w_{x perp})
    double q_w_x = 0;         // Q(w_x)
};

// The pair minimizing Q((v - v')_{x perp}); exhaustive for small inputs,
// grid-bucketed beyond that. Inputs must satisfy C <= Q(v),
// |Q(v_x)| < e^{-C} for the supplied C > 2.
SpherePair sphere_pair(const IntegralLattice& lat,
                       const std::vector<IVec>& vectors, const PeriodPoint& pt,
                       double C);

// All m in [X, 2X) with A_er(m) > m^{b/2}.
std::vector<i64> classify_bad(const IntegralLattice& lat, const PeriodPoint& pt,
                              i64 X, u64 budget = u64(1) << 31,
                              bool parallel = true);

struct HIntegral {
    double mc = 0;
    double closed = 0;
};

// Monte Carlo vs closed form of the h_s integral over L_{R,1}:
// closed = (b/4) |c(m)| / (s a(m)) = (b/2)(2 pi)^k / (s Gamma(k) sqrt|L^v/L|).
HIntegral h_integral_check(const IntegralLattice& lat, const PeriodPoint& pt,
                           double s, u64 samples, u64 seed = 1,
                           bool parallel = true);

// Operational Hodge-genericity floor: runs abort when some vector has
// |Q(v_x)| below this multiple of m.
inline constexpr double GENERICITY_FLOOR = 1e-12;

} // namespace qlat
