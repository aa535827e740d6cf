#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <omp.h>

#include "qlat/errors.hpp"
#include "qlat/lattice.hpp"
#include "qlat/period.hpp"

namespace qlat {

// Shared state for a Fincke-Pohst search of { v : v^T A v <= C } where
// A = bilinear_gram / 2. The top coordinate range is split into slots; the
// parallel driver distributes slots over threads, the serial reference
// walks them in order. Consumers reduce per-slot partials in slot order,
// which makes float accumulations independent of the thread count.
class EllipsoidSearch {
public:
    EllipsoidSearch(const RMat& bilinear_gram, double c, u64 budget);

    int rank() const { return r_; }
    double bound() const { return c_; }
    i64 top_lo() const { return top_lo_; }
    i64 top_hi() const { return top_hi_; }
    int slots() const { return static_cast<int>(top_hi_ - top_lo_ + 1); }
    u64 estimate() const { return estimate_; }

    // fn(slot, v, q_value) for every integer v with v^T A v <= C whose top
    // coordinate equals top_lo + slot. q_value = v^T A v (float).
    template <class Fn>
    void run_slot(int slot, Fn&& fn) const {
        const int r = r_;
        std::vector<i64> x(r, 0);
        x[r - 1] = top_lo_ + slot;
        double d = double(x[r - 1]);
        double part = rd2_[r - 1] * d * d;
        if (part > c_) return;
        if (r == 1) {
            fn(slot, x.data(), part);
            return;
        }
        descend(r - 2, part, x, slot, fn);
    }

    template <class Fn>
    void run(bool parallel, Fn&& fn) const {
        const int n = slots();
        if (parallel) {
#pragma omp parallel for schedule(dynamic)
            for (int s = 0; s < n; ++s) run_slot(s, fn);
        } else {
            for (int s = 0; s < n; ++s) run_slot(s, fn);
        }
    }

private:
    template <class Fn>
    void descend(int i, double partial_above, std::vector<i64>& x, int slot,
                 Fn&& fn) const {
        const int r = r_;
        double ci = 0;
        const double* mrow = &mu_[static_cast<size_t>(i) * r];
        for (int j = i + 1; j < r; ++j) ci += mrow[j] * double(x[j]);
        double room = c_ - partial_above;
        if (room < 0) return;
        double w = std::sqrt(room / rd2_[i]);
        i64 lo = static_cast<i64>(std::ceil(-ci - w - 1e-12));
        i64 hi = static_cast<i64>(std::floor(-ci + w + 1e-12));
        for (i64 xi = lo; xi <= hi; ++xi) {
            x[i] = xi;
            double d = double(xi) + ci;
            double part = partial_above + rd2_[i] * d * d;
            if (part > c_ * (1 + 1e-12)) continue;
            if (i == 0)
                fn(slot, x.data(), part);
            else
                descend(i - 1, part, x, slot, fn);
        }
    }

    int r_;
    double c_;
    std::vector<double> rd2_;   // R_ii^2
    std::vector<double> mu_;    // mu[i*r+j] = R_ij / R_ii, j > i
    i64 top_lo_, top_hi_;
    u64 estimate_;
};

// Exact Q on integer coordinate arrays, guarded against overflow.
i64 quad_i64(const IMat& gram, const i64* v);

// An orthogonal hyperbolic-plane block inside the Gram matrix: coordinates
// (i, j) with G_ii = G_jj = 0, G_ij = 1 and zero pairing against the rest.
std::optional<std::pair<int, int>> find_u_block(const IMat& gram);

// Vectors with Q(v) = m and -Q(v_x) <= T m, delivered as fn(slot, v, qx)
// with qx = Q(v_x) <= 0. Slot-indexed accumulation keeps float reductions
// deterministic under any thread count.
//
// When the lattice splits off a hyperbolic plane, Q = x1 x2 + Q_rest and
// the sweep walks the (r-2)-dimensional prefix ellipsoid (the Schur
// complement of the majorant), solving x1 x2 = m - Q_rest(prefix) by
// divisor enumeration. Otherwise it scans the solid majorant ellipsoid.
class RepresentationSweep {
public:
    RepresentationSweep(const IntegralLattice& lat, const PeriodPoint& pt,
                        i64 m, double T, u64 budget = u64(1) << 31,
                        bool force_solid = false);

    int slots() const;
    u64 estimate() const;

    template <class Fn>
    void run(bool parallel, Fn&& fn) const {
        if (m_ <= 0) return;
        const int r = lat_->rank();
        if (!fast_) {
            const IMat& g = lat_->gram();
            es_->run(parallel, [&](int slot, const i64* v, double) {
                double qx = pt_->q_x(v, r);
                if (-qx > tcap_) return;
                if (quad_i64(g, v) != m_) return;
                fn(slot, v, qx);
            });
            return;
        }
        es_->run(parallel, [&](int slot, const i64* xp, double qp) {
            run_prefix(slot, xp, qp, fn);
        });
    }

private:
    template <class Fn>
    void run_prefix(int slot, const i64* xp, double prefix_q, Fn&& fn) const {
        const int r = lat_->rank();
        const int nrest = r - 2;
        // exact Q_rest and the ellipse data for (x1, x2)
        i64 qrest = 0;
        {
            __int128 s = 0;
            for (int a = 0; a < nrest; ++a) {
                __int128 row = 0;
                for (int bq = 0; bq < nrest; ++bq)
                    row += static_cast<__int128>(grest_(a, bq)) * xp[bq];
                s += row * xp[a];
            }
            qrest = static_cast<i64>(s / 2);
        }
        i64 R = m_ - qrest;
        double b1 = 0, b2 = 0;
        for (int a = 0; a < nrest; ++a) {
            b1 += across_(0, a) * double(xp[a]);
            b2 += across_(1, a) * double(xp[a]);
        }
        const double c0 = prefix_q + (b1 * (a22_ * b1 - a12_ * b2)
                                      + b2 * (a11_ * b2 - a12_ * b1)) / sdet_;
        // conditional extents of x1 and x2 on f(x1,x2) <= C: minimize over
        // the other variable, then solve the resulting quadratic
        auto extent = [&](double s_own, double beta, double gam, double& lo,
                          double& hi) {
            double disc = beta * beta - s_own * gam;
            if (disc < 0) { lo = 1; hi = 0; return; }
            double root = std::sqrt(disc);
            lo = (-beta - root) / s_own - 1e-9;
            hi = (-beta + root) / s_own + 1e-9;
        };
        double s1 = a11_ - a12_ * a12_ / a22_;
        double s2 = a22_ - a12_ * a12_ / a11_;
        double beta1 = b1 - a12_ * b2 / a22_;
        double beta2 = b2 - a12_ * b1 / a11_;
        double lo1, hi1, lo2, hi2;
        extent(s1, beta1, c0 - b2 * b2 / a22_ - cbound_, lo1, hi1);
        extent(s2, beta2, c0 - b1 * b1 / a11_ - cbound_, lo2, hi2);
        if (lo1 > hi1 || lo2 > hi2) return;

        auto f_ok = [&](double x1, double x2) {
            double f = a11_ * x1 * x1 + 2 * a12_ * x1 * x2 + a22_ * x2 * x2
                       + 2 * (b1 * x1 + b2 * x2) + c0;
            return f <= cbound_ * (1 + 1e-12) + 1e-9;
        };
        std::vector<std::pair<i64, i64>>& cand = scratch();
        cand.clear();
        if (R == 0) {
            i64 a_lo = static_cast<i64>(std::ceil(lo2));
            i64 a_hi = static_cast<i64>(std::floor(hi2));
            for (i64 t = a_lo; t <= a_hi; ++t)
                if (f_ok(0, double(t))) cand.emplace_back(0, t);
            i64 b_lo = static_cast<i64>(std::ceil(lo1));
            i64 b_hi = static_cast<i64>(std::floor(hi1));
            for (i64 t = b_lo; t <= b_hi; ++t)
                if (t != 0 && f_ok(double(t), 0)) cand.emplace_back(t, 0);
        } else {
            u64 n = static_cast<u64>(R > 0 ? R : -R);
            // divisors of |R| from the smallest-prime-factor table
            u64 rest = n;
            int np = 0;
            u64 pr[16];
            int ex[16];
            while (rest > 1) {
                u64 pf = rest < spf_.size() ? spf_[rest] : rest;
                int c = 0;
                while (rest % pf == 0) { rest /= pf; ++c; }
                pr[np] = pf;
                ex[np++] = c;
            }
            u64 divs[1600];
            int nd = 1;
            divs[0] = 1;
            for (int i = 0; i < np; ++i) {
                int base = nd;
                u64 pk = 1;
                for (int e = 1; e <= ex[i]; ++e) {
                    pk *= pr[i];
                    for (int j = 0; j < base; ++j) {
                        if (nd >= 1600) throw error("divisor table overflow");
                        divs[nd++] = divs[j] * pk;
                    }
                }
            }
            for (int i = 0; i < nd; ++i) {
                i64 d = static_cast<i64>(divs[i]);
                for (int sign = 0; sign < 2; ++sign) {
                    i64 x1 = sign ? -d : d;
                    i64 x2 = R / x1;
                    if (x1 < lo1 || x1 > hi1) continue;
                    if (x2 < lo2 || x2 > hi2) continue;
                    if (!f_ok(double(x1), double(x2))) continue;
                    cand.emplace_back(x1, x2);
                }
            }
            std::sort(cand.begin(), cand.end());
        }
        if (cand.empty()) return;
        std::vector<i64>& v = vscratch();
        v.assign(static_cast<size_t>(r), 0);
        for (int a = 0; a < nrest; ++a) v[static_cast<size_t>(rest_[static_cast<size_t>(a)])] = xp[a];
        for (const auto& [x1, x2] : cand) {
            v[static_cast<size_t>(ui_)] = x1;
            v[static_cast<size_t>(uj_)] = x2;
            double qx = pt_->q_x(v.data(), r);
            if (-qx > tcap_) continue;
            fn(slot, v.data(), qx);
        }
    }

    static std::vector<std::pair<i64, i64>>& scratch() {
        static thread_local std::vector<std::pair<i64, i64>> s;
        return s;
    }
    static std::vector<i64>& vscratch() {
        static thread_local std::vector<i64> s;
        return s;
    }

    const IntegralLattice* lat_;
    const PeriodPoint* pt_;
    i64 m_;
    double tcap_;
    double cbound_ = 0;
    MajorantForm maj_;
    bool fast_ = false;
    int ui_ = 0, uj_ = 0;
    std::vector<int> rest_;
    IMat grest_;                   // Gram restricted to the rest coordinates
    double a11_ = 0, a12_ = 0, a22_ = 0, sdet_ = 0;
    Eigen::Matrix<double, 2, Eigen::Dynamic> across_;
    std::vector<u64> spf_;         // smallest prime factors for |R|
    std::unique_ptr<EllipsoidSearch> es_;
};

template <class Fn>
int visit_representations(const IntegralLattice& lat, const PeriodPoint& pt,
                          i64 m, double T, u64 budget, bool parallel, Fn&& fn) {
    RepresentationSweep sweep(lat, pt, m, T, budget);
    sweep.run(parallel, fn);
    return sweep.slots();
}

// Sorted list variant (lexicographic), the documented deterministic output.
std::vector<IVec> enumerate_representations(const IntegralLattice& lat,
                                            const PeriodPoint& pt, i64 m, double T,
                                            u64 budget = u64(1) << 31,
                                            bool parallel = true);

// All v with Q(v) <= c (positive definite lattice), exact filter.
template <class Fn>
int visit_short_vectors(const IntegralLattice& lat, i64 c, u64 budget,
                        bool parallel, Fn&& fn) {
    if (c < 0) return 0;
    EllipsoidSearch es(lat.gram_real(), double(c) * (1 + 1e-12) + 1e-9, budget);
    const IMat& g = lat.gram();
    es.run(parallel, [&](int slot, const i64* v, double) {
        i64 q = quad_i64(g, v);
        if (q <= c) fn(slot, v, q);
    });
    return es.slots();
}

// LLL-reduced basis transform (columns); double-precision Gram-Schmidt over
// the exact Gram, exact integer column operations.
IMat lll_reduce(const IntegralLattice& lat, double delta = 0.99);

struct Minima {
    std::vector<mpz_class> mu_sq;   // exact Q of the minima vectors
    std::vector<double> mu;         // sqrt of the above
    std::vector<double> a;          // a[0] = 1, a[i] = mu_1 ... mu_i
    std::vector<IVec> vectors;
};

// Successive minima of a positive definite lattice by exact enumeration.
Minima successive_minima(const IntegralLattice& lat, u64 budget = u64(1) << 31);

} // namespace qlat
