#pragma once

#include <vector>

#include "qlat/arith.hpp"
#include "qlat/enumerate.hpp"
#include "qlat/lattice.hpp"
#include "qlat/period.hpp"

namespace qtest {

using namespace qlat;

// U + U + <2>: signature (3,2), det 2, the workhorse fixture.
inline IntegralLattice l5() {
    IMat g = IMat::Zero(5, 5);
    g(0, 1) = g(1, 0) = 1;
    g(2, 3) = g(3, 2) = 1;
    g(4, 4) = 2;
    return IntegralLattice(g);
}

// U + U + U: even unimodular of signature (3,3).
inline IntegralLattice u6() {
    IMat g = IMat::Zero(6, 6);
    for (int k = 0; k < 3; ++k) {
        g(2 * k, 2 * k + 1) = 1;
        g(2 * k + 1, 2 * k) = 1;
    }
    return IntegralLattice(g);
}

// Gram for the quadratic diagonal form sum d_i x_i^2.
inline IntegralLattice quad_diag(const std::vector<i64>& d) {
    int n = static_cast<int>(d.size());
    IMat g = IMat::Zero(n, n);
    for (int i = 0; i < n; ++i) g(i, i) = 2 * d[static_cast<size_t>(i)];
    return IntegralLattice(g);
}

// A pseudo-random Hodge-generic-looking period point on l5().
inline PeriodPoint l5_point(const IntegralLattice& lat, u64 seed = 7) {
    CounterRng rng(seed);
    RVec u(5), w(5);
    u << 1.0, -1.0, 0.1 * rng.uniform(1), 0.1 * rng.uniform(2), 0.1 * rng.uniform(3);
    w << 0.1 * rng.uniform(4), 0.1 * rng.uniform(5), 1.0, -1.0, 0.1 * rng.uniform(6);
    return PeriodPoint(lat, u, w);
}

// Exhaustive box search oracle for representations.
inline std::vector<IVec> box_representations(const IntegralLattice& lat,
                                             const PeriodPoint& pt, i64 m,
                                             double T, i64 box) {
    const int r = lat.rank();
    std::vector<IVec> out;
    std::vector<i64> v(static_cast<size_t>(r), -box);
    while (true) {
        if (quad_i64(lat.gram(), v.data()) == m) {
            double qx = pt.q_x(v.data(), r);
            if (-qx <= T * double(m) * (1 + 1e-12) + 1e-9)
                out.push_back(Eigen::Map<const IVec>(v.data(), r));
        }
        int pos = 0;
        while (pos < r && ++v[static_cast<size_t>(pos)] > box) {
            v[static_cast<size_t>(pos)] = -box;
            ++pos;
        }
        if (pos == r) break;
    }
    std::sort(out.begin(), out.end(), [](const IVec& a, const IVec& b) {
        for (int i = 0; i < a.size(); ++i)
            if (a[i] != b[i]) return a[i] < b[i];
        return false;
    });
    return out;
}

} // namespace qtest
