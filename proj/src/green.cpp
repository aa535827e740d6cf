#include "qlat/green.hpp"

#include "qlat/eisenstein.hpp"
#include "qlat/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include <boost/math/special_functions/digamma.hpp>

namespace qlat {

namespace {

double pochhammer_ratio_term(double a, double b, double c, int n, double z,
                             double prev) {
    // t_{n} from t_{n-1}
    return prev * (a + n - 1) * (b + n - 1) / ((c + n - 1) * n) * z;
}

} // namespace

double HyperKernel::F(double s, double z) const {
    const double a = s - 1 + k / 2.0, b = s + 1 - k / 2.0, c = 2 * s;
    if (z == 0) return 1.0;
    if (std::abs(z) >= 1.0)
        throw domain_error("hypergeometric argument must satisfy |z| < 1");

    if (z <= 0.6) {
        double sum = 1.0, term = 1.0;
        for (int n = 1; n <= max_terms; ++n) {
            term = pochhammer_ratio_term(a, b, c, n, z, term);
            sum += term;
            if (n > std::abs(a) + std::abs(b) + std::abs(c) + 4) {
                double q = std::abs(z) * (1 + (std::abs(a) + std::abs(b)) / n);
                if (q < 1 && std::abs(term) * q / (1 - q) < tol) return sum;
            }
        }
        throw error("hypergeometric series did not meet tolerance");
    }

    // logarithmic connection formula at z -> 1 (c = a + b here)
    if (std::abs(a + b - c) > 1e-9)
        throw domain_error("log-branch needs c = a + b");
    const double u = 1.0 - z;
    const double lg = std::log(u);
    double pref = std::tgamma(c) / (std::tgamma(a) * std::tgamma(b));
    double poch = 1.0;   // (a)_n (b)_n / (n!)^2 u^n
    double sum = 0.0;
    for (int n = 0; n <= max_terms; ++n) {
        if (n > 0) {
            poch *= (a + n - 1) * (b + n - 1) / (double(n) * n) * u;
        }
        double bracket = 2 * boost::math::digamma(double(n) + 1)
                         - boost::math::digamma(a + n)
                         - boost::math::digamma(b + n) - lg;
        double term = poch * bracket;
        sum += term;
        if (n > std::abs(a) + std::abs(b) + 4) {
            double q = u * (1 + (std::abs(a) + std::abs(b)) / n);
            if (q < 1 && std::abs(term) * q / (1 - q) < tol)
                return pref * sum;
        }
    }
    throw error("hypergeometric log-branch did not meet tolerance");
}

double HyperKernel::G(double s, double z) const {
    if (z == 0) {
        // first series term: a b / c
        const double a = s - 1 + k / 2.0, b = s + 1 - k / 2.0, c = 2 * s;
        return a * b / c;
    }
    return (F(s, z) - 1.0) / z;
}

double volume_omega(const IntegralLattice& lat, double T) {
    if (T < 0) throw domain_error("T must be nonnegative");
    if (!lat.is_gspin_signature())
        throw domain_error("volume formula needs signature (b,2)");
    const int b = lat.b();
    const double k = 1.0 + b / 2.0;
    double disc = lat.disc_abs().get_d();
    return std::pow(2.0 * M_PI, k) * (std::pow(1.0 + T, b / 2.0) - 1.0)
           / (std::sqrt(disc) * std::tgamma(k));
}

namespace {

// Q-orthonormal frame adapted to P + P^perp: columns u, w, y_1..y_b with
// Q = diag(-1,-1,1,...,1) in these coordinates.
struct AdaptedFrame {
    RMat E;
    double abs_det;
    int b;
};

AdaptedFrame adapted_frame(const IntegralLattice& lat, const PeriodPoint& pt) {
    const int r = lat.rank();
    AdaptedFrame f;
    f.b = r - 2;
    f.E = RMat::Zero(r, r);
    f.E.col(0) = pt.u();
    f.E.col(1) = pt.w();
    int have = 0;
    for (int cand = 0; cand < r && have < r - 2; ++cand) {
        RVec v = RVec::Zero(r);
        v[cand] = 1.0;
        // subtract the plane component
        double cu = lat.pair(v, pt.u()), cw = lat.pair(v, pt.w());
        v += 0.5 * cu * pt.u() + 0.5 * cw * pt.w();
        // subtract previously accepted perp vectors ((y.y) = 2 Q(y) = 2)
        for (int j = 0; j < have; ++j) {
            RVec y = f.E.col(2 + j);
            v -= 0.5 * lat.pair(v, y) * y;
        }
        double q = lat.quad(v);
        if (q < 1e-10) continue;
        f.E.col(2 + have) = v / std::sqrt(q);
        ++have;
    }
    if (have != r - 2)
        throw error("internal: could not complete the adapted frame");
    f.abs_det = std::abs(f.E.determinant());
    return f;
}

} // namespace

double mc_volume_omega(const IntegralLattice& lat, const PeriodPoint& pt,
                       double T, u64 samples, u64 seed, double eps,
                       bool parallel) {
    if (T < 0) throw domain_error("T must be nonnegative");
    auto frame = adapted_frame(lat, pt);
    const int b = frame.b;
    const double Y = std::sqrt(1.0 + T + eps) * (1 + 1e-9);
    CounterRng rng(seed);

    // integer hit counts: reduction order cannot matter
    u64 hits = 0;
    const i64 n = static_cast<i64>(samples);
#pragma omp parallel for schedule(static) reduction(+ : hits) if (parallel)
    for (i64 i = 0; i < n; ++i) {
        u64 base = static_cast<u64>(i) * (static_cast<u64>(b) + 1);
        double t = rng.uniform(base) * T;
        double y2 = 0;
        for (int j = 0; j < b; ++j) {
            double y = rng.uniform(base + 1 + static_cast<u64>(j), -Y, Y);
            y2 += y * y;
        }
        if (std::abs(y2 - (1.0 + t)) < eps) ++hits;
    }
    double box = M_PI * T * std::pow(2 * Y, b);
    return frame.abs_det * box * (double(hits) / double(samples)) / (2 * eps);
}

ArchReport A_of_m(const IntegralLattice& lat, const PeriodPoint& pt, i64 m,
                  u64 budget, size_t table_cap, bool parallel) {
    if (!lat.is_gspin_signature())
        throw domain_error("A(m,x) needs signature (b,2)");
    ArchReport rep;
    rep.m = m;
    if (m <= 0) return rep;
    RepresentationSweep sweep(lat, pt, m, 1.0, budget);
    const int nslots = sweep.slots();
    struct Slot {
        double A = 0, A_mt = 0, A_er = 0;
        u64 count = 0;
        double min_abs_qx = 1e300;
        std::vector<std::pair<IVec, double>> table;
    };
    std::vector<Slot> acc(static_cast<size_t>(nslots));
    const int r = lat.rank();
    const double floor_qx = GENERICITY_FLOOR * double(m);
    sweep.run(parallel, [&](int slot, const i64* v, double qx) {
        auto& s = acc[static_cast<size_t>(slot)];
        double aq = std::abs(qx);
        s.min_abs_qx = std::min(s.min_abs_qx, aq);
        if (aq < floor_qx) return;   // flagged after the run
        double term = 2.0 * std::log(double(m) / aq);
        s.A += term;
        ++s.count;
        if (aq >= 1.0)
            s.A_mt += term;
        else
            s.A_er += term;
        if (s.table.size() < table_cap)
            s.table.emplace_back(Eigen::Map<const IVec>(v, r), qx);
    });
    double min_qx = 1e300;
    for (const auto& s : acc) min_qx = std::min(min_qx, s.min_abs_qx);
    if (min_qx < floor_qx)
        throw nongeneric_error("numerically non-generic point: |Q(v_x)| = "
                               + std::to_string(min_qx));
    for (auto& s : acc) {
        rep.A += s.A;
        rep.A_mt += s.A_mt;
        rep.A_er += s.A_er;
        rep.count += s.count;
        for (auto& e : s.table) {
            if (rep.table.size() >= table_cap) { rep.table_complete = false; break; }
            rep.table.push_back(std::move(e));
        }
    }
    return rep;
}

PhiParts phi_parts(const IntegralLattice& lat, const PeriodPoint& pt, i64 m,
                   int shellmax, i64 P_trunc, u64 budget, bool parallel) {
    if (!lat.is_gspin_signature())
        throw domain_error("phi decomposition needs signature (b,2)");
    if (m <= 0) return {};
    const int b = lat.b();
    const double k = 1.0 + b / 2.0;
    HyperKernel kern{k};

    RepresentationSweep sweep(lat, pt, m, double(shellmax) + 1.0, budget);
    const int nslots = sweep.slots();
    const size_t nshell = static_cast<size_t>(shellmax) + 1;
    if (static_cast<size_t>(nslots) * nshell > (size_t(1) << 24))
        throw budget_error("shell accumulation table too large",
                           double(nslots) * double(nshell), double(size_t(1) << 24));

    // per-slot, per-shell partial sums of z^k G(k/2,z) and of h_0
    std::vector<double> zg(static_cast<size_t>(nslots) * nshell, 0.0);
    std::vector<double> h0(static_cast<size_t>(nslots) * nshell, 0.0);
    std::atomic<bool> nongeneric{false};
    const double floor_qx = GENERICITY_FLOOR * double(m);
    sweep.run(parallel, [&](int slot, const i64*, double qx) {
        double aq = std::abs(qx);
        if (aq < floor_qx) { nongeneric.store(true); return; }
        double ratio = double(m) / (double(m) + aq);   // z = m/(m - Q(v_x))
        int shell = static_cast<int>(std::floor(aq / double(m)));
        if (shell > shellmax) return;                  // boundary rounding
        size_t at = static_cast<size_t>(slot) * nshell + static_cast<size_t>(shell);
        zg[at] += std::pow(ratio, k) * kern.G(k / 2.0, ratio);
        h0[at] += std::pow(ratio, k - 1.0);
    });
    if (nongeneric.load())
        throw nongeneric_error("numerically non-generic point in shell sweep");

    // slot-ordered reduction into per-shell totals
    std::vector<double> shell_zg(nshell, 0.0), shell_h0(nshell, 0.0);
    for (int s = 0; s < nslots; ++s)
        for (size_t N = 0; N < nshell; ++N) {
            shell_zg[N] += zg[static_cast<size_t>(s) * nshell + N];
            shell_h0[N] += h0[static_cast<size_t>(s) * nshell + N];
        }

    auto am = a_of_m(lat, m, P_trunc);

    PhiParts out;
    out.a_value = am.a_value;
    out.a_rel_error = am.trunc_error;
    const double disc = lat.disc_abs().get_d();
    const double c_h = std::pow(2.0 * M_PI, k) * (b / 2.0)
                       / (std::sqrt(disc) * std::tgamma(k));
    double phi = 0, rx = 0;
    std::vector<double> shell_contrib(nshell, 0.0);
    for (size_t N = 0; N < nshell; ++N) {
        phi += (4.0 / b) * shell_zg[N];
        double mu_shell = c_h * std::log((double(N) + 2.0) / (double(N) + 1.0));
        double c_rx = (4.0 / b) * (shell_h0[N] - am.a_value * mu_shell);
        rx += c_rx;
        shell_contrib[N] = std::abs(c_rx) + (4.0 / b) * shell_zg[N];
    }
    out.phi_tilde = phi;
    out.r_x = rx;

    // tail estimate from the last shells (contributions decay ~ N^{-3/2})
    if (nshell >= 4) {
        double last = (shell_contrib[nshell - 1] + shell_contrib[nshell - 2]
                       + shell_contrib[nshell - 3]) / 3.0;
        out.tail = 2.0 * double(nshell) * last;
    } else {
        out.tail = std::abs(rx) + std::abs(phi);
    }
    // a(m) truncation feeds R_x linearly
    out.tail += (4.0 / b) * c_h * std::log(double(nshell) + 1.0)
                * am.a_value * am.trunc_error;
    return out;
}

ArchReport Phi_m(const IntegralLattice& lat, const PeriodPoint& pt, i64 D,
                 i64 m, double kappa, int shellmax, i64 P_trunc, u64 budget,
                 bool parallel) {
    ArchReport rep = A_of_m(lat, pt, m, budget, /*table_cap=*/0, parallel);
    auto parts = phi_parts(lat, pt, m, shellmax, P_trunc, budget, parallel);
    auto am = a_of_m(lat, m, P_trunc);
    double ratio = bprime_ratio(lat, D, m, kappa);
    double abs_c = std::abs(am.c_value);
    rep.phi_tilde = parts.phi_tilde;
    rep.R_x = parts.r_x;
    rep.Phi = parts.phi_tilde + parts.r_x - abs_c * ratio;
    rep.uncertainty = parts.tail + abs_c * am.trunc_error * std::abs(ratio);
    return rep;
}

std::optional<double> equidist_ratio(const IntegralLattice& lat,
                                     const PeriodPoint& pt, i64 m, double T1,
                                     double T2, u64 budget, bool parallel) {
    if (!(1.0 <= T1 && T1 <= T2))
        throw domain_error("equidistribution ratio needs 1 <= T1 <= T2");
    RepresentationSweep sweep(lat, pt, m, T2, budget);
    const double cap1 = T1 * double(m) * (1 + 1e-12) + 1e-9;
    std::vector<u64> c1(static_cast<size_t>(sweep.slots()), 0);
    std::vector<u64> c2(static_cast<size_t>(sweep.slots()), 0);
    sweep.run(parallel, [&](int slot, const i64*, double qx) {
        ++c2[static_cast<size_t>(slot)];
        if (-qx <= cap1) ++c1[static_cast<size_t>(slot)];
    });
    u64 n1 = 0, n2 = 0;
    for (size_t i = 0; i < c1.size(); ++i) { n1 += c1[i]; n2 += c2[i]; }
    if (n2 == 0) return std::nullopt;
    return double(n1) / double(n2);
}

SpherePair sphere_pair(const IntegralLattice& lat,
                       const std::vector<IVec>& vectors, const PeriodPoint& pt,
                       double C) {
    if (vectors.size() < 2)
        throw domain_error("sphere pairing needs at least two vectors");
    if (!(C > 2))
        throw domain_error("sphere pairing needs C > 2");
    const double ethr = std::exp(-C);
    std::vector<double> qx(vectors.size());
    for (size_t i = 0; i < vectors.size(); ++i) {
        qx[i] = pt.q_x(vectors[i].data(), static_cast<int>(vectors[i].size()));
        double qv = mpz_class(lat.quad(vectors[i])).get_d();
        if (qv < C)
            throw domain_error("sphere pairing: Q(v) below C");
        if (std::abs(qx[i]) >= ethr)
            throw domain_error("sphere pairing: |Q(v_x)| not below e^{-C}");
    }
    auto q_perp_of_diff = [&](size_t i, size_t j) {
        IVec w = vectors[i] - vectors[j];
        double wq = mpz_class(lat.quad(w)).get_d();
        double wqx = pt.q_x(w.data(), static_cast<int>(w.size()));
        return std::pair<double, double>{wq - wqx, wqx};
    };

    size_t bi = 0, bj = 1;
    double best = 1e300, best_qx = 0;
    if (vectors.size() <= 1000) {
        for (size_t i = 0; i < vectors.size(); ++i)
            for (size_t j = i + 1; j < vectors.size(); ++j) {
                auto [qp, qwx] = q_perp_of_diff(i, j);
                if (qp < best) { best = qp; best_qx = qwx; bi = i; bj = j; }
            }
    } else {
        // grid bucketing on the perp projections; widen until a pair collides
        const int r = lat.rank();
        auto frame = adapted_frame(lat, pt);
        Eigen::PartialPivLU<RMat> lu(frame.E);
        std::vector<RVec> perp(vectors.size());
        double span = 0;
        for (size_t i = 0; i < vectors.size(); ++i) {
            RVec xi = lu.solve(vectors[i].cast<double>());
            perp[i] = xi.tail(r - 2);
            span = std::max(span, perp[i].lpNorm<Eigen::Infinity>());
        }
        double cell = 2.0 * span / std::pow(double(vectors.size()), 1.0 / (r - 2));
        bool found = false;
        while (!found) {
            std::vector<std::pair<std::vector<i64>, size_t>> keyed(vectors.size());
            for (size_t i = 0; i < vectors.size(); ++i) {
                std::vector<i64> key(static_cast<size_t>(r - 2));
                for (int d = 0; d < r - 2; ++d)
                    key[static_cast<size_t>(d)] = static_cast<i64>(std::floor(perp[i][d] / cell));
                keyed[i] = {std::move(key), i};
            }
            std::sort(keyed.begin(), keyed.end());
            for (size_t i = 0; i + 1 < keyed.size(); ++i) {
                // same or adjacent key in sorted order: candidate pair
                size_t a = keyed[i].second, b2 = keyed[i + 1].second;
                auto [qp, qwx] = q_perp_of_diff(a, b2);
                if (qp < best) { best = qp; best_qx = qwx; bi = a; bj = b2; found = true; }
            }
            cell *= 2;
            if (cell > 4 * span + 1) break;
        }
        if (!found) {
            for (size_t i = 0; i + 1 < vectors.size(); ++i) {
                auto [qp, qwx] = q_perp_of_diff(i, i + 1);
                if (qp < best) { best = qp; best_qx = qwx; bi = i; bj = i + 1; }
            }
        }
    }
    SpherePair out;
    out.v = vectors[bi];
    out.v2 = vectors[bj];
    out.w = out.v - out.v2;
    out.q_w_perp = best;
    out.q_w_x = best_qx;
    return out;
}

std::vector<i64> classify_bad(const IntegralLattice& lat, const PeriodPoint& pt,
                              i64 X, u64 budget, bool parallel) {
    if (X < 1) throw domain_error("window start must be positive");
    const int b = lat.b();
    std::vector<i64> bad;
    std::vector<char> flag(static_cast<size_t>(X), 0);
    std::vector<char> failed(static_cast<size_t>(X), 0);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (i64 m = X; m < 2 * X; ++m) {
        try {
            double a_er = 0;
            bool generic = true;
            RepresentationSweep sweep(lat, pt, m, 1.0 / double(m), budget);
            sweep.run(false, [&](int, const i64*, double qx) {
                double aq = std::abs(qx);
                if (aq < GENERICITY_FLOOR * double(m)) { generic = false; return; }
                if (aq < 1.0) a_er += 2.0 * std::log(double(m) / aq);
            });
            if (!generic) { failed[static_cast<size_t>(m - X)] = 1; continue; }
            if (a_er > std::pow(double(m), b / 2.0))
                flag[static_cast<size_t>(m - X)] = 1;
        } catch (const error&) {
            failed[static_cast<size_t>(m - X)] = 2;
        }
    }
    for (i64 m = X; m < 2 * X; ++m) {
        char f = failed[static_cast<size_t>(m - X)];
        if (f == 1) throw nongeneric_error("non-generic point in bad-set scan at m=" + std::to_string(m));
        if (f == 2) throw budget_error("bad-set scan over budget at m=" + std::to_string(m), 0, double(budget));
    }
    for (i64 m = X; m < 2 * X; ++m)
        if (flag[static_cast<size_t>(m - X)]) bad.push_back(m);
    return bad;
}

HIntegral h_integral_check(const IntegralLattice& lat, const PeriodPoint& pt,
                           double s, u64 samples, u64 seed, bool parallel) {
    if (s <= 0) throw domain_error("h_s integral diverges for s <= 0");
    if (!lat.is_gspin_signature())
        throw domain_error("h_s integral needs signature (b,2)");
    const int b = lat.b();
    const double k = 1.0 + b / 2.0;
    const double disc = lat.disc_abs().get_d();
    HIntegral out;
    out.closed = (b / 2.0) * std::pow(2.0 * M_PI, k)
                 / (s * std::tgamma(k) * std::sqrt(disc));

    // truncate the radial range so the exact tail factor is small
    double T = std::min(1e6, std::pow(200.0, 1.0 / s));
    const double eps = 0.05;
    auto frame = adapted_frame(lat, pt);
    const double Y = std::sqrt(1.0 + T + eps) * (1 + 1e-9);
    CounterRng rng(seed);

    const u64 chunk = 1 << 16;
    const u64 nchunks = (samples + chunk - 1) / chunk;
    std::vector<double> partial(static_cast<size_t>(nchunks), 0.0);
#pragma omp parallel for schedule(static) if (parallel)
    for (i64 ci = 0; ci < static_cast<i64>(nchunks); ++ci) {
        double local = 0;
        u64 lo = static_cast<u64>(ci) * chunk;
        u64 hi = std::min(samples, lo + chunk);
        for (u64 i = lo; i < hi; ++i) {
            u64 base = i * (static_cast<u64>(b) + 1);
            double t = rng.uniform(base) * T;
            double y2 = 0;
            for (int j = 0; j < b; ++j) {
                double y = rng.uniform(base + 1 + static_cast<u64>(j), -Y, Y);
                y2 += y * y;
            }
            if (std::abs(y2 - (1.0 + t)) < eps)
                local += std::pow(1.0 + t, -(k - 1.0 + s));
        }
        partial[static_cast<size_t>(ci)] = local;
    }
    double acc = 0;
    for (double v : partial) acc += v;   // fixed chunk order
    double box = M_PI * T * std::pow(2 * Y, b);
    double mc_trunc = frame.abs_det * box * (acc / double(samples)) / (2 * eps);
    // rescale by the exact truncated fraction of the radial integral
    double frac = 1.0 - std::pow(1.0 + T, -s);
    out.mc = mc_trunc / frac;
    return out;
}

} // namespace qlat
