#include "qlat/acceptance.hpp"

#include "qlat/chain.hpp"
#include "qlat/density.hpp"
#include "qlat/eisenstein.hpp"
#include "qlat/errors.hpp"
#include "qlat/green.hpp"
#include "qlat/harness.hpp"
#include "qlat/io.hpp"
#include "qlat/jordan.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include <omp.h>

namespace qlat {

namespace {

// Regression-pinned constants. Tolerances that the spec states directly are
// inlined at their use sites; these are the fitted ones, recorded from the
// shipped fixtures and frozen with a safety margin.
constexpr double PIN_COUNT_IDENTITY = 9.0;        // criterion 3: max p * deviation
constexpr double PIN_A_RATIO = 11.0;              // criterion 6: A/(m^{b/2} log m)
constexpr double PIN_MINIMA_UPPER = 2.0;          // criterion 8b: mu_j(n) / p^{n/e}
constexpr double PIN_A5_LOWER = 0.35;             // criterion 8b: a_{b+2}(n) / p^{2n/e}
constexpr double PIN_SHORTSUM = 40.0;             // criterion 8c: sum/X^{(b+1)/2}
constexpr double PIN_DENSITY_DISC = 6.0;          // criterion 9: lhs/rhs
constexpr double PIN_TFORM = 8.0;                 // criterion 9: lhs / p^{-3T/5}
constexpr double PIN_ARCH_NORM = -3.0;            // criterion 10: stabilized level
constexpr double PIN_ARCH_NORM_SLACK = 0.75;      // relative window around it

struct Fixtures {
    std::string dir;
    std::string lat(const std::string& n) const { return dir + "/" + n; }
};

std::string fmt(double x) { return format_real(x); }

// -------------------------------------------------------------- criterion 1+2

CriterionResult crit_density_oracle(const Fixtures& fx) {
    CriterionResult res{1, "density oracle equivalence", true, "", 0};
    size_t cases = 0;
    for (const auto& name : {"l5.lat", "u6.lat"}) {
        auto lat = load_lattice(fx.lat(name));
        const int r = lat.rank();
        for (i64 p : {2, 3, 5, 7}) {
            auto js = jordan_decompose(lat, p);
            for (int n = 0; n <= 3; ++n) {
                std::vector<u64> hist;
                u64 q = 1;
                if (n > 0) {
                    hist = count_histogram(lat, p, n);
                    q = static_cast<u64>(ipow(p, n));
                }
                for (i64 m = 1; m <= 40; ++m) {
                    mpq_class rec = mu_p_recursive(js, m, n);
                    mpq_class brute = 1;
                    if (n > 0) {
                        u64 mm = static_cast<u64>(((m % i64(q)) + i64(q)) % i64(q));
                        brute = mpq_class(mpz_class(hist[mm]),
                                          zpow(p, i64(n) * (r - 1)));
                        brute.canonicalize();
                    }
                    ++cases;
                    if (rec != brute) {
                        res.pass = false;
                        res.detail = "mismatch at " + std::string(name) + " p="
                                     + std::to_string(p) + " n=" + std::to_string(n)
                                     + " m=" + std::to_string(m);
                        return res;
                    }
                }
            }
        }
    }
    res.detail = std::to_string(cases) + " cases exact";
    return res;
}

CriterionResult crit_lower_bound(const Fixtures& fx) {
    CriterionResult res{2, "uniform lower bound mu >= 1/2", true, "", 0};
    mpq_class half(1, 2), worst = 1;
    for (const auto& name : {"l5.lat", "u6.lat"}) {
        auto lat = load_lattice(fx.lat(name));
        for (i64 p : {2, 3, 5, 7}) {
            auto js = jordan_decompose(lat, p);
            for (int n = 1; n <= 3; ++n)
                for (i64 m = 1; m <= 40; ++m) {
                    mpq_class v = mu_p_recursive(js, m, n);
                    if (v < worst) worst = v;
                    if (v < half) {
                        res.pass = false;
                        res.detail = "mu = " + v.get_str() + " at " + name + " p="
                                     + std::to_string(p) + " n=" + std::to_string(n)
                                     + " m=" + std::to_string(m);
                        return res;
                    }
                }
        }
    }
    res.detail = "minimum over sweep = " + worst.get_str();
    return res;
}

// ---------------------------------------------------------------- criterion 3

CriterionResult crit_count_identity(const Fixtures& fx) {
    CriterionResult res{3, "count identity proxy", true, "", 0};
    auto lat = load_lattice(fx.lat("l5.lat"));
    auto sweep_max = [&](i64 pmax) {
        double worst = 0;
        for (i64 p : primes_up_to(pmax)) {
            auto js = jordan_decompose(lat, p, 40);
            for (i64 m = 1; m <= 200; ++m) {
                int w = stabilization_level(p, m);
                mpq_class muw = mu_p_recursive(js, m, w);
                mpq_class sum = 0;
                for (int n = 0; n < w; ++n) sum += mu_p_recursive(js, m, n);
                mpq_class dev = abs(mpq_class(w) - sum / muw) * p;
                worst = std::max(worst, dev.get_d());
            }
        }
        return worst;
    };
    double max7 = sweep_max(7);
    double max50 = sweep_max(50);
    res.detail = "max p*dev: p<=7 " + fmt(max7) + ", p<=50 " + fmt(max50);
    if (max50 > PIN_COUNT_IDENTITY) {
        res.pass = false;
        res.detail += " exceeds pinned " + fmt(PIN_COUNT_IDENTITY);
    }
    if (max50 > std::max(max7 * 1.15, max7 + 0.5)) {
        res.pass = false;
        res.detail += " (grew under extension)";
    }
    return res;
}

// ---------------------------------------------------------------- criterion 4

CriterionResult crit_volume(const Fixtures& fx) {
    CriterionResult res{4, "volume closed form vs Monte Carlo", true, "", 0};
    auto lat = load_lattice(fx.lat("l5.lat"));
    auto pt = load_period_point(lat, fx.lat("l5.pt"));
    std::ostringstream detail;
    for (double T : {1.0, 3.0, 10.0}) {
        double closed = volume_omega(lat, T);
        double mc = mc_volume_omega(lat, pt, T, 10000000, /*seed=*/1);
        double rel = std::abs(mc - closed) / closed;
        detail << "T=" << T << " rel " << fmt(rel) << "; ";
        if (rel > 0.01) res.pass = false;
    }
    res.detail = detail.str();
    return res;
}

// ---------------------------------------------------------------- criterion 5

CriterionResult crit_equidistribution(const Fixtures& fx) {
    CriterionResult res{5, "equidistribution ratio", true, "", 0};
    auto lat = load_lattice(fx.lat("l5.lat"));
    auto pt = load_period_point(lat, fx.lat("l5.pt"));
    const double target = (2.0 * std::sqrt(2.0) - 1.0) / 7.0;
    double sum = 0;
    int used = 0;
    for (int i = 0; i < 20; ++i) {
        i64 m = 5000 + 250 * i;
        auto ratio = equidist_ratio(lat, pt, m, 1.0, 3.0);
        if (!ratio) {
            res.pass = false;
            res.detail = "no vectors at m=" + std::to_string(m);
            return res;
        }
        sum += *ratio;
        ++used;
    }
    double avg = sum / used;
    double rel = std::abs(avg - target) / target;
    res.detail = "avg " + fmt(avg) + " target " + fmt(target) + " rel " + fmt(rel);
    if (rel > 0.10) res.pass = false;
    return res;
}

// ---------------------------------------------------------------- criterion 6

CriterionResult crit_arch_growth(const Fixtures& fx) {
    CriterionResult res{6, "archimedean growth", true, "", 0};
    auto lat = load_lattice(fx.lat("l5.lat"));
    auto pt = load_period_point(lat, fx.lat("l5.pt"));
    const int b = lat.b();
    struct Entry { i64 m; double amt_ratio, a_ratio; };
    std::vector<Entry> entries;
    for (int j = 2; j <= 60; ++j) {
        i64 m = i64(j) * j;
        auto rep = A_of_m(lat, pt, m, u64(1) << 31, 0);
        double norm = std::pow(double(m), b / 2.0) * std::log(double(m));
        entries.push_back({m, rep.A_mt / norm, rep.A / norm});
    }
    auto median_in = [&](i64 lo, i64 hi) {
        std::vector<double> vals;
        for (const auto& e : entries)
            if (e.m >= lo && e.m < hi) vals.push_back(e.amt_ratio);
        std::sort(vals.begin(), vals.end());
        if (vals.empty()) return -1.0;
        return vals[vals.size() / 2];
    };
    double m1 = median_in(512, 1024), m2 = median_in(1024, 2048),
           m3 = median_in(2048, 4096);
    double worst_a = 0;
    for (const auto& e : entries) worst_a = std::max(worst_a, e.a_ratio);
    res.detail = "medians " + fmt(m1) + " > " + fmt(m2) + " > " + fmt(m3)
                 + "; max A ratio " + fmt(worst_a);
    if (!(m1 > m2 && m2 > m3)) res.pass = false;
    if (worst_a > PIN_A_RATIO) res.pass = false;
    return res;
}

// ---------------------------------------------------------------- criterion 7

CriterionResult crit_bad_set(const Fixtures& fx) {
    CriterionResult res{7, "bad set sparsity", true, "", 0};
    auto lat = load_lattice(fx.lat("l5.lat"));
    auto pt = load_period_point(lat, fx.lat("l5.pt"));
    std::ostringstream detail;
    double prev = 1e300;
    for (i64 X : {64, 128, 256}) {
        auto bad = classify_bad(lat, pt, X);
        double ratio = std::log(double(std::max<size_t>(bad.size(), 1)))
                       / std::log(double(X));
        detail << "X=" << X << " |bad|=" << bad.size() << " ratio " << fmt(ratio)
               << "; ";
        if (ratio > prev + 1e-9) res.pass = false;
        prev = ratio;
    }
    res.detail = detail.str();
    return res;
}

// ---------------------------------------------------------------- criterion 8

ChainModel random_model(const IntegralLattice& base, u64 seed) {
    CounterRng rng(seed);
    static const i64 primes[3] = {2, 3, 5};
    i64 p = primes[rng.bits(0) % 3];
    int rank = static_cast<int>(rng.bits(1) % 5);   // 0..4
    const int r = base.rank();
    int precision = 12;
    for (int attempt = 0; attempt < 40; ++attempt) {
        std::vector<std::vector<mpz_class>> gens;
        mpz_class mod = zpow(p, precision);
        for (int i = 0; i < rank; ++i) {
            std::vector<mpz_class> g(static_cast<size_t>(r));
            for (int j = 0; j < r; ++j) {
                u64 bits = rng.bits(100 + static_cast<u64>(attempt) * 64
                                    + static_cast<u64>(i) * 8 + static_cast<u64>(j));
                g[static_cast<size_t>(j)] = mpz_class(bits % 100000000) % mod;
            }
            gens.push_back(std::move(g));
        }
        try {
            return ChainModel(base, p, 1, 1, precision, 1, std::move(gens));
        } catch (const input_error&) {
            continue;   // not saturated; retry
        }
    }
    // rank 0 always saturates
    return ChainModel(base, p, 1, 1, precision, 1, {});
}

CriterionResult crit_chain_model(const Fixtures& fx) {
    CriterionResult res{8, "chain model laws and scalings", true, "", 0};
    std::ostringstream detail;

    // (a) nesting and index law on randomized models
    auto base = unit_cube(5);
    for (u64 seed = 1; seed <= 100; ++seed) {
        auto model = random_model(base, seed);
        ChainLevel prev;
        for (int n = 1; n <= 5; ++n) {
            auto lvl = chain_lattice(model, n);
            mpz_class expect = zpow(model.p,
                                    i64(lvl.k) * (5 - model.lambda_rank));
            if (lvl.index != expect) {
                res.pass = false;
                res.detail = "index law failed at seed " + std::to_string(seed)
                             + " n=" + std::to_string(n);
                return res;
            }
            if (n > 1) {
                // every column of lvl.basis must lie in the previous level:
                // solve prev.basis x = col over Q and require integrality
                Eigen::PartialPivLU<RMat> lu(prev.basis.cast<double>());
                for (int c = 0; c < 5; ++c) {
                    RVec x = lu.solve(lvl.basis.col(c).cast<double>());
                    for (int i = 0; i < 5; ++i)
                        if (std::abs(x[i] - std::round(x[i])) > 1e-6) {
                            res.pass = false;
                            res.detail = "nesting failed at seed "
                                         + std::to_string(seed);
                            return res;
                        }
                }
            }
            prev = lvl;
        }
    }
    detail << "100 models nested with exact index; ";

    // (b) minima scalings on the full-rank fixture (p = 2)
    auto model = load_chain_model(fx.lat("chain_rank3.cm"));
    double worst_upper = 0, worst_lower = 1e300;
    for (int n = 2; n <= 20; ++n) {
        auto prof = minima_profile(model, n);
        double pn = std::pow(double(model.p), double(n) / model.e);
        for (double mu : prof.minima.mu)
            worst_upper = std::max(worst_upper, mu / pn);
        worst_lower = std::min(worst_lower,
                               prof.minima.a[5] / (pn * pn));
    }
    detail << "mu/p^{n/e} max " << fmt(worst_upper) << ", a5/p^{2n/e} min "
           << fmt(worst_lower) << "; ";
    if (worst_upper > PIN_MINIMA_UPPER) res.pass = false;
    if (worst_lower < PIN_A5_LOWER) res.pass = false;

    // (c) short-vector sums for a rank <= b+1 model
    auto low = load_chain_model(fx.lat("chain_rank2_r4.cm"));
    double worst_sum = 0;
    for (i64 X : {64, 128, 256}) {
        mpz_class total = total_short_count(low, X);
        worst_sum = std::max(worst_sum,
                             total.get_d() / std::pow(double(X), 2.0));
    }
    detail << "short-sum/X^2 max " << fmt(worst_sum);
    if (worst_sum > PIN_SHORTSUM) res.pass = false;

    res.detail = detail.str();
    return res;
}

// ---------------------------------------------------------------- criterion 9

CriterionResult crit_density_disc(const Fixtures& fx) {
    CriterionResult res{9, "density-discriminant bound", true, "", 0};
    std::ostringstream detail;
    double worst = 0;
    auto base = unit_cube(5);
    for (u64 seed : {3, 17, 41, 88}) {
        auto model = random_model(base, seed);
        for (int n = 1; n <= 4; ++n) {
            auto lvl = chain_lattice(model, n);
            for (i64 m : {1, 2, 5}) {
                auto bound = density_disc_bound(lvl.lat, model.p, m);
                worst = std::max(worst, bound.lhs / bound.rhs);
            }
        }
    }
    detail << "lhs/rhs max " << fmt(worst) << "; ";
    if (worst > PIN_DENSITY_DISC) res.pass = false;

    auto model = load_chain_model(fx.lat("chain_rank3.cm"));
    double worst_t = 0;
    for (int T = 1; T <= 6; ++T) {
        auto lvl = chain_lattice(model, model.n0 + T * model.e);
        for (i64 m : {1, 3}) {
            auto bound = density_disc_bound(lvl.lat, model.p, m);
            double target = std::pow(double(model.p), -0.6 * T);
            worst_t = std::max(worst_t, bound.lhs / target);
        }
    }
    detail << "T-form lhs/p^{-3T/5} max " << fmt(worst_t);
    if (worst_t > PIN_TFORM) res.pass = false;
    res.detail = detail.str();
    return res;
}

// --------------------------------------------------------------- criterion 10

CriterionResult crit_ledger(const Fixtures& fx) {
    CriterionResult res{10, "height ledger shape", true, "", 0};
    ExperimentConfig config;
    config.lattice_path = fx.lat("l5.lat");
    config.point_path = fx.lat("l5.pt");
    config.chain_paths = {fx.lat("chain_zero.cm"), fx.lat("chain_rank3.cm")};
    config.D = 1;
    config.jmin = 8;
    config.jmax = 22;
    config.shellmax = 8;
    auto ledger = run_ledger(config, nullptr);

    std::ostringstream detail;
    double prev_fin = 1e300;
    bool fin_decreasing = true, arch_negative = true;
    double last_arch = 0;
    for (const auto& w : ledger.windows) {
        if (w.X < 64) continue;
        detail << "X=" << w.X << " arch_n " << fmt(w.arch_normalized)
               << " fin_n " << fmt(w.finite_normalized) << "; ";
        if (w.arch_normalized >= 0) arch_negative = false;
        if (w.finite_normalized > prev_fin + 1e-12) fin_decreasing = false;
        prev_fin = w.finite_normalized;
        last_arch = w.arch_normalized;
    }
    if (!arch_negative) res.pass = false;
    if (!fin_decreasing) res.pass = false;
    if (std::abs(last_arch - PIN_ARCH_NORM)
        > PIN_ARCH_NORM_SLACK * std::abs(PIN_ARCH_NORM))
        res.pass = false;
    res.detail = detail.str();
    return res;
}

} // namespace

std::vector<CriterionResult> run_acceptance(const std::string& fixtures_dir,
                                            std::ostream& log,
                                            const std::vector<int>& only,
                                            int threads) {
    if (threads > 0) omp_set_num_threads(threads);
    Fixtures fx{fixtures_dir};
    std::vector<std::function<CriterionResult()>> crits = {
        [&] { return crit_density_oracle(fx); },
        [&] { return crit_lower_bound(fx); },
        [&] { return crit_count_identity(fx); },
        [&] { return crit_volume(fx); },
        [&] { return crit_equidistribution(fx); },
        [&] { return crit_arch_growth(fx); },
        [&] { return crit_bad_set(fx); },
        [&] { return crit_chain_model(fx); },
        [&] { return crit_density_disc(fx); },
        [&] { return crit_ledger(fx); },
    };
    std::vector<CriterionResult> results;
    for (size_t i = 0; i < crits.size(); ++i) {
        int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end())
            continue;
        auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = crits[i]();
        } catch (const std::exception& e) {
            r.id = id;
            r.name = "criterion " + std::to_string(id);
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0).count();
        log << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " ("
            << r.name << ") [" << fmt(r.seconds) << "s] " << r.detail << "\n";
        log.flush();
        results.push_back(std::move(r));
    }
    return results;
}

void write_acceptance_report(const std::vector<CriterionResult>& results,
                             std::ostream& os) {
    CsvWriter csv(os, "acceptance", {"id", "name", "pass", "seconds", "detail"});
    for (const auto& r : results) {
        std::string detail = r.detail;
        for (auto& c : detail)
            if (c == ',' || c == '\n') c = ';';
        csv.row({std::to_string(r.id), r.name, r.pass ? "1" : "0",
                 fmt(r.seconds), detail});
    }
}

} // namespace qlat
