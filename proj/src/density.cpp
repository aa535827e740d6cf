#include "qlat/density.hpp"

#include "qlat/errors.hpp"
#include "qlat/enumerate.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

namespace qlat {

namespace {

// ---- residue counting kernels ----------------------------------------

// Quadratic coefficients of one Z-component: Q(v) = sum q_i v_i^2
// + sum_{i<j} c_ij v_i v_j, reduced mod q.
struct ComponentForm {
    std::vector<int> idx;                 // coordinate indices in the full lattice
    std::vector<u64> qdiag;               // q_i mod q
    std::vector<std::vector<u64>> cross;  // c_ij mod q (upper triangle)
};

u64 qval_mod(const ComponentForm& f, const std::vector<u64>& v, u64 q) {
    const int d = static_cast<int>(f.qdiag.size());
    u64 acc = 0;
    for (int i = 0; i < d; ++i) {
        u64 vi = v[static_cast<size_t>(i)];
        u64 sq = (unsigned __int128)(vi) * vi % q;
        acc = (acc + (unsigned __int128)(f.qdiag[static_cast<size_t>(i)]) * sq) % q;
        for (int j = i + 1; j < d; ++j) {
            u64 pr = (unsigned __int128)(vi) * v[static_cast<size_t>(j)] % q;
            acc = (acc + (unsigned __int128)(f.cross[static_cast<size_t>(i)][static_cast<size_t>(j)]) * pr) % q;
        }
    }
    return acc;
}

// Exhaustive histogram of Q over (Z/q)^d for one component. The outer
// coordinate is split across threads; integer merges keep the result
// independent of scheduling.
std::vector<u64> component_histogram(const ComponentForm& f, u64 q, bool parallel) {
    const int d = static_cast<int>(f.qdiag.size());
    std::vector<u64> hist(q, 0);
    const int nthreads = parallel ? omp_get_max_threads() : 1;
    std::vector<std::vector<u64>> partial(static_cast<size_t>(nthreads),
                                          std::vector<u64>(q, 0));
#pragma omp parallel for schedule(static) num_threads(nthreads) if (parallel)
    for (i64 v0 = 0; v0 < static_cast<i64>(q); ++v0) {
        auto& h = partial[static_cast<size_t>(omp_get_thread_num())];
        std::vector<u64> v(static_cast<size_t>(d), 0);
        v[0] = static_cast<u64>(v0);
        if (d == 1) {
            ++h[qval_mod(f, v, q)];
            continue;
        }
        // odometer over the remaining d-1 coordinates
        while (true) {
            ++h[qval_mod(f, v, q)];
            int pos = 1;
            while (pos < d && ++v[static_cast<size_t>(pos)] == q) {
                v[static_cast<size_t>(pos)] = 0;
                ++pos;
            }
            if (pos == d) break;
        }
    }
    for (const auto& h : partial)
        for (u64 c = 0; c < q; ++c) hist[c] += h[c];
    return hist;
}

std::vector<std::vector<int>> gram_components(const IMat& g) {
    const int r = static_cast<int>(g.rows());
    std::vector<int> comp(r, -1);
    int ncomp = 0;
    for (int s = 0; s < r; ++s) {
        if (comp[s] >= 0) continue;
        // BFS over nonzero off-diagonal entries
        std::vector<int> queue{s};
        comp[s] = ncomp;
        while (!queue.empty()) {
            int i = queue.back();
            queue.pop_back();
            for (int j = 0; j < r; ++j)
                if (j != i && g(i, j) != 0 && comp[j] < 0) {
                    comp[j] = ncomp;
                    queue.push_back(j);
                }
        }
        ++ncomp;
    }
    std::vector<std::vector<int>> out(static_cast<size_t>(ncomp));
    for (int i = 0; i < r; ++i) out[static_cast<size_t>(comp[i])].push_back(i);
    return out;
}

ComponentForm component_form(const IMat& g, const std::vector<int>& idx, u64 q) {
    ComponentForm f;
    f.idx = idx;
    const int d = static_cast<int>(idx.size());
    f.qdiag.resize(static_cast<size_t>(d));
    f.cross.assign(static_cast<size_t>(d), std::vector<u64>(static_cast<size_t>(d), 0));
    auto modq = [q](i64 x) { return static_cast<u64>(((x % static_cast<i64>(q)) + static_cast<i64>(q)) % static_cast<i64>(q)); };
    for (int a = 0; a < d; ++a) {
        f.qdiag[static_cast<size_t>(a)] = modq(g(idx[static_cast<size_t>(a)], idx[static_cast<size_t>(a)]) / 2);
        for (int b = a + 1; b < d; ++b)
            f.cross[static_cast<size_t>(a)][static_cast<size_t>(b)] =
                modq(g(idx[static_cast<size_t>(a)], idx[static_cast<size_t>(b)]));
    }
    return f;
}

constexpr u64 HIST_CAP = u64(1) << 22;

double count_cost(i64 p, int n, const std::vector<std::vector<int>>& comps) {
    double q = std::pow(double(p), n);
    double cost = 0;
    for (const auto& c : comps) cost += std::pow(q, static_cast<double>(c.size()));
    cost += double(comps.size()) * q * q;   // convolutions
    return cost;
}

} // namespace

int stabilization_level(i64 p, i64 m) {
    if (m == 0) throw domain_error("w_p(0) is undefined");
    if (p == 2) return 1 + 2 * valuation(i64(2) * m, i64(2));
    return 1 + valuation(m, p);
}

std::vector<u64> count_histogram(const IntegralLattice& lat, i64 p, int n,
                                 u64 budget, bool parallel) {
    if (n == 0) return {1};
    const IMat& g = lat.gram();
    auto comps = gram_components(g);
    double cost = count_cost(p, n, comps);
    if (cost > double(budget))
        throw budget_error("residue count over budget", cost, double(budget));
    u64 q = static_cast<u64>(ipow(p, n));
    if (q > HIST_CAP)
        throw budget_error("residue histogram too large", double(q), double(HIST_CAP));

    std::vector<u64> acc(q, 0);   // histogram of the empty form: Q = 0
    acc[0] = 1;
    for (const auto& idx : comps) {
        auto h = component_histogram(component_form(g, idx, q), q, parallel);
        std::vector<u64> next(q, 0);
        for (u64 a = 0; a < q; ++a) {
            if (acc[a] == 0) continue;
            for (u64 b = 0; b < q; ++b) {
                if (h[b] == 0) continue;
                u64 c = a + b;
                if (c >= q) c -= q;
                next[c] += acc[a] * h[b];
            }
        }
        acc.swap(next);
    }
    return acc;
}

mpz_class count_brute(const IntegralLattice& lat, i64 p, int n, i64 m,
                      u64 budget, bool parallel) {
    if (n == 0) return 1;
    // overflow guard: totals must stay below 2^63
    if (n * lat.rank() * std::log2(double(p)) >= 62)
        throw budget_error("residue count exceeds 64-bit totals",
                           std::pow(double(p), n * lat.rank()), 9.2e18);
    u64 q = static_cast<u64>(ipow(p, n));
    auto hist = count_histogram(lat, p, n, budget, parallel);
    u64 mm = static_cast<u64>(((m % static_cast<i64>(q)) + static_cast<i64>(q)) % static_cast<i64>(q));
    return mpz_class(hist[mm]);
}

mpz_class count_brute_full(const IntegralLattice& lat, i64 p, int n, i64 m,
                           u64 budget, bool parallel) {
    if (n == 0) return 1;
    const int r = lat.rank();
    double cost = std::pow(double(p), double(n) * r);
    if (cost > double(budget))
        throw budget_error("full residue sweep over budget", cost, double(budget));
    u64 q = static_cast<u64>(ipow(p, n));
    std::vector<int> all(static_cast<size_t>(r));
    for (int i = 0; i < r; ++i) all[static_cast<size_t>(i)] = i;
    ComponentForm f = component_form(lat.gram(), all, q);
    u64 mm = static_cast<u64>(((m % static_cast<i64>(q)) + static_cast<i64>(q)) % static_cast<i64>(q));

    u64 total = 0;
#pragma omp parallel for schedule(static) reduction(+ : total) if (parallel)
    for (i64 v0 = 0; v0 < static_cast<i64>(q); ++v0) {
        std::vector<u64> v(static_cast<size_t>(r), 0);
        v[0] = static_cast<u64>(v0);
        if (r == 1) {
            if (qval_mod(f, v, q) == mm) ++total;
            continue;
        }
        while (true) {
            if (qval_mod(f, v, q) == mm) ++total;
            int pos = 1;
            while (pos < r && ++v[static_cast<size_t>(pos)] == q) {
                v[static_cast<size_t>(pos)] = 0;
                ++pos;
            }
            if (pos == r) break;
        }
    }
    return mpz_class(total);
}

TypeCounts classify_solutions(const IntegralLattice& lat, i64 p, int n, i64 m,
                              u64 budget, bool parallel) {
    if (n < 1) throw domain_error("classification needs n >= 1");
    const int r = lat.rank();
    double cost = std::pow(double(p), double(n) * r);
    if (cost > double(budget))
        throw budget_error("classification sweep over budget", cost, double(budget));
    auto js = jordan_decompose(lat, p, std::max(24, n + 4));
    auto tinv = js.transform_inverse_mod_p();
    // marks of coordinates that lie in nu = 0 blocks
    std::vector<bool> nu0(static_cast<size_t>(r), false);
    {
        int at = 0;
        for (const auto& blk : js.blocks) {
            for (int d = 0; d < blk.dim; ++d)
                nu0[static_cast<size_t>(at + d)] = (blk.nu == 0);
            at += blk.dim;
        }
    }
    u64 q = static_cast<u64>(ipow(p, n));
    std::vector<int> all(static_cast<size_t>(r));
    for (int i = 0; i < r; ++i) all[static_cast<size_t>(i)] = i;
    ComponentForm f = component_form(lat.gram(), all, q);
    u64 mm = static_cast<u64>(((m % static_cast<i64>(q)) + static_cast<i64>(q)) % static_cast<i64>(q));

    // type table over v mod p
    u64 pr = static_cast<u64>(ipow(p, r > 0 ? 1 : 0));
    (void)pr;
    double table_size = std::pow(double(p), r);
    std::vector<unsigned char> table;
    bool use_table = table_size <= double(HIST_CAP);
    auto type_of_modp = [&](const std::vector<u64>& vmodp) -> unsigned char {
        bool allzero = true;
        for (u64 c : vmodp)
            if (c % static_cast<u64>(p) != 0) { allzero = false; break; }
        if (allzero) return 2;  // zero type
        // Jordan coordinates mod p
        for (int i = 0; i < r; ++i) {
            if (!nu0[static_cast<size_t>(i)]) continue;
            u64 w = 0;
            for (int j = 0; j < r; ++j)
                w += static_cast<u64>(tinv[static_cast<size_t>(i)][static_cast<size_t>(j)]) * (vmodp[static_cast<size_t>(j)] % static_cast<u64>(p));
            if (w % static_cast<u64>(p) != 0) return 0;  // good
        }
        return 1;  // bad
    };
    if (use_table) {
        u64 sz = 1;
        for (int i = 0; i < r; ++i) sz *= static_cast<u64>(p);
        table.resize(sz);
        std::vector<u64> v(static_cast<size_t>(r), 0);
        u64 index = 0;
        while (true) {
            table[index] = type_of_modp(v);
            int pos = 0;
            ++index;
            while (pos < r && ++v[static_cast<size_t>(pos)] == static_cast<u64>(p)) {
                v[static_cast<size_t>(pos)] = 0;
                ++pos;
            }
            if (pos == r) break;
        }
    }

    u64 cg = 0, cb = 0, cz = 0;
#pragma omp parallel for schedule(static) reduction(+ : cg, cb, cz) if (parallel)
    for (i64 v0 = 0; v0 < static_cast<i64>(q); ++v0) {
        std::vector<u64> v(static_cast<size_t>(r), 0), vp(static_cast<size_t>(r), 0);
        v[0] = static_cast<u64>(v0);
        auto consume = [&]() {
            if (qval_mod(f, v, q) != mm) return;
            unsigned char t;
            if (use_table) {
                u64 index = 0;
                for (int i = r - 1; i >= 0; --i)
                    index = index * static_cast<u64>(p) + v[static_cast<size_t>(i)] % static_cast<u64>(p);
                t = table[index];
            } else {
                for (int i = 0; i < r; ++i) vp[static_cast<size_t>(i)] = v[static_cast<size_t>(i)] % static_cast<u64>(p);
                t = type_of_modp(vp);
            }
            if (t == 0) ++cg;
            else if (t == 1) ++cb;
            else ++cz;
        };
        if (r == 1) {
            consume();
            continue;
        }
        while (true) {
            consume();
            int pos = 1;
            while (pos < r && ++v[static_cast<size_t>(pos)] == q) {
                v[static_cast<size_t>(pos)] = 0;
                ++pos;
            }
            if (pos == r) break;
        }
    }
    return TypeCounts{cg, cb, cz};
}

// ---- the recursion ----------------------------------------------------

namespace {

// number of solutions of a nondegenerate diagonal form in s variables over
// F_p with unit product delta (classical character count)
mpz_class diagonal_count_fp(i64 p, int s, i64 delta, i64 b) {
    mpz_class ps1 = zpow(p, s - 1);
    i64 bb = ((b % p) + p) % p;
    if (s % 2 == 1) {
        i64 sign = ((s - 1) / 2) % 2 == 0 ? 1 : -1;
        int chi = kronecker(sign * bb % p * delta % p, p);
        return ps1 + zpow(p, (s - 1) / 2) * chi;
    }
    i64 sign = (s / 2) % 2 == 0 ? 1 : -1;
    int chi = kronecker(sign * delta % p, p);
    mpz_class v = (bb == 0) ? mpz_class(p - 1) : mpz_class(-1);
    return ps1 + v * zpow(p, (s - 2) / 2) * chi;
}

// good-type solution count mod p^n for the form described by js, by
// exhaustive classification on the assembled block Gram (p = 2, n <= 3).
mpz_class good_count_brute(const JordanSplitting& js, i64 m, int n) {
    const int r = js.rank();
    const i64 p = js.prime;
    IMat g = js.assembled_gram_mod(n + 1);
    u64 q = static_cast<u64>(ipow(p, n));
    std::vector<int> all(static_cast<size_t>(r));
    for (int i = 0; i < r; ++i) all[static_cast<size_t>(i)] = i;
    ComponentForm f = component_form(g, all, q);
    u64 mm = static_cast<u64>(((m % static_cast<i64>(q)) + static_cast<i64>(q)) % static_cast<i64>(q));
    // block coordinates are the assembled coordinates: nu = 0 spans known
    std::vector<bool> nu0(static_cast<size_t>(r), false);
    int at = 0;
    for (const auto& blk : js.blocks) {
        for (int d = 0; d < blk.dim; ++d) nu0[static_cast<size_t>(at + d)] = (blk.nu == 0);
        at += blk.dim;
    }
    u64 total = 0;
    std::vector<u64> v(static_cast<size_t>(r), 0);
    while (true) {
        if (qval_mod(f, v, q) == mm) {
            bool good = false;
            for (int i = 0; i < r; ++i)
                if (nu0[static_cast<size_t>(i)] && v[static_cast<size_t>(i)] % static_cast<u64>(p) != 0) { good = true; break; }
            if (good) ++total;
        }
        int pos = 0;
        while (pos < r && ++v[static_cast<size_t>(pos)] == q) {
            v[static_cast<size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == r) break;
    }
    return mpz_class(total);
}

// mu^good(m, delta) with delta = 1 (p odd) or 3 (p = 2); stable for n >= delta.
mpq_class mu_good_delta(const JordanSplitting& js, i64 m) {
    const i64 p = js.prime;
    const int r = js.rank();
    if (js.dim_of_scale(0) == 0) return 0;
    if (p == 2) {
        mpz_class num = good_count_brute(js, m, 3);
        mpq_class out(num, zpow(2, 3 * (r - 1)));
        out.canonicalize();
        return out;
    }
    int s0 = js.dim_of_scale(0);  // p odd: every block is one-dimensional
    i64 delta = 1;
    for (const auto& blk : js.blocks) {
        if (blk.nu != 0) continue;
        mpz_class u = blk.g00 / 2;
        i64 um = mpz_class(u % p).get_si();
        delta = delta * um % p;
    }
    int d1 = r - s0;
    mpz_class inner = diagonal_count_fp(p, s0, delta, ((m % p) + p) % p);
    if (m % p == 0) inner -= 1;
    mpz_class num = zpow(p, d1) * inner;
    mpq_class out(num, zpow(p, r - 1));
    out.canonicalize();
    return out;
}

mpq_class mu_good_at(const JordanSplitting& js, i64 m, int n) {
    const i64 p = js.prime;
    int delta = (p == 2) ? 3 : 1;
    if (n >= delta) return mu_good_delta(js, m);
    // p = 2, n in {1, 2}
    mpz_class num = good_count_brute(js, m, n);
    mpq_class out(num, zpow(p, static_cast<i64>(n) * (js.rank() - 1)));
    out.canonicalize();
    return out;
}

struct RecursionCtx {
    const JordanSplitting* q;
    JordanSplitting qdual;
};

mpq_class mu_rec(const RecursionCtx& ctx, i64 m, int n,
                 mpq_class* gout, mpq_class* bout, mpq_class* zout) {
    const JordanSplitting& js = *ctx.q;
    const i64 p = js.prime;
    const int r = js.rank();
    if (n == 0) {
        if (gout) { *gout = 0; *bout = 0; *zout = 0; }
        return 1;
    }
    mpq_class good = mu_good_at(js, m, n);

    mpq_class bad = 0;
    int d1 = js.dim_of_scale(1);
    if (d1 > 0 && m % p == 0) {
        if (n == 1) {
            bad = mpq_class(zpow(p, d1) - 1, zpow(p, r - 1));
            bad.canonicalize();
        } else {
            int d0 = js.dim_of_scale(0);
            mpq_class scale(zpow(p, 1), zpow(p, d0));   // p^{1-d0}
            scale.canonicalize();
            bad = scale * mu_good_at(ctx.qdual, m / p, n - 1);
        }
    }

    mpq_class zero = 0;
    if (n == 1) {
        if (m % p == 0) {
            zero = mpq_class(1, zpow(p, r - 1));
            zero.canonicalize();
        }
    } else if (m % (p * p) == 0) {
        mpq_class scale(zpow(p, 2), zpow(p, r));        // p^{2-r}
        scale.canonicalize();
        zero = scale * mu_rec(ctx, m / (p * p), n - 2, nullptr, nullptr, nullptr);
    }

    if (gout) { *gout = good; *bout = bad; *zout = zero; }
    return good + bad + zero;
}

} // namespace

mpq_class mu_p_recursive(const JordanSplitting& js, i64 m, int n,
                         mpq_class* good_out, mpq_class* bad_out,
                         mpq_class* zero_out) {
    for (const auto& blk : js.blocks)
        if (blk.nu > 1)
            throw domain_error("density recursion needs Jordan valuations <= 1");
    RecursionCtx ctx{&js, js.dual_form()};
    return mu_rec(ctx, m, n, good_out, bad_out, zero_out);
}

DensityValue mu_p(const IntegralLattice& lat, i64 p, i64 m, int n,
                  bool want_parts, u64 budget) {
    DensityValue out;
    out.p = p;
    out.m = m;
    out.n = n;
    if (n == 0) {
        out.value = 1;
        return out;
    }
    auto js = jordan_decompose(lat, p, std::max(24, n + 4));
    bool recursion_ok = true;
    for (const auto& blk : js.blocks)
        if (blk.nu > 1) recursion_ok = false;

    if (recursion_ok) {
        if (want_parts) {
            out.has_parts = true;
            out.value = mu_p_recursive(js, m, n, &out.good, &out.bad, &out.zero);
        } else {
            out.value = mu_p_recursive(js, m, n);
        }
        return out;
    }
    // non-maximal at p: brute force only
    mpz_class count = count_brute(lat, p, n, m, budget);
    out.value = mpq_class(count, zpow(p, static_cast<i64>(n) * (lat.rank() - 1)));
    out.value.canonicalize();
    if (want_parts) {
        auto t = classify_solutions(lat, p, n, m, budget);
        mpz_class den = zpow(p, static_cast<i64>(n) * (lat.rank() - 1));
        out.good = mpq_class(mpz_class(t.good), den);
        out.bad = mpq_class(mpz_class(t.bad), den);
        out.zero = mpq_class(mpz_class(t.zero), den);
        out.good.canonicalize();
        out.bad.canonicalize();
        out.zero.canonicalize();
        out.has_parts = true;
    }
    return out;
}

LocalLimit mu_p_limit(const IntegralLattice& lat, i64 p, i64 m, u64 budget) {
    if (m == 0) throw domain_error("local limit needs m != 0");
    LocalLimit out;
    out.p = p;
    out.m = m;
    out.w = stabilization_level(p, m);
    auto js = jordan_decompose(lat, p, std::max(24, out.w + 4));
    bool recursion_ok = true;
    for (const auto& blk : js.blocks)
        if (blk.nu > 1) recursion_ok = false;
    if (recursion_ok) {
        out.value = mu_p_recursive(js, m, out.w);
        return out;
    }
    // brute-force fallback at the largest budget-feasible level >= 1
    int n = out.w;
    while (n > 1 && std::pow(double(p), double(n) * lat.rank()) > double(budget)) --n;
    out.w = n;
    mpz_class count = count_brute(lat, p, n, m, budget);
    out.value = mpq_class(count, zpow(p, static_cast<i64>(n) * (lat.rank() - 1)));
    out.value.canonicalize();
    return out;
}

bool representable_in_search(const IntegralLattice& lat, i64 m, int box) {
    const int r = lat.rank();
    // full box search with small radius
    std::vector<i64> v(static_cast<size_t>(r), -box);
    while (true) {
        i64 q = quad_i64(lat.gram(), v.data());
        if (q == m) return true;
        int pos = 0;
        while (pos < r && ++v[static_cast<size_t>(pos)] > box) {
            v[static_cast<size_t>(pos)] = -box;
            ++pos;
        }
        if (pos == r) break;
    }
    // two-coordinate sweeps catch hyperbolic-type representations a e_i + b e_j
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            if (i == j) continue;
            for (i64 a = -box; a <= box; ++a)
                for (i64 b = -std::abs(m) - 1; b <= std::abs(m) + 1; ++b) {
                    std::vector<i64> w(static_cast<size_t>(r), 0);
                    w[static_cast<size_t>(i)] = a;
                    w[static_cast<size_t>(j)] = b;
                    if (quad_i64(lat.gram(), w.data()) == m) return true;
                }
        }
    return false;
}

mpq_class check_count_identity(const IntegralLattice& lat, i64 p, i64 m) {
    if (!representable_in_search(lat, m))
        throw domain_error("m not certified representable by Q");
    int w = stabilization_level(p, m);
    auto js = jordan_decompose(lat, p, std::max(24, w + 4));
    mpq_class muw = mu_p_recursive(js, m, w);
    if (muw == 0) throw domain_error("mu_p(m, w_p) = 0 on representable m");
    mpq_class sum = 0;
    for (int n = 0; n < w; ++n) sum += mu_p_recursive(js, m, n);
    mpq_class dev = mpq_class(w) - sum / muw;
    return abs(dev);
}

SingularSeries singular_series(const IntegralLattice& lat, i64 m, i64 P_trunc,
                               double tail_constant, u64 budget) {
    if (m == 0) throw domain_error("singular series needs m != 0");
    mpz_class support = 2 * abs(mpz_class(m)) * lat.disc_abs();
    // refuse truncation below the support of 2 m det(L)
    {
        mpz_class s = support;
        for (i64 p : primes_up_to(P_trunc))
            while (mpz_divisible_ui_p(s.get_mpz_t(), static_cast<unsigned long>(p))) s /= p;
        if (s > 1)
            throw domain_error("P_trunc below the prime support of 2 m det(L)");
    }
    mpz_class det_support = 2 * lat.disc_abs();
    for (i64 p : primes_up_to(1000)) {
        if (!mpz_divisible_ui_p(det_support.get_mpz_t(), static_cast<unsigned long>(p))) continue;
        if (!is_maximal_at(lat, p))
            throw domain_error("singular series requires maximality at p | 2 det(L)");
    }

    auto plist = primes_up_to(P_trunc);
    SingularSeries out;
    out.factors.resize(plist.size());
    const int np = static_cast<int>(plist.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < np; ++i) {
        auto lim = mu_p_limit(lat, plist[static_cast<size_t>(i)], m, budget);
        out.factors[static_cast<size_t>(i)] = {plist[static_cast<size_t>(i)], lim.value};
    }
    double v = 1.0;
    for (const auto& [p, f] : out.factors) v *= f.get_d();
    out.value = v;
    // sum_{p > P} p^{-3/2} <= 2.6 / (sqrt(P) log P) via pi(t) <= 1.26 t/log t
    double tail_sum = 2.6 / (std::sqrt(double(P_trunc))
                             * std::max(1.0, std::log(double(P_trunc))));
    out.error_bound = std::expm1(tail_constant * tail_sum);
    return out;
}

} // namespace qlat
