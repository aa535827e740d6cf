#include "qlat/chain.hpp"

#include "qlat/density.hpp"
#include "qlat/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qlat {

ChainModel::ChainModel(IntegralLattice base_, i64 p_, int e_, int n0_,
                       int precision_, i64 aut_,
                       std::vector<std::vector<mpz_class>> gens)
    : base(std::move(base_)), p(p_), e(e_), n0(n0_), precision(precision_),
      aut(aut_), lambda_rank(static_cast<int>(gens.size())),
      lambda_gens(std::move(gens)) {
    if (!is_prime(p)) throw input_error("chain model: p must be prime");
    if (e < 1 || n0 < 1 || precision < 1 || aut < 1)
        throw input_error("chain model: e, n0, precision, aut must be >= 1");
    if (!base.is_positive_definite())
        throw input_error("chain model: base lattice must be positive definite");
    const int r = base.rank();
    if (lambda_rank > r)
        throw input_error("chain model: lambda rank exceeds base rank");
    for (const auto& g : lambda_gens)
        if (static_cast<int>(g.size()) != r)
            throw input_error("chain model: generator has wrong length");

    // saturation: generators must stay independent mod p
    if (lambda_rank > 0) {
        std::vector<std::vector<i64>> m(static_cast<size_t>(lambda_rank),
                                        std::vector<i64>(static_cast<size_t>(r), 0));
        for (int i = 0; i < lambda_rank; ++i)
            for (int j = 0; j < r; ++j) {
                mpz_class e0 = lambda_gens[static_cast<size_t>(i)][static_cast<size_t>(j)] % p;
                if (e0 < 0) e0 += p;
                m[static_cast<size_t>(i)][static_cast<size_t>(j)] = e0.get_si();
            }
        int rank = 0;
        for (int col = 0; col < r && rank < lambda_rank; ++col) {
            int piv = -1;
            for (int i = rank; i < lambda_rank; ++i)
                if (m[static_cast<size_t>(i)][static_cast<size_t>(col)] % p != 0) { piv = i; break; }
            if (piv < 0) continue;
            std::swap(m[static_cast<size_t>(rank)], m[static_cast<size_t>(piv)]);
            // normalize pivot row
            i64 inv = 1, base_v = m[static_cast<size_t>(rank)][static_cast<size_t>(col)] % p, ee = p - 2;
            while (ee) { if (ee & 1) inv = inv * base_v % p; base_v = base_v * base_v % p; ee >>= 1; }
            for (int j = 0; j < r; ++j)
                m[static_cast<size_t>(rank)][static_cast<size_t>(j)] =
                    m[static_cast<size_t>(rank)][static_cast<size_t>(j)] * inv % p;
            for (int i = 0; i < lambda_rank; ++i) {
                if (i == rank) continue;
                i64 f = m[static_cast<size_t>(i)][static_cast<size_t>(col)] % p;
                if (f == 0) continue;
                for (int j = 0; j < r; ++j)
                    m[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                        ((m[static_cast<size_t>(i)][static_cast<size_t>(j)]
                          - f * m[static_cast<size_t>(rank)][static_cast<size_t>(j)]) % p + p) % p;
            }
            ++rank;
        }
        if (rank != lambda_rank)
            throw input_error("chain model: Lambda generators not saturated mod p");
    }
}

int ChainModel::depth_k(int n) const {
    if (n < n0) throw domain_error("chain level below n0");
    return (n - n0 + e - 1) / e;
}

ChainLevel chain_lattice(const ChainModel& model, int n) {
    const int r = model.rank();
    ChainLevel out;
    out.n = n;
    out.k = model.depth_k(n);
    if (out.k > model.precision)
        throw precision_error("chain depth " + std::to_string(out.k)
                              + " exceeds p-adic precision "
                              + std::to_string(model.precision));
    if (out.k == 0) {
        out.basis = IMat::Identity(r, r);
        out.index = 1;
        out.lat = model.base;
        return out;
    }
    mpz_class pk = zpow(model.p, out.k);
    std::vector<std::vector<mpz_class>> cols;
    for (const auto& g : model.lambda_gens) {
        std::vector<mpz_class> c(static_cast<size_t>(r));
        for (int i = 0; i < r; ++i) {
            mpz_class e0 = g[static_cast<size_t>(i)] % pk;
            if (e0 < 0) e0 += pk;
            c[static_cast<size_t>(i)] = e0;
        }
        cols.push_back(std::move(c));
    }
    for (int i = 0; i < r; ++i) {
        std::vector<mpz_class> c(static_cast<size_t>(r), 0);
        c[static_cast<size_t>(i)] = pk;
        cols.push_back(std::move(c));
    }
    auto basis = column_hnf(cols, r);
    if (static_cast<int>(basis.size()) != r)
        throw error("internal: chain basis is not full rank");
    out.basis = IMat::Zero(r, r);
    out.index = 1;
    for (int j = 0; j < r; ++j) {
        for (int i = 0; i < r; ++i) {
            const mpz_class& v = basis[static_cast<size_t>(j)][static_cast<size_t>(i)];
            if (!v.fits_slong_p())
                throw precision_error("chain basis entry exceeds 64 bits");
            out.basis(i, j) = v.get_si();
        }
    }
    // index = product of the pivot entries
    mpz_class det = integer_determinant(out.basis);
    out.index = abs(det);
    out.lat = model.base.sublattice(out.basis);
    return out;
}

MinimaProfile minima_profile(const ChainModel& model, int n, u64 budget) {
    MinimaProfile out;
    out.n = n;
    auto lvl = chain_lattice(model, n);
    out.minima = successive_minima(lvl.lat, budget);
    return out;
}

namespace {

// #{v in L : 0 < Q(v) <= bound} and #{v : Q(v) = m} in one sweep
struct LevelCounts {
    u64 upto = 0;    // nonzero vectors with Q <= max(m, probe)
    u64 exact = 0;
};

LevelCounts level_counts(const IntegralLattice& lat, i64 m, u64 budget) {
    u64 upto = 0, exact = 0;
#ifdef _OPENMP
#endif
    visit_short_vectors(lat, m, budget, false, [&](int, const i64*, i64 q) {
        if (q == 0) return;
        ++upto;
        if (q == m) ++exact;
    });
    return LevelCounts{upto, exact};
}

} // namespace

mpq_class local_intersection(const ChainModel& model, i64 m, u64 budget) {
    if (m <= 0) throw domain_error("local intersection needs m > 0");
    mpz_class total = 0;
    int consecutive_empty = 0;
    for (int n = model.n0;; ++n) {
        if (model.depth_k(n) > model.precision)
            throw nongeneric_error("local intersection did not terminate within "
                                   "precision (operational genericity violated?)");
        auto lvl = chain_lattice(model, n);
        auto counts = level_counts(lvl.lat, m, budget);
        total += counts.exact;
        if (counts.upto == 0)
            ++consecutive_empty;
        else
            consecutive_empty = 0;
        if (consecutive_empty >= 3) break;
    }
    mpq_class out(total, mpz_class(model.aut));
    out.canonicalize();
    return out;
}

mpz_class summed_counts(const ChainModel& model, i64 D, i64 X, int a,
                        int b_level, u64 budget) {
    if (a >= b_level) throw domain_error("summed counts need a < b_level");
    if (a < model.n0) throw domain_error("summed counts start below n0");
    if (D < 1 || X < 1) throw domain_error("summed counts need D, X >= 1");
    mpz_class total = 0;
    for (int n = a; n <= b_level; ++n) {
        auto lvl = chain_lattice(model, n);
        u64 cnt = 0;
        visit_short_vectors(lvl.lat, 2 * X - 1, budget, false,
                            [&](int, const i64*, i64 q) {
            if (q < X || q >= 2 * X) return;
            if (q % D != 0) return;
            if (!is_perfect_square(mpz_class(q / D))) return;
            ++cnt;
        });
        total += cnt;
    }
    return total;
}

mpz_class total_short_count(const ChainModel& model, i64 X, u64 budget) {
    if (X < 1) throw domain_error("total short count needs X >= 1");
    mpz_class total = 0;
    int consecutive_empty = 0;
    for (int n = model.n0;; ++n) {
        if (model.depth_k(n) > model.precision)
            throw nongeneric_error("short-count sum did not terminate within precision");
        auto lvl = chain_lattice(model, n);
        u64 cnt = 0;
        visit_short_vectors(lvl.lat, X - 1, budget, false,
                            [&](int, const i64*, i64 q) { if (q > 0) ++cnt; });
        total += cnt;
        if (cnt == 0)
            ++consecutive_empty;
        else
            consecutive_empty = 0;
        if (consecutive_empty >= 3) break;
    }
    return total;
}

double mu_infinity_posdef(const IntegralLattice& lat) {
    if (!lat.is_positive_definite())
        throw domain_error("singular integral needs a positive definite form");
    const int r = lat.rank();
    // vol{x : Q(x) <= t} = V_r t^{r/2} / sqrt(det(G/2)); derivative at t = 1
    double det_a = lat.gram_real().determinant() / std::pow(2.0, r);
    double vr = std::pow(M_PI, r / 2.0) / std::tgamma(r / 2.0 + 1.0);
    return (r / 2.0) * vr / std::sqrt(det_a);
}

DensityDiscBound density_disc_bound(const IntegralLattice& lat_posdef, i64 p,
                                    i64 m, u64 budget) {
    if (lat_posdef.rank() < 5)
        throw domain_error("density-discriminant bound needs rank >= 5");
    DensityDiscBound out;
    double disc = lat_posdef.disc_abs().get_d();
    out.rhs = std::pow(double(p), lat_posdef.rank()) / std::pow(disc, 3.0 / 20.0);
    auto lim = mu_p_limit(lat_posdef, p, m, budget);
    out.lhs = mu_infinity_posdef(lat_posdef) * lim.value.get_d();
    return out;
}

int verify_generic(const ChainModel& model, i64 H, u64 budget) {
    const int r = model.rank();
    // Q(v) <= (1/2) H^2 sum |G_ij| bounds Q over the height-H box
    mpz_class cap = 0;
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            cap += abs(mpz_class(model.base.gram()(i, j)));
    cap = cap * H * H / 2 + 1;
    if (!cap.fits_slong_p())
        throw unsupported_size_error("height cap exceeds 64-bit Q range");
    i64 qcap = cap.get_si();

    for (int K = 1; K <= model.precision; ++K) {
        int n = model.n0 + K * model.e;
        ChainLevel lvl;
        try {
            lvl = chain_lattice(model, n);
        } catch (const precision_error&) {
            break;
        }
        bool found_small = false;
        bool over_budget = false;
        try {
            auto u = lll_reduce(lvl.lat);
            IntegralLattice red = lvl.lat.sublattice(u);
            // coordinates in the reduced basis; map back for the height test
            IMat full = lvl.basis * u;
            visit_short_vectors(red, qcap, budget, false,
                                [&](int, const i64* v, i64 q) {
                if (q == 0) return;
                for (int i = 0; i < r; ++i) {
                    i64 coord = 0;
                    for (int j = 0; j < r; ++j) coord += full(i, j) * v[j];
                    if (std::abs(coord) > H) return;
                }
                found_small = true;
            });
        } catch (const budget_error&) {
            over_budget = true;
        }
        if (over_budget) continue;      // denser level, try deeper
        if (!found_small) return K;     // certified at this level
        if (K == model.precision)
            throw nongeneric_error("height-" + std::to_string(H)
                                   + " vector lies in Lambda at full precision");
    }
    throw unsupported_size_error("genericity certificate did not fit the budget");
}

} // namespace qlat
