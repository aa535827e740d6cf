#include "qlat/enumerate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

namespace qlat {

namespace {

double unit_ball_volume(int r) {
    return std::pow(M_PI, r / 2.0) / std::tgamma(r / 2.0 + 1.0);
}

} // namespace

EllipsoidSearch::EllipsoidSearch(const RMat& bilinear_gram, double c, u64 budget)
    : r_(static_cast<int>(bilinear_gram.rows())), c_(c) {
    RMat a = 0.5 * bilinear_gram;
    Eigen::LLT<RMat> llt(a);
    if (llt.info() != Eigen::Success)
        throw input_error("enumeration form is not positive definite");
    RMat R = llt.matrixU();

    rd2_.resize(r_);
    mu_.assign(static_cast<size_t>(r_) * r_, 0.0);
    for (int i = 0; i < r_; ++i) {
        rd2_[i] = R(i, i) * R(i, i);
        for (int j = i + 1; j < r_; ++j) mu_[static_cast<size_t>(i) * r_ + j] = R(i, j) / R(i, i);
    }

    double det_a = a.determinant();
    double vol = unit_ball_volume(r_) * std::pow(std::max(c, 0.0), r_ / 2.0)
                 / std::sqrt(det_a);
    // crude surface allowance so thin ellipsoids are not under-estimated
    double est = vol + 2.0 * r_ * std::pow(vol, (r_ - 1.0) / r_) + 16.0;
    estimate_ = static_cast<u64>(std::min(est, 1.8e19));
    if (est > double(budget))
        throw budget_error("enumeration ellipsoid too large", est, double(budget));

    double wtop = std::sqrt(c_ / rd2_[r_ - 1]);
    top_lo_ = static_cast<i64>(std::ceil(-wtop - 1e-12));
    top_hi_ = static_cast<i64>(std::floor(wtop + 1e-12));
    if (top_hi_ < top_lo_) { top_lo_ = 0; top_hi_ = -1; }
}

std::optional<std::pair<int, int>> find_u_block(const IMat& gram) {
    const int r = static_cast<int>(gram.rows());
    for (int i = 0; i < r; ++i) {
        if (gram(i, i) != 0) continue;
        for (int j = i + 1; j < r; ++j) {
            if (gram(j, j) != 0 || gram(i, j) != 1) continue;
            bool clean = true;
            for (int k = 0; k < r && clean; ++k) {
                if (k == i || k == j) continue;
                if (gram(i, k) != 0 || gram(j, k) != 0) clean = false;
            }
            if (clean) return std::make_pair(i, j);
        }
    }
    return std::nullopt;
}

RepresentationSweep::RepresentationSweep(const IntegralLattice& lat,
                                         const PeriodPoint& pt, i64 m, double T,
                                         u64 budget, bool force_solid)
    : lat_(&lat), pt_(&pt), m_(m),
      tcap_(T * double(m) * (1.0 + 1e-12) + 1e-9), maj_(lat, pt) {
    cbound_ = double(m <= 0 ? 0 : m) * (1.0 + 2.0 * T) * (1.0 + 1e-12) + 1e-9;
    const int r = lat.rank();
    std::optional<std::pair<int, int>> ub;
    if (!force_solid && r >= 3) ub = find_u_block(lat.gram());
    if (!ub) {
        es_ = std::make_unique<EllipsoidSearch>(maj_.gram_real(), cbound_, budget);
        return;
    }
    fast_ = true;
    ui_ = ub->first;
    uj_ = ub->second;
    for (int k = 0; k < r; ++k)
        if (k != ui_ && k != uj_) rest_.push_back(k);
    const int nrest = r - 2;
    grest_ = IMat(nrest, nrest);
    for (int a = 0; a < nrest; ++a)
        for (int b = 0; b < nrest; ++b)
            grest_(a, b) = lat.gram()(rest_[static_cast<size_t>(a)], rest_[static_cast<size_t>(b)]);

    RMat A = 0.5 * maj_.gram_real();
    a11_ = A(ui_, ui_);
    a12_ = A(ui_, uj_);
    a22_ = A(uj_, uj_);
    sdet_ = a11_ * a22_ - a12_ * a12_;
    across_.resize(2, nrest);
    RMat arest(nrest, nrest);
    for (int a = 0; a < nrest; ++a) {
        across_(0, a) = A(ui_, rest_[static_cast<size_t>(a)]);
        across_(1, a) = A(uj_, rest_[static_cast<size_t>(a)]);
        for (int b = 0; b < nrest; ++b)
            arest(a, b) = A(rest_[static_cast<size_t>(a)], rest_[static_cast<size_t>(b)]);
    }
    Eigen::Matrix2d a2;
    a2 << a11_, a12_, a12_, a22_;
    RMat schur = arest - across_.transpose() * a2.inverse() * across_;

    if (m > 0) {
        es_ = std::make_unique<EllipsoidSearch>(2.0 * schur, cbound_, budget);
        // smallest-prime-factor table covering |R| = |m - Q_rest(prefix)|
        RMat sinv = schur.inverse();
        double max_qrest = 0;
        std::vector<double> box(static_cast<size_t>(nrest));
        for (int a = 0; a < nrest; ++a)
            box[static_cast<size_t>(a)] = std::sqrt(std::max(0.0, cbound_ * sinv(a, a)));
        for (int a = 0; a < nrest; ++a)
            for (int b = 0; b < nrest; ++b)
                max_qrest += 0.5 * std::abs(double(grest_(a, b)))
                             * box[static_cast<size_t>(a)] * box[static_cast<size_t>(b)];
        double need = double(m) + max_qrest + 2;
        if (need > 2.5e8)
            throw budget_error("divisor table for the hyperbolic fast path",
                               need, 2.5e8);
        u64 nspf = static_cast<u64>(need) + 1;
        spf_.assign(nspf, 0);
        for (u64 i = 2; i < nspf; ++i) {
            if (spf_[i] != 0) continue;
            for (u64 j = i; j < nspf; j += i)
                if (spf_[j] == 0) spf_[j] = i;
        }
    } else {
        es_ = std::make_unique<EllipsoidSearch>(2.0 * schur, 0.0, budget);
    }
}

int RepresentationSweep::slots() const { return m_ <= 0 ? 0 : es_->slots(); }

u64 RepresentationSweep::estimate() const { return es_->estimate(); }

i64 quad_i64(const IMat& gram, const i64* v) {
    const int r = static_cast<int>(gram.rows());
    __int128 s = 0;
    for (int i = 0; i < r; ++i) {
        __int128 row = 0;
        for (int j = 0; j < r; ++j) row += static_cast<__int128>(gram(i, j)) * v[j];
        s += row * v[i];
    }
    s /= 2;
    if (s > std::numeric_limits<i64>::max() || s < std::numeric_limits<i64>::min())
        throw precision_error("quadratic value exceeds 64 bits");
    return static_cast<i64>(s);
}

std::vector<IVec> enumerate_representations(const IntegralLattice& lat,
                                            const PeriodPoint& pt, i64 m, double T,
                                            u64 budget, bool parallel) {
    const int r = lat.rank();
    if (m <= 0) return {};
    RepresentationSweep sweep(lat, pt, m, T, budget);
    std::vector<std::vector<IVec>> per_slot(static_cast<size_t>(sweep.slots()));
    sweep.run(parallel, [&](int slot, const i64* v, double) {
        per_slot[static_cast<size_t>(slot)].push_back(Eigen::Map<const IVec>(v, r));
    });
    std::vector<IVec> out;
    for (auto& chunk : per_slot)
        for (auto& v : chunk) out.push_back(std::move(v));
    std::sort(out.begin(), out.end(), [](const IVec& a, const IVec& b) {
        for (int i = 0; i < a.size(); ++i)
            if (a[i] != b[i]) return a[i] < b[i];
        return false;
    });
    return out;
}

IMat lll_reduce(const IntegralLattice& lat, double delta) {
    const int r = lat.rank();
    IMat u = IMat::Identity(r, r);
    // exact Gram of the current basis, refreshed after every column op
    auto gram_of = [&](const IMat& basis) {
        RMat g(r, r);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                __int128 s = 0;
                for (int k = 0; k < r; ++k)
                    for (int l = 0; l < r; ++l)
                        s += static_cast<__int128>(basis(k, i)) * lat.gram()(k, l) * basis(l, j);
                g(i, j) = double(s) / 2.0;   // quadratic normalization
            }
        return g;
    };

    int iter_cap = 20000;
    while (iter_cap-- > 0) {
        RMat g = gram_of(u);
        // Gram-Schmidt coefficients from the Gram matrix
        RMat mu = RMat::Zero(r, r);
        RVec bstar(r);
        for (int i = 0; i < r; ++i) {
            double bi = g(i, i);
            for (int j = 0; j < i; ++j) {
                double m = g(i, j);
                for (int k = 0; k < j; ++k) m -= mu(i, k) * mu(j, k) * bstar(k);
                mu(i, j) = m / bstar(j);
                bi -= mu(i, j) * mu(i, j) * bstar(j);
            }
            bstar(i) = bi;
            if (!(bstar(i) > 0)) return u;   // numerically degenerate: stop reducing
        }
        bool changed = false;
        // size reduction
        for (int i = 1; i < r && !changed; ++i)
            for (int j = i - 1; j >= 0; --j) {
                double q = std::round(mu(i, j));
                if (std::abs(q) > 0.5 && std::abs(q) < 9e15) {
                    u.col(i) -= static_cast<i64>(q) * u.col(j);
                    changed = true;
                    break;
                }
            }
        if (changed) continue;
        // Lovasz condition
        bool swapped = false;
        for (int i = 0; i + 1 < r; ++i) {
            double lhs = bstar(i + 1) + mu(i + 1, i) * mu(i + 1, i) * bstar(i);
            if (lhs < delta * bstar(i)) {
                u.col(i).swap(u.col(i + 1));
                swapped = true;
                break;
            }
        }
        if (!swapped) break;
    }
    return u;
}

Minima successive_minima(const IntegralLattice& lat, u64 budget) {
    if (!lat.is_positive_definite())
        throw domain_error("successive minima need a positive definite lattice");
    const int r = lat.rank();
    IMat u = lll_reduce(lat);
    IntegralLattice red = lat.sublattice(u);

    // every minimum is realized within the max reduced-basis norm
    mpz_class bound = 0;
    for (int i = 0; i < r; ++i) {
        IVec e = IVec::Zero(r);
        e[i] = 1;
        bound = std::max(bound, red.quad(e));
    }
    if (!bound.fits_slong_p())
        throw precision_error("minima search radius exceeds 64 bits");
    i64 c = bound.get_si();

    std::vector<std::pair<i64, IVec>> found;
    visit_short_vectors(red, c, budget, false, [&](int, const i64* v, i64 q) {
        if (q == 0) return;
        found.emplace_back(q, Eigen::Map<const IVec>(v, r));
    });
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        for (int i = 0; i < a.second.size(); ++i)
            if (a.second[i] != b.second[i]) return a.second[i] < b.second[i];
        return false;
    });

    // greedy independent selection, exact rank via fraction-free elimination
    Minima out;
    out.a.push_back(1.0);
    std::vector<IVec> chosen;
    auto independent = [&](const IVec& cand) {
        std::vector<std::vector<mpq_class>> m;
        for (const auto& v : chosen) {
            std::vector<mpq_class> row(r);
            for (int i = 0; i < r; ++i) row[i] = mpq_class(v[i]);
            m.push_back(std::move(row));
        }
        std::vector<mpq_class> row(r);
        for (int i = 0; i < r; ++i) row[i] = mpq_class(cand[i]);
        m.push_back(std::move(row));
        int rows = static_cast<int>(m.size());
        int rank = 0;
        for (int col = 0; col < r && rank < rows; ++col) {
            int piv = -1;
            for (int i = rank; i < rows; ++i)
                if (m[i][col] != 0) { piv = i; break; }
            if (piv < 0) continue;
            std::swap(m[rank], m[piv]);
            for (int i = rank + 1; i < rows; ++i) {
                if (m[i][col] == 0) continue;
                mpq_class f = m[i][col] / m[rank][col];
                for (int j = col; j < r; ++j) m[i][j] -= f * m[rank][j];
            }
            ++rank;
        }
        return rank == rows;
    };

    for (const auto& [q, v] : found) {
        if (static_cast<int>(chosen.size()) == r) break;
        if (!independent(v)) continue;
        chosen.push_back(v);
        out.mu_sq.push_back(mpz_class(q));
        out.mu.push_back(std::sqrt(double(q)));
        out.a.push_back(out.a.back() * out.mu.back());
    }
    if (static_cast<int>(chosen.size()) != r)
        throw error("internal: minima search radius missed a basis vector");

    // report vectors in the original coordinates
    for (const auto& v : chosen) {
        IVec w = IVec::Zero(r);
        for (int i = 0; i < r; ++i)
            for (int k = 0; k < r; ++k) w[k] += u(k, i) * v[i];
        out.vectors.push_back(w);
    }
    return out;
}

} // namespace qlat
