#include "qlat/lattice.hpp"

#include "qlat/errors.hpp"

#include <algorithm>

namespace qlat {

namespace {

using QMat = std::vector<std::vector<mpq_class>>;
using ZMat = std::vector<std::vector<mpz_class>>;

QMat to_qmat(const IMat& a) {
    QMat m(a.rows(), std::vector<mpq_class>(a.cols()));
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            m[i][j] = mpq_class(a(i, j));
    return m;
}

// Exact inertia of a symmetric rational matrix: symmetric elimination with
// diagonal pivots, hyperbolic 2x2 blocks when the diagonal vanishes.
std::pair<int, int> exact_signature(QMat a) {
    const int n = static_cast<int>(a.size());
    std::vector<bool> done(n, false);
    int pos = 0, neg = 0;
    int remaining = n;
    while (remaining > 0) {
        int piv = -1;
        for (int i = 0; i < n; ++i)
            if (!done[i] && a[i][i] != 0) { piv = i; break; }
        if (piv >= 0) {
            if (a[piv][piv] > 0) ++pos; else ++neg;
            for (int j = 0; j < n; ++j) {
                if (done[j] || j == piv || a[piv][j] == 0) continue;
                mpq_class f = a[piv][j] / a[piv][piv];
                for (int k = 0; k < n; ++k) {
                    if (done[k] || k == piv) continue;
                    a[j][k] -= f * a[piv][k];
                }
            }
            for (int k = 0; k < n; ++k) { a[piv][k] = 0; a[k][piv] = 0; }
            done[piv] = true;
            --remaining;
            continue;
        }
        // zero diagonal everywhere: locate an off-diagonal entry
        int bi = -1, bj = -1;
        for (int i = 0; i < n && bi < 0; ++i) {
            if (done[i]) continue;
            for (int j = i + 1; j < n; ++j)
                if (!done[j] && a[i][j] != 0) { bi = i; bj = j; break; }
        }
        if (bi < 0) break;  // zero block: degenerate, caller checks det
        ++pos; ++neg;
        mpq_class s = a[bi][bj];
        for (int k = 0; k < n; ++k) {
            if (done[k] || k == bi || k == bj) continue;
            mpq_class ci = a[k][bi], cj = a[k][bj];
            for (int l = 0; l < n; ++l) {
                if (done[l] || l == bi || l == bj) continue;
                a[k][l] -= (ci * a[bj][l] + cj * a[bi][l]) / s;
            }
        }
        for (int k = 0; k < n; ++k) {
            a[bi][k] = a[k][bi] = 0;
            a[bj][k] = a[k][bj] = 0;
        }
        done[bi] = done[bj] = true;
        remaining -= 2;
    }
    return {pos, neg};
}

ZMat identity_z(int n) {
    ZMat m(n, std::vector<mpz_class>(n, 0));
    for (int i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

} // namespace

mpz_class integer_determinant(const IMat& m) {
    // Bareiss fraction-free elimination
    const int n = static_cast<int>(m.rows());
    if (n != m.cols()) throw input_error("determinant of non-square matrix");
    ZMat a(n, std::vector<mpz_class>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[i][j] = m(i, j);
    mpz_class prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (a[k][k] == 0) {
            int swap = -1;
            for (int i = k + 1; i < n; ++i)
                if (a[i][k] != 0) { swap = i; break; }
            if (swap < 0) return 0;
            std::swap(a[k], a[swap]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

IntegralLattice::IntegralLattice(IMat gram) : gram_(std::move(gram)) {
    r_ = static_cast<int>(gram_.rows());
    if (r_ <= 0 || gram_.cols() != r_)
        throw input_error("Gram matrix must be square and nonempty");
    for (int i = 0; i < r_; ++i) {
        if (gram_(i, i) % 2 != 0)
            throw input_error("lattice is not even: odd diagonal Gram entry");
        for (int j = 0; j < i; ++j)
            if (gram_(i, j) != gram_(j, i))
                throw input_error("Gram matrix is not symmetric");
    }
    det_ = integer_determinant(gram_);
    if (det_ == 0) throw input_error("singular Gram matrix");
    sig_ = exact_signature(to_qmat(gram_));
    if (sig_.first + sig_.second != r_)
        throw input_error("degenerate Gram matrix");
}

mpz_class IntegralLattice::quad(const IVec& v) const {
    mpz_class s = 0;
    for (int i = 0; i < r_; ++i) {
        s += mpz_class(gram_(i, i)) * v[i] * v[i];
        for (int j = i + 1; j < r_; ++j)
            s += 2 * mpz_class(gram_(i, j)) * v[i] * v[j];
    }
    return s / 2;
}

mpz_class IntegralLattice::pair(const IVec& v, const IVec& w) const {
    mpz_class s = 0;
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < r_; ++j)
            s += mpz_class(gram_(i, j)) * v[i] * w[j];
    return s;
}

double IntegralLattice::quad(const RVec& v) const {
    return 0.5 * v.dot(gram_real() * v);
}

double IntegralLattice::pair(const RVec& v, const RVec& w) const {
    return v.dot(gram_real() * w);
}

RMat IntegralLattice::gram_real() const {
    return gram_.cast<double>();
}

IntegralLattice IntegralLattice::direct_sum(const IntegralLattice& other) const {
    int n = r_ + other.r_;
    IMat g = IMat::Zero(n, n);
    g.topLeftCorner(r_, r_) = gram_;
    g.bottomRightCorner(other.r_, other.r_) = other.gram_;
    return IntegralLattice(g);
}

IntegralLattice IntegralLattice::rescale(i64 c) const {
    IMat g = gram_;
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < r_; ++j) {
            i64 v = g(i, j);
            if (v != 0 && (c > (i64(1) << 61) / std::abs(v)))
                throw precision_error("rescale overflows 64-bit Gram");
            g(i, j) = v * c;
        }
    return IntegralLattice(g);
}

IntegralLattice IntegralLattice::sublattice(const IMat& basis) const {
    if (basis.rows() != r_ || basis.cols() != r_)
        throw input_error("sublattice basis must be square of full rank");
    ZMat g(r_, std::vector<mpz_class>(r_, 0));
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < r_; ++j) {
            mpz_class s = 0;
            for (int k = 0; k < r_; ++k)
                for (int l = 0; l < r_; ++l)
                    s += mpz_class(basis(k, i)) * gram_(k, l) * basis(l, j);
            g[i][j] = s;
        }
    IMat out(r_, r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < r_; ++j) {
            if (!g[i][j].fits_slong_p())
                throw precision_error("sublattice Gram overflows 64-bit entries");
            out(i, j) = g[i][j].get_si();
        }
    return IntegralLattice(out);
}

IntegralLattice hyperbolic_plane() {
    IMat g(2, 2);
    g << 0, 1, 1, 0;
    return IntegralLattice(g);
}

IntegralLattice scaled_line(i64 q) {
    IMat g(1, 1);
    g << 2 * q;
    return IntegralLattice(g);
}

IntegralLattice unit_cube(int n) {
    IMat g = IMat::Zero(n, n);
    for (int i = 0; i < n; ++i) g(i, i) = 2;
    return IntegralLattice(g);
}

SmithForm smith_normal_form(const IMat& a) {
    const int rows = static_cast<int>(a.rows());
    const int cols = static_cast<int>(a.cols());
    ZMat m(rows, std::vector<mpz_class>(cols));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m[i][j] = a(i, j);
    ZMat u = identity_z(rows), v = identity_z(cols);

    auto row_op = [&](int dst, int src, const mpz_class& f) {
        for (int j = 0; j < cols; ++j) m[dst][j] -= f * m[src][j];
        for (int j = 0; j < rows; ++j) u[dst][j] -= f * u[src][j];
    };
    auto col_op = [&](int dst, int src, const mpz_class& f) {
        for (int i = 0; i < rows; ++i) m[i][dst] -= f * m[i][src];
        for (int i = 0; i < cols; ++i) v[i][dst] -= f * v[i][src];
    };
    auto row_swap = [&](int i, int j) { std::swap(m[i], m[j]); std::swap(u[i], u[j]); };
    auto col_swap = [&](int i, int j) {
        for (int k = 0; k < rows; ++k) std::swap(m[k][i], m[k][j]);
        for (int k = 0; k < cols; ++k) std::swap(v[k][i], v[k][j]);
    };

    int t = 0;
    const int steps = std::min(rows, cols);
    while (t < steps) {
        // locate smallest nonzero entry in the trailing block
        int bi = -1, bj = -1;
        for (int i = t; i < rows; ++i)
            for (int j = t; j < cols; ++j)
                if (m[i][j] != 0 &&
                    (bi < 0 || abs(m[i][j]) < abs(m[bi][bj]))) { bi = i; bj = j; }
        if (bi < 0) break;
        row_swap(t, bi);
        col_swap(t, bj);
        bool clean = true;
        for (int i = t + 1; i < rows; ++i) {
            if (m[i][t] == 0) continue;
            mpz_class f = m[i][t] / m[t][t];
            row_op(i, t, f);
            if (m[i][t] != 0) clean = false;
        }
        for (int j = t + 1; j < cols; ++j) {
            if (m[t][j] == 0) continue;
            mpz_class f = m[t][j] / m[t][t];
            col_op(j, t, f);
            if (m[t][j] != 0) clean = false;
        }
        if (!clean) continue;  // remainder left somewhere, repeat with smaller pivot
        // divisibility: pivot must divide the whole trailing block
        bool divides = true;
        for (int i = t + 1; i < rows && divides; ++i)
            for (int j = t + 1; j < cols && divides; ++j)
                if (m[i][j] % m[t][t] != 0) {
                    for (int k = 0; k < cols; ++k) m[t][k] += m[i][k];
                    for (int k = 0; k < rows; ++k) u[t][k] += u[i][k];
                    divides = false;
                }
        if (!divides) continue;
        if (m[t][t] < 0) {
            for (int k = 0; k < cols; ++k) m[t][k] = -m[t][k];
            for (int k = 0; k < rows; ++k) u[t][k] = -u[t][k];
        }
        ++t;
    }
    SmithForm out;
    out.U = std::move(u);
    out.V = std::move(v);
    out.diag.resize(steps);
    for (int i = 0; i < steps; ++i) out.diag[i] = m[i][i];
    return out;
}

DiscriminantGroup discriminant_group(const IntegralLattice& lat) {
    const int r = lat.rank();
    SmithForm snf = smith_normal_form(lat.gram());

    // U^{-1} by exact Gaussian elimination (U is unimodular)
    QMat aug(r, std::vector<mpq_class>(2 * r, 0));
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) aug[i][j] = mpq_class(snf.U[i][j]);
        aug[i][r + i] = 1;
    }
    for (int c = 0; c < r; ++c) {
        int piv = -1;
        for (int i = c; i < r; ++i)
            if (aug[i][c] != 0) { piv = i; break; }
        if (piv < 0) throw input_error("singular transform in Smith form");
        std::swap(aug[c], aug[piv]);
        mpq_class d = aug[c][c];
        for (int j = 0; j < 2 * r; ++j) aug[c][j] /= d;
        for (int i = 0; i < r; ++i) {
            if (i == c || aug[i][c] == 0) continue;
            mpq_class f = aug[i][c];
            for (int j = 0; j < 2 * r; ++j) aug[i][j] -= f * aug[c][j];
        }
    }

    // dual generators v_i = G^{-1} U^{-1} e_i; solve G x = Uinv_col_i exactly
    DiscriminantGroup out;
    out.order = lat.disc_abs();
    QMat gq = to_qmat(lat.gram());
    for (int i = 0; i < r; ++i) {
        if (abs(snf.diag[i]) <= 1) continue;
        // right-hand side
        std::vector<mpq_class> rhs(r);
        for (int k = 0; k < r; ++k) rhs[k] = aug[k][r + i];
        // solve G x = rhs by Gaussian elimination each time (r is tiny)
        QMat g = gq;
        std::vector<mpq_class> x = rhs;
        std::vector<int> perm(r);
        for (int c = 0; c < r; ++c) {
            int piv = -1;
            for (int k = c; k < r; ++k)
                if (g[k][c] != 0) { piv = k; break; }
            std::swap(g[c], g[piv]);
            std::swap(x[c], x[piv]);
            for (int k = 0; k < r; ++k) {
                if (k == c || g[k][c] == 0) continue;
                mpq_class f = g[k][c] / g[c][c];
                for (int j = c; j < r; ++j) g[k][j] -= f * g[c][j];
                x[k] -= f * x[c];
            }
        }
        std::vector<mpq_class> v(r);
        for (int c = 0; c < r; ++c) v[c] = x[c] / g[c][c];

        mpq_class q = 0;
        for (int a = 0; a < r; ++a)
            for (int bcol = 0; bcol < r; ++bcol)
                q += v[a] * mpq_class(lat.gram()(a, bcol)) * v[bcol];
        q /= 2;
        mpz_class fl;
        mpz_fdiv_q(fl.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
        q -= fl;

        out.elementary_divisors.push_back(abs(snf.diag[i]));
        out.representatives.push_back(std::move(v));
        out.q_values.push_back(q);
    }
    return out;
}

std::vector<std::vector<mpz_class>> column_hnf(
    const std::vector<std::vector<mpz_class>>& cols_in, int rows) {
    std::vector<std::vector<mpz_class>> cols = cols_in;
    const int nc = static_cast<int>(cols.size());
    int placed = 0;
    for (int row = 0; row < rows && placed < nc; ++row) {
        // gcd-reduce entries of this row across unplaced columns
        while (true) {
            int nz1 = -1, nz2 = -1;
            for (int c = placed; c < nc; ++c)
                if (cols[c][row] != 0) { if (nz1 < 0) nz1 = c; else { nz2 = c; break; } }
            if (nz1 < 0 || nz2 < 0) break;
            // reduce the larger by the smaller
            if (abs(cols[nz1][row]) < abs(cols[nz2][row])) std::swap(nz1, nz2);
            mpz_class f = cols[nz1][row] / cols[nz2][row];
            for (int i = 0; i < rows; ++i) cols[nz1][i] -= f * cols[nz2][i];
        }
        int nz = -1;
        for (int c = placed; c < nc; ++c)
            if (cols[c][row] != 0) { nz = c; break; }
        if (nz < 0) continue;
        std::swap(cols[placed], cols[nz]);
        if (cols[placed][row] < 0)
            for (int i = 0; i < rows; ++i) cols[placed][i] = -cols[placed][i];
        ++placed;
    }
    cols.resize(placed);
    // reduce off-pivot entries so the basis is canonical
    std::vector<int> pivot_row(placed);
    for (int c = 0; c < placed; ++c) {
        int row = 0;
        while (cols[c][row] == 0) ++row;
        pivot_row[c] = row;
    }
    for (int c = 0; c < placed; ++c)
        for (int k = 0; k < c; ++k) {
            int row = pivot_row[c];
            mpz_class f;
            mpz_fdiv_q(f.get_mpz_t(), cols[k][row].get_mpz_t(),
                       cols[c][row].get_mpz_t());
            if (f != 0)
                for (int i = 0; i < rows; ++i) cols[k][i] -= f * cols[c][i];
        }
    return cols;
}

} // namespace qlat
