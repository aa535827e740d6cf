#include "qlat/jordan.hpp"

#include "qlat/errors.hpp"

#include <algorithm>

namespace qlat {

namespace {

using ZMat = std::vector<std::vector<mpz_class>>;

ZMat zmat(int r, int c) { return ZMat(r, std::vector<mpz_class>(c, 0)); }

mpz_class mod_reduce(const mpz_class& a, const mpz_class& mod) {
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t());
    return r;
}

int val_or_prec(const mpz_class& a, i64 p, int prec) {
    if (a == 0) return prec;
    int v = valuation(a, p);
    return std::min(v, prec);
}

mpz_class inv_mod(const mpz_class& a, const mpz_class& mod) {
    mpz_class r;
    if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t()))
        throw precision_error("non-invertible pivot in p-adic elimination");
    return r;
}

// B = T^t G T reduced mod p^prec
ZMat conjugate_mod(const IMat& g, const ZMat& t, const mpz_class& mod) {
    const int r = static_cast<int>(g.rows());
    ZMat b = zmat(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j) {
            mpz_class s = 0;
            for (int k = 0; k < r; ++k)
                for (int l = 0; l < r; ++l)
                    s += t[k][i] * g(k, l) * t[l][j];
            b[i][j] = b[j][i] = mod_reduce(s, mod);
        }
    return b;
}

} // namespace

mpz_class JordanBlock::quad_unit(const std::vector<mpz_class>& v) const {
    if (dim == 1) return g00 * v[0] * v[0] / 2;
    return (g00 * v[0] * v[0] + 2 * g01 * v[0] * v[1] + g11 * v[1] * v[1]) / 2;
}

int JordanSplitting::rank() const {
    int d = 0;
    for (const auto& b : blocks) d += b.dim;
    return d;
}

int JordanSplitting::s0() const {
    int n = 0;
    for (const auto& b : blocks) n += (b.nu == 0);
    return n;
}

int JordanSplitting::s1() const {
    int n = 0;
    for (const auto& b : blocks) n += (b.nu == 1);
    return n;
}

int JordanSplitting::dim_of_scale(int nu) const {
    int d = 0;
    for (const auto& b : blocks)
        if (b.nu == nu) d += b.dim;
    return d;
}

std::vector<std::vector<mpz_class>> JordanSplitting::assembled_gram() const {
    const int r = rank();
    auto g = zmat(r, r);
    int at = 0;
    for (const auto& b : blocks) {
        mpz_class scale = zpow(prime, b.nu);
        g[at][at] = scale * b.g00;
        if (b.dim == 2) {
            g[at][at + 1] = g[at + 1][at] = scale * b.g01;
            g[at + 1][at + 1] = scale * b.g11;
        }
        at += b.dim;
    }
    return g;
}

IMat JordanSplitting::assembled_gram_mod(int k) const {
    const int r = rank();
    mpz_class mod = zpow(prime, k);
    auto g = assembled_gram();
    IMat out = IMat::Zero(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            mpz_class e = mod_reduce(g[i][j], mod);
            // keep the diagonal even after reduction
            if (i == j && e % 2 != 0) e += mod;
            if (!e.fits_slong_p())
                throw precision_error("assembled Gram entry exceeds 64 bits");
            out(i, j) = e.get_si();
        }
    return out;
}

JordanSplitting JordanSplitting::dual_form() const {
    JordanSplitting d = *this;
    for (auto& b : d.blocks) {
        if (b.nu > 1) throw domain_error("auxiliary form needs all valuations <= 1");
        b.nu = 1 - b.nu;
    }
    // keep ascending-scale ordering
    std::stable_sort(d.blocks.begin(), d.blocks.end(),
                     [](const JordanBlock& a, const JordanBlock& b) { return a.nu < b.nu; });
    d.transform.clear();  // no meaning for the auxiliary form
    return d;
}

std::vector<std::vector<i64>> JordanSplitting::transform_inverse_mod_p() const {
    const int r = rank();
    const i64 p = prime;
    std::vector<std::vector<i64>> a(r, std::vector<i64>(2 * r, 0));
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            mpz_class e = mod_reduce(transform[i][j], mpz_class(p));
            a[i][j] = e.get_si();
        }
        a[i][r + i] = 1;
    }
    auto inv_p = [p](i64 x) {
        i64 r0 = 1, b = x % p, e = p - 2;
        while (e) { if (e & 1) r0 = r0 * b % p; b = b * b % p; e >>= 1; }
        return r0;
    };
    for (int c = 0; c < r; ++c) {
        int piv = -1;
        for (int i = c; i < r; ++i)
            if (a[i][c] % p != 0) { piv = i; break; }
        if (piv < 0) throw precision_error("Jordan transform not invertible mod p");
        std::swap(a[c], a[piv]);
        i64 inv = inv_p(a[c][c]);
        for (int j = 0; j < 2 * r; ++j) a[c][j] = a[c][j] * inv % p;
        for (int i = 0; i < r; ++i) {
            if (i == c || a[i][c] == 0) continue;
            i64 f = a[i][c];
            for (int j = 0; j < 2 * r; ++j)
                a[i][j] = ((a[i][j] - f * a[c][j]) % p + p) % p;
        }
    }
    std::vector<std::vector<i64>> out(r, std::vector<i64>(r));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) out[i][j] = a[i][r + j];
    return out;
}

JordanSplitting jordan_decompose(const IntegralLattice& lat, i64 p, int precision) {
    if (!is_prime(p)) throw domain_error("p must be prime");
    if (precision < 1) throw domain_error("precision must be >= 1");
    const int r = lat.rank();
    const mpz_class mod = zpow(p, precision);
    const IMat& g = lat.gram();

    JordanSplitting js;
    js.prime = p;
    js.precision = precision;
    js.transform = zmat(r, r);
    for (int i = 0; i < r; ++i) js.transform[i][i] = 1;

    ZMat b = conjugate_mod(g, js.transform, mod);

    auto col_swap = [&](int i, int j) {
        for (int k = 0; k < r; ++k) std::swap(js.transform[k][i], js.transform[k][j]);
    };
    auto col_add = [&](int dst, int src, const mpz_class& c) {
        for (int k = 0; k < r; ++k)
            js.transform[k][dst] = mod_reduce(js.transform[k][dst] + c * js.transform[k][src], mod);
    };
    auto refresh = [&]() { b = conjugate_mod(g, js.transform, mod); };

    int pos = 0;
    while (pos < r) {
        // minimal valuation in the trailing block; diagonal wins ties
        int best_val = precision + 1, di = -1, oi = -1, oj = -1;
        for (int i = pos; i < r; ++i) {
            int v = val_or_prec(b[i][i], p, precision);
            if (v < best_val) { best_val = v; di = i; oi = oj = -1; }
        }
        for (int i = pos; i < r; ++i)
            for (int j = i + 1; j < r; ++j) {
                int v = val_or_prec(b[i][j], p, precision);
                if (v < best_val) { best_val = v; oi = i; oj = j; di = -1; }
            }
        if (best_val >= precision)
            throw precision_error("pivot valuation reaches working precision");

        if (p != 2) {
            if (di < 0) {
                // move the minimum onto the diagonal: e_i <- e_i + e_j
                col_add(oi, oj, 1);
                refresh();
                di = oi;
            }
            col_swap(pos, di);
            refresh();
            int nu = val_or_prec(b[pos][pos], p, precision);
            mpz_class pnu = zpow(p, nu);
            mpz_class unit = b[pos][pos] / pnu;
            mpz_class uinv = inv_mod(unit, mod);
            for (int k = pos + 1; k < r; ++k) {
                if (b[pos][k] == 0) continue;
                if (val_or_prec(b[pos][k], p, precision) < nu)
                    throw precision_error("pivot does not divide its row");
                mpz_class c = mod_reduce((b[pos][k] / pnu) * uinv, mod);
                col_add(k, pos, -c);
            }
            refresh();
            JordanBlock blk;
            blk.nu = nu;
            blk.dim = 1;
            blk.g00 = b[pos][pos] / pnu;   // bilinear entry 2u
            js.blocks.push_back(blk);
            ++pos;
            continue;
        }

        // p == 2
        if (di >= 0) {
            col_swap(pos, di);
            refresh();
            int nu_bil = val_or_prec(b[pos][pos], p, precision);   // >= 1, diagonal even
            mpz_class pnu = zpow(p, nu_bil);
            mpz_class unit = b[pos][pos] / pnu;                    // odd
            mpz_class uinv = inv_mod(unit, mod);
            for (int k = pos + 1; k < r; ++k) {
                if (b[pos][k] == 0) continue;
                if (val_or_prec(b[pos][k], p, precision) < nu_bil)
                    throw precision_error("2-adic pivot does not divide its row");
                mpz_class c = mod_reduce((b[pos][k] / pnu) * uinv, mod);
                col_add(k, pos, -c);
            }
            refresh();
            JordanBlock blk;
            blk.nu = nu_bil - 1;            // quadratic scale: Q(e) = 2^{nu-1} * unit
            blk.dim = 1;
            blk.g00 = 2 * (b[pos][pos] / pnu);
            js.blocks.push_back(blk);
            ++pos;
        } else {
            col_swap(pos, oi);      // oi >= pos, oj > oi, so oj is untouched
            col_swap(pos + 1, oj);
            refresh();
            int nu = best_val;              // = val(b[pos][pos+1])
            mpz_class pnu = zpow(p, nu);
            mpz_class d00 = b[pos][pos], d01 = b[pos][pos + 1], d11 = b[pos + 1][pos + 1];
            mpz_class det = d00 * d11 - d01 * d01;      // valuation exactly 2 nu
            mpz_class p2nu = pnu * pnu;
            if (val_or_prec(det, p, precision) != 2 * nu)
                throw precision_error("unexpected determinant valuation in 2-adic block");
            mpz_class detu = det / p2nu;
            mpz_class dinv = inv_mod(detu, mod);
            for (int k = pos + 2; k < r; ++k) {
                mpz_class r0 = b[pos][k], r1 = b[pos + 1][k];
                if (r0 == 0 && r1 == 0) continue;
                if (val_or_prec(r0, p, precision) < nu || val_or_prec(r1, p, precision) < nu)
                    throw precision_error("2-adic block does not divide its rows");
                mpz_class alpha = mod_reduce((d11 / pnu * (r0 / pnu) - d01 / pnu * (r1 / pnu)) * dinv, mod);
                mpz_class beta  = mod_reduce((d00 / pnu * (r1 / pnu) - d01 / pnu * (r0 / pnu)) * dinv, mod);
                col_add(k, pos, -alpha);
                col_add(k, pos + 1, -beta);
            }
            refresh();
            JordanBlock blk;
            blk.nu = nu;
            blk.dim = 2;
            blk.g00 = b[pos][pos] / pnu;
            blk.g01 = b[pos][pos + 1] / pnu;
            blk.g11 = b[pos + 1][pos + 1] / pnu;
            js.blocks.push_back(blk);
            pos += 2;
        }
    }

    // ascending scale order, carrying the basis columns along
    std::vector<int> starts;
    int at = 0;
    for (const auto& blk : js.blocks) { starts.push_back(at); at += blk.dim; }
    std::vector<int> order(js.blocks.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return js.blocks[static_cast<size_t>(x)].nu < js.blocks[static_cast<size_t>(y)].nu;
    });
    ZMat t2 = zmat(r, r);
    std::vector<JordanBlock> sorted;
    int dst = 0;
    for (int idx : order) {
        const auto& blk = js.blocks[static_cast<size_t>(idx)];
        for (int d = 0; d < blk.dim; ++d, ++dst)
            for (int k = 0; k < r; ++k)
                t2[k][dst] = js.transform[k][starts[static_cast<size_t>(idx)] + d];
        sorted.push_back(blk);
    }
    js.transform = std::move(t2);
    js.blocks = std::move(sorted);
    return js;
}

bool is_maximal_at(const IntegralLattice& lat, i64 p, i64 p_part_cap) {
    auto js = jordan_decompose(lat, p);
    for (const auto& blk : js.blocks)
        if (blk.nu > 1) return false;

    auto dg = discriminant_group(lat);
    // p-parts of the cyclic factors
    std::vector<int> pexp;
    std::vector<std::vector<mpq_class>> gens;
    for (size_t i = 0; i < dg.elementary_divisors.size(); ++i) {
        int a = valuation(dg.elementary_divisors[i], p);
        if (a == 0) continue;
        mpz_class cof = dg.elementary_divisors[i] / zpow(p, a);
        std::vector<mpq_class> w(dg.representatives[i].size());
        for (size_t k = 0; k < w.size(); ++k) w[k] = dg.representatives[i][k] * mpq_class(cof);
        pexp.push_back(a);
        gens.push_back(std::move(w));
    }
    if (gens.empty()) return true;

    mpz_class size = 1;
    for (int a : pexp) size *= zpow(p, a);
    if (size > p_part_cap)
        throw unsupported_size_error("discriminant p-part has " + size.get_str()
                                     + " elements, cap is " + std::to_string(p_part_cap));

    const int s = static_cast<int>(gens.size());
    const int r = lat.rank();
    // pairwise Q-values of the generators
    std::vector<std::vector<mpq_class>> pairing(s, std::vector<mpq_class>(s, 0));
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) {
            mpq_class v = 0;
            for (int a = 0; a < r; ++a)
                for (int c = 0; c < r; ++c)
                    v += gens[i][a] * mpq_class(lat.gram()(a, c)) * gens[j][c];
            pairing[i][j] = v;   // bilinear (w_i . w_j)
        }

    std::vector<i64> counter(s, 0), limit(s);
    for (int i = 0; i < s; ++i) limit[i] = ipow(p, pexp[i]);
    while (true) {
        // advance odometer
        int d = 0;
        while (d < s && ++counter[d] == limit[d]) { counter[d] = 0; ++d; }
        if (d == s) break;
        // q(sum c_i w_i) = sum c_i^2 Q(w_i) + sum_{i<j} c_i c_j (w_i.w_j) mod Z
        mpq_class q = 0;
        for (int i = 0; i < s; ++i) {
            if (counter[i] == 0) continue;
            q += mpq_class(counter[i]) * mpq_class(counter[i]) * pairing[i][i] / 2;
            for (int j = i + 1; j < s; ++j)
                if (counter[j] != 0)
                    q += mpq_class(counter[i]) * mpq_class(counter[j]) * pairing[i][j];
        }
        if (q.get_den() == 1) return false;   // isotropic element found
    }
    return true;
}

bool is_maximal_everywhere(const IntegralLattice& lat, i64 p_part_cap) {
    mpz_class d = 2 * lat.disc_abs();
    for (i64 p : primes_up_to(1000)) {
        if (!mpz_divisible_ui_p(d.get_mpz_t(), static_cast<unsigned long>(p))) continue;
        if (!is_maximal_at(lat, p, p_part_cap)) return false;
        while (mpz_divisible_ui_p(d.get_mpz_t(), static_cast<unsigned long>(p))) d /= p;
    }
    if (d > 1)
        throw unsupported_size_error("discriminant has a prime factor above 1000");
    return true;
}

} // namespace qlat
