#pragma once

#include "kform.hpp"

namespace calib {

// Wedge product that maps degree overflow to the zero form; internal complexes
// routinely hit Lambda^{k} with k > 2n, which is the zero space.
inline KForm wedge_z(const KForm& a, const KForm& b)
{
    if (a.ambient_dim() != b.ambient_dim()) throw std::invalid_argument("wedge: ambient dimension mismatch");
    const int dim = a.ambient_dim();
    const int k = a.degree(), l = b.degree();
    KForm r(dim, k + l);
    if (k + l > dim) return r;
    const auto ia = multi_indices(dim, k);
    const auto ib = multi_indices(dim, l);
    MultiIndex merged;
    for (std::size_t p = 0; p < ia.size(); ++p) {
        if (a[static_cast<int>(p)] == cplx(0)) continue;
        for (std::size_t q = 0; q < ib.size(); ++q) {
            if (b[static_cast<int>(q)] == cplx(0)) continue;
            const int sgn = merge_sign(ia[p], ib[q], merged);
            if (sgn == 0) continue;
            r[lex_rank(merged, dim)] += cplx(sgn, 0) * a[static_cast<int>(p)] * b[static_cast<int>(q)];
        }
    }
    return r;
}

inline KForm wedge(const KForm& a, const KForm& b)
{
    if (a.degree() + b.degree() > a.ambient_dim()) throw std::invalid_argument("wedge: degree overflow");
    return wedge_z(a, b);
}

inline KForm wedge_power(const KForm& a, int p)
{
    KForm r(a.ambient_dim(), 0);
    r[0] = cplx(1, 0);
    for (int i = 0; i < p; ++i) r = wedge_z(r, a);
    return r;
}

// Interior product with the antiderivation convention i_v(theta) = theta(v).
inline KForm interior(const Vector& v, const KForm& a)
{
    if (a.degree() < 1) throw std::invalid_argument("interior: degree-0 input");
    if (v.dim() != a.ambient_dim()) throw std::invalid_argument("interior: dimension mismatch");
    const int dim = a.ambient_dim();
    const int k = a.degree();
    KForm r(dim, k - 1);
    const auto idx = multi_indices(dim, k);
    for (std::size_t p = 0; p < idx.size(); ++p) {
        const cplx coeff = a[static_cast<int>(p)];
        if (coeff == cplx(0)) continue;
        MultiIndex sub(k - 1);
        for (int l = 0; l < k; ++l) {
            const cplx vl = v[idx[p][l]];
            if (vl == cplx(0)) continue;
            for (int m = 0, t = 0; m < k; ++m)
                if (m != l) sub[t++] = idx[p][m];
            const double sgn = (l % 2 == 0) ? 1.0 : -1.0;
            r[lex_rank(sub, dim)] += sgn * vl * coeff;
        }
    }
    return r;
}

inline KForm conjugate(const KForm& a)
{
    KForm r(a.ambient_dim(), a.degree());
    for (int i = 0; i < a.size(); ++i) r[i] = std::conj(a[i]);
    return r;
}

// Pullback along a linear map: (J^* a)(w_1,...,w_k) = a(J w_1,...,J w_k).
// J has ambient_dim rows; the result lives on a space of J.cols() dimensions.
// Also serves as restriction to a subspace spanned by the columns of J.
template <class T>
KForm pullback(const Mat<T>& j, const KForm& a)
{
    if (j.rows() != a.ambient_dim()) throw std::invalid_argument("pullback: row count must match ambient dimension");
    const int m = j.cols();
    const int k = a.degree();
    KForm r(m, k);
    if (k > m) return r; // zero space on the target
    const auto src = multi_indices(a.ambient_dim(), k);
    const auto dst = multi_indices(m, k);
    // minor determinants det(J[I, K]) by Gaussian elimination on k x k blocks
    for (std::size_t q = 0; q < dst.size(); ++q) {
        cplx acc(0);
        for (std::size_t p = 0; p < src.size(); ++p) {
            const cplx coeff = a[static_cast<int>(p)];
            if (coeff == cplx(0)) continue;
            MatC minor(k, k);
            for (int r0 = 0; r0 < k; ++r0)
                for (int c0 = 0; c0 < k; ++c0) minor(r0, c0) = cplx(j(src[p][r0], dst[q][c0]));
            // determinant
            cplx det(1);
            for (int col = 0; col < k; ++col) {
                int piv = col;
                double best = std::abs(minor(col, col));
                for (int i2 = col + 1; i2 < k; ++i2)
                    if (std::abs(minor(i2, col)) > best) {
                        best = std::abs(minor(i2, col));
                        piv = i2;
                    }
                if (best == 0.0) {
                    det = cplx(0);
                    break;
                }
                if (piv != col) {
                    for (int j2 = col; j2 < k; ++j2) std::swap(minor(col, j2), minor(piv, j2));
                    det = -det;
                }
                det *= minor(col, col);
                for (int i2 = col + 1; i2 < k; ++i2) {
                    const cplx f = minor(i2, col) / minor(col, col);
                    for (int j2 = col; j2 < k; ++j2) minor(i2, j2) -= f * minor(col, j2);
                }
            }
            acc += coeff * det;
        }
        r[static_cast<int>(q)] = acc;
    }
    return r;
}

inline KForm restrict_form(const MatD& inclusion, const KForm& a)
{
    if (a.degree() > inclusion.cols()) throw std::invalid_argument("restrict: degree exceeds subspace dimension");
    if (rank(inclusion) < inclusion.cols()) throw std::invalid_argument("restrict: rank-deficient inclusion");
    return pullback(inclusion, a);
}

// Differential of the GL(V)-action on forms:
// (rho_xi a)(v_1,...,v_k) = -sum_j a(v_1,...,xi v_j,...,v_k).
// On covectors this is theta -> -theta(xi .), extended as a derivation.
inline KForm gl_act(const MatD& xi, const KForm& a)
{
    const int dim = a.ambient_dim();
    if (xi.rows() != dim || xi.cols() != dim) throw std::invalid_argument("gl_act: shape mismatch");
    const int k = a.degree();
    KForm r(dim, k);
    if (k == 0) return r;
    const auto idx = multi_indices(dim, k);
    MultiIndex tmp(k);
    for (std::size_t p = 0; p < idx.size(); ++p) {
        const cplx coeff = a[static_cast<int>(p)];
        if (coeff == cplx(0)) continue;
        for (int l = 0; l < k; ++l) {
            const int il = idx[p][l];
            for (int j = 0; j < dim; ++j) {
                const double x = xi(il, j);
                if (x == 0.0) continue;
                tmp = idx[p];
                tmp[l] = j;
                MultiIndex sorted = tmp;
                const int sgn = sort_sign(sorted);
                if (sgn == 0) continue;
                r[lex_rank(sorted, dim)] += cplx(-x * sgn, 0) * coeff;
            }
        }
    }
    return r;
}

// Hodge star for the metric g: a ^ star(b) = <a,b>_g vol_g for equal degrees,
// extended complex-bilinearly; vol_g = orientation_sign * sqrt(det g) e^{0...2n-1}.
inline KForm hodge_star(const Metric& g, int orientation_sign, const KForm& a)
{
    if (!g.positive_definite) throw std::invalid_argument("hodge_star: metric not positive definite");
    const int dim = a.ambient_dim();
    const int k = a.degree();
    const auto idx = multi_indices(dim, k);
    const int nk = static_cast<int>(idx.size());
    // Gram matrix of the k-form inner product: <e^I, e^J> = det(g^{-1}[I, J])
    std::vector<cplx> ma(static_cast<std::size_t>(nk), cplx(0));
    for (int i = 0; i < nk; ++i) {
        for (int j = 0; j < nk; ++j) {
            if (a[j] == cplx(0)) continue;
            MatD minor(k, k);
            for (int r0 = 0; r0 < k; ++r0)
                for (int c0 = 0; c0 < k; ++c0) minor(r0, c0) = g.inv(idx[i][r0], idx[j][c0]);
            double det = 1.0;
            for (int col = 0; col < k; ++col) {
                int piv = col;
                double best = std::abs(minor(col, col));
                for (int i2 = col + 1; i2 < k; ++i2)
                    if (std::abs(minor(i2, col)) > best) {
                        best = std::abs(minor(i2, col));
                        piv = i2;
                    }
                if (best == 0.0) {
                    det = 0.0;
                    break;
                }
                if (piv != col) {
                    for (int j2 = col; j2 < k; ++j2) std::swap(minor(col, j2), minor(piv, j2));
                    det = -det;
                }
                det *= minor(col, col);
                for (int i2 = col + 1; i2 < k; ++i2) {
                    const double f = minor(i2, col) / minor(col, col);
                    for (int j2 = col; j2 < k; ++j2) minor(i2, j2) -= f * minor(col, j2);
                }
            }
            ma[i] += det * a[j];
        }
    }
    const double vol_scale = orientation_sign * std::sqrt(g.det);
    KForm r(dim, dim - k);
    MultiIndex merged;
    for (int i = 0; i < nk; ++i) {
        const MultiIndex comp = complement_index(idx[i], dim);
        const int eps = merge_sign(idx[i], comp, merged);
        r[lex_rank(comp, dim)] = cplx(eps * vol_scale, 0) * ma[i];
    }
    return r;
}

// Bilinear form inner product for the metric (no conjugation).
inline cplx form_inner(const Metric& g, const KForm& a, const KForm& b)
{
    if (a.degree() != b.degree()) throw std::invalid_argument("form_inner: degree mismatch");
    const int dim = a.ambient_dim();
    const int k = a.degree();
    const auto idx = multi_indices(dim, k);
    cplx acc(0);
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) {
            if (a[static_cast<int>(i)] == cplx(0) || b[static_cast<int>(j)] == cplx(0)) continue;
            MatD minor(k, k);
            for (int r0 = 0; r0 < k; ++r0)
                for (int c0 = 0; c0 < k; ++c0) minor(r0, c0) = g.inv(idx[i][r0], idx[j][c0]);
            double det = 1.0;
            for (int col = 0; col < k; ++col) {
                int piv = col;
                double best = std::abs(minor(col, col));
                for (int i2 = col + 1; i2 < k; ++i2)
                    if (std::abs(minor(i2, col)) > best) {
                        best = std::abs(minor(i2, col));
                        piv = i2;
                    }
                if (best == 0.0) {
                    det = 0.0;
                    break;
                }
                if (piv != col) {
                    for (int j2 = col; j2 < k; ++j2) std::swap(minor(col, j2), minor(piv, j2));
                    det = -det;
                }
                det *= minor(col, col);
                for (int i2 = col + 1; i2 < k; ++i2) {
                    const double f = minor(i2, col) / minor(col, col);
                    for (int j2 = col; j2 < k; ++j2) minor(i2, j2) -= f * minor(col, j2);
                }
            }
            acc += det * a[static_cast<int>(i)] * b[static_cast<int>(j)];
        }
    return acc;
}

} // namespace calib
