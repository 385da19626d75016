#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

namespace calib {

using cplx = std::complex<double>;

inline double abs2(double x) { return x * x; }
inline double abs2(const cplx& z) { return std::norm(z); }
inline double conj_of(double x) { return x; }
inline cplx conj_of(const cplx& z) { return std::conj(z); }

// Dense row-major matrix over double or complex<double>. Sizes in this
// project stay below ~200x200.
template <class T>
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols, T fill = T(0)) : r_(rows), c_(cols), d_(static_cast<std::size_t>(rows) * cols, fill) {}

    static Mat identity(int n)
    {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }
    T& operator()(int i, int j) { return d_[static_cast<std::size_t>(i) * c_ + j]; }
    const T& operator()(int i, int j) const { return d_[static_cast<std::size_t>(i) * c_ + j]; }

    std::vector<T> col(int j) const
    {
        std::vector<T> v(r_);
        for (int i = 0; i < r_; ++i) v[i] = (*this)(i, j);
        return v;
    }
    void set_col(int j, const std::vector<T>& v)
    {
        for (int i = 0; i < r_; ++i) (*this)(i, j) = v[i];
    }

private:
    int r_ = 0, c_ = 0;
    std::vector<T> d_;
};

using MatD = Mat<double>;
using MatC = Mat<cplx>;

template <class T>
Mat<T> matmul(const Mat<T>& a, const Mat<T>& b)
{
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
    Mat<T> r(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const T aik = a(i, k);
            if (aik == T(0)) continue;
            for (int j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

template <class T>
Mat<T> transpose(const Mat<T>& a)
{
    Mat<T> r(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(j, i) = a(i, j);
    return r;
}

template <class T>
Mat<T> conj_transpose(const Mat<T>& a)
{
    Mat<T> r(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(j, i) = conj_of(a(i, j));
    return r;
}

template <class T>
std::vector<T> matvec(const Mat<T>& a, const std::vector<T>& x)
{
    if (static_cast<int>(x.size()) != a.cols()) throw std::invalid_argument("matvec: shape mismatch");
    std::vector<T> y(a.rows(), T(0));
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

template <class T>
double frob_norm(const Mat<T>& a)
{
    double s = 0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) s += abs2(a(i, j));
    return std::sqrt(s);
}

template <class T>
double max_abs(const Mat<T>& a)
{
    double m = 0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

template <class T>
struct Svd {
    Mat<T> u;                  // m x n, orthonormal columns
    std::vector<double> sigma; // descending
    Mat<T> v;                  // n x n unitary
};

namespace detail {

// One-sided Jacobi on the columns of a (requires rows >= cols).
template <class T>
Svd<T> jacobi_svd_tall(Mat<T> a)
{
    const int m = a.rows(), n = a.cols();
    Mat<T> v = Mat<T>::identity(n);
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                double app = 0, aqq = 0;
                T apq = T(0);
                for (int i = 0; i < m; ++i) {
                    app += abs2(a(i, p));
                    aqq += abs2(a(i, q));
                    apq += conj_of(a(i, p)) * a(i, q);
                }
                const double mag = std::abs(apq);
                if (mag <= 1e-300) continue;
                off = std::max(off, mag / std::max(1e-300, std::sqrt(app * aqq)));
                if (mag <= 1e-15 * std::sqrt(app * aqq)) continue;
                // unitary rotation [[c, s e^{i phi}], [-s e^{-i phi}, c]] with
                // phi the phase of the cross term, reduced to the real case
                T phase = apq / T(mag);
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (int i = 0; i < m; ++i) {
                    const T xp = a(i, p), xq = a(i, q);
                    a(i, p) = T(c) * xp - T(s) * (conj_of(phase) * xq);
                    a(i, q) = T(s) * (phase * xp) + T(c) * xq;
                }
                for (int i = 0; i < n; ++i) {
                    const T xp = v(i, p), xq = v(i, q);
                    v(i, p) = T(c) * xp - T(s) * (conj_of(phase) * xq);
                    v(i, q) = T(s) * (phase * xp) + T(c) * xq;
                }
            }
        if (off < 1e-14) break;
    }
    std::vector<double> sig(n);
    for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int i = 0; i < m; ++i) s += abs2(a(i, j));
        sig[j] = std::sqrt(s);
    }
    // sort descending
    std::vector<int> order(n);
    for (int j = 0; j < n; ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](int x, int y) { return sig[x] > sig[y]; });
    Svd<T> out;
    out.u = Mat<T>(m, n);
    out.v = Mat<T>(n, n);
    out.sigma.resize(n);
    for (int j = 0; j < n; ++j) {
        const int src = order[j];
        out.sigma[j] = sig[src];
        const double inv = sig[src] > 1e-300 ? 1.0 / sig[src] : 0.0;
        for (int i = 0; i < m; ++i) out.u(i, j) = a(i, src) * T(inv);
        for (int i = 0; i < n; ++i) out.v(i, j) = v(i, src);
    }
    return out;
}

} // namespace detail

template <class T>
Svd<T> svd(const Mat<T>& a)
{
    if (a.rows() >= a.cols()) return detail::jacobi_svd_tall(a);
    // pad with zero rows; column rotations keep them zero, V stays full n x n
    Mat<T> padded(a.cols(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) padded(i, j) = a(i, j);
    Svd<T> t = detail::jacobi_svd_tall(padded);
    Svd<T> out;
    out.u = Mat<T>(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out.u(i, j) = t.u(i, j);
    out.v = t.v;
    out.sigma = t.sigma;
    return out;
}

inline int rank_from_sigma(const std::vector<double>& sigma, double rel_threshold)
{
    if (sigma.empty()) return 0;
    const double cut = rel_threshold * std::max(sigma[0], 1e-300);
    int r = 0;
    for (double s : sigma)
        if (s > cut) ++r;
    return r;
}

template <class T>
int rank(const Mat<T>& a, double rel_threshold = 1e-8)
{
    if (a.rows() == 0 || a.cols() == 0) return 0;
    return rank_from_sigma(svd(a).sigma, rel_threshold);
}

// Orthonormal basis of the column space (left singular vectors above the cut).
template <class T>
Mat<T> column_space(const Mat<T>& a, double rel_threshold = 1e-8)
{
    if (a.rows() == 0 || a.cols() == 0) return Mat<T>(a.rows(), 0);
    Svd<T> s = svd(a);
    const int r = rank_from_sigma(s.sigma, rel_threshold);
    Mat<T> out(a.rows(), r);
    for (int j = 0; j < r; ++j)
        for (int i = 0; i < a.rows(); ++i) out(i, j) = s.u(i, j);
    return out;
}

// Orthonormal basis of the nullspace (right singular vectors below the cut).
template <class T>
Mat<T> nullspace(const Mat<T>& a, double rel_threshold = 1e-8)
{
    if (a.cols() == 0) return Mat<T>(0, 0);
    if (a.rows() == 0) return Mat<T>::identity(a.cols());
    Svd<T> s = svd(a);
    const int r = rank_from_sigma(s.sigma, rel_threshold);
    const int n = a.cols();
    Mat<T> out(n, n - r);
    for (int j = r; j < n; ++j)
        for (int i = 0; i < n; ++i) out(i, j - r) = s.v(i, j);
    return out;
}

// Least-squares solve min |ax - b| via the SVD pseudoinverse.
template <class T>
std::vector<T> lstsq(const Mat<T>& a, const std::vector<T>& b, double rel_threshold = 1e-12)
{
    Svd<T> s = svd(a);
    const int r = rank_from_sigma(s.sigma, rel_threshold);
    std::vector<T> x(a.cols(), T(0));
    for (int j = 0; j < r; ++j) {
        T uj_b = T(0);
        for (int i = 0; i < a.rows(); ++i) uj_b += conj_of(s.u(i, j)) * b[i];
        uj_b /= T(s.sigma[j]);
        for (int i = 0; i < a.cols(); ++i) x[i] += s.v(i, j) * uj_b;
    }
    return x;
}

// Gaussian elimination with partial pivoting.
template <class T>
std::vector<T> solve(Mat<T> a, std::vector<T> b)
{
    const int n = a.rows();
    if (a.cols() != n || static_cast<int>(b.size()) != n) throw std::invalid_argument("solve: square system required");
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(a(k, k));
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                piv = i;
            }
        if (best < 1e-300) throw std::runtime_error("solve: singular matrix");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            const T f = a(i, k) / a(k, k);
            if (f == T(0)) continue;
            for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<T> x(n);
    for (int i = n - 1; i >= 0; --i) {
        T s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

template <class T>
Mat<T> inverse(const Mat<T>& a)
{
    const int n = a.rows();
    Mat<T> inv(n, n);
    for (int j = 0; j < n; ++j) {
        std::vector<T> e(n, T(0));
        e[j] = T(1);
        std::vector<T> x = solve(a, e);
        for (int i = 0; i < n; ++i) inv(i, j) = x[i];
    }
    return inv;
}

// Cholesky of a symmetric matrix; empty when not positive definite.
inline std::optional<MatD> cholesky(const MatD& g, double tol = 1e-12)
{
    const int n = g.rows();
    double scale = 0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(g(i, i)));
    if (scale == 0) return std::nullopt;
    MatD l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = g(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d <= tol * scale) return std::nullopt;
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = g(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

inline double symmetry_residual(const MatD& g)
{
    double m = 0;
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j) m = std::max(m, std::abs(g(i, j) - g(j, i)));
    return m;
}

} // namespace calib
