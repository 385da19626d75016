#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "linalg.hpp"
#include "multi_index.hpp"

namespace calib {

// Constant-coefficient alternating k-form on R^{2n} with complex coefficients,
// stored densely in lexicographic multi-index order. Coordinate convention:
// indices 0..n-1 are x_1..x_n, indices n..2n-1 are y_1..y_n, z_k = x_k + i y_k.
class KForm {
public:
    KForm() = default;
    // Degrees above the ambient dimension are permitted and denote the zero
    // space (empty coefficient array); several derived complexes need them.
    KForm(int ambient_dim, int degree)
        : dim_(ambient_dim), deg_(degree), c_(static_cast<std::size_t>(binomial(ambient_dim, degree)), cplx(0))
    {
        if (degree < 0) throw std::invalid_argument("KForm: negative degree");
    }

    static KForm basis(int ambient_dim, const MultiIndex& idx, cplx coeff = cplx(1))
    {
        KForm f(ambient_dim, static_cast<int>(idx.size()));
        f.c_[lex_rank(idx, ambient_dim)] = coeff;
        return f;
    }

    int ambient_dim() const { return dim_; }
    int degree() const { return deg_; }
    int size() const { return static_cast<int>(c_.size()); }
    cplx& operator[](int i) { return c_[i]; }
    const cplx& operator[](int i) const { return c_[i]; }
    const std::vector<cplx>& coeffs() const { return c_; }

    KForm& operator+=(const KForm& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    KForm& operator-=(const KForm& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    KForm& operator*=(cplx s)
    {
        for (auto& v : c_) v *= s;
        return *this;
    }

    friend KForm operator+(KForm a, const KForm& b) { return a += b; }
    friend KForm operator-(KForm a, const KForm& b) { return a -= b; }
    friend KForm operator*(cplx s, KForm a) { return a *= s; }
    friend KForm operator*(KForm a, cplx s) { return a *= s; }

    double norm_inf() const
    {
        double m = 0;
        for (const auto& v : c_) m = std::max(m, std::abs(v));
        return m;
    }
    double imag_norm_inf() const
    {
        double m = 0;
        for (const auto& v : c_) m = std::max(m, std::abs(v.imag()));
        return m;
    }
    bool is_real(double tol = 1e-12) const { return imag_norm_inf() <= tol; }

    KForm real_part() const
    {
        KForm f(dim_, deg_);
        for (std::size_t i = 0; i < c_.size(); ++i) f.c_[i] = cplx(c_[i].real(), 0.0);
        return f;
    }
    KForm imag_part() const
    {
        KForm f(dim_, deg_);
        for (std::size_t i = 0; i < c_.size(); ++i) f.c_[i] = cplx(c_[i].imag(), 0.0);
        return f;
    }

private:
    void check_same(const KForm& o) const
    {
        if (dim_ != o.dim_ || deg_ != o.deg_) throw std::invalid_argument("KForm: dimension/degree mismatch");
    }

    int dim_ = 0;
    int deg_ = 0;
    std::vector<cplx> c_;
};

// Tangent vector of R^{2n}, complexified; real vectors carry zero imaginary parts.
struct Vector {
    std::vector<cplx> coords;

    Vector() = default;
    explicit Vector(int dim) : coords(dim, cplx(0)) {}
    static Vector unit(int dim, int j)
    {
        Vector v(dim);
        v.coords[j] = cplx(1);
        return v;
    }
    int dim() const { return static_cast<int>(coords.size()); }
    cplx& operator[](int i) { return coords[i]; }
    const cplx& operator[](int i) const { return coords[i]; }

    Vector conj() const
    {
        Vector v(dim());
        for (int i = 0; i < dim(); ++i) v[i] = std::conj(coords[i]);
        return v;
    }
};

// Positive-definite (when valid) Gram matrix on R^{2n}, with cached inverse
// and determinant off the Cholesky factor.
struct Metric {
    MatD gram;
    bool positive_definite = false;
    double det = 0.0;
    MatD inv;

    static Metric from_gram(const MatD& g, double pd_tol = 1e-12)
    {
        Metric m;
        m.gram = g;
        auto l = cholesky(g, pd_tol);
        if (l) {
            m.positive_definite = true;
            m.det = 1.0;
            for (int i = 0; i < g.rows(); ++i) m.det *= (*l)(i, i) * (*l)(i, i);
            m.inv = inverse(g);
        }
        return m;
    }

    static Metric euclidean(int dim) { return from_gram(MatD::identity(dim)); }
};

// Omega^0 = dz_1 ^ ... ^ dz_n.
inline KForm standard_omega_upper(int n)
{
    const int dim = 2 * n;
    KForm f(dim, n);
    // expand the product of dz_k = dx_k + i dy_k over subsets choosing x or y
    const int total = 1 << n;
    for (int mask = 0; mask < total; ++mask) {
        MultiIndex idx(n);
        cplx coeff(1, 0);
        for (int k = 0; k < n; ++k) {
            if (mask & (1 << k)) {
                idx[k] = n + k; // dy_k slot
                coeff *= cplx(0, 1);
            } else {
                idx[k] = k;
            }
        }
        MultiIndex sorted = idx;
        const int sgn = sort_sign(sorted);
        f[lex_rank(sorted, dim)] += coeff * cplx(sgn, 0);
    }
    return f;
}

// omega^0 = sum_k dx_k ^ dy_k.
inline KForm standard_symplectic(int n)
{
    const int dim = 2 * n;
    KForm f(dim, 2);
    for (int k = 0; k < n; ++k) f[lex_rank({k, n + k}, dim)] = cplx(1, 0);
    return f;
}

} // namespace calib
