#pragma once

#include <functional>
#include <string>

#include "exterior.hpp"

namespace calib {

// Ambient coefficient space for tuples of forms. A complex part contributes
// [Re block; Im block] to the realified coordinate vector, a real part one block.
struct FormSpace {
    struct Part {
        int degree;
        bool complex_field;
    };
    int ambient_dim = 0; // 2n (or subtorus dimension for M-side spaces)
    std::vector<Part> parts;

    int part_count(int p) const { return static_cast<int>(binomial(ambient_dim, parts[p].degree)); }

    int real_dim() const
    {
        int d = 0;
        for (std::size_t p = 0; p < parts.size(); ++p) {
            const int c = static_cast<int>(binomial(ambient_dim, parts[p].degree));
            d += parts[p].complex_field ? 2 * c : c;
        }
        return d;
    }

    std::vector<double> encode(const std::vector<KForm>& forms) const
    {
        if (forms.size() != parts.size()) throw std::invalid_argument("FormSpace::encode: part count mismatch");
        std::vector<double> v;
        v.reserve(real_dim());
        for (std::size_t p = 0; p < parts.size(); ++p) {
            const KForm& f = forms[p];
            if (f.ambient_dim() != ambient_dim || f.degree() != parts[p].degree)
                throw std::invalid_argument("FormSpace::encode: form/part mismatch");
            for (int i = 0; i < f.size(); ++i) v.push_back(f[i].real());
            if (parts[p].complex_field)
                for (int i = 0; i < f.size(); ++i) v.push_back(f[i].imag());
        }
        return v;
    }

    std::vector<KForm> decode(const std::vector<double>& v) const
    {
        std::vector<KForm> forms;
        std::size_t at = 0;
        for (std::size_t p = 0; p < parts.size(); ++p) {
            KForm f(ambient_dim, parts[p].degree);
            const int c = f.size();
            for (int i = 0; i < c; ++i) f[i] = cplx(v[at + i], 0);
            at += c;
            if (parts[p].complex_field) {
                for (int i = 0; i < c; ++i) f[i] += cplx(0, v[at + i]);
                at += c;
            }
            forms.push_back(std::move(f));
        }
        return forms;
    }
};

inline FormSpace single_space(int ambient_dim, int degree, bool complex_field)
{
    return FormSpace{ambient_dim, {{degree, complex_field}}};
}

// Orthonormal spanning set of a linear subspace of a realified coefficient space.
struct SubspaceBasis {
    FormSpace space;
    MatD basis; // real_dim x dim, orthonormal columns

    int dim() const { return basis.cols(); }
    int ambient_real_dim() const { return basis.rows(); }

    std::vector<KForm> element(int j) const { return space.decode(basis.col(j)); }
};

inline SubspaceBasis span_from_generators(const FormSpace& space, const std::vector<std::vector<KForm>>& gens,
                                          double rank_threshold = 1e-8)
{
    MatD m(space.real_dim(), static_cast<int>(gens.size()));
    for (std::size_t j = 0; j < gens.size(); ++j) m.set_col(static_cast<int>(j), space.encode(gens[j]));
    return SubspaceBasis{space, column_space(m, rank_threshold)};
}

// Matrix of a real-linear map between realified coefficient spaces, built by
// pushing every coordinate basis vector through the map.
inline MatD linear_map_matrix(const FormSpace& in, const FormSpace& out,
                              const std::function<std::vector<KForm>(const std::vector<KForm>&)>& fn)
{
    const int din = in.real_dim();
    MatD m(out.real_dim(), din);
    std::vector<double> e(din, 0.0);
    for (int j = 0; j < din; ++j) {
        e[j] = 1.0;
        m.set_col(j, out.encode(fn(in.decode(e))));
        e[j] = 0.0;
    }
    return m;
}

// max_j |x_j - B B^T x_j| / max(1, |x_j|) over the columns of x.
inline double containment_residual(const MatD& x, const MatD& basis)
{
    double worst = 0;
    for (int j = 0; j < x.cols(); ++j) {
        std::vector<double> v = x.col(j);
        std::vector<double> coords(basis.cols(), 0.0);
        for (int c = 0; c < basis.cols(); ++c)
            for (int i = 0; i < basis.rows(); ++i) coords[c] += basis(i, c) * v[i];
        double nrm = 0, res = 0;
        for (int i = 0; i < basis.rows(); ++i) {
            double p = 0;
            for (int c = 0; c < basis.cols(); ++c) p += basis(i, c) * coords[c];
            res += (v[i] - p) * (v[i] - p);
            nrm += v[i] * v[i];
        }
        worst = std::max(worst, std::sqrt(res) / std::max(1.0, std::sqrt(nrm)));
    }
    return worst;
}

inline double containment_residual(const SubspaceBasis& inner, const SubspaceBasis& outer)
{
    return containment_residual(inner.basis, outer.basis);
}

inline double mutual_containment_residual(const SubspaceBasis& a, const SubspaceBasis& b)
{
    return std::max(containment_residual(a, b), containment_residual(b, a));
}

inline double vector_containment_residual(const std::vector<double>& v, const MatD& basis)
{
    MatD m(static_cast<int>(v.size()), 1);
    m.set_col(0, v);
    return containment_residual(m, basis);
}

// Orthonormal basis of the orthogonal complement of the column space of m
// inside R^rows (coker of the map represented by m, in coordinates).
inline MatD cokernel_basis(const MatD& m, double rank_threshold = 1e-8)
{
    if (m.rows() == 0) return MatD(0, 0);
    return nullspace(transpose(m), rank_threshold);
}

inline double orthonormality_residual(const MatD& b)
{
    double worst = 0;
    for (int i = 0; i < b.cols(); ++i)
        for (int j = 0; j < b.cols(); ++j) {
            double dot = 0;
            for (int r = 0; r < b.rows(); ++r) dot += b(r, i) * b(r, j);
            worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

} // namespace calib
