#pragma once

#include "structures.hpp"

namespace calib {

// A tuple of reference forms defining an orbit; the Kahler-Einstein case is
// (Omega, omega), the Calabi-Yau case just (Omega).
struct FormTuple {
    std::vector<KForm> parts;
    std::vector<bool> complex_flags;

    int ambient_dim() const { return parts.empty() ? 0 : parts[0].ambient_dim(); }

    FormSpace space_shifted(int shift) const
    {
        FormSpace s;
        s.ambient_dim = ambient_dim();
        for (std::size_t p = 0; p < parts.size(); ++p)
            s.parts.push_back({parts[p].degree() + shift, complex_flags[p]});
        return s;
    }
};

inline FormTuple ke_tuple(const CalibrationPair& pair) { return FormTuple{{pair.Omega, pair.omega}, {true, false}}; }
inline FormTuple cy_tuple(const KForm& omega_n) { return FormTuple{{omega_n}, {true}}; }

// E^0 = { (i_v phi_i)_i : v in V }.
inline SubspaceBasis span_E0(const FormTuple& t, double rank_threshold = 1e-8)
{
    const int dim = t.ambient_dim();
    std::vector<std::vector<KForm>> gens;
    for (int j = 0; j < dim; ++j) {
        std::vector<KForm> g;
        for (const KForm& f : t.parts) g.push_back(interior(Vector::unit(dim, j), f));
        gens.push_back(std::move(g));
    }
    return span_from_generators(t.space_shifted(-1), gens, rank_threshold);
}

// E^1 = { (rho_xi phi_i)_i : xi in gl(V) }, the orbit tangent space.
inline SubspaceBasis span_E1_orbit(const FormTuple& t, double rank_threshold = 1e-8)
{
    const int dim = t.ambient_dim();
    std::vector<std::vector<KForm>> gens;
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
            MatD xi(dim, dim);
            xi(a, b) = 1.0;
            std::vector<KForm> g;
            for (const KForm& f : t.parts) g.push_back(gl_act(xi, f));
            gens.push_back(std::move(g));
        }
    return span_from_generators(t.space_shifted(0), gens, rank_threshold);
}

// E^1 presented by covector wedges of contractions, { (theta ^ i_v phi_i)_i }.
inline SubspaceBasis span_E1_wedge(const FormTuple& t, double rank_threshold = 1e-8)
{
    const int dim = t.ambient_dim();
    std::vector<std::vector<KForm>> gens;
    for (int a = 0; a < dim; ++a) {
        const KForm theta = KForm::basis(dim, {a});
        for (int b = 0; b < dim; ++b) {
            std::vector<KForm> g;
            for (const KForm& f : t.parts) g.push_back(wedge_z(theta, interior(Vector::unit(dim, b), f)));
            gens.push_back(std::move(g));
        }
    }
    return span_from_generators(t.space_shifted(0), gens, rank_threshold);
}

// E^2 = Span{ (theta ^ a_i)_i : theta a covector, a in E^1 }.
inline SubspaceBasis span_E2(const FormTuple& t, const SubspaceBasis& e1, double rank_threshold = 1e-8)
{
    const int dim = t.ambient_dim();
    std::vector<std::vector<KForm>> gens;
    for (int a = 0; a < dim; ++a) {
        const KForm theta = KForm::basis(dim, {a});
        for (int j = 0; j < e1.dim(); ++j) {
            std::vector<KForm> parts = e1.element(j);
            std::vector<KForm> g;
            for (const KForm& f : parts) g.push_back(wedge_z(theta, f));
            gens.push_back(std::move(g));
        }
    }
    return span_from_generators(t.space_shifted(1), gens, rank_threshold);
}

struct ExactnessReport {
    Vector u;
    int dim_kernel = 0;         // kernel of ^u : E^1 -> E^2
    int dim_image = 0;          // image of ^u : E^0 -> E^1
    double containment_residual = 0.0;
    bool exact = false;
};

namespace detail {

inline MatD wedge_map_columns(const SubspaceBasis& src, const FormSpace& out_space, const Vector& u)
{
    const int dim = src.space.ambient_dim;
    KForm theta(dim, 1);
    for (int i = 0; i < dim; ++i) theta[i] = u[i];
    MatD m(out_space.real_dim(), src.dim());
    for (int j = 0; j < src.dim(); ++j) {
        std::vector<KForm> parts = src.element(j);
        std::vector<KForm> img;
        for (const KForm& f : parts) img.push_back(wedge_z(theta, f));
        m.set_col(j, out_space.encode(img));
    }
    return m;
}

} // namespace detail

// Exactness of E^0 --^u--> E^1 --^u--> E^2 at E^1, decided by rank equality
// plus containment of the first image in the second kernel.
inline ExactnessReport symbol_exactness(const SubspaceBasis& e0, const SubspaceBasis& e1, const SubspaceBasis& e2,
                                        const Vector& u, double rank_threshold = 1e-8)
{
    double unorm = 0;
    for (const auto& c : u.coords) unorm += std::norm(c);
    if (unorm == 0) throw std::invalid_argument("symbol_exactness: u must be nonzero");

    ExactnessReport rep;
    rep.u = u;

    const MatD img0 = detail::wedge_map_columns(e0, e1.space, u); // columns live in E^1 ambient coords
    rep.containment_residual = containment_residual(img0, e1.basis);
    rep.dim_image = rank(img0, rank_threshold);

    const MatD map1_amb = detail::wedge_map_columns(e1, e2.space, u);
    // residual of u ^ E^1 inside E^2 (complex well-formedness)
    rep.containment_residual = std::max(rep.containment_residual, containment_residual(map1_amb, e2.basis));
    rep.dim_kernel = e1.dim() - rank(map1_amb, rank_threshold);

    rep.exact = (rep.dim_kernel == rep.dim_image) && rep.containment_residual < 1e-8;
    return rep;
}

struct IsotropyResult {
    SubspaceBasis algebra; // subspace of gl(2n) in matrix coordinates
    std::vector<MatD> elements;
    double metrical_residual = 0.0; // max |xi^T g + g xi| over basis elements
    bool metrical = false;
};

// Nullspace of xi -> (rho_xi phi_i)_i, with the infinitesimal orthogonality
// check against the canonical metric.
inline IsotropyResult isotropy_algebra(const FormTuple& t, const Metric& g, double rank_threshold = 1e-8)
{
    const int dim = t.ambient_dim();
    const FormSpace target = t.space_shifted(0);
    MatD m(target.real_dim(), dim * dim);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
            MatD xi(dim, dim);
            xi(a, b) = 1.0;
            std::vector<KForm> img;
            for (const KForm& f : t.parts) img.push_back(gl_act(xi, f));
            m.set_col(a * dim + b, target.encode(img));
        }
    IsotropyResult out;
    const MatD null = nullspace(m, rank_threshold);
    FormSpace glspace; // coordinate space of gl(2n), realified trivially
    glspace.ambient_dim = dim * dim;
    glspace.parts = {{1, false}};
    // basis stored raw; FormSpace bookkeeping is not meaningful for gl coordinates
    out.algebra = SubspaceBasis{glspace, null};
    for (int j = 0; j < null.cols(); ++j) {
        MatD xi(dim, dim);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) xi(a, b) = null(a * dim + b, j);
        out.elements.push_back(xi);
    }
    if (g.positive_definite) {
        for (const MatD& xi : out.elements) {
            const MatD s = matmul(transpose(xi), g.gram);
            const MatD s2 = matmul(g.gram, xi);
            double r = 0;
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) r = std::max(r, std::abs(s(i, j) + s2(i, j)));
            out.metrical_residual = std::max(out.metrical_residual, r);
        }
        out.metrical = out.metrical_residual < 1e-8;
    }
    return out;
}

// Residuals of the tangent-space equations on a candidate pair (alpha, beta):
//   alpha ^ omega + Omega ^ beta = 0
//   alpha ^ conj(Omega) + Omega ^ conj(alpha) = n c_n beta ^ omega^{n-1}.
struct TangentEquationResidual {
    double first = 0.0;
    double second = 0.0;
};

inline TangentEquationResidual tangent_equation_residual(const CalibrationPair& pair, const KForm& alpha,
                                                         const KForm& beta)
{
    const cplx cn = monge_ampere_constant(pair.n);
    TangentEquationResidual r;
    r.first = (wedge_z(alpha, pair.omega) + wedge_z(pair.Omega, beta)).norm_inf();
    const KForm lhs = wedge(alpha, conjugate(pair.Omega)) + wedge(pair.Omega, conjugate(alpha));
    const KForm rhs = (cplx(pair.n, 0) * cn) * wedge(beta, wedge_power(pair.omega, pair.n - 1));
    r.second = (lhs - rhs).norm_inf();
    return r;
}

// Nullspace of the tangent equations on (alpha, beta) in Lambda^n_C + Lambda^2_R.
// When constrain_bidegree is set, alpha is restricted to types (n,0)+(n-1,1),
// which removes the spurious low-type solutions the raw equations admit.
inline SubspaceBasis span_E1_equations(const CalibrationPair& pair, const ComplexStructureTensor& ic,
                                       bool constrain_bidegree, double rank_threshold = 1e-8)
{
    const int dim = pair.ambient_dim();
    const int n = pair.n;
    FormSpace domain{dim, {{n, true}, {2, false}}};
    const cplx cn = monge_ampere_constant(n);
    const KForm omega_pow = wedge_power(pair.omega, n - 1);

    std::vector<MatD> blocks;
    {
        FormSpace out1{dim, {{n + 2, true}}};
        blocks.push_back(linear_map_matrix(domain, out1, [&](const std::vector<KForm>& ab) {
            return std::vector<KForm>{wedge_z(ab[0], pair.omega) + wedge_z(pair.Omega, ab[1])};
        }));
    }
    {
        FormSpace out2{dim, {{2 * n, true}}};
        blocks.push_back(linear_map_matrix(domain, out2, [&](const std::vector<KForm>& ab) {
            KForm lhs = wedge_z(ab[0], conjugate(pair.Omega)) + wedge_z(pair.Omega, conjugate(ab[0]));
            lhs -= (cplx(n, 0) * cn) * wedge_z(ab[1], omega_pow);
            return std::vector<KForm>{lhs};
        }));
    }
    if (constrain_bidegree) {
        FormSpace out3{dim, {{n, true}}};
        blocks.push_back(linear_map_matrix(domain, out3, [&](const std::vector<KForm>& ab) {
            KForm rest = ab[0];
            rest -= type_project(ic, ab[0], n);
            rest -= type_project(ic, ab[0], n - 1);
            return std::vector<KForm>{rest};
        }));
    }
    int rows = 0;
    for (const MatD& b : blocks) rows += b.rows();
    MatD system(rows, domain.real_dim());
    int at = 0;
    for (const MatD& b : blocks) {
        for (int i = 0; i < b.rows(); ++i)
            for (int j = 0; j < b.cols(); ++j) system(at + i, j) = b(i, j);
        at += b.rows();
    }
    return SubspaceBasis{domain, nullspace(system, rank_threshold)};
}

} // namespace calib
