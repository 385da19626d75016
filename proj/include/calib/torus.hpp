#pragma once

#include "orbit.hpp"

namespace calib {

// Constant forms are the harmonic representatives on the flat torus
// R^{2n}/Z^{2n}, so every cohomology space below is a finite-dimensional
// subspace of a coefficient space.
struct CohomologySubspace {
    std::string label;
    SubspaceBasis basis;
};

// H^k of the torus: the full constant Lambda^k space.
inline CohomologySubspace derham(int k, int n)
{
    const int dim = 2 * n;
    FormSpace s = single_space(dim, k, false);
    return CohomologySubspace{"H^" + std::to_string(k), SubspaceBasis{s, MatD::identity(s.real_dim())}};
}

struct LefschetzComponent {
    std::string label;
    KForm form;                 // the component itself (the omega-block is stored wedged)
    double primitivity_residual = 0.0;
};

struct LefschetzDecomposition {
    std::vector<LefschetzComponent> components;
    double reassembly_residual = 0.0;
    double off_type_residual = 0.0; // degree-n mode only: radius outside (n,0)+(n-1,1)
};

namespace detail {

// gamma with omega^power ^ gamma = target, solved in the least-squares sense.
inline KForm divide_by_omega_power(const CalibrationPair& pair, int power, int gamma_degree, bool gamma_complex,
                                   const KForm& target)
{
    const int dim = pair.ambient_dim();
    const KForm wp = wedge_power(pair.omega, power);
    const int gsize = static_cast<int>(binomial(dim, gamma_degree));
    MatC m(target.size(), gsize);
    const auto idx = multi_indices(dim, gamma_degree);
    for (int j = 0; j < gsize; ++j) {
        const KForm col = wedge_z(wp, KForm::basis(dim, idx[j]));
        for (int i = 0; i < target.size(); ++i) m(i, j) = col[i];
    }
    const std::vector<cplx> x = lstsq(m, target.coeffs());
    KForm gamma(dim, gamma_degree);
    for (int i = 0; i < gsize; ++i) gamma[i] = gamma_complex ? x[i] : cplx(x[i].real(), 0);
    return gamma;
}

} // namespace detail

enum class LefschetzMode {
    automatic,   // infer from the degree; degree 2 wins when n = 2
    two_form,    // (2,0) + primitive (1,1) + scalar * omega + (0,2)
    middle_form, // (n,0) + primitive (n-1,1) + omega ^ (n-2,0)
};

// Primitive splitting with respect to omega. Degree-2 forms split into
// (2,0) + primitive (1,1) + scalar * omega + (0,2); degree-n forms of type
// (n,0)+(n-1,1) split into (n,0) + primitive (n-1,1) + omega ^ (n-2,0).
inline LefschetzDecomposition lefschetz_decompose(const CalibrationPair& pair, const ComplexStructureTensor& ic,
                                                  const KForm& a, LefschetzMode mode = LefschetzMode::automatic)
{
    const int n = pair.n;
    if (mode == LefschetzMode::automatic) {
        if (a.degree() == 2) {
            mode = LefschetzMode::two_form;
        } else if (a.degree() == n) {
            mode = LefschetzMode::middle_form;
        }
    }
    LefschetzDecomposition out;
    KForm sum(a.ambient_dim(), a.degree());
    auto primitivity = [&](const KForm& f, int p, int q) {
        const int power = n - p - q + 1;
        if (power < 0) return 0.0;
        return wedge_z(f, wedge_power(pair.omega, power)).norm_inf() / std::max(1.0, f.norm_inf());
    };
    if (mode == LefschetzMode::two_form && a.degree() == 2) {
        const KForm a20 = type_project(ic, a, 2);
        const KForm a02 = type_project(ic, a, 0);
        const KForm a11 = type_project(ic, a, 1);
        // the 0-form with a11 ^ omega^{n-1} = scal * omega^n
        const KForm scal = detail::divide_by_omega_power(pair, n, 0, true, wedge_z(a11, wedge_power(pair.omega, n - 1)));
        KForm omega_block = scal[0] * pair.omega;
        KForm prim = a11 - omega_block;
        out.components.push_back({"(2,0)", a20, primitivity(a20, 2, 0)});
        out.components.push_back({"(1,1) primitive", prim, primitivity(prim, 1, 1)});
        out.components.push_back({"(0,0) wedge omega", omega_block, 0.0});
        out.components.push_back({"(0,2)", a02, primitivity(a02, 0, 2)});
        sum = a20 + prim + omega_block + a02;
    } else if (mode == LefschetzMode::middle_form && a.degree() == n) {
        const KForm an0 = type_project(ic, a, n);
        const KForm an11 = type_project(ic, a, n - 1);
        out.off_type_residual = (a - an0 - an11).norm_inf() / std::max(1.0, a.norm_inf());
        // gamma in Lambda^{n-2,0} with omega^2 ^ gamma = omega ^ a^{n-1,1}
        KForm omega_block(a.ambient_dim(), n), prim = an11;
        if (n >= 2) {
            const KForm gamma = detail::divide_by_omega_power(pair, 2, n - 2, true, wedge_z(an11, pair.omega));
            omega_block = wedge_z(pair.omega, gamma);
            prim = an11 - omega_block;
        }
        out.components.push_back({"(n,0)", an0, primitivity(an0, n, 0)});
        out.components.push_back({"(n-1,1) primitive", prim, primitivity(prim, n - 1, 1)});
        out.components.push_back({"(n-2,0) wedge omega", omega_block, 0.0});
        sum = an0 + prim + omega_block;
    } else {
        throw std::invalid_argument("lefschetz_decompose: degree must be 2 or n");
    }
    out.reassembly_residual = (a - sum).norm_inf() / std::max(1.0, a.norm_inf());
    return out;
}

// Nullspace of the deformation equations on H^n(X,C) + H^2(X,R), without any
// bidegree restriction on alpha. This can be strictly larger than the orbit
// tangent space; both are reported side by side.
inline CohomologySubspace h1_by_eq19(const CalibrationPair& pair, const ComplexStructureTensor& ic,
                                     double rank_threshold = 1e-8)
{
    return CohomologySubspace{"H1(#_X) by equations", span_E1_equations(pair, ic, false, rank_threshold)};
}

// The orbit-tangent model of H^1(#_X) inside the same coefficient space.
inline CohomologySubspace h1_orbit_model(const CalibrationPair& pair, double rank_threshold = 1e-8)
{
    return CohomologySubspace{"H1(#_X) orbit model", span_E1_orbit(ke_tuple(pair), rank_threshold)};
}

// H^0(#_X): pairs (a, b) in Lambda^{n-1}_C + Lambda^1 with a = star_c(b^{1,0}).
// Dimension must equal 2n = b_1 of the torus.
inline CohomologySubspace h0_model(const CalibrationPair& pair, const ComplexStructureTensor& ic, const Metric& g,
                                   int orient, cplx c2, double rank_threshold = 1e-8)
{
    const int dim = pair.ambient_dim();
    const int n = pair.n;
    FormSpace domain{dim, {{n - 1, true}, {1, false}}};
    FormSpace target{dim, {{n - 1, true}}};
    const MatD m = linear_map_matrix(domain, target, [&](const std::vector<KForm>& ab) {
        const KForm b10 = one_zero_part(ic, ab[1]);
        const ComplexStarResult st = complex_hodge_star(pair, ic, g, orient, c2, b10, rank_threshold);
        return std::vector<KForm>{ab[0] - st.value};
    });
    return CohomologySubspace{"H0(#_X)", SubspaceBasis{domain, nullspace(m, rank_threshold)}};
}

struct KahlerProjectionReport {
    int h1_beta_rank = 0;        // rank of the omega-component projection of the orbit model
    int attainable_beta_rank = 0; // same projection of the equation nullspace
    int full_h2_dim = 0;          // dim Lambda^2 = C(2n,2)
    bool surjective_onto_attainable = false;
    bool surjective_onto_full = false;
};

// Rank of the projection of H^1(#_X) onto the 2-form coordinates.
inline KahlerProjectionReport kahler_projection_surjective(const CalibrationPair& pair, const SubspaceBasis& h1_orbit,
                                                           const SubspaceBasis& h1_eq, double rank_threshold = 1e-8)
{
    const int dim = pair.ambient_dim();
    const int beta_dim = static_cast<int>(binomial(dim, 2));
    const int alpha_real = 2 * static_cast<int>(binomial(dim, pair.n));
    auto beta_block = [&](const SubspaceBasis& b) {
        MatD m(beta_dim, b.dim());
        for (int j = 0; j < b.dim(); ++j)
            for (int i = 0; i < beta_dim; ++i) m(i, j) = b.basis(alpha_real + i, j);
        return m;
    };
    KahlerProjectionReport rep;
    rep.full_h2_dim = beta_dim;
    rep.h1_beta_rank = rank(beta_block(h1_orbit), rank_threshold);
    rep.attainable_beta_rank = rank(beta_block(h1_eq), rank_threshold);
    rep.surjective_onto_attainable = rep.h1_beta_rank == rep.attainable_beta_rank;
    rep.surjective_onto_full = rep.h1_beta_rank == beta_dim;
    return rep;
}

} // namespace calib
