#pragma once

#include <array>
#include <map>
#include <string>

#include "rng.hpp"
#include "subspace.hpp"

namespace calib {

// Candidate Kahler-Einstein structure: a complex n-form and a real 2-form on R^{2n}.
struct CalibrationPair {
    int n = 0;
    KForm Omega; // degree n, complex
    KForm omega; // degree 2, real

    int ambient_dim() const { return 2 * n; }
    KForm phi() const { return Omega.real_part(); }               // Re Omega
    std::vector<KForm> psi() const { return {Omega.imag_part(), omega}; } // (Im Omega, omega)
};

inline CalibrationPair standard_pair(int n)
{
    return CalibrationPair{n, standard_omega_upper(n), standard_symplectic(n)};
}

inline CalibrationPair pullback_pair(const MatD& g, const CalibrationPair& p)
{
    return CalibrationPair{p.n, pullback(g, p.Omega), pullback(g, p.omega)};
}

// c_n = (-1)^{n(n-1)/2} 2^n / (i^n n!), evaluated exactly.
inline cplx monge_ampere_constant(int n)
{
    double fact = 1.0, pow2 = 1.0;
    for (int k = 1; k <= n; ++k) {
        fact *= k;
        pow2 *= 2.0;
    }
    const double sign = ((n * (n - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
    static const cplx inv_unit[4] = {cplx(1, 0), cplx(0, -1), cplx(-1, 0), cplx(0, 1)}; // 1 / i^n
    return sign * (pow2 / fact) * inv_unit[n % 4];
}

struct ComplexStructureTensor {
    MatD matrix;
    double involution_residual = 0.0; // |I^2 + Id|
};

struct KernelResult {
    MatC basis; // 2n x dim, orthonormal columns over C
    int dim = 0;
    int stacked_rank = 0;          // rank of [basis | conj(basis)]
    double conj_overlap_sigma = 0; // smallest singular value of the stack
};

// Ker Omega = { v in V (x) C : i_v Omega = 0 }.
inline KernelResult kernel_of_form(const KForm& omega_n, double rank_threshold = 1e-8)
{
    const int dim = omega_n.ambient_dim();
    MatC m(static_cast<int>(binomial(dim, omega_n.degree() - 1)), dim);
    for (int j = 0; j < dim; ++j) {
        KForm c = interior(Vector::unit(dim, j), omega_n);
        for (int i = 0; i < c.size(); ++i) m(i, j) = c[i];
    }
    KernelResult out;
    out.basis = nullspace(m, rank_threshold);
    out.dim = out.basis.cols();
    MatC stack(dim, 2 * out.dim);
    for (int j = 0; j < out.dim; ++j)
        for (int i = 0; i < dim; ++i) {
            stack(i, j) = out.basis(i, j);
            stack(i, out.dim + j) = std::conj(out.basis(i, j));
        }
    if (out.dim > 0) {
        auto s = svd(stack);
        out.stacked_rank = rank_from_sigma(s.sigma, rank_threshold);
        out.conj_overlap_sigma = s.sigma.empty() ? 0.0 : s.sigma.back();
    }
    return out;
}

struct StructureReport {
    bool pass = false;
    std::map<std::string, bool> clauses;
    std::map<std::string, double> residuals;
    cplx derived_constant_cn{0, 0};
    std::string metric_order; // which argument order of omega(.,I.) was positive
};

// Calabi-Yau: dim_C Ker Omega = n and Ker intersects its conjugate trivially.
inline StructureReport check_calabi_yau(const KForm& omega_n, double rank_threshold = 1e-8)
{
    const int n = omega_n.ambient_dim() / 2;
    StructureReport r;
    KernelResult k = kernel_of_form(omega_n, rank_threshold);
    r.clauses["kernel_dimension"] = (k.dim == n);
    r.residuals["kernel_dimension"] = std::abs(k.dim - n);
    const bool disjoint = (k.dim == n) && (k.stacked_rank == 2 * n);
    r.clauses["conjugate_intersection"] = disjoint;
    r.residuals["conjugate_intersection"] = k.dim > 0 ? k.conj_overlap_sigma : 0.0;
    r.pass = r.clauses["kernel_dimension"] && r.clauses["conjugate_intersection"];
    return r;
}

// Almost complex structure with Ker Omega as the -i eigenspace, so that Omega
// has pure bidegree (n,0) under the induced grading.
inline ComplexStructureTensor complex_structure(const KForm& omega_n, double rank_threshold = 1e-8)
{
    const int dim = omega_n.ambient_dim();
    KernelResult k = kernel_of_form(omega_n, rank_threshold);
    if (k.dim != dim / 2 || k.stacked_rank != dim)
        throw std::invalid_argument("complex_structure: form is not a Calabi-Yau structure");
    MatC b(dim, dim);
    for (int j = 0; j < k.dim; ++j)
        for (int i = 0; i < dim; ++i) {
            b(i, j) = k.basis(i, j);
            b(i, k.dim + j) = std::conj(k.basis(i, j));
        }
    MatC d(dim, dim);
    for (int j = 0; j < k.dim; ++j) {
        d(j, j) = cplx(0, -1);
        d(k.dim + j, k.dim + j) = cplx(0, 1);
    }
    MatC t = matmul(matmul(b, d), inverse(b));
    ComplexStructureTensor out;
    out.matrix = MatD(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) out.matrix(i, j) = t(i, j).real();
    MatD sq = matmul(out.matrix, out.matrix);
    for (int i = 0; i < dim; ++i) sq(i, i) += 1.0;
    out.involution_residual = max_abs(sq);
    return out;
}

// Component of bidegree (p, k-p); the operator rho_I acts on (p,q)-forms by i(q-p).
inline KForm type_project(const ComplexStructureTensor& ic, const KForm& a, int p)
{
    const int k = a.degree();
    const int n = a.ambient_dim() / 2;
    const int pmin = std::max(0, k - n), pmax = std::min(k, n);
    if (p < pmin || p > pmax) return KForm(a.ambient_dim(), k);
    KForm acc = a;
    const cplx lam_p(0, static_cast<double>(k - 2 * p));
    for (int q = pmin; q <= pmax; ++q) {
        if (q == p) continue;
        const cplx lam_q(0, static_cast<double>(k - 2 * q));
        acc = (gl_act(ic.matrix, acc) - lam_q * acc) * (cplx(1, 0) / (lam_p - lam_q));
    }
    return acc;
}

inline std::vector<std::pair<std::pair<int, int>, KForm>> type_decompose(const ComplexStructureTensor& ic, const KForm& a)
{
    const int k = a.degree();
    const int n = a.ambient_dim() / 2;
    std::vector<std::pair<std::pair<int, int>, KForm>> out;
    for (int p = std::max(0, k - n); p <= std::min(k, n); ++p)
        out.push_back({{p, k - p}, type_project(ic, a, p)});
    return out;
}

// Distance of a from the direct sum of the listed bidegrees.
inline double type_purity_residual(const ComplexStructureTensor& ic, const KForm& a, const std::vector<int>& allowed_p)
{
    KForm acc(a.ambient_dim(), a.degree());
    for (int p : allowed_p) acc += type_project(ic, a, p);
    return (a - acc).norm_inf();
}

// (1,0)-part of a 1-form: (b - i b(I .)) / 2.
inline KForm one_zero_part(const ComplexStructureTensor& ic, const KForm& b)
{
    if (b.degree() != 1) throw std::invalid_argument("one_zero_part: 1-form expected");
    return 0.5 * (b - cplx(0, 1) * pullback(ic.matrix, b));
}

struct MetricFromResult {
    bool ok = false;
    Metric metric;
    std::string order;        // "omega(Iu,v)" or "omega(u,Iv)"
    double symmetry_residual = 0.0;
};

// g(u,v) from omega and I_Omega; both argument orders are tried and the
// positive-definite one is returned (the orientation of I flips between them).
inline MetricFromResult metric_from(const CalibrationPair& pair, const ComplexStructureTensor& ic)
{
    const int dim = pair.ambient_dim();
    MatD a(dim, dim);
    const auto idx2 = multi_indices(dim, 2);
    for (std::size_t t = 0; t < idx2.size(); ++t) {
        const double c = pair.omega[static_cast<int>(t)].real();
        a(idx2[t][0], idx2[t][1]) = c;
        a(idx2[t][1], idx2[t][0]) = -c;
    }
    MetricFromResult out;
    const MatD g1 = matmul(transpose(ic.matrix), a); // omega(I u, v)
    const MatD g2 = matmul(a, ic.matrix);            // omega(u, I v)
    for (int attempt = 0; attempt < 2; ++attempt) {
        const MatD& g = attempt == 0 ? g2 : g1;
        const double sym = symmetry_residual(g);
        MatD gs(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) gs(i, j) = 0.5 * (g(i, j) + g(j, i));
        Metric m = Metric::from_gram(gs);
        if (sym < 1e-8 * std::max(1.0, max_abs(g)) && m.positive_definite) {
            out.ok = true;
            out.metric = m;
            out.order = attempt == 0 ? "omega(u,Iv)" : "omega(Iu,v)";
            out.symmetry_residual = sym;
            return out;
        }
        if (attempt == 0) out.symmetry_residual = sym;
    }
    return out;
}

// +1 when omega^n is positively proportional to e^{0...2n-1}; scenario stars
// are oriented so that the symplectic volume is positive.
inline int orientation_sign(const CalibrationPair& pair)
{
    const KForm top = wedge_power(pair.omega, pair.n);
    return top[0].real() >= 0 ? 1 : -1;
}

inline StructureReport check_kahler_einstein(const CalibrationPair& pair, double residual_tol = 1e-10,
                                             double rank_threshold = 1e-8)
{
    StructureReport r;
    r.derived_constant_cn = monge_ampere_constant(pair.n);

    StructureReport cy = check_calabi_yau(pair.Omega, rank_threshold);
    r.clauses["calabi_yau"] = cy.pass;
    r.residuals["calabi_yau"] = cy.residuals["conjugate_intersection"];

    const double scale = std::max(1.0, pair.Omega.norm_inf()) * std::max(1.0, pair.omega.norm_inf());
    const KForm w1 = wedge_z(pair.Omega, pair.omega);
    const KForm w1c = wedge_z(conjugate(pair.Omega), pair.omega);
    r.residuals["omega_wedge"] = std::max(w1.norm_inf(), w1c.norm_inf()) / scale;
    r.clauses["omega_wedge"] = r.residuals["omega_wedge"] <= residual_tol;

    const KForm lhs = wedge(pair.Omega, conjugate(pair.Omega));
    const KForm rhs = r.derived_constant_cn * wedge_power(pair.omega, pair.n);
    r.residuals["monge_ampere"] = (lhs - rhs).norm_inf() / std::max(1.0, lhs.norm_inf());
    r.clauses["monge_ampere"] = r.residuals["monge_ampere"] <= residual_tol;

    const double omega_top = wedge_power(pair.omega, pair.n).norm_inf();
    r.clauses["omega_nondegenerate"] = omega_top > rank_threshold;
    r.residuals["omega_nondegenerate"] = omega_top;

    bool metric_ok = false;
    if (cy.pass) {
        ComplexStructureTensor ic = complex_structure(pair.Omega, rank_threshold);
        MetricFromResult mf = metric_from(pair, ic);
        metric_ok = mf.ok;
        r.metric_order = mf.ok ? mf.order : "none";
        r.residuals["metric_positive"] = mf.symmetry_residual;
    }
    r.clauses["metric_positive"] = metric_ok;

    r.pass = r.clauses["calabi_yau"] && r.clauses["omega_wedge"] && r.clauses["monge_ampere"] &&
             r.clauses["omega_nondegenerate"] && r.clauses["metric_positive"];
    return r;
}

// Orthonormal basis of the (1,0)-covectors for the given complex structure.
inline std::vector<KForm> holomorphic_covector_basis(const ComplexStructureTensor& ic, double rank_threshold = 1e-8)
{
    const int dim = ic.matrix.rows();
    MatC cand(dim, dim);
    for (int k = 0; k < dim; ++k) {
        KForm h = one_zero_part(ic, KForm::basis(dim, {k}));
        for (int i = 0; i < dim; ++i) cand(i, k) = h[i];
    }
    MatC basis = column_space(cand, rank_threshold);
    std::vector<KForm> out;
    for (int j = 0; j < basis.cols(); ++j) {
        KForm h(dim, 1);
        for (int i = 0; i < dim; ++i) h[i] = basis(i, j);
        out.push_back(h);
    }
    return out;
}

inline std::vector<KForm> holomorphic_wedge_basis(const std::vector<KForm>& holo, int p)
{
    const int n = static_cast<int>(holo.size());
    std::vector<KForm> out;
    for (const MultiIndex& sel : multi_indices(n, p)) {
        KForm f(holo.empty() ? 0 : holo[0].ambient_dim(), 0);
        f[0] = cplx(1, 0);
        for (int s : sel) f = wedge(f, holo[s]);
        out.push_back(f);
    }
    return out;
}

struct StarConstants {
    cplx c1{0, 0};
    cplx c2{0, 0};
    double fit_residual = 0.0;   // relative, over the whole batch
    double max_v_residual = 0.0; // worst single-sample relative residual
};

// Least-squares fit of the constants tying the Riemannian star to the pair:
//   *(i_v Omega) = c1 (i_v omega) ^ Omega
//   *(i_v omega) = c2 (i_v Omega) ^ conj(Omega) + conj(c2) (i_v conj(Omega)) ^ Omega
// The first identity is stated with conj(Omega) on the right elsewhere; that
// variant is bidegree-inconsistent and admits no v-independent constant, so the
// fit targets the type-consistent form.
inline StarConstants star_constants(const CalibrationPair& pair, const Metric& g, int orient, Rng& rng, int batch = 24)
{
    const int dim = pair.ambient_dim();
    std::vector<cplx> a1_col, b1;
    std::vector<double> a2_re, a2_im, b2;
    std::vector<std::pair<std::vector<cplx>, std::vector<cplx>>> rows1;
    std::vector<std::array<std::vector<double>, 3>> rows2;
    for (int s = 0; s < batch; ++s) {
        const Vector v = rng.unit_vector(dim);
        const KForm ivO = interior(v, pair.Omega);
        const KForm ivw = interior(v, pair.omega);
        const KForm lhs1 = hodge_star(g, orient, ivO);
        const KForm rhs1 = wedge(ivw, pair.Omega);
        std::vector<cplx> c1col, c1rhs;
        for (int i = 0; i < lhs1.size(); ++i) {
            c1col.push_back(rhs1[i]);
            c1rhs.push_back(lhs1[i]);
            a1_col.push_back(rhs1[i]);
            b1.push_back(lhs1[i]);
        }
        rows1.push_back({c1col, c1rhs});

        const KForm lhs2 = hodge_star(g, orient, ivw);
        const KForm x = wedge(ivO, conjugate(pair.Omega));
        const KForm y = wedge(interior(v, conjugate(pair.Omega)), pair.Omega);
        // c2 x + conj(c2) y with c2 = s + i t
        std::vector<double> colS, colT, rhs;
        for (int i = 0; i < lhs2.size(); ++i) {
            const cplx sum = x[i] + y[i];
            const cplx dif = cplx(0, 1) * (x[i] - y[i]);
            colS.push_back(sum.real());
            colT.push_back(dif.real());
            rhs.push_back(lhs2[i].real());
            colS.push_back(sum.imag());
            colT.push_back(dif.imag());
            rhs.push_back(lhs2[i].imag());
            a2_re.push_back(sum.real());
            a2_im.push_back(dif.real());
            b2.push_back(lhs2[i].real());
            a2_re.push_back(sum.imag());
            a2_im.push_back(dif.imag());
            b2.push_back(lhs2[i].imag());
        }
        rows2.push_back({colS, colT, rhs});
    }
    StarConstants out;
    {
        MatC a(static_cast<int>(a1_col.size()), 1);
        for (std::size_t i = 0; i < a1_col.size(); ++i) a(static_cast<int>(i), 0) = a1_col[i];
        out.c1 = lstsq(a, b1)[0];
    }
    {
        MatD a(static_cast<int>(a2_re.size()), 2);
        for (std::size_t i = 0; i < a2_re.size(); ++i) {
            a(static_cast<int>(i), 0) = a2_re[i];
            a(static_cast<int>(i), 1) = a2_im[i];
        }
        auto st = lstsq(a, b2);
        out.c2 = cplx(st[0], st[1]);
    }
    double num = 0, den = 0;
    for (std::size_t i = 0; i < b1.size(); ++i) {
        num += std::norm(b1[i] - out.c1 * a1_col[i]);
        den += std::norm(b1[i]);
    }
    for (std::size_t i = 0; i < b2.size(); ++i) {
        const double pred = out.c2.real() * a2_re[i] + out.c2.imag() * a2_im[i];
        num += (b2[i] - pred) * (b2[i] - pred);
        den += b2[i] * b2[i];
    }
    out.fit_residual = std::sqrt(num / std::max(den, 1e-300));
    for (std::size_t s = 0; s < rows1.size(); ++s) {
        double n1 = 0, d1 = 0;
        for (std::size_t i = 0; i < rows1[s].first.size(); ++i) {
            n1 += std::norm(rows1[s].second[i] - out.c1 * rows1[s].first[i]);
            d1 += std::norm(rows1[s].second[i]);
        }
        for (std::size_t i = 0; i < rows2[s][2].size(); ++i) {
            const double pred = out.c2.real() * rows2[s][0][i] + out.c2.imag() * rows2[s][1][i];
            n1 += (rows2[s][2][i] - pred) * (rows2[s][2][i] - pred);
            d1 += rows2[s][2][i] * rows2[s][2][i];
        }
        out.max_v_residual = std::max(out.max_v_residual, std::sqrt(n1 / std::max(d1, 1e-300)));
    }
    return out;
}

struct ComplexStarResult {
    KForm value;
    double solve_residual = 0.0;
    double purity_residual = 0.0;
};

// Antilinear complex star on (p,0)-forms: the unique (n-p,0)-form with
// c2 (star_c a) ^ conj(Omega) = *(conj(a)).
inline ComplexStarResult complex_hodge_star(const CalibrationPair& pair, const ComplexStructureTensor& ic,
                                            const Metric& g, int orient, cplx c2, const KForm& a,
                                            double rank_threshold = 1e-8)
{
    const int p = a.degree();
    const int n = pair.n;
    ComplexStarResult out;
    out.purity_residual = type_purity_residual(ic, a, {p}) / std::max(1.0, a.norm_inf());
    if (out.purity_residual > 1e-6) throw std::invalid_argument("complex_hodge_star: input not of pure type (p,0)");
    const KForm rhs = hodge_star(g, orient, conjugate(a));
    const std::vector<KForm> holo = holomorphic_covector_basis(ic, rank_threshold);
    const std::vector<KForm> basis = holomorphic_wedge_basis(holo, n - p);
    MatC m(rhs.size(), static_cast<int>(basis.size()));
    for (std::size_t j = 0; j < basis.size(); ++j) {
        const KForm col = c2 * wedge(basis[j], conjugate(pair.Omega));
        for (int i = 0; i < rhs.size(); ++i) m(i, static_cast<int>(j)) = col[i];
    }
    std::vector<cplx> b(rhs.coeffs());
    const std::vector<cplx> x = lstsq(m, b);
    out.value = KForm(a.ambient_dim(), n - p);
    for (std::size_t j = 0; j < basis.size(); ++j) out.value += x[j] * basis[j];
    const std::vector<cplx> fit = matvec(m, x);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        num += std::norm(fit[i] - b[i]);
        den += std::norm(b[i]);
    }
    out.solve_residual = std::sqrt(num / std::max(den, 1e-300));
    return out;
}

} // namespace calib
