#include <doctest.h>

#include "oracles.hpp"

using namespace calib;

namespace {

SubtorusSpec coordinate_subtorus(int n)
{
    SubtorusSpec m;
    for (int i = 0; i < n; ++i) {
        std::vector<long long> row(2 * n, 0);
        row[i] = 1;
        m.basis_rows.push_back(row);
    }
    return m;
}

struct Setup {
    CalibrationPair pair;
    ComplexStructureTensor ic;
    Metric g;

    explicit Setup(const CalibrationPair& p) : pair(p), ic(complex_structure(p.Omega)), g(metric_from(p, ic).metric) {}
};

} // namespace

TEST_CASE("special lagrangian verdicts on model subtori")
{
    for (int n = 1; n <= 3; ++n) {
        const Setup s(standard_pair(n));
        const SlagReport rep = check_special_lagrangian(s.pair, coordinate_subtorus(n), s.g);
        CHECK(rep.verdict);
        CHECK(rep.residual_im_omega < 1e-14);
        CHECK(rep.residual_omega < 1e-14);
        CHECK(std::abs(rep.volume_calibration - 1.0) < 1e-12);
    }

    // the y-span is calibrated with the opposite phase
    const Setup s2(standard_pair(2));
    SubtorusSpec yspan;
    yspan.basis_rows = {{0, 0, 1, 0}, {0, 0, 0, 1}};
    const SlagReport ry = check_special_lagrangian(s2.pair, yspan, s2.g);
    CHECK(ry.verdict);
    CHECK(std::abs(ry.volume_calibration + 1.0) < 1e-12);

    // a complex line is not even lagrangian
    SubtorusSpec line;
    line.basis_rows = {{1, 0, 0, 0}, {0, 0, 1, 0}}; // span{x1-dual, y1-dual}
    const SlagReport rl = check_special_lagrangian(s2.pair, line, s2.g);
    CHECK(!rl.verdict);
    CHECK(rl.residual_omega > 0.5);

    // lagrangian but out of phase: span{x1, x2 rotated toward y2}
    SubtorusSpec tilt;
    tilt.basis_rows = {{1, 0, 0, 0}, {0, 1, 0, 1}};
    const SlagReport rt = check_special_lagrangian(s2.pair, tilt, s2.g);
    CHECK(!rt.verdict);
    CHECK(rt.residual_omega < 1e-14);
    CHECK(rt.residual_im_omega > 0.5);
}

TEST_CASE("phase sweep along rational rotations of a lagrangian plane")
{
    // span{x1, cos t x2 + sin t y2} is lagrangian for every t and special
    // exactly when sin t = 0; rational points on the circle probe both sides
    const Setup s(standard_pair(2));
    struct Probe {
        long long c, sn, d;
    };
    const std::vector<Probe> probes = {{1, 0, 1}, {-1, 0, 1}, {0, 1, 1}, {3, 4, 5}, {4, -3, 5}, {-5, 12, 13}};
    for (const Probe& pr : probes) {
        SubtorusSpec m;
        m.basis_rows = {{1, 0, 0, 0}, {0, pr.c, 0, pr.sn}};
        const SlagReport rep = check_special_lagrangian(s.pair, m, s.g);
        CHECK(rep.residual_omega < 1e-12);
        const double sin_t = static_cast<double>(pr.sn) / pr.d;
        if (pr.sn == 0) {
            CHECK(rep.verdict);
        } else {
            CHECK(!rep.verdict);
            CHECK(rep.residual_im_omega == doctest::Approx(std::abs(sin_t)).epsilon(1e-9));
        }
    }
}

TEST_CASE("self-dual pairs: dimension, calibrated sign, generator identity")
{
    for (int n = 1; n <= 3; ++n) {
        const Setup s(standard_pair(n));
        Rng rng(40 + n);
        const SelfDualResult sd = e0m_selfdual(s.pair, coordinate_subtorus(n), s.g, rng, 100);
        CHECK(sd.basis.dim() == n);
        CHECK(sd.generator_residual < 1e-10);
        CHECK(sd.sign == -1); // the positively calibrated orientation flips the star

        // the basis pair (dx1, sign * star dx1) belongs to the model
        const Metric gm = Metric::euclidean(n);
        const KForm a1 = KForm::basis(n, {0});
        const KForm an1 = cplx(sd.sign, 0) * hodge_star(gm, 1, a1);
        const std::vector<double> v = sd.basis.space.encode({a1, an1});
        CHECK(vector_containment_residual(v, sd.basis.basis) < 1e-10);
    }

    // opposite-phase subtorus carries the opposite sign
    const Setup s2(standard_pair(2));
    SubtorusSpec yspan;
    yspan.basis_rows = {{0, 0, 1, 0}, {0, 0, 0, 1}};
    Rng rng(99);
    const SelfDualResult sd = e0m_selfdual(s2.pair, yspan, s2.g, rng, 50);
    CHECK(sd.basis.dim() == 2);
    CHECK(sd.sign == 1);
    CHECK(sd.generator_residual < 1e-10);
}

TEST_CASE("restriction maps on cohomology for the coordinate subtorus")
{
    const Setup s(standard_pair(2));
    const RestrictionMaps rm = restriction_cohomology_maps(s.pair, coordinate_subtorus(2), s.g);
    CHECK(rm.rank_h1 == 2);
    CHECK(rm.coker_h1 == 0);
    CHECK(rm.rank_h2 == 1); // only dx1 ^ dx2 survives
    CHECK(rm.rank_hn == 1);

    // enumeration oracle: restrict each of the six basis 2-forms by hand
    const MatD j = subtorus_inclusion(coordinate_subtorus(2), s.g);
    int surviving = 0;
    for (const MultiIndex& mi : multi_indices(4, 2))
        if (pullback(j, KForm::basis(4, mi)).norm_inf() > 1e-12) ++surviving;
    CHECK(surviving == 1);

    const Setup s3(standard_pair(3));
    const RestrictionMaps rm3 = restriction_cohomology_maps(s3.pair, coordinate_subtorus(3), s3.g);
    CHECK(rm3.rank_h1 == 3);
    CHECK(rm3.rank_h2 == 3);
    CHECK(rm3.rank_hn == 1);
}

TEST_CASE("h1 model on the subtorus attains the volume class and all 2-forms")
{
    for (int n = 2; n <= 3; ++n) {
        const Setup s(standard_pair(n));
        const H1MModel h1m = h1_M_model(s.pair, coordinate_subtorus(n), s.g, s.ic);
        CHECK(h1m.basis.dim() == 1 + n * (n - 1) / 2);
        CHECK(h1m.volume_attained_residual < 1e-10);
        CHECK(h1m.volume_coefficient == doctest::Approx(-n).epsilon(1e-10));
        CHECK(h1m.lambda2_rank == static_cast<int>(binomial(n, 2)));
    }
    const Setup s1(standard_pair(1));
    CHECK(h1_M_model(s1.pair, coordinate_subtorus(1), s1.g, s1.ic).basis.dim() == 1);
}

TEST_CASE("gamma1: image decomposition, kernel dimension, rank-nullity")
{
    const Setup s(standard_pair(2));
    const SubtorusSpec m = coordinate_subtorus(2);
    const RestrictionMaps rm = restriction_cohomology_maps(s.pair, m, s.g);
    const SubspaceBasis h1x = span_E1_orbit(ke_tuple(s.pair));
    const Gamma1Result g1 = gamma1_sharp(s.pair, m, s.g, h1x, rm);
    CHECK(g1.rank == 1 + rm.rank_h2); // = 2
    CHECK(g1.kernel_dim == 11);       // 13 - 2, pinned by the independent rank oracle below
    CHECK(g1.rank + g1.kernel_dim == h1x.dim());
    CHECK(g1.image_sum_residual < 1e-8);

    // independent oracle: plain elimination on the same matrix
    CHECK(oracles::gauss_rank(g1.matrix, 1e-10) == 2);

    // the phase-rotation tangent maps onto the volume class
    const MatD j = subtorus_inclusion(m, s.g);
    const KForm rot_im = gl_act(s.ic.matrix, s.pair.Omega).imag_part();
    const KForm restricted = pullback(j, rot_im);
    CHECK(std::abs(restricted[0].real() + 2.0) < 1e-10); // -n vol_M at n = 2
}

TEST_CASE("mapping cone dimension and the exact-sequence identity")
{
    for (int n = 2; n <= 3; ++n) {
        const Setup s(standard_pair(n));
        const SubtorusSpec m = coordinate_subtorus(n);
        const RestrictionMaps rm = restriction_cohomology_maps(s.pair, m, s.g);
        const SubspaceBasis h1x = span_E1_orbit(ke_tuple(s.pair));
        const SubspaceBasis e0 = span_E0(ke_tuple(s.pair));
        Rng rng(60 + n);
        const SelfDualResult sd = e0m_selfdual(s.pair, m, s.g, rng, 30);
        const Gamma1Result g1 = gamma1_sharp(s.pair, m, s.g, h1x, rm);
        const ConeResult cone = relative_h1_cone(m, s.g, g1, e0, sd);
        CHECK(cone.coker_kappa0 == 0);
        CHECK(cone.dim == rm.coker_h1 + g1.kernel_dim);
        if (n == 2) CHECK(cone.dim == 11);
        if (n == 3) CHECK(cone.dim == 24);

        const RelativeDeRhamResult rel = relative_derham_h1(s.pair, m, s.g, cone, sd);
        CHECK(rel.injective);
        CHECK(rel.map_rank == cone.dim);
        CHECK(rel.dim >= cone.dim);
        CHECK(rel.containment < 1e-10);

        const ModuliReport rep = moduli_dimension_report(h1x, h1_M_model(s.pair, m, s.g, s.ic), sd, rm, g1, cone, rel);
        CHECK(rep.identity_verdict);
        CHECK(rep.injectivity_verdict);
        CHECK(rep.dim_h0_M == n);
        CHECK(rep.dim_coker_gammaH1 == 0);
        CHECK(rep.dim_h1_XM_cone == rep.dim_coker_gammaH1 + rep.dim_ker_gamma1);
    }
}

TEST_CASE("cone dimension is invariant under subtorus-preserving deformations")
{
    const Setup base(standard_pair(2));
    const SubtorusSpec m = coordinate_subtorus(2);
    Rng rng(70);
    for (int trial = 0; trial < 8; ++trial) {
        // block-triangular perturbations fix V_M, so M stays special lagrangian
        MatD g = MatD::identity(4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (!(i >= 2 && j < 2)) g(i, j) += 0.08 * rng.sym();
        const CalibrationPair p = pullback_pair(g, base.pair);
        const Setup s(p);
        const SlagReport rep = check_special_lagrangian(p, m, s.g);
        REQUIRE(rep.verdict);
        const RestrictionMaps rm = restriction_cohomology_maps(p, m, s.g);
        const SubspaceBasis h1x = span_E1_orbit(ke_tuple(p));
        const SubspaceBasis e0 = span_E0(ke_tuple(p));
        Rng r2(71 + trial);
        const SelfDualResult sd = e0m_selfdual(p, m, s.g, r2, 20);
        const Gamma1Result g1 = gamma1_sharp(p, m, s.g, h1x, rm);
        const ConeResult cone = relative_h1_cone(m, s.g, g1, e0, sd);
        CHECK(cone.dim == 11);
    }
}

TEST_CASE("relative de rham dimensions dominate the cone")
{
    // frozen values: realified (Lambda^n_C + Lambda^2) minus the rank of the
    // surjective restriction (1 + C(n,2))
    const int expected_rel[] = {0, 4, 16, 51};
    for (int n = 1; n <= 3; ++n) {
        const Setup s(standard_pair(n));
        const SubtorusSpec m = coordinate_subtorus(n);
        const RestrictionMaps rm = restriction_cohomology_maps(s.pair, m, s.g);
        const SubspaceBasis h1x = span_E1_orbit(ke_tuple(s.pair));
        const SubspaceBasis e0 = span_E0(ke_tuple(s.pair));
        Rng rng(80 + n);
        const SelfDualResult sd = e0m_selfdual(s.pair, m, s.g, rng, 20);
        const Gamma1Result g1 = gamma1_sharp(s.pair, m, s.g, h1x, rm);
        const ConeResult cone = relative_h1_cone(m, s.g, g1, e0, sd);
        const RelativeDeRhamResult rel = relative_derham_h1(s.pair, m, s.g, cone, sd);
        CHECK(rel.dim == expected_rel[n]);
        CHECK(rel.dim >= cone.dim);
        CHECK(rel.injective);
    }
}

TEST_CASE("subtorus validation")
{
    SubtorusSpec bad;
    bad.basis_rows = {{1, 0, 0, 0}, {2, 0, 0, 0}};
    CHECK(bad.rational_rank() == 1);
    const Setup s(standard_pair(2));
    CHECK_THROWS_AS(check_special_lagrangian(s.pair, bad, s.g), std::invalid_argument);
}
