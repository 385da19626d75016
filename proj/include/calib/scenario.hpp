#pragma once

#include <chrono>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "slag.hpp"

namespace calib {

using json = nlohmann::ordered_json;

inline const char* version_string() { return "0.1.0"; }

struct ScenarioError : std::runtime_error {
    std::string field;
    ScenarioError(std::string f, const std::string& msg) : std::runtime_error(msg), field(std::move(f)) {}
};

struct Scenario {
    int n = 0;
    KForm Omega;
    KForm omega;
    std::optional<SubtorusSpec> subtorus;
    double rank_threshold = 1e-8;
    double residual_tolerance = 1e-10;
    int samples = 100;
    std::uint64_t seed = 1234;
    std::vector<std::string> checks;
    json echo; // normalized input, replayed into reports

    CalibrationPair pair() const { return CalibrationPair{n, Omega, omega}; }
};

inline const std::vector<std::string>& all_check_names()
{
    static const std::vector<std::string> names = {"structure", "isotropy",  "e1_crosscheck", "ellipticity", "h1_models",
                                                   "h0_model",  "slag",      "relative",      "moduli"};
    return names;
}

namespace detail {

inline KForm parse_form(const json& spec, int n, int degree, bool real_flagged, double residual_tolerance,
                        const std::string& field)
{
    const int dim = 2 * n;
    if (spec.is_string()) {
        const std::string s = spec.get<std::string>();
        if (s != "standard") throw ScenarioError(field, field + ": unknown preset '" + s + "'");
        return real_flagged ? standard_symplectic(n) : standard_omega_upper(n);
    }
    if (!spec.is_array()) throw ScenarioError(field, field + ": expected \"standard\" or a coefficient list");
    KForm f(dim, degree);
    for (const auto& entry : spec) {
        if (!entry.is_object() || !entry.contains("idx"))
            throw ScenarioError(field, field + ": each coefficient needs an idx array");
        const auto& idx = entry["idx"];
        if (!idx.is_array() || static_cast<int>(idx.size()) != degree)
            throw ScenarioError(field, field + ": idx list of wrong length (expected " + std::to_string(degree) + ")");
        MultiIndex mi;
        for (const auto& v : idx) {
            const int i = v.get<int>();
            if (i < 0 || i >= dim) throw ScenarioError(field, field + ": index out of range [0," + std::to_string(dim) + ")");
            mi.push_back(i);
        }
        for (std::size_t i = 1; i < mi.size(); ++i)
            if (mi[i] <= mi[i - 1]) throw ScenarioError(field, field + ": idx must be strictly increasing");
        const double re = entry.value("re", 0.0);
        const double im = entry.value("im", 0.0);
        if (real_flagged && std::abs(im) > residual_tolerance)
            throw ScenarioError(field, field + ": imaginary part on a real form");
        f[lex_rank(mi, dim)] += cplx(re, im);
    }
    return f;
}

} // namespace detail

inline Scenario scenario_from_json(const json& doc)
{
    Scenario s;
    if (!doc.contains("n")) throw ScenarioError("n", "n: missing");
    s.n = doc["n"].get<int>();
    if (s.n < 1 || s.n > 4) throw ScenarioError("n", "n: must be in [1,4]");
    if (doc.contains("tolerances")) {
        const auto& t = doc["tolerances"];
        s.rank_threshold = t.value("rank_threshold", s.rank_threshold);
        s.residual_tolerance = t.value("residual_tolerance", s.residual_tolerance);
    }
    if (s.rank_threshold <= 0 || s.residual_tolerance <= 0)
        throw ScenarioError("tolerances", "tolerances: must be positive");
    s.samples = doc.value("samples", s.samples);
    if (s.samples < 1) throw ScenarioError("samples", "samples: must be >= 1");
    if (doc.contains("seed")) s.seed = doc["seed"].get<std::uint64_t>();
    if (!doc.contains("Omega")) throw ScenarioError("Omega", "Omega: missing");
    if (!doc.contains("omega")) throw ScenarioError("omega", "omega: missing");
    s.Omega = detail::parse_form(doc["Omega"], s.n, s.n, false, s.residual_tolerance, "Omega");
    s.omega = detail::parse_form(doc["omega"], s.n, 2, true, s.residual_tolerance, "omega");
    if (doc.contains("subtorus") && !doc["subtorus"].is_null()) {
        const auto& sub = doc["subtorus"];
        if (!sub.is_array() || static_cast<int>(sub.size()) != s.n)
            throw ScenarioError("subtorus", "subtorus: expected " + std::to_string(s.n) + " rows");
        SubtorusSpec spec;
        for (const auto& row : sub) {
            if (!row.is_array() || static_cast<int>(row.size()) != 2 * s.n)
                throw ScenarioError("subtorus", "subtorus: rows must have length " + std::to_string(2 * s.n));
            std::vector<long long> r;
            for (const auto& v : row) {
                if (!v.is_number_integer()) throw ScenarioError("subtorus", "subtorus: entries must be integers");
                r.push_back(v.get<long long>());
            }
            spec.basis_rows.push_back(std::move(r));
        }
        if (spec.rational_rank() != s.n) throw ScenarioError("subtorus", "subtorus: rank over the rationals must be n");
        s.subtorus = spec;
    }
    std::vector<std::string> requested;
    if (doc.contains("checks")) {
        for (const auto& c : doc["checks"]) requested.push_back(c.get<std::string>());
    } else {
        requested = {"all"};
    }
    if (requested.size() == 1 && requested[0] == "all") {
        s.checks = all_check_names();
    } else {
        for (const auto& name : requested) {
            bool known = false;
            for (const auto& k : all_check_names()) known = known || k == name;
            if (!known) throw ScenarioError("checks", "checks: unknown check '" + name + "'");
        }
        // run in canonical dependency order, each requested check once
        for (const auto& k : all_check_names())
            for (const auto& name : requested)
                if (k == name && (s.checks.empty() || s.checks.back() != k)) s.checks.push_back(k);
    }
    s.echo = doc;
    return s;
}

inline Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ScenarioError("file", "cannot open scenario file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ScenarioError("file", std::string("scenario parse error: ") + e.what());
    }
    return scenario_from_json(doc);
}

struct RunReport {
    json doc;
    bool all_pass = false;
};

namespace detail {

// Lazily shared per-scenario state so the checks agree on derived objects.
struct RunState {
    const Scenario& s;
    CalibrationPair pair;
    std::optional<StructureReport> ke;
    std::optional<ComplexStructureTensor> ic;
    std::optional<MetricFromResult> metric;
    int orient = 1;
    std::optional<StarConstants> stars;
    std::optional<SubspaceBasis> h1_orbit;
    std::optional<SubspaceBasis> h1_eq19;
    std::optional<SubspaceBasis> e0_ke;
    std::optional<SlagReport> slag;
    std::optional<SelfDualResult> e0m;
    std::optional<RestrictionMaps> gammas;
    std::optional<Gamma1Result> gamma1;
    std::optional<ConeResult> cone;
    std::optional<RelativeDeRhamResult> reldr;

    explicit RunState(const Scenario& sc) : s(sc), pair(sc.pair()) {}

    const StructureReport& ke_report()
    {
        if (!ke) ke = check_kahler_einstein(pair, s.residual_tolerance, s.rank_threshold);
        return *ke;
    }
    const ComplexStructureTensor& complex_tensor()
    {
        if (!ic) ic = complex_structure(pair.Omega, s.rank_threshold);
        return *ic;
    }
    const MetricFromResult& metric_result()
    {
        if (!metric) {
            metric = metric_from(pair, complex_tensor());
            orient = orientation_sign(pair);
        }
        return *metric;
    }
    const StarConstants& star_consts()
    {
        if (!stars) {
            Rng rng(s.seed ^ 0x5741u);
            stars = star_constants(pair, metric_result().metric, orient, rng, std::max(12, s.samples / 4));
        }
        return *stars;
    }
    const SubspaceBasis& h1_orbit_basis()
    {
        if (!h1_orbit) h1_orbit = span_E1_orbit(ke_tuple(pair), s.rank_threshold);
        return *h1_orbit;
    }
    const SubspaceBasis& h1_eq_basis()
    {
        if (!h1_eq19) h1_eq19 = span_E1_equations(pair, complex_tensor(), false, s.rank_threshold);
        return *h1_eq19;
    }
    const SubspaceBasis& e0_basis()
    {
        if (!e0_ke) e0_ke = span_E0(ke_tuple(pair), s.rank_threshold);
        return *e0_ke;
    }
};

struct CheckOutcome {
    std::string status = "pass"; // pass | fail | skip
    std::string reason;          // for skips
    json payload = json::object();
    std::vector<std::string> failed_invariants;

    void require(bool ok, const std::string& invariant)
    {
        if (!ok) {
            status = "fail";
            failed_invariants.push_back(invariant);
        }
    }
};

inline CheckOutcome run_structure(RunState& st)
{
    CheckOutcome out;
    const StructureReport cy = check_calabi_yau(st.pair.Omega, st.s.rank_threshold);
    const StructureReport& ke = st.ke_report();
    json clauses, residuals;
    for (const auto& [k, v] : ke.clauses) clauses[k] = v;
    for (const auto& [k, v] : ke.residuals) residuals[k] = v;
    out.payload["calabi_yau_pass"] = cy.pass;
    out.payload["kahler_einstein_pass"] = ke.pass;
    out.payload["clauses"] = clauses;
    out.payload["residuals"] = residuals;
    out.payload["c_n"] = {{"re", ke.derived_constant_cn.real()}, {"im", ke.derived_constant_cn.imag()}};
    out.payload["metric_order"] = ke.metric_order;
    out.require(ke.pass, "kahler_einstein_clauses");
    return out;
}

inline CheckOutcome run_isotropy(RunState& st)
{
    CheckOutcome out;
    const int n = st.s.n;
    const Metric& g = st.metric_result().metric;
    const IsotropyResult ke_iso = isotropy_algebra(ke_tuple(st.pair), g, st.s.rank_threshold);
    const IsotropyResult cy_iso = isotropy_algebra(cy_tuple(st.pair.Omega), g, st.s.rank_threshold);
    out.payload["ke_isotropy_dim"] = ke_iso.algebra.dim();
    out.payload["cy_isotropy_dim"] = cy_iso.algebra.dim();
    out.payload["expected_ke"] = n * n - 1;
    out.payload["expected_cy"] = 2 * (n * n - 1);
    out.payload["metrical_residual"] = ke_iso.metrical_residual;
    out.require(ke_iso.algebra.dim() == n * n - 1, "ke_isotropy_dimension");
    out.require(cy_iso.algebra.dim() == 2 * (n * n - 1), "cy_isotropy_dimension");
    out.require(ke_iso.algebra.dim() == 0 || ke_iso.metrical, "ke_isotropy_metrical");
    return out;
}

inline CheckOutcome run_e1_crosscheck(RunState& st)
{
    CheckOutcome out;
    const int n = st.s.n;
    const SubspaceBasis& e0 = st.e0_basis();
    const SubspaceBasis& e1 = st.h1_orbit_basis();
    const SubspaceBasis e1eq = span_E1_equations(st.pair, st.complex_tensor(), true, st.s.rank_threshold);
    const SubspaceBasis e1w = span_E1_wedge(ke_tuple(st.pair), st.s.rank_threshold);
    const SubspaceBasis e1cy = span_E1_orbit(cy_tuple(st.pair.Omega), st.s.rank_threshold);
    const IsotropyResult iso = isotropy_algebra(ke_tuple(st.pair), st.metric_result().metric, st.s.rank_threshold);
    const double mc = mutual_containment_residual(e1, e1eq);
    const double mw = mutual_containment_residual(e1, e1w);
    out.payload["e0_dim"] = e0.dim();
    out.payload["e1_orbit_dim"] = e1.dim();
    out.payload["e1_equations_dim"] = e1eq.dim();
    out.payload["e1_wedge_dim"] = e1w.dim();
    out.payload["e1_cy_dim"] = e1cy.dim();
    out.payload["orbit_vs_equations_residual"] = mc;
    out.payload["orbit_vs_wedge_residual"] = mw;
    out.payload["wedge_presentation_matches_orbit"] = (e1w.dim() == e1.dim() && mw < 1e-8);
    out.require(e0.dim() == 2 * n, "e0_dimension");
    out.require(e1.dim() == 3 * n * n + 1, "e1_orbit_dimension");
    out.require(e1cy.dim() == 2 * n * n + 2, "e1_cy_dimension");
    out.require(e1eq.dim() == e1.dim() && mc < 1e-8, "e1_orbit_equals_equations");
    out.require(e1.dim() == 4 * n * n - iso.algebra.dim(), "e1_rank_nullity");
    return out;
}

inline CheckOutcome run_ellipticity(RunState& st)
{
    CheckOutcome out;
    const int dim = st.pair.ambient_dim();
    int failures = 0, tested = 0;
    double worst = 0;
    for (int mode = 0; mode < 2; ++mode) {
        const FormTuple t = mode == 0 ? ke_tuple(st.pair) : cy_tuple(st.pair.Omega);
        const SubspaceBasis e0 = span_E0(t, st.s.rank_threshold);
        const SubspaceBasis e1 = span_E1_orbit(t, st.s.rank_threshold);
        const SubspaceBasis e2 = span_E2(t, e1, st.s.rank_threshold);
        Rng rng(st.s.seed ^ (mode == 0 ? 0xE111u : 0xE222u));
        std::vector<Vector> dirs;
        for (int a = 0; a < dim; ++a) dirs.push_back(Vector::unit(dim, a));
        for (int r = 0; r < st.s.samples; ++r) dirs.push_back(rng.unit_vector(dim));
        for (const Vector& u : dirs) {
            const ExactnessReport rep = symbol_exactness(e0, e1, e2, u, st.s.rank_threshold);
            ++tested;
            worst = std::max(worst, rep.containment_residual);
            if (!rep.exact) ++failures;
        }
        out.payload[mode == 0 ? "ke" : "cy"] = {{"e0_dim", e0.dim()}, {"e1_dim", e1.dim()}, {"e2_dim", e2.dim()}};
    }
    out.payload["directions_tested"] = tested;
    out.payload["failures"] = failures;
    out.payload["max_containment_residual"] = worst;
    out.require(failures == 0, "symbol_exactness_all_directions");
    out.require(worst < 1e-8, "symbol_complex_containment");
    return out;
}

inline CheckOutcome run_h1_models(RunState& st)
{
    CheckOutcome out;
    const int n = st.s.n;
    const SubspaceBasis& orbit = st.h1_orbit_basis();
    const SubspaceBasis& eq = st.h1_eq_basis();
    const double inclusion = containment_residual(orbit, eq);
    const KahlerProjectionReport proj = kahler_projection_surjective(st.pair, orbit, eq, st.s.rank_threshold);

    const FormSpace& space = orbit.space;
    const KForm phase_alpha = cplx(0, 1) * st.pair.Omega;
    const KForm zero2(st.pair.ambient_dim(), 2);
    const std::vector<double> phase_vec = space.encode({phase_alpha, zero2});
    const KForm scale_alpha = cplx(n, 0) * st.pair.Omega;
    const KForm scale_beta = cplx(2, 0) * st.pair.omega;
    const std::vector<double> scale_vec = space.encode({scale_alpha, scale_beta.real_part()});
    const double phase_in_orbit = vector_containment_residual(phase_vec, orbit.basis);
    const double scale_in_orbit = vector_containment_residual(scale_vec, orbit.basis);
    const TangentEquationResidual phase_eq = tangent_equation_residual(st.pair, phase_alpha, zero2);
    const TangentEquationResidual scale_eq = tangent_equation_residual(st.pair, scale_alpha, scale_beta.real_part());

    out.payload["h1_orbit_dim"] = orbit.dim();
    out.payload["h1_equations_dim"] = eq.dim();
    out.payload["dimension_gap"] = eq.dim() - orbit.dim();
    out.payload["orbit_in_equations_residual"] = inclusion;
    out.payload["phase_tangent_in_orbit"] = phase_in_orbit;
    out.payload["scaling_tangent_in_orbit"] = scale_in_orbit;
    out.payload["phase_tangent_equation_residual"] = std::max(phase_eq.first, phase_eq.second);
    out.payload["scaling_tangent_equation_residual"] = std::max(scale_eq.first, scale_eq.second);
    out.payload["kahler_projection"] = {{"h1_beta_rank", proj.h1_beta_rank},
                                        {"attainable_beta_rank", proj.attainable_beta_rank},
                                        {"full_h2_dim", proj.full_h2_dim},
                                        {"surjective_onto_attainable", proj.surjective_onto_attainable},
                                        {"surjective_onto_full", proj.surjective_onto_full}};
    out.require(inclusion < 1e-8, "orbit_model_inside_equation_nullspace");
    out.require(phase_in_orbit < 1e-8 && std::max(phase_eq.first, phase_eq.second) < 1e-8, "phase_rotation_tangent");
    out.require(scale_in_orbit < 1e-8 && std::max(scale_eq.first, scale_eq.second) < 1e-8, "scaling_tangent");
    out.require(proj.surjective_onto_attainable, "kahler_projection_surjective");
    return out;
}

inline CheckOutcome run_h0_model(RunState& st)
{
    CheckOutcome out;
    const int n = st.s.n;
    const int dim = st.pair.ambient_dim();
    const Metric& g = st.metric_result().metric;
    const StarConstants& sc = st.star_consts();
    Rng rng2(st.s.seed ^ 0x5742u);
    const StarConstants sc2 = star_constants(st.pair, g, st.orient, rng2, std::max(12, st.s.samples / 4));
    const double batch_gap = std::max(std::abs(sc.c1 - sc2.c1), std::abs(sc.c2 - sc2.c2));

    const CohomologySubspace h0 = h0_model(st.pair, st.complex_tensor(), g, st.orient, sc.c2, st.s.rank_threshold);

    Rng rng(st.s.seed ^ 0x4030u);
    double member_worst = 0, star_identity_worst = 0;
    const int count = std::max(8, st.s.samples / 4);
    for (int i = 0; i < count; ++i) {
        const Vector v = rng.unit_vector(dim);
        const KForm a = interior(v, st.pair.Omega);
        const KForm b = interior(v, st.pair.omega);
        const std::vector<double> vec = h0.basis.space.encode({a, b.real_part()});
        member_worst = std::max(member_worst, vector_containment_residual(vec, h0.basis.basis));
        const KForm b10 = one_zero_part(st.complex_tensor(), b);
        const ComplexStarResult star =
            complex_hodge_star(st.pair, st.complex_tensor(), g, st.orient, sc.c2, b10, st.s.rank_threshold);
        star_identity_worst = std::max(star_identity_worst, (star.value - a).norm_inf());
    }
    // pairs with vanishing 1-form part must vanish: the b-projection has full rank
    MatD bblock(static_cast<int>(binomial(dim, 1)), h0.basis.dim());
    const int a_real = 2 * static_cast<int>(binomial(dim, n - 1));
    for (int c = 0; c < h0.basis.dim(); ++c)
        for (int i = 0; i < bblock.rows(); ++i) bblock(i, c) = h0.basis.basis(a_real + i, c);
    const int brank = rank(bblock, st.s.rank_threshold);

    out.payload["h0_dim"] = h0.basis.dim();
    out.payload["expected_dim"] = 2 * n;
    out.payload["c1"] = {{"re", sc.c1.real()}, {"im", sc.c1.imag()}};
    out.payload["c2"] = {{"re", sc.c2.real()}, {"im", sc.c2.imag()}};
    out.payload["fit_residual"] = sc.fit_residual;
    out.payload["max_v_residual"] = sc.max_v_residual;
    out.payload["batch_independence_gap"] = batch_gap;
    out.payload["membership_residual"] = member_worst;
    out.payload["complex_star_identity_residual"] = star_identity_worst;
    out.payload["b_projection_rank"] = brank;
    out.require(h0.basis.dim() == 2 * n, "h0_dimension");
    out.require(sc.fit_residual < 1e-8, "star_constant_fit");
    out.require(sc.max_v_residual < 1e-8, "star_constant_v_independence");
    out.require(batch_gap < 1e-8, "star_constant_batch_independence");
    out.require(member_worst < 1e-8, "contraction_pairs_in_h0");
    out.require(star_identity_worst < st.s.residual_tolerance * 100, "complex_star_contraction_identity");
    out.require(brank == 2 * n, "h0_graph_over_one_forms");
    return out;
}

inline CheckOutcome run_slag(RunState& st)
{
    CheckOutcome out;
    const SubtorusSpec& m = *st.s.subtorus;
    const Metric& g = st.metric_result().metric;
    st.slag = check_special_lagrangian(st.pair, m, g, st.s.residual_tolerance);
    const SlagReport& rep = *st.slag;
    out.payload["residual_im_omega"] = rep.residual_im_omega;
    out.payload["residual_omega"] = rep.residual_omega;
    out.payload["volume_calibration"] = rep.volume_calibration;
    out.payload["verdict"] = rep.verdict;
    out.require(rep.verdict, "special_lagrangian_equations");
    if (rep.verdict) {
        Rng rng(st.s.seed ^ 0xE0A0u);
        st.e0m = e0m_selfdual(st.pair, m, g, rng, st.s.samples, st.s.rank_threshold);
        out.payload["e0m_dim"] = st.e0m->basis.dim();
        out.payload["selfdual_sign"] = st.e0m->sign;
        out.payload["generator_identity_residual"] = st.e0m->generator_residual;
        out.require(st.e0m->basis.dim() == st.s.n, "e0m_dimension_is_n");
        out.require(st.e0m->generator_residual < st.s.residual_tolerance * 100, "selfdual_generator_identity");
    }
    return out;
}

inline void ensure_relative_computed(RunState& st)
{
    if (st.cone) return;
    const SubtorusSpec& m = *st.s.subtorus;
    const Metric& g = st.metric_result().metric;
    st.gammas = restriction_cohomology_maps(st.pair, m, g, st.s.rank_threshold);
    st.gamma1 = gamma1_sharp(st.pair, m, g, st.h1_orbit_basis(), *st.gammas, st.s.rank_threshold);
    st.cone = relative_h1_cone(m, g, *st.gamma1, st.e0_basis(), *st.e0m, st.s.rank_threshold);
    st.reldr = relative_derham_h1(st.pair, m, g, *st.cone, *st.e0m, st.s.rank_threshold);
}

inline CheckOutcome run_relative(RunState& st)
{
    CheckOutcome out;
    const int n = st.s.n;
    const SubtorusSpec& m = *st.s.subtorus;
    const Metric& g = st.metric_result().metric;
    ensure_relative_computed(st);
    const RestrictionMaps& gm = *st.gammas;
    const H1MModel h1m = h1_M_model(st.pair, m, g, st.complex_tensor(), st.s.rank_threshold);
    const Gamma1Result& g1 = *st.gamma1;
    const ConeResult& cone = *st.cone;
    const RelativeDeRhamResult& rel = *st.reldr;

    const Gamma1Result g1_eq = gamma1_sharp(st.pair, m, g, st.h1_eq_basis(), gm, st.s.rank_threshold);

    out.payload["gamma_h1"] = {{"rank", gm.rank_h1}, {"coker", gm.coker_h1}};
    out.payload["gamma_h2"] = {{"rank", gm.rank_h2}, {"coker", gm.coker_h2}};
    out.payload["gamma_hn"] = {{"rank", gm.rank_hn}, {"coker", gm.coker_hn}};
    out.payload["h1_M_dim"] = h1m.basis.dim();
    out.payload["h1_M_expected"] = 1 + n * (n - 1) / 2;
    out.payload["h1_M_volume_residual"] = h1m.volume_attained_residual;
    out.payload["h1_M_volume_coefficient"] = h1m.volume_coefficient;
    out.payload["h1_M_lambda2_rank"] = h1m.lambda2_rank;
    out.payload["gamma1_rank"] = g1.rank;
    out.payload["gamma1_kernel_dim"] = g1.kernel_dim;
    out.payload["gamma1_kernel_dim_equation_model"] = g1_eq.kernel_dim;
    out.payload["gamma1_image_sum_residual"] = g1.image_sum_residual;
    out.payload["cone"] = {{"dim", cone.dim}, {"ker_kappa1", cone.ker_kappa1}, {"coker_kappa0", cone.coker_kappa0}};
    out.payload["relative_derham_dim"] = rel.dim;
    out.payload["relative_map_rank"] = rel.map_rank;
    out.payload["injective"] = rel.injective;

    out.require(h1m.basis.dim() == 1 + n * (n - 1) / 2, "h1_M_dimension");
    out.require(h1m.volume_attained_residual < 1e-8, "h1_M_volume_class_attained");
    out.require(h1m.lambda2_rank == static_cast<int>(binomial(n, 2)), "h1_M_two_form_factor_full");
    out.require(g1.image_sum_residual < 1e-8, "gamma1_image_direct_sum");
    out.require(g1.rank + g1.kernel_dim == st.h1_orbit_basis().dim(), "gamma1_rank_nullity");
    out.require(cone.dim == gm.coker_h1 + g1.kernel_dim, "cone_dimension_identity");
    out.require(rel.injective, "relative_derham_injectivity");
    out.require(rel.dim >= cone.dim, "relative_derham_dominates_cone");
    return out;
}

inline CheckOutcome run_moduli(RunState& st)
{
    CheckOutcome out;
    ensure_relative_computed(st);
    const H1MModel h1m = h1_M_model(st.pair, *st.s.subtorus, st.metric_result().metric, st.complex_tensor(),
                                    st.s.rank_threshold);
    const ModuliReport rep = moduli_dimension_report(st.h1_orbit_basis(), h1m, *st.e0m, *st.gammas, *st.gamma1,
                                                     *st.cone, *st.reldr);
    out.payload["dim_h1_X"] = rep.dim_h1_X;
    out.payload["dim_h1_M"] = rep.dim_h1_M;
    out.payload["dim_h0_M"] = rep.dim_h0_M;
    out.payload["dim_ker_gamma1"] = rep.dim_ker_gamma1;
    out.payload["dim_coker_gammaH1"] = rep.dim_coker_gammaH1;
    out.payload["dim_h1_XM_cone"] = rep.dim_h1_XM_cone;
    out.payload["dim_relative_derham"] = rep.dim_relative_derham;
    out.payload["fiber_dim"] = rep.dim_coker_gammaH1;
    out.payload["base_dim"] = rep.dim_ker_gamma1;
    out.payload["total_dim"] = rep.dim_h1_XM_cone;
    out.payload["injectivity_verdict"] = rep.injectivity_verdict;
    out.payload["identity_verdict"] = rep.identity_verdict;
    out.require(rep.identity_verdict, "fibration_dimension_identity");
    out.require(rep.injectivity_verdict, "relative_derham_injectivity");
    out.require(rep.dim_h0_M == st.s.n, "h0_M_dimension");
    return out;
}

} // namespace detail

inline RunReport run_checks(const Scenario& s)
{
    detail::RunState st(s);
    json checks = json::object();
    json timings = json::object();
    bool all_pass = true;

    bool structure_pass = false;
    bool slag_pass = false;
    bool slag_ran = false;

    for (const std::string& name : s.checks) {
        detail::CheckOutcome out;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const bool needs_structure = name != "structure";
            const bool needs_subtorus = name == "slag" || name == "relative" || name == "moduli";
            const bool needs_slag = name == "relative" || name == "moduli";
            if (name == "structure") {
                out = detail::run_structure(st);
                structure_pass = out.status == "pass";
            } else if (needs_structure && !structure_pass) {
                out.status = "skip";
                out.reason = "precondition: structure";
            } else if (needs_subtorus && !s.subtorus) {
                out.status = "skip";
                out.reason = "precondition: no subtorus";
            } else if (needs_slag && (!slag_ran || !slag_pass)) {
                out.status = "skip";
                out.reason = "precondition: slag";
            } else if (name == "isotropy") {
                out = detail::run_isotropy(st);
            } else if (name == "e1_crosscheck") {
                out = detail::run_e1_crosscheck(st);
            } else if (name == "ellipticity") {
                out = detail::run_ellipticity(st);
            } else if (name == "h1_models") {
                out = detail::run_h1_models(st);
            } else if (name == "h0_model") {
                out = detail::run_h0_model(st);
            } else if (name == "slag") {
                out = detail::run_slag(st);
                slag_ran = true;
                slag_pass = out.status == "pass";
            } else if (name == "relative") {
                out = detail::run_relative(st);
            } else if (name == "moduli") {
                out = detail::run_moduli(st);
            }
        } catch (const std::exception& e) {
            out.status = "fail";
            out.payload["error"] = e.what();
            out.failed_invariants.push_back("unexpected_error");
        }
        const auto t1 = std::chrono::steady_clock::now();
        json entry;
        entry["status"] = out.status;
        if (!out.reason.empty()) entry["reason"] = out.reason;
        entry["failed_invariants"] = out.failed_invariants;
        entry["detail"] = out.payload;
        checks[name] = entry;
        timings[name] = std::chrono::duration<double, std::milli>(t1 - t0).count();
        if (out.status == "fail") all_pass = false;
    }

    RunReport rep;
    rep.doc["version"] = version_string();
    rep.doc["scenario"] = s.echo;
    rep.doc["seed"] = s.seed;
    rep.doc["all_pass"] = all_pass;
    rep.doc["checks"] = checks;
    rep.doc["timings_ms"] = timings;
    rep.all_pass = all_pass;
    return rep;
}

inline std::string render_text_report(const RunReport& rep)
{
    std::ostringstream os;
    os << "calib " << rep.doc["version"].get<std::string>() << " report\n";
    const auto& checks = rep.doc["checks"];
    for (auto it = checks.begin(); it != checks.end(); ++it) {
        const std::string status = it.value()["status"].get<std::string>();
        std::string line = status == "pass" ? "PASS" : status == "fail" ? "FAIL" : "SKIP";
        os << "  " << line << "  " << it.key();
        if (it.value().contains("reason")) os << "  (" << it.value()["reason"].get<std::string>() << ")";
        if (status == "fail") {
            os << "  [";
            bool first = true;
            for (const auto& inv : it.value()["failed_invariants"]) {
                if (!first) os << ", ";
                os << inv.get<std::string>();
                first = false;
            }
            os << "]";
        }
        os << "\n";
    }
    os << (rep.all_pass ? "ALL CHECKS PASSED" : "CHECK FAILURES PRESENT") << "\n";
    return os.str();
}

inline void emit_report(const RunReport& rep, const std::string& format, std::ostream& out)
{
    if (format == "json") {
        out << rep.doc.dump(2) << "\n";
    } else if (format == "text") {
        out << render_text_report(rep);
    } else {
        throw std::invalid_argument("emit_report: unknown format '" + format + "'");
    }
}

inline void emit_report_file(const RunReport& rep, const std::string& format, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_report: cannot open " + path);
    emit_report(rep, format, out);
}

} // namespace calib
