#include <filesystem>
#include <future>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include <calib/calib.hpp>

namespace fs = std::filesystem;

namespace {

const std::map<std::string, std::string>& check_descriptions()
{
    static const std::map<std::string, std::string> d = {
        {"structure",
         "Verifies the defining identities of the pair (Omega, omega): the contraction kernel of Omega has complex "
         "dimension n and meets its conjugate trivially; Omega ^ omega = 0; Omega ^ conj(Omega) equals the dimensional "
         "constant times omega^n; and the induced symmetric form is positive definite."},
        {"isotropy",
         "Computes the stabilizer algebra of the pair inside gl(2n) and of Omega alone, checks the expected dimensions "
         "(n^2-1 and 2(n^2-1)), and verifies every stabilizer element is infinitesimally orthogonal for the induced "
         "metric."},
        {"e1_crosscheck",
         "Builds the deformation space E^1 three ways: as the gl-orbit tangent span, as the nullspace of the linearized "
         "structure equations with the bidegree restriction, and as the covector-wedge span. Dimensions (3n^2+1 for the "
         "pair, 2n^2+2 for Omega alone) and mutual containment are verified."},
        {"ellipticity",
         "For every coordinate direction and a seeded sample of random unit covectors u, checks exactness of "
         "E^0 -u^-> E^1 -u^-> E^2 by rank equality and containment, for both the pair and the Omega-only structure."},
        {"h1_models",
         "Compares the two models of the first cohomology of the deformation complex on the torus: the orbit span and "
         "the nullspace of the cohomological equations. Verifies the inclusion, reports the dimension gap, checks the "
         "phase-rotation and scaling tangents, and tests surjectivity of the projection onto the 2-form factor."},
        {"h0_model",
         "Fits the Hodge-star constants c1, c2 over random contractions, checks batch- and direction-independence, "
         "builds H^0 as the graph of the antilinear complex star over real 1-forms, and verifies its dimension is 2n."},
        {"slag",
         "Restricts Im(Omega) and omega to the subtorus and reports the residuals, the calibration factor of Re(Omega) "
         "against the induced volume, the self-dual generator identity with its calibrated sign, and dim E^0_M = n."},
        {"relative",
         "Computes the restriction maps on cohomology, the map gamma^1 with kernel and image (checked against "
         "H^n(M) + Image gamma_H2), the mapping-cone H^1 with the dimension identity "
         "cone = coker gamma_H1 + ker gamma^1, and injectivity into the relative de Rham space."},
        {"moduli",
         "Assembles the dimension report of the relative moduli problem: fiber = coker gamma_H1, base = ker gamma^1, "
         "total = H^1 of the cone, with the fibration identity and injectivity verdicts."},
    };
    return d;
}

int exit_code_for(const calib::RunReport& rep) { return rep.all_pass ? 0 : 1; }

struct CommonOpts {
    std::string format = "text";
    std::string output;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
};

calib::Scenario load_with_overrides(const std::string& path, const CommonOpts& opts)
{
    calib::Scenario s = calib::load_scenario(path);
    if (opts.seed) {
        s.seed = *opts.seed;
        s.echo["seed"] = *opts.seed;
    }
    if (opts.tol) {
        s.residual_tolerance = *opts.tol;
        s.echo["tolerances"]["residual_tolerance"] = *opts.tol;
    }
    return s;
}

void write_or_print(const calib::RunReport& rep, const CommonOpts& opts)
{
    if (opts.output.empty()) {
        calib::emit_report(rep, opts.format, std::cout);
    } else {
        calib::emit_report_file(rep, opts.format, opts.output);
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"calib: verification of calibrated linear structures and their subtorus geometry"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string scenario_path;
    std::string corpus_dir = "scenarios";
    std::string explain_name;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--format", opts.format, "Report format: json|text")->check(CLI::IsMember({"json", "text"}));
        cmd->add_option("--output", opts.output, "Write the report to this path instead of stdout");
        cmd->add_option_function<std::uint64_t>(
            "--seed", [&](std::uint64_t v) { opts.seed = v; }, "Override the scenario seed");
        cmd->add_option_function<double>(
            "--tol", [&](double v) { opts.tol = v; }, "Override the residual tolerance");
    };

    CLI::App* check = app.add_subcommand("check", "Run the checks of a single scenario file");
    check->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    add_common(check);

    CLI::App* corpus = app.add_subcommand("corpus", "Run every scenario in a directory");
    corpus->add_option("--dir", corpus_dir, "Directory with *.json scenario files");
    add_common(corpus);

    CLI::App* explain = app.add_subcommand("explain", "Describe what a check verifies");
    explain->add_option("check", explain_name, "Check name (omit for the full list)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (check->parsed()) {
            const calib::Scenario s = load_with_overrides(scenario_path, opts);
            const calib::RunReport rep = calib::run_checks(s);
            write_or_print(rep, opts);
            return exit_code_for(rep);
        }
        if (corpus->parsed()) {
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(corpus_dir))
                if (entry.path().extension() == ".json") files.push_back(entry.path());
            std::sort(files.begin(), files.end());
            if (files.empty()) {
                std::cerr << "corpus: no scenario files in " << corpus_dir << "\n";
                return 2;
            }
            std::vector<std::future<calib::RunReport>> futures;
            std::vector<calib::Scenario> scenarios;
            for (const auto& f : files) scenarios.push_back(load_with_overrides(f.string(), opts));
            for (const auto& s : scenarios)
                futures.push_back(std::async(std::launch::async, [&s] { return calib::run_checks(s); }));
            bool all = true;
            calib::json combined = calib::json::object();
            combined["version"] = calib::version_string();
            combined["reports"] = calib::json::array();
            for (std::size_t i = 0; i < futures.size(); ++i) {
                calib::RunReport rep = futures[i].get();
                all = all && rep.all_pass;
                if (opts.format == "text") {
                    std::cout << "== " << files[i].filename().string() << " ==\n" << calib::render_text_report(rep);
                } else {
                    calib::json item;
                    item["file"] = files[i].filename().string();
                    item["report"] = rep.doc;
                    combined["reports"].push_back(item);
                }
            }
            combined["all_pass"] = all;
            if (opts.format == "json") {
                if (opts.output.empty()) {
                    std::cout << combined.dump(2) << "\n";
                } else {
                    std::ofstream out(opts.output);
                    out << combined.dump(2) << "\n";
                }
            } else if (!opts.output.empty()) {
                std::ofstream out(opts.output);
                out << combined.dump(2) << "\n";
            }
            std::cout << (all ? "CORPUS PASS" : "CORPUS FAIL") << " (" << files.size() << " scenarios)\n";
            return all ? 0 : 1;
        }
        if (explain->parsed()) {
            const auto& d = check_descriptions();
            if (explain_name.empty()) {
                for (const auto& [k, v] : d) std::cout << k << "\n  " << v << "\n\n";
            } else {
                auto it = d.find(explain_name);
                if (it == d.end()) {
                    std::cerr << "unknown check: " << explain_name << "\n";
                    return 2;
                }
                std::cout << it->first << "\n  " << it->second << "\n";
            }
            return 0;
        }
    } catch (const calib::ScenarioError& e) {
        std::cerr << "scenario error [" << e.field << "]: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
