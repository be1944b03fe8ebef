// Command-line front end: generate instances, solve them exactly or through
// the relaxation, certify candidate solutions, run baselines, reduce
// exact-cover instances, and drive experiment configs.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sils/baselines.hpp"
#include "sils/certificates.hpp"
#include "sils/exact.hpp"
#include "sils/experiments.hpp"
#include "sils/generators.hpp"
#include "sils/hardness.hpp"
#include "sils/sdp.hpp"

namespace {

using namespace sils;

SolverParams load_solver_params(const std::string& path) {
    SolverParams p;
    if (path.empty()) return p;
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open params file: " + path);
    std::string key;
    double value;
    while (is >> key >> value) {
        if (key == "rho") p.rho = value;
        else if (key == "max_iter") p.max_iter = static_cast<int>(value);
        else if (key == "feas_tol") p.feas_tol = value;
        else if (key == "opt_tol") p.opt_tol = value;
        else if (key == "dykstra_max_iter") p.dykstra_max_iter = static_cast<int>(value);
        else if (key == "dykstra_tol") p.dykstra_tol = value;
        else if (key == "rank_one_tol") p.rank_one_tol = value;
        else if (key == "rounding_residue") p.rounding_residue = value;
        else throw std::runtime_error("unknown solver param: " + key);
    }
    p.validate();
    return p;
}

SparseSignVector load_xstar(const std::string& spec, const GroundTruth* truth, int d) {
    if (spec == "truth") {
        if (!truth) throw std::runtime_error("--xstar truth: instance has no ground truth");
        std::vector<int> entries(d);
        for (int i = 0; i < d; ++i) {
            const double v = truth->z_star[i];
            if (v != 0.0 && v != 1.0 && v != -1.0)
                throw std::runtime_error("--xstar truth: z* is not a sign vector");
            entries[i] = static_cast<int>(v);
        }
        return SparseSignVector::from_entries(entries);
    }
    std::ifstream is(spec);
    if (!is) throw std::runtime_error("cannot open x* file: " + spec);
    std::vector<int> entries;
    double v;
    while (is >> v) entries.push_back(static_cast<int>(v));
    if (static_cast<int>(entries.size()) != d)
        throw std::runtime_error("x* file: expected " + std::to_string(d) + " entries");
    return SparseSignVector::from_entries(entries);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << text;
}

int run(int argc, char** argv) {
    CLI::App app{"sparse integer least squares laboratory"};
    app.require_subcommand(1);

    // generate
    auto* gen_cmd = app.add_subcommand("generate", "generate a model instance");
    ModelSpec spec;
    std::string gen_out;
    gen_cmd->add_option("--model", spec.model_id, "model id (1, 2 or 3)")->required();
    gen_cmd->add_option("--n", spec.n, "rows")->required();
    gen_cmd->add_option("--d", spec.d, "columns")->required();
    gen_cmd->add_option("--sigma", spec.sigma, "sparsity level")->required();
    gen_cmd->add_option("--rho", spec.noise_param, "noise parameter");
    gen_cmd->add_option("--c", spec.c, "model 2 covariance c");
    gen_cmd->add_option("--cp", spec.c_prime, "model 2 covariance c'");
    gen_cmd->add_option("--cpp", spec.c_dprime, "model 2 covariance c''");
    gen_cmd->add_option("--seed", spec.seed, "seed");
    gen_cmd->add_option("--out", gen_out, "instance file")->required();

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "solve the SDP relaxation");
    std::string solve_in, solve_params, solve_out;
    bool solve_round = false;
    solve_cmd->add_option("--in", solve_in, "instance file")->required();
    solve_cmd->add_option("--params", solve_params, "solver parameter file");
    solve_cmd->add_option("--out", solve_out, "solution file")->required();
    solve_cmd->add_flag("--round", solve_round, "emit the extracted sign vector if any");

    // exact
    auto* exact_cmd = app.add_subcommand("exact", "brute-force solve");
    std::string exact_in, exact_out;
    exact_cmd->add_option("--in", exact_in, "instance file")->required();
    exact_cmd->add_option("--out", exact_out, "result file (stdout if omitted)");

    // certify
    auto* cert_cmd = app.add_subcommand("certify", "check sufficient conditions");
    std::string cert_in, cert_xstar = "truth", cert_theorem = "B", cert_report;
    StochasticParams stoch;
    double cert_delta_cap = 0.1, cert_c8 = 1.0;
    cert_cmd->add_option("--in", cert_in, "instance file")->required();
    cert_cmd->add_option("--xstar", cert_xstar, "candidate file or 'truth'");
    cert_cmd->add_option("--theorem", cert_theorem, "one of A B C D E F");
    cert_cmd->add_option("--report", cert_report, "report file (stdout if omitted)");
    cert_cmd->add_option("--delta-cap", cert_delta_cap, "Delta for the C conditions");
    cert_cmd->add_option("--delta", stoch.delta, "delta for D conditions or F build");
    cert_cmd->add_option("--mu2", stoch.mu2_hat, "mu2 for D conditions or F build");
    cert_cmd->add_option("--L", stoch.l, "sub-Gaussian parameter");
    cert_cmd->add_option("--c1", stoch.c1, "concentration constant c1");
    cert_cmd->add_option("--B", stoch.b, "concentration constant B");
    cert_cmd->add_option("--B1", stoch.b1, "concentration constant B1");
    cert_cmd->add_option("--B2", stoch.b2, "concentration constant B2");
    cert_cmd->add_option("--C8", cert_c8, "model 2 decomposition constant");

    // baseline
    auto* base_cmd = app.add_subcommand("baseline", "run lasso or dantzig");
    std::string base_method, base_param = "cv", base_in, base_out;
    int base_folds = 10;
    base_cmd->add_option("--method", base_method, "lasso or dantzig")->required();
    base_cmd->add_option("--param", base_param, "value, 'cv', or 'paper-rule'");
    base_cmd->add_option("--in", base_in, "instance file")->required();
    base_cmd->add_option("--out", base_out, "result file (stdout if omitted)");
    base_cmd->add_option("--folds", base_folds, "cross-validation folds");

    // reduce-x3c
    auto* x3c_cmd = app.add_subcommand("reduce-x3c", "reduce an exact-cover instance");
    std::string x3c_in, x3c_out;
    x3c_cmd->add_option("--in", x3c_in, "x3c file")->required();
    x3c_cmd->add_option("--out", x3c_out, "instance file")->required();

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "run a config-driven experiment");
    std::string exp_config;
    exp_cmd->add_option("--config", exp_config, "config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;   // usage problems exit 1, --help exits 0
    }

    if (gen_cmd->parsed()) {
        Generated g = generate(spec);
        save_instance(gen_out, g.instance, &g.truth);
        std::cout << "wrote " << gen_out << " (n=" << g.instance.n() << " d=" << g.instance.d()
                  << " sigma=" << g.instance.sigma << ")\n";
        return 0;
    }

    if (solve_cmd->parsed()) {
        auto [inst, truth] = load_instance(solve_in);
        SolverParams params = load_solver_params(solve_params);
        SdpSolution sol = solve_sdp(inst, params);
        std::optional<SparseSignVector> rounded;
        if (solve_round) rounded = extract_rank_one(sol.w, inst, params, sol.objective);
        save_solution(solve_out, sol, rounded);
        std::cout << "status " << to_string(sol.status) << " objective "
                  << format_double(sol.objective) << " iterations " << sol.iterations << '\n';
        return sol.status == SolveStatus::Converged ? 0 : 2;
    }

    if (exact_cmd->parsed()) {
        auto [inst, truth] = load_instance(exact_in);
        ExactResult res = solve_exact(inst);
        std::ostringstream os;
        os << "best_value " << format_double(res.best_value) << '\n';
        os << "second_best_value " << format_double(res.second_best_value) << '\n';
        os << "unique " << (res.unique ? 1 : 0) << '\n';
        os << "candidates " << res.candidates << '\n';
        os << "#x\n";
        for (std::size_t i = 0; i < res.best_x.x.size(); ++i)
            os << (i ? " " : "") << res.best_x.x[i];
        os << '\n';
        write_text(exact_out, os.str());
        return 0;
    }

    if (cert_cmd->parsed()) {
        auto [inst, truth] = load_instance(cert_in);
        SparseSignVector xstar =
            load_xstar(cert_xstar, truth ? &*truth : nullptr, inst.d());
        ConditionReport report;
        if (cert_theorem == "A") {
            report = check_thm_sparse(inst, xstar);
        } else if (cert_theorem == "B") {
            report = check_thm_general(inst, xstar);
        } else if (cert_theorem == "C") {
            report = check_cor_low_coherence(inst, xstar, cert_delta_cap);
        } else if (cert_theorem == "D") {
            if (!truth || !truth->cov)
                throw std::runtime_error("theorem D needs ground truth with a covariance");
            stoch.n = inst.n();
            stoch.d = inst.d();
            stoch.rho = truth->noise_param;
            report = check_thm_stochastic(*truth->cov, truth->z_star, xstar, inst.sigma, stoch);
        } else if (cert_theorem == "E") {
            if (!truth) throw std::runtime_error("theorem E needs ground truth");
            std::optional<std::pair<Mat, Mat>> decomposition;
            if (truth->m1) {
                Model2Decomposition dec = model2_theta_decomposition(
                    inst, *truth, stoch.delta, stoch.mu2_hat, cert_c8);
                if (dec.valid) decomposition = std::make_pair(dec.theta1, dec.theta2);
            }
            report = check_thm_sparse_recovery(inst, *truth, default_delta_grid(), 20,
                                               decomposition);
        } else if (cert_theorem == "F") {
            CertificateBuild build =
                build_certificate_general(inst, xstar, stoch.delta, stoch.mu2_hat);
            if (build.certificate) {
                report = check_certificate(*build.certificate, inst, xstar);
            } else {
                report = build.precheck;
                report.note += (report.note.empty() ? "" : "; ");
                report.note += "certificate not assembled (preconditions failed)";
            }
        } else {
            throw std::runtime_error("unknown theorem: " + cert_theorem);
        }
        write_text(cert_report, format_report(report));
        return 0;
    }

    if (base_cmd->parsed()) {
        auto [inst, truth] = load_instance(base_in);
        const bool is_lasso = base_method == "lasso";
        if (!is_lasso && base_method != "dantzig")
            throw std::runtime_error("method must be lasso or dantzig");
        BaselineParams bp;
        bp.folds = base_folds;
        BaselineResult res;
        if (base_param == "cv") {
            const auto grid = is_lasso ? default_lasso_grid(inst.m, inst.b)
                                       : default_dantzig_grid(inst.m, inst.b);
            res = cross_validate(inst.m, inst.b,
                                 is_lasso ? BaselineMethod::lasso : BaselineMethod::dantzig,
                                 grid, base_folds, bp);
        } else if (base_param == "paper-rule") {
            const double p = is_lasso
                                 ? lasso_paper_lambda(inst.d(), inst.n())
                                 : dantzig_paper_eta(inst.d(), truth ? truth->noise_param : 1.0);
            res = is_lasso ? lasso(inst.m, inst.b, p, bp) : dantzig(inst.m, inst.b, p, bp);
        } else {
            const double p = std::stod(base_param);
            res = is_lasso ? lasso(inst.m, inst.b, p, bp) : dantzig(inst.m, inst.b, p, bp);
        }
        std::ostringstream os;
        os << "parameter " << format_double(res.parameter) << '\n';
        os << (is_lasso ? "objective " : "l1_norm ") << format_double(res.objective_or_l1) << '\n';
        os << (is_lasso ? "kkt_violation " : "duality_gap ") << format_double(res.kkt_violation)
           << '\n';
        os << "#z\n";
        for (std::size_t i = 0; i < res.z.size(); ++i)
            os << (i ? " " : "") << format_double(res.z[i]);
        os << '\n';
        write_text(base_out, os.str());
        return 0;
    }

    if (x3c_cmd->parsed()) {
        X3cInstance x3c = load_x3c(x3c_in);
        SilsInstance inst = reduce_x3c(x3c);
        save_instance(x3c_out, inst, nullptr);
        std::cout << "wrote " << x3c_out << " (n=" << inst.n() << " d=" << inst.d()
                  << " sigma=" << inst.sigma << ")\n";
        return 0;
    }

    if (exp_cmd->parsed()) {
        ExperimentConfig cfg = load_config(exp_config);
        ExperimentResult result = run_experiment(cfg);
        write_text(cfg.out, result.csv);
        if (cfg.out != "-" && !cfg.out.empty())
            std::cout << "wrote " << cfg.out << " (" << result.rows.size() << " trial rows)\n";
        return 0;
    }

    return 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 2;
    }
}
