#pragma once
// Config-driven experiment harness: recovery curves over a control-parameter
// grid and method comparisons, with deterministic CSV output.

#include <cstdint>
#include <iosfwd>
#include <string>

#include "sils/baselines.hpp"
#include "sils/generators.hpp"
#include "sils/sdp.hpp"

namespace sils {

struct ExperimentConfig {
    std::string mode = "recovery";       // recovery | comparison
    int model = 3;
    int d = 40;
    int sigma = 2;
    double rho = 0.5;
    std::vector<double> c_grid;          // control parameter (recovery mode)
    int n_explicit = 0;                  // comparison mode; 0 = model default
    int trials = 50;
    std::vector<std::string> methods;    // sdp, lasso, dantzig, exact
    std::uint64_t seed = 1;
    std::string out = "results.csv";
    // model 2 covariance parameters
    double c_model = 1.2;
    double cp_model = 1.05;
    double cpp_model = 1.0;
    // baseline parameter policy: "cv", "paper", or a number
    std::string lasso_param = "cv";
    std::string dantzig_param = "cv";
    int folds = 10;
    SolverParams solver;

    void validate() const;
};

// flat key=value text; repeated `c=` lines build the control grid
ExperimentConfig load_config(const std::string& path);

// sample size rule per model: model 1 n = ceil(c d ln d), model 2
// n = ceil(c rho^2 sigma^2 ln d), model 3 n = ceil(c (sigma^2 + rho^2) ln d)
int sample_size(int model, double c, int d, int sigma, double rho);

struct ExperimentRecord {
    int model = 0, n = 0, d = 0, sigma = 0;
    double rho = 0.0, c = 0.0;
    int trial = 0;
    std::string method;
    bool recovered_any = false;     // rank-one extraction (+ exact confirmation in budget)
    bool recovered_truth = false;   // extracted/rounded vector equals the target
    int nonzeros = 0;
    double tpr = 0.0, pred_err = 0.0, succ_rate = 0.0;
    double objective = 0.0;
    double wall_ms = 0.0;
};

struct ExperimentResult {
    std::vector<ExperimentRecord> rows;
    std::string csv;
};

ExperimentResult run_recovery_curve(const ExperimentConfig& cfg);
ExperimentResult run_comparison(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_csv(std::ostream& os, const std::vector<ExperimentRecord>& rows);

// worker cap: min(hardware, SILS_THREADS if set)
int worker_count();

} // namespace sils
