#pragma once
// Lasso by cyclic coordinate descent and the Dantzig Selector by a dense
// two-phase simplex, with the cross-validation used in the comparison runs.

#include <cstdint>
#include <optional>
#include <vector>

#include "sils/linalg.hpp"

namespace sils {

struct BaselineParams {
    int max_sweeps = 100000;         // lasso
    double coord_tol = 1e-8;         // lasso sweep stopping
    double kkt_tol = 1e-6;
    double lp_feas_tol = 1e-7;       // dantzig constraint residual
    double lp_gap_tol = 1e-6;        // dantzig duality gap
    int folds = 10;
    std::uint64_t cv_seed = 0;
};

struct BaselineResult {
    Vec z;
    double objective_or_l1 = 0.0;
    double kkt_violation = 0.0;      // lasso KKT or dantzig duality gap
    double constraint_residual = 0.0;
    double parameter = 0.0;          // lambda or eta
    std::optional<std::vector<std::pair<double, double>>> cv_trace;
};

// (1/2n)||Mz - b||^2 + lambda ||z||_1
BaselineResult lasso(const Mat& m, const Vec& b, double lambda,
                     const BaselineParams& params = {});

// min ||z||_1  s.t.  ||M^T (M z - b)||_inf <= eta
BaselineResult dantzig(const Mat& m, const Vec& b, double eta,
                       const BaselineParams& params = {});

enum class BaselineMethod { lasso, dantzig };

// k-fold cross-validation over the grid, selecting the parameter with the
// lowest mean held-out (1/n)||Mz - b||^2; ties go to the larger parameter.
BaselineResult cross_validate(const Mat& m, const Vec& b, BaselineMethod method,
                              const std::vector<double>& grid, int folds,
                              const BaselineParams& params = {});

std::vector<double> default_lasso_grid(const Mat& m, const Vec& b);
std::vector<double> default_dantzig_grid(const Mat& m, const Vec& b);

// parameter rules from the low-coherence comparison
double lasso_paper_lambda(int d, int n);
double dantzig_paper_eta(int d, double rho);

// Dense two-phase simplex with Bland's rule for
//   min c^T x  s.t.  A x <= b, x >= 0.
struct LpResult {
    Vec x;
    Vec dual;                 // multipliers for the <= rows
    double value = 0.0;
    bool feasible = false;
    bool bounded = true;
};
LpResult solve_lp(const Mat& a, const Vec& b, const Vec& c);

} // namespace sils
