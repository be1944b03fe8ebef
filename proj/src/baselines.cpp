#include "sils/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sils/rng.hpp"

namespace sils {

// ------------------------------------------------------------------ lasso ---

BaselineResult lasso(const Mat& m, const Vec& b, double lambda, const BaselineParams& params) {
    if (lambda < 0.0) throw std::invalid_argument("lasso: lambda must be >= 0");
    if (b.size() != m.rows()) throw std::invalid_argument("lasso: dimension mismatch");
    const int n = static_cast<int>(m.rows());
    const int d = static_cast<int>(m.cols());
    const Mat mt = transpose(m);   // contiguous columns

    Vec col_sq(d);
    for (int j = 0; j < d; ++j) col_sq[j] = kern::sum_sq(mt.row(j), n) / n;

    Vec z(d, 0.0);
    Vec r = b;                     // residual b - M z
    bool converged = false;
    for (int sweep = 0; sweep < params.max_sweeps; ++sweep) {
        double max_delta = 0.0;
        for (int j = 0; j < d; ++j) {
            if (col_sq[j] == 0.0) continue;
            const double* col = mt.row(j);
            const double rho = kern::dot(col, r.data(), n) / n + col_sq[j] * z[j];
            double znew;
            kern::soft_threshold(&rho, lambda, &znew, 1);
            znew /= col_sq[j];
            const double delta = znew - z[j];
            if (delta != 0.0) {
                kern::axpy(-delta, col, r.data(), n);
                z[j] = znew;
                max_delta = std::max(max_delta, std::fabs(delta));
            }
        }
        if (max_delta < params.coord_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) throw std::runtime_error("lasso: coordinate descent did not converge");

    BaselineResult res;
    res.parameter = lambda;
    res.z = z;
    res.objective_or_l1 = 0.5 * norm2_sq(matvec(m, z) - b) / n + lambda * norm1(z);
    double viol = 0.0;
    for (int j = 0; j < d; ++j) {
        const double g = -kern::dot(mt.row(j), r.data(), n) / n;
        if (z[j] == 0.0)
            viol = std::max(viol, std::fabs(g) - lambda);
        else
            viol = std::max(viol, std::fabs(g + lambda * (z[j] > 0 ? 1.0 : -1.0)));
    }
    res.kkt_violation = std::max(viol, 0.0);
    return res;
}

// ---------------------------------------------------------------- simplex ---

LpResult solve_lp(const Mat& a, const Vec& b, const Vec& c) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    if (b.size() != a.rows() || c.size() != a.cols())
        throw std::invalid_argument("solve_lp: dimension mismatch");

    const double kPivotEps = 1e-9;
    const double kRatioEps = 1e-11;

    // equality form with slacks; rows with negative rhs are flipped and get
    // an artificial variable for phase 1
    std::vector<int> art_of_row(m, -1);
    int n_art = 0;
    for (int i = 0; i < m; ++i)
        if (b[i] < 0.0) art_of_row[i] = n_art++;
    const int total = n + m + n_art;
    Mat t(m + 1, total + 1);
    std::vector<int> basis(m);

    for (int i = 0; i < m; ++i) {
        const double sign = b[i] < 0.0 ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j) t(i, j) = sign * a(i, j);
        t(i, n + i) = sign;
        t(i, total) = sign * b[i];
        if (art_of_row[i] >= 0) {
            t(i, n + m + art_of_row[i]) = 1.0;
            basis[i] = n + m + art_of_row[i];
        } else {
            basis[i] = n + i;
        }
    }

    auto pivot = [&](int p, int q) {
        const double piv = t(p, q);
        kern::scal(1.0 / piv, t.row(p), total + 1);
        t(p, q) = 1.0;
        for (int r = 0; r <= m; ++r) {
            if (r == p) continue;
            const double f = t(r, q);
            if (f != 0.0) {
                kern::axpy(-f, t.row(p), t.row(r), total + 1);
                t(r, q) = 0.0;
            }
        }
        basis[p] = q;
    };

    // Bland's rule: smallest eligible entering index, leaving by min ratio
    // with smallest basis index on ties
    auto run_simplex = [&](int allowed_cols) -> bool {
        for (;;) {
            int q = -1;
            for (int j = 0; j < allowed_cols; ++j)
                if (t(m, j) < -kPivotEps) {
                    q = j;
                    break;
                }
            if (q < 0) return true;   // optimal
            int p = -1;
            double best_ratio = 0.0;
            for (int i = 0; i < m; ++i) {
                if (t(i, q) <= kRatioEps) continue;
                const double ratio = t(i, total) / t(i, q);
                if (p < 0 || ratio < best_ratio - 1e-12 ||
                    (std::fabs(ratio - best_ratio) <= 1e-12 && basis[i] < basis[p])) {
                    p = i;
                    best_ratio = ratio;
                }
            }
            if (p < 0) return false;  // unbounded direction
            pivot(p, q);
        }
    };

    LpResult res;
    if (n_art > 0) {
        // phase 1: minimize the sum of artificials
        for (int j = 0; j < n_art; ++j) t(m, n + m + j) = 1.0;
        for (int i = 0; i < m; ++i)
            if (art_of_row[i] >= 0) kern::axpy(-1.0, t.row(i), t.row(m), total + 1);
        run_simplex(total);
        if (-t(m, total) > 1e-7) {
            res.feasible = false;
            return res;
        }
        // drive leftover artificials out of the basis
        for (int i = 0; i < m; ++i) {
            if (basis[i] < n + m) continue;
            for (int j = 0; j < n + m; ++j)
                if (std::fabs(t(i, j)) > kPivotEps) {
                    pivot(i, j);
                    break;
                }
        }
    }

    // phase 2 objective row
    for (int j = 0; j <= total; ++j) t(m, j) = 0.0;
    for (int j = 0; j < n; ++j) t(m, j) = c[j];
    for (int i = 0; i < m; ++i) {
        if (basis[i] >= n || c[basis[i]] == 0.0) continue;
        kern::axpy(-c[basis[i]], t.row(i), t.row(m), total + 1);
    }
    // artificial columns may never re-enter
    const bool bounded = run_simplex(n + m);

    res.feasible = true;
    res.bounded = bounded;
    res.x.assign(n, 0.0);
    for (int i = 0; i < m; ++i)
        if (basis[i] < n) res.x[basis[i]] = t(i, total);
    res.value = -t(m, total);
    // multipliers for the <= rows are the reduced costs of the slacks
    res.dual.assign(m, 0.0);
    for (int i = 0; i < m; ++i) res.dual[i] = t(m, n + i);
    return res;
}

// ---------------------------------------------------------------- dantzig ---

BaselineResult dantzig(const Mat& m, const Vec& b, double eta, const BaselineParams& params) {
    if (eta < 0.0) throw std::invalid_argument("dantzig: eta must be >= 0");
    if (b.size() != m.rows()) throw std::invalid_argument("dantzig: dimension mismatch");
    const int d = static_cast<int>(m.cols());
    const Mat q = gram(m);
    const Vec qb = matvec_t(m, b);

    // split variables v = (z+, z-): min 1^T v  s.t.  [Q -Q; -Q Q] v <= eta 1 +- q
    Mat a(2 * d, 2 * d);
    Vec rhs(2 * d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            a(i, j) = q(i, j);
            a(i, d + j) = -q(i, j);
            a(d + i, j) = -q(i, j);
            a(d + i, d + j) = q(i, j);
        }
        rhs[i] = eta + qb[i];
        rhs[d + i] = eta - qb[i];
    }
    Vec cost(2 * d, 1.0);
    LpResult lp = solve_lp(a, rhs, cost);
    if (!lp.feasible) throw std::runtime_error("dantzig: LP reported infeasible");
    if (!lp.bounded) throw std::runtime_error("dantzig: LP reported unbounded");

    BaselineResult res;
    res.parameter = eta;
    res.z.assign(d, 0.0);
    for (int i = 0; i < d; ++i) res.z[i] = lp.x[i] - lp.x[d + i];
    res.objective_or_l1 = norm1(res.z);
    Vec box = matvec(q, res.z) - qb;
    res.constraint_residual = std::max(0.0, norm_inf(box) - eta);
    // duality gap: primal 1^T v minus the dual bound -rhs^T w
    double dual_obj = -dot(rhs, lp.dual);
    res.kkt_violation = std::fabs(lp.value - dual_obj);
    if (res.constraint_residual > params.lp_feas_tol)
        throw std::runtime_error("dantzig: constraint residual above tolerance");
    return res;
}

// --------------------------------------------------------- cross-validation ---

namespace {

BaselineResult fit(BaselineMethod method, const Mat& m, const Vec& b, double param,
                   const BaselineParams& params) {
    return method == BaselineMethod::lasso ? lasso(m, b, param, params)
                                           : dantzig(m, b, param, params);
}

} // namespace

BaselineResult cross_validate(const Mat& m, const Vec& b, BaselineMethod method,
                              const std::vector<double>& grid, int folds,
                              const BaselineParams& params) {
    if (grid.empty()) throw std::invalid_argument("cross_validate: empty grid");
    const int n = static_cast<int>(m.rows());
    if (folds < 2 || n < folds) throw std::invalid_argument("cross_validate: need 2 <= folds <= n");

    // seeded shuffle of the row indices
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    CounterRng rng(params.cv_seed);
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next_u64() % (i + 1));
        std::swap(perm[i], perm[j]);
    }

    std::vector<std::pair<double, double>> trace;
    double best_err = std::numeric_limits<double>::infinity();
    double best_param = grid.front();
    for (double param : grid) {
        double err_sum = 0.0;
        for (int f = 0; f < folds; ++f) {
            const int lo = static_cast<int>(static_cast<long long>(f) * n / folds);
            const int hi = static_cast<int>(static_cast<long long>(f + 1) * n / folds);
            const int n_val = hi - lo, n_train = n - n_val;
            Mat mtrain(n_train, m.cols());
            Vec btrain(n_train);
            Mat mval(n_val, m.cols());
            Vec bval(n_val);
            int it = 0, iv = 0;
            for (int i = 0; i < n; ++i) {
                const int row = perm[i];
                if (i >= lo && i < hi) {
                    std::copy(m.row(row), m.row(row) + m.cols(), mval.row(iv));
                    bval[iv++] = b[row];
                } else {
                    std::copy(m.row(row), m.row(row) + m.cols(), mtrain.row(it));
                    btrain[it++] = b[row];
                }
            }
            BaselineResult r = fit(method, mtrain, btrain, param, params);
            err_sum += norm2_sq(matvec(mval, r.z) - bval) / n_val;
        }
        const double err = err_sum / folds;
        trace.emplace_back(param, err);
        if (err <= best_err) {       // ties resolved toward the larger parameter
            best_err = err;
            best_param = param;
        }
    }

    BaselineResult final_fit = fit(method, m, b, best_param, params);
    final_fit.cv_trace = std::move(trace);
    return final_fit;
}

std::vector<double> default_lasso_grid(const Mat& m, const Vec& b) {
    const double top = norm_inf(matvec_t(m, b)) / m.rows();
    std::vector<double> grid(20);
    for (int i = 0; i < 20; ++i)
        grid[i] = top * std::pow(10.0, -3.0 + 3.0 * i / 19.0);
    return grid;
}

std::vector<double> default_dantzig_grid(const Mat& m, const Vec& b) {
    const double top = norm_inf(matvec_t(m, b));
    std::vector<double> grid(20);
    for (int i = 0; i < 20; ++i)
        grid[i] = top * std::pow(10.0, -2.0 + (std::log10(2.0) + 2.0) * i / 19.0);
    return grid;
}

double lasso_paper_lambda(int d, int n) { return 2.0 * std::sqrt(std::log(d) / n); }

double dantzig_paper_eta(int d, double rho) {
    return 2.0 * rho * (1.25 + std::sqrt(std::log(d)));
}

} // namespace sils
