#include "sils/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace sils {

void SolverParams::validate() const {
    if (rho <= 0.0) throw std::invalid_argument("rho must be positive");
    if (max_iter < 1 || dykstra_max_iter < 1) throw std::invalid_argument("iteration caps must be >= 1");
    if (feas_tol <= 0.0 || opt_tol <= 0.0 || dykstra_tol <= 0.0 || rank_one_tol <= 0.0)
        throw std::invalid_argument("tolerances must be positive");
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::MaxIter: return "MaxIter";
        case SolveStatus::Infeasible: return "Infeasible";
    }
    return "MaxIter";
}

SolveStatus status_from_string(const std::string& s) {
    if (s == "Converged") return SolveStatus::Converged;
    if (s == "MaxIter") return SolveStatus::MaxIter;
    if (s == "Infeasible") return SolveStatus::Infeasible;
    throw std::invalid_argument("unknown status: " + s);
}

Vec project_l1_ball(const Vec& v, double radius) {
    if (radius < 0.0) throw std::invalid_argument("l1 radius must be >= 0");
    if (norm1(v) <= radius) return v;
    // simplex-style threshold on |v|: out_i = sign(v_i) max(|v_i| - tau, 0)
    Vec mag(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) mag[i] = std::fabs(v[i]);
    Vec sorted = mag;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumsum = 0.0, tau = 0.0;
    std::size_t k = 0;
    for (; k < sorted.size(); ++k) {
        cumsum += sorted[k];
        double t = (cumsum - radius) / (k + 1);
        if (k + 1 == sorted.size() || sorted[k + 1] <= t) {
            tau = t;
            break;
        }
    }
    Vec out(v.size());
    kern::soft_threshold(v.data(), tau, out.data(), v.size());
    return out;
}

namespace {

// the four non-PSD constraint sets, each as a Euclidean projection
void proj_w11(Mat& w) { w(0, 0) = 1.0; }

void proj_trace(Mat& w, int sigma) {
    const std::size_t d = w.rows() - 1;
    double tr = 0.0;
    for (std::size_t i = 1; i <= d; ++i) tr += w(i, i);
    const double shift = (tr - sigma) / d;
    for (std::size_t i = 1; i <= d; ++i) w(i, i) -= shift;
}

void proj_diag_box(Mat& w) {
    const std::size_t d = w.rows() - 1;
    for (std::size_t i = 1; i <= d; ++i) w(i, i) = std::min(w(i, i), 1.0);
}

void proj_l1(Mat& w, int sigma) {
    const std::size_t d = w.rows() - 1;
    Vec v(d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) v[i * d + j] = w(i + 1, j + 1);
    double radius = static_cast<double>(sigma) * sigma;
    if (norm1(v) <= radius) return;
    Vec p = project_l1_ball(v, radius);
    // symmetric input keeps the projection symmetric; averaging guards roundoff
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            w(i + 1, j + 1) = 0.5 * (p[i * d + j] + p[j * d + i]);
}

} // namespace

Mat project_polytope(const Mat& sym, int sigma, const SolverParams& params, bool* converged) {
    if (sym.rows() != sym.cols() || sym.rows() < 2)
        throw std::invalid_argument("project_polytope: need a (1+d) x (1+d) matrix");
    const std::size_t sz = sym.rows() * sym.cols();
    Mat w = sym;
    // one Dykstra correction per constraint set; the iterate can sit still
    // for several cycles while the corrections keep moving, so convergence
    // is measured on the full (w, corrections) state
    Mat corr[4] = {Mat(sym.rows(), sym.cols()), Mat(sym.rows(), sym.cols()),
                   Mat(sym.rows(), sym.cols()), Mat(sym.rows(), sym.cols())};
    Mat prev = w;
    Mat prev_corr[4] = {corr[0], corr[1], corr[2], corr[3]};
    Mat before(sym.rows(), sym.cols());
    bool ok = false;
    for (int it = 0; it < params.dykstra_max_iter; ++it) {
        for (int set = 0; set < 4; ++set) {
            w += corr[set];
            before = w;
            switch (set) {
                case 0: proj_w11(w); break;
                case 1: proj_trace(w, sigma); break;
                case 2: proj_diag_box(w); break;
                case 3: proj_l1(w, sigma); break;
            }
            corr[set] = before - w;
        }
        double delta = 0.0;
        for (std::size_t i = 0; i < sz; ++i)
            delta = std::max(delta, std::fabs(w.data()[i] - prev.data()[i]));
        for (int set = 0; set < 4; ++set)
            for (std::size_t i = 0; i < sz; ++i)
                delta = std::max(delta,
                                 std::fabs(corr[set].data()[i] - prev_corr[set].data()[i]));
        if (delta < params.dykstra_tol) {
            ok = true;
            break;
        }
        prev = w;
        for (int set = 0; set < 4; ++set) prev_corr[set] = corr[set];
    }
    if (converged) *converged = ok;
    return w;
}

SdpSolution solve_sdp(const SilsInstance& inst, const SolverParams& params) {
    inst.validate();
    params.validate();
    const int d = inst.d();
    const std::size_t dim = d + 1;
    const Mat cost = gram_lift(inst);

    // feasible-ish start: W_11 = 1, W_x = (sigma/d) I
    Mat z(dim, dim);
    z(0, 0) = 1.0;
    for (int i = 1; i <= d; ++i) z(i, i) = static_cast<double>(inst.sigma) / d;
    Mat x = z;
    Mat u(dim, dim);
    double rho = params.rho;

    SdpSolution sol;
    sol.status = SolveStatus::MaxIter;
    for (int it = 1; it <= params.max_iter; ++it) {
        // X-update: PSD projection of Z - U - C/rho
        Mat arg = z - u;
        kern::axpy(-1.0 / rho, cost.data(), arg.data(), dim * dim);
        x = project_psd(arg);

        // Z-update: polytope projection of X + U
        Mat zprev = std::move(z);
        z = project_polytope(x + u, inst.sigma, params);

        // scaled dual update
        Mat diff = x - z;
        u += diff;

        sol.primal_residual = frob_norm(diff);
        sol.dual_residual = rho * frob_norm(z - zprev);
        sol.iterations = it;
        if (sol.primal_residual <= params.feas_tol && sol.dual_residual <= params.feas_tol) {
            sol.status = SolveStatus::Converged;
            break;
        }
        if (it % 100 == 0) {
            // residual balancing
            if (sol.primal_residual > 10.0 * sol.dual_residual) {
                rho *= 2.0;
                u *= 0.5;
            } else if (sol.dual_residual > 10.0 * sol.primal_residual) {
                rho *= 0.5;
                u *= 2.0;
            }
        }
    }
    sol.w = z;
    sol.objective = frob_inner(cost, sol.w);
    return sol;
}

Mat lift(const SparseSignVector& x) {
    const std::size_t d = x.x.size();
    Mat w(d + 1, d + 1);
    Vec v(d + 1);
    v[0] = 1.0;
    for (std::size_t i = 0; i < d; ++i) v[i + 1] = x.x[i];
    for (std::size_t i = 0; i <= d; ++i)
        for (std::size_t j = 0; j <= d; ++j) w(i, j) = v[i] * v[j];
    return w;
}

std::optional<SparseSignVector> extract_rank_one(const Mat& w, const SilsInstance& inst,
                                                 const SolverParams& params,
                                                 double sdp_objective) {
    const int d = inst.d();
    if (w.rows() != static_cast<std::size_t>(d + 1)) return std::nullopt;
    SymEig eg = eig_sym(w);
    const double l1 = eg.values[d];
    const double l2 = d >= 1 ? std::fabs(eg.values[d - 1]) : 0.0;
    if (l1 <= 0.0 || l2 / l1 > params.rank_one_tol) return std::nullopt;

    std::vector<int> entries(d);
    for (int i = 0; i < d; ++i) {
        const double v = w(i + 1, 0);
        const double r = std::round(v);
        if (std::fabs(r) > 1.0 || std::fabs(v - r) > params.rounding_residue)
            return std::nullopt;
        entries[i] = static_cast<int>(r);
    }
    SparseSignVector x = SparseSignVector::from_entries(entries);
    if (x.nnz() != inst.sigma) return std::nullopt;
    if (std::fabs(objective(inst, x.dense()) - sdp_objective) > 10.0 * params.opt_tol)
        return std::nullopt;
    return x;
}

void save_solution(const std::string& path, const SdpSolution& sol,
                   const std::optional<SparseSignVector>& rounded) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << "status " << to_string(sol.status) << '\n';
    os << "objective " << format_double(sol.objective) << '\n';
    os << "primal_residual " << format_double(sol.primal_residual) << '\n';
    os << "dual_residual " << format_double(sol.dual_residual) << '\n';
    os << "iterations " << sol.iterations << '\n';
    os << "dim " << sol.w.rows() << '\n';
    for (std::size_t i = 0; i < sol.w.rows(); ++i) {
        for (std::size_t j = 0; j < sol.w.cols(); ++j)
            os << (j ? " " : "") << format_double(sol.w(i, j));
        os << '\n';
    }
    if (rounded) {
        os << "#x_rounded\n";
        for (std::size_t i = 0; i < rounded->x.size(); ++i)
            os << (i ? " " : "") << rounded->x[i];
        os << '\n';
    }
    if (!os) throw std::runtime_error("write failed: " + path);
}

} // namespace sils
