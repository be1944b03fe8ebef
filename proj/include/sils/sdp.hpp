#pragma once
// The semidefinite relaxation and its first-order solver. The objective is
// linear, so a two-block splitting alternates a PSD projection with a
// Dykstra projection onto the four remaining constraints.

#include <optional>
#include <string>

#include "sils/instance.hpp"

namespace sils {

struct SolverParams {
    double rho = 1.0;                 // splitting penalty
    int max_iter = 20000;
    double feas_tol = 1e-7;
    double opt_tol = 1e-6;
    int dykstra_max_iter = 500;
    double dykstra_tol = 1e-10;
    double rank_one_tol = 1e-6;       // lambda_2 / lambda_1 threshold
    double rounding_residue = 0.1;    // per-entry distance to {-1,0,1}

    void validate() const;
};

enum class SolveStatus { Converged, MaxIter, Infeasible };

struct SdpSolution {
    Mat w;                    // (1+d) x (1+d)
    double objective = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    int iterations = 0;
    SolveStatus status = SolveStatus::MaxIter;
};

std::string to_string(SolveStatus s);
SolveStatus status_from_string(const std::string& s);

SdpSolution solve_sdp(const SilsInstance& inst, const SolverParams& params = {});

// Dykstra cycle over {W_11 = 1}, {tr(W_x) = sigma}, {diag(W_x) <= 1},
// {||vec(W_x)||_1 <= sigma^2}. Returns the projection of `sym` onto the
// intersection (up to dykstra_tol); `converged` reports whether the cycle
// stabilized within dykstra_max_iter.
Mat project_polytope(const Mat& sym, int sigma, const SolverParams& params,
                     bool* converged = nullptr);

// Euclidean projection of v onto the l1 ball of the given radius.
Vec project_l1_ball(const Vec& v, double radius);

// W = (1, x)(1, x)^T
Mat lift(const SparseSignVector& x);

// Eigenvalue-ratio test plus sign rounding of the first column.
std::optional<SparseSignVector> extract_rank_one(const Mat& w, const SilsInstance& inst,
                                                 const SolverParams& params,
                                                 double sdp_objective);

void save_solution(const std::string& path, const SdpSolution& sol,
                   const std::optional<SparseSignVector>& rounded);

} // namespace sils
