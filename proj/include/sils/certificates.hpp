#pragma once
// Dual certificates for unique optimality of a lifted sign vector, and the
// checkers for every sufficient-condition family:
//   A  - decomposition-based conditions on a general instance
//   B  - parameter-only conditions on a general instance
//   C  - low-coherence corollary of B (normalized columns)
//   D  - population-level conditions under the sub-Gaussian linear model
//   E  - linear-model specialization of A with the noise-expanded Theta
//   F  - the certificate conditions themselves (plus the uniqueness test)

#include <map>
#include <optional>
#include <string>

#include "sils/instance.hpp"

namespace sils {

// every ">= 0" check gets this slack, every strict inequality needs at
// least this margin
inline constexpr double kCertSlack = 1e-9;

struct DualData {
    IndexSet s;             // support of x*
    Vec y_star;             // -M^T b / n
    double y11_star = 0.0;  // -(y*_S)^T x*_S
    double theta = 0.0;     // angle between -y*_S and x*_S, in [0, pi]
    double mu3_star = 0.0;
    double delta = 0.0;
    double mu2_star = 0.0;
    double lambda_min_ss = 0.0;   // lambda_min((M^T M / n)_{S,S})
};

struct ConditionEntry {
    bool pass = false;
    double margin = 0.0;    // >= 0 iff pass (inequality slack)
};

struct Witness {
    double delta = 0.0;
    double mu2_star = 0.0;
};

struct ConditionReport {
    char theorem_id = '?';
    bool overall = false;
    std::map<std::string, ConditionEntry> conditions;
    std::optional<Witness> witness;
    std::string note;
};

struct DualCertificate {
    DualData dual;
    Vec p_star;             // dense, zero off the support
    Mat yx_star;            // d x d
    Mat h;                  // Y*_x - y* y*^T / Y*_11
    double nu = 0.0;
    std::map<std::string, ConditionEntry> conditions;   // F1..F4, lambda2H

    bool all_pass() const;
};

struct CertificateBuild {
    std::optional<DualCertificate> certificate;
    ConditionReport precheck;   // the B- (or A-) conditions at (delta, mu2*)
};

// ---- shared quantities ----

DualData dual_data(const SilsInstance& inst, const SparseSignVector& x_star,
                   double delta, double mu2_star);

// p*_S from diag(p*_S) x*_S = -(M^T M / n)_{S,S} x*_S - sigma mu3* x*_S
//                             - y*_S - mu2* x*_S,  p*_{S^c} = 0
Vec build_p_star(const DualData& dual, const SilsInstance& inst,
                 const SparseSignVector& x_star);

// Theta of the parameter-free conditions (general b)
Mat theta_general(const SilsInstance& inst, const SparseSignVector& x_star,
                  const DualData& dual);
// Theta of the linear-model conditions, with the noise expanded
Mat theta_sparse_lm(const SilsInstance& inst, const GroundTruth& truth,
                    const DualData& dual);

// ---- certificate construction ----

CertificateBuild build_certificate_general(const SilsInstance& inst,
                                           const SparseSignVector& x_star,
                                           double delta, double mu2_star);

CertificateBuild build_certificate_sparse(const SilsInstance& inst,
                                          const SparseSignVector& x_star,
                                          double delta, double mu2_star,
                                          const Mat& theta1, const Mat& theta2);

ConditionReport check_certificate(const DualCertificate& cert, const SilsInstance& inst,
                                  const SparseSignVector& x_star);

// ---- theorem checkers ----

std::vector<double> default_delta_grid();
std::vector<double> default_mu2_grid(double lambda_min_ss, double delta);

ConditionReport check_thm_general(const SilsInstance& inst, const SparseSignVector& x_star,
                                  const std::vector<double>& delta_grid = default_delta_grid(),
                                  int mu2_points = 20);

ConditionReport check_thm_sparse(const SilsInstance& inst, const SparseSignVector& x_star,
                                 const std::vector<double>& delta_grid = default_delta_grid(),
                                 int mu2_points = 20,
                                 const std::optional<std::pair<Mat, Mat>>& decomposition = std::nullopt);

ConditionReport check_cor_low_coherence(const SilsInstance& inst, const SparseSignVector& x_star,
                                        double delta_cap,
                                        const std::vector<double>& delta_grid = default_delta_grid(),
                                        int mu2_points = 20);

struct StochasticParams {
    double l = 1.0;            // sub-Gaussian parameter of the rows
    double rho = 0.0;          // noise parameter
    int n = 0;
    int d = 0;
    double c1 = 1.0;           // absolute constants from the concentration bounds
    double b = 1.0;
    double b1 = 1.0;
    double b2 = 1.0;
    double delta = 0.5;
    double mu2_hat = -1.0;
};

ConditionReport check_thm_stochastic(const Mat& cov, const Vec& z_star,
                                     const SparseSignVector& x_star, int sigma,
                                     const StochasticParams& params);

ConditionReport check_thm_sparse_recovery(const SilsInstance& inst, const GroundTruth& truth,
                                          const std::vector<double>& delta_grid = default_delta_grid(),
                                          int mu2_points = 20,
                                          const std::optional<std::pair<Mat, Mat>>& decomposition = std::nullopt);

// ---- the explicit decomposition for the high-coherence model ----

struct Model2Decomposition {
    Mat theta1;
    Mat theta2;
    double c_bar = 0.0, c_hat = 0.0, c_tilde = 0.0, c_check = 0.0;
    bool valid = false;
    std::string note;    // why invalid, when it is
};

Model2Decomposition model2_theta_decomposition(const SilsInstance& inst,
                                               const GroundTruth& truth,
                                               double delta, double mu2_star,
                                               double c8 = 1.0);

// f_n(x) = sqrt(||x||^2 / (x^T x*_S)^2 - 1/sigma) and its gradient
double fn_value(const Vec& x, const Vec& x_star_s);
Vec fn_gradient(const Vec& x, const Vec& x_star_s);

std::string format_report(const ConditionReport& report);

} // namespace sils
