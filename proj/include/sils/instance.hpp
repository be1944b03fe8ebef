#pragma once
// Problem and solution data types, matrix utilities, objective evaluation,
// and the reported metrics.

#include <optional>
#include <string>

#include "sils/linalg.hpp"

namespace sils {

// The problem input: an n x d design matrix M, an observation b, and the
// target cardinality sigma.
struct SilsInstance {
    Mat m;
    Vec b;
    int sigma = 0;

    int n() const { return static_cast<int>(m.rows()); }
    int d() const { return static_cast<int>(m.cols()); }
    void validate() const;
};

// Optional ground truth attached to generated instances: b = M z_star + eps.
struct GroundTruth {
    Vec z_star;
    Vec eps;
    std::optional<Mat> cov;
    double noise_param = 0.0;
    // Model 2 retains the planted/noise split M = M1 + M2 (M2 supported on
    // the tail columns); needed to assemble the explicit Theta decomposition.
    std::optional<Mat> m1;
};

struct SparseSignVector {
    std::vector<int> x;       // entries in {-1, 0, +1}
    IndexSet support;

    static SparseSignVector from_entries(const std::vector<int>& entries);
    Vec dense() const;
    int nnz() const { return static_cast<int>(support.size()); }
    bool operator==(const SparseSignVector& o) const { return x == o.x; }
};

struct MetricsRow {
    int nonzeros = 0;
    double tpr = 0.0;
    double prediction_error = 0.0;
    double successful_recovery_rate = 0.0;
    double snr = 0.0;
};

// |z_i| above this counts as a nonzero for continuous solver outputs.
inline constexpr double kSupportZeroTol = 1e-4;

// (1/n) ||M x - b||^2
double objective(const SilsInstance& inst, const Vec& x);

// (1/n) A^T A for A = (-b M); (1, x) gram_lift (1, x)^T equals the objective.
Mat gram_lift(const SilsInstance& inst);

// max_{i != j} |psi_ij| / sqrt(psi_ii psi_jj), with 0/0 = 0.
double coherence(const Mat& psi);

// Standard infinity-to-infinity operator norm: max absolute row sum.
double inf_op_norm(const Mat& p);

// Indices of the sigma largest |z_i|, ties broken by lowest index.
IndexSet top_sigma_support(const Vec& z, int sigma);

MetricsRow metrics(const Vec& z, const GroundTruth& truth, const Mat& m, int sigma);

// ---- instance text format ----
// line 1: n d sigma; lines 2..n+1: rows of M; line n+2: b; then optional
// sections #z_star, #eps, #cov, #noise_param, #m1. Values are written with
// 17 significant digits so that parsing reproduces them bit-identically.
void save_instance(const std::string& path, const SilsInstance& inst,
                   const GroundTruth* truth = nullptr);
std::pair<SilsInstance, std::optional<GroundTruth>> load_instance(const std::string& path);

std::string format_double(double v);

} // namespace sils
