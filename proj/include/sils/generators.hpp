#pragma once
// Deterministic construction of the three synthetic data models. All draws
// come from the counter-based generator in rng.hpp, in a fixed stream order
// (matrix entries row-major, then the signs of z_star, then the noise), so a
// seed pins the instance byte-for-byte.

#include <cstdint>

#include "sils/instance.hpp"

namespace sils {

struct ModelSpec {
    int model_id = 3;            // 1, 2 or 3
    int n = 0;
    int d = 0;
    int sigma = 0;
    double noise_param = 0.0;    // rho
    // Model 2 covariance parameters; require c > 1, c_prime > 1, c_dprime > 0.
    double c = 1.2;
    double c_prime = 1.05;
    double c_dprime = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Generated {
    SilsInstance instance;
    GroundTruth truth;
};

// z*_i = +-2 for i <= sigma and +-1 otherwise; M i.i.d. standard Gaussian.
Generated gen_model1(const ModelSpec& spec);
// rows of M ~ N(0, Sigma) with the two-block high-coherence Sigma;
// z* = (a, 0) with a in {+-1}^sigma. The M1/M2 split is kept in the truth.
Generated gen_model2(const ModelSpec& spec);
// M i.i.d. standard Gaussian; z* = (a, 0) with a in {+-1}^sigma.
Generated gen_model3(const ModelSpec& spec);

Generated generate(const ModelSpec& spec);

// The high-coherence covariance: top-left c I, all-ones off-diagonal blocks,
// bottom-right c' sigma 11^T + c'' I.
Mat model2_sigma(int d, int sigma, double c, double c_prime, double c_dprime);
// Its planted part Sigma_1 (bottom-right c' sigma 11^T, no c'' ridge).
Mat model2_sigma1(int d, int sigma, double c, double c_prime);

} // namespace sils
