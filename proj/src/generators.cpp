#include "sils/generators.hpp"

#include <stdexcept>

#include "sils/rng.hpp"

namespace sils {

void ModelSpec::validate() const {
    if (model_id < 1 || model_id > 3) throw std::invalid_argument("model_id must be 1, 2 or 3");
    if (n < 1 || d < 1) throw std::invalid_argument("n and d must be positive");
    if (sigma < 1 || sigma > d) throw std::invalid_argument("sigma out of range");
    if (noise_param < 0.0) throw std::invalid_argument("noise_param must be >= 0");
    if (model_id == 2) {
        if (!(c > 1.0 && c_prime > 1.0 && c_dprime > 0.0))
            throw std::invalid_argument("model 2 requires c > 1, c' > 1, c'' > 0");
        if (sigma >= d) throw std::invalid_argument("model 2 requires sigma < d");
    }
}

namespace {

Mat gaussian_matrix(GaussianStream& gs, int rows, int cols) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = gs.next();
    gs.reset_pair();
    return m;
}

Vec sign_vector(CounterRng& rng, int count) {
    Vec s(count);
    for (int i = 0; i < count; ++i) s[i] = rng.next_sign() ? 1.0 : -1.0;
    return s;
}

Vec gaussian_noise(GaussianStream& gs, int n, double rho) {
    Vec eps(n);
    for (int i = 0; i < n; ++i) eps[i] = rho * gs.next();
    gs.reset_pair();
    return eps;
}

Generated assemble(const ModelSpec& spec, Mat m, Vec z_star, Vec eps,
                   std::optional<Mat> cov, std::optional<Mat> m1) {
    Generated g;
    g.instance.m = std::move(m);
    g.instance.sigma = spec.sigma;
    Vec mz = matvec(g.instance.m, z_star);
    g.instance.b = mz + eps;
    // store the noise as b - M z* recomputes it, so the linear-model identity
    // holds at the bit level
    g.truth.eps = g.instance.b - mz;
    g.truth.z_star = std::move(z_star);
    g.truth.cov = std::move(cov);
    g.truth.noise_param = spec.noise_param;
    g.truth.m1 = std::move(m1);
    g.instance.validate();
    return g;
}

} // namespace

Generated gen_model1(const ModelSpec& spec) {
    spec.validate();
    if (spec.model_id != 1) throw std::invalid_argument("gen_model1: wrong model_id");
    CounterRng rng(spec.seed);
    GaussianStream gs(rng);
    Mat m = gaussian_matrix(gs, spec.n, spec.d);
    Vec signs = sign_vector(rng, spec.d);
    Vec z(spec.d);
    for (int i = 0; i < spec.d; ++i) z[i] = (i < spec.sigma ? 2.0 : 1.0) * signs[i];
    Vec eps = gaussian_noise(gs, spec.n, spec.noise_param);
    return assemble(spec, std::move(m), std::move(z), std::move(eps),
                    Mat::identity(spec.d), std::nullopt);
}

Mat model2_sigma(int d, int sigma, double c, double c_prime, double c_dprime) {
    Mat s = model2_sigma1(d, sigma, c, c_prime);
    for (int i = sigma; i < d; ++i) s(i, i) += c_dprime;
    return s;
}

Mat model2_sigma1(int d, int sigma, double c, double c_prime) {
    Mat s(d, d);
    for (int i = 0; i < sigma; ++i) s(i, i) = c;
    for (int i = 0; i < sigma; ++i)
        for (int j = sigma; j < d; ++j) s(i, j) = s(j, i) = 1.0;
    for (int i = sigma; i < d; ++i)
        for (int j = sigma; j < d; ++j) s(i, j) = c_prime * sigma;
    return s;
}

Generated gen_model2(const ModelSpec& spec) {
    spec.validate();
    if (spec.model_id != 2) throw std::invalid_argument("gen_model2: wrong model_id");
    Mat sigma1 = model2_sigma1(spec.d, spec.sigma, spec.c, spec.c_prime);
    Mat cov = model2_sigma(spec.d, spec.sigma, spec.c, spec.c_prime, spec.c_dprime);
    if (lambda_min(cov) < -1e-10)
        throw std::invalid_argument("model 2 covariance is not PSD for these parameters");
    Mat root1 = psd_sqrt(sigma1, 1e-10);

    CounterRng rng(spec.seed);
    GaussianStream gs(rng);
    // rows m_i = Sigma1^{1/2} g'_i + Sigma2^{1/2} g''_i, which matches the
    // N(0, Sigma) row distribution while keeping the split observable
    Mat g1 = gaussian_matrix(gs, spec.n, spec.d);
    Mat g2 = gaussian_matrix(gs, spec.n, spec.d);
    Mat m1 = matmul(g1, root1);   // root1 symmetric, so rows are Sigma1^{1/2} g'_i
    const double sqrt_cpp = std::sqrt(spec.c_dprime);
    Mat m = m1;
    for (int i = 0; i < spec.n; ++i)
        for (int j = spec.sigma; j < spec.d; ++j) m(i, j) += sqrt_cpp * g2(i, j);

    Vec signs = sign_vector(rng, spec.sigma);
    Vec z(spec.d, 0.0);
    for (int i = 0; i < spec.sigma; ++i) z[i] = signs[i];
    Vec eps = gaussian_noise(gs, spec.n, spec.noise_param);
    return assemble(spec, std::move(m), std::move(z), std::move(eps),
                    std::move(cov), std::move(m1));
}

Generated gen_model3(const ModelSpec& spec) {
    spec.validate();
    if (spec.model_id != 3) throw std::invalid_argument("gen_model3: wrong model_id");
    CounterRng rng(spec.seed);
    GaussianStream gs(rng);
    Mat m = gaussian_matrix(gs, spec.n, spec.d);
    Vec signs = sign_vector(rng, spec.sigma);
    Vec z(spec.d, 0.0);
    for (int i = 0; i < spec.sigma; ++i) z[i] = signs[i];
    Vec eps = gaussian_noise(gs, spec.n, spec.noise_param);
    return assemble(spec, std::move(m), std::move(z), std::move(eps),
                    Mat::identity(spec.d), std::nullopt);
}

Generated generate(const ModelSpec& spec) {
    switch (spec.model_id) {
        case 1: return gen_model1(spec);
        case 2: return gen_model2(spec);
        case 3: return gen_model3(spec);
        default: throw std::invalid_argument("model_id must be 1, 2 or 3");
    }
}

} // namespace sils
