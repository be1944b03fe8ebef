#include <doctest.h>

#include <stdexcept>

#include <cstdio>

#include "sils/exact.hpp"
#include "sils/generators.hpp"
#include "sils/instance.hpp"
#include "sils/sdp.hpp"
#include "test_support.hpp"

using namespace sils;

namespace {

SilsInstance identity_instance(Vec b, int sigma) {
    SilsInstance inst;
    const int n = static_cast<int>(b.size());
    inst.m = Mat::identity(n);
    inst.b = std::move(b);
    inst.sigma = sigma;
    return inst;
}

} // namespace

TEST_CASE("objective evaluates the normalized residual") {
    SilsInstance inst = identity_instance({1.0, 0.0, 0.0}, 1);
    CHECK(objective(inst, {1.0, 0.0, 0.0}) == doctest::Approx(0.0));
    CHECK(objective(inst, {0.0, 1.0, 0.0}) == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(objective(inst, {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("objective of the exact solver matches brute-force enumeration") {
    CounterRng rng(1);
    SilsInstance inst = test_support::random_instance(rng, 5, 4, 2);
    ExactResult res = solve_exact(inst);
    // independent oracle: direct enumeration of all {0,+-1}^4 with two nonzeros
    double best = 1e300;
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
            for (int c = -1; c <= 1; ++c)
                for (int d = -1; d <= 1; ++d) {
                    const int nnz = (a != 0) + (b != 0) + (c != 0) + (d != 0);
                    if (nnz != 2) continue;
                    best = std::min(best, objective(inst, {double(a), double(b), double(c), double(d)}));
                }
    CHECK(objective(inst, res.best_x.dense()) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("gram_lift matches the hand expansion and the zero-b structure") {
    SilsInstance inst;
    inst.m = Mat::identity(2);
    inst.b = {1.0, 1.0};
    inst.sigma = 1;
    Mat g = gram_lift(inst);
    const double expect[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(g(i, j) == doctest::Approx(expect[i][j]));

    CounterRng rng(2);
    SilsInstance zb = test_support::random_instance(rng, 4, 3, 1);
    zb.b.assign(4, 0.0);
    Mat gz = gram_lift(zb);
    CHECK(gz(0, 0) == 0.0);
    for (int j = 1; j < 4; ++j) {
        CHECK(gz(0, j) == 0.0);
        CHECK(gz(j, 0) == 0.0);
    }
}

TEST_CASE("gram-lift identity: quadratic form equals objective") {
    CounterRng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 6);
        const int d = 2 + static_cast<int>(rng.next_u64() % 5);
        const int sigma = 1 + static_cast<int>(rng.next_u64() % d);
        SilsInstance inst = test_support::random_instance(rng, n, d, sigma);
        std::vector<int> entries(d, 0);
        IndexSet idx(d);
        std::iota(idx.begin(), idx.end(), 0);
        for (int k = 0; k < sigma; ++k)
            entries[idx[k]] = rng.next_sign() ? 1 : -1;
        SparseSignVector x = SparseSignVector::from_entries(entries);
        const double via_trace = frob_inner(gram_lift(inst), lift(x));
        CHECK(via_trace == doctest::Approx(objective(inst, x.dense())).epsilon(1e-10));
    }
}

TEST_CASE("coherence basics and the 0/0 convention") {
    CHECK(coherence(Mat::identity(4)) == 0.0);
    Mat two(2, 2);
    two(0, 0) = two(1, 1) = 1.0;
    two(0, 1) = two(1, 0) = 0.5;
    CHECK(coherence(two) == doctest::Approx(0.5));
    Mat conv(2, 2);
    conv(0, 0) = 1.0;   // second diagonal entry zero, off-diagonal zero
    CHECK(coherence(conv) == 0.0);
    Mat rect(2, 3);
    CHECK_THROWS_AS(coherence(rect), std::invalid_argument);
}

TEST_CASE("coherence of a PSD matrix is in [0,1] and scale-invariant") {
    CounterRng rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 6);
        Mat psd = test_support::random_psd(rng, n);
        const double mu = coherence(psd);
        CHECK(mu >= 0.0);
        CHECK(mu <= 1.0 + 1e-12);
        // positive diagonal rescaling D Psi D leaves coherence unchanged
        Mat scaled = psd;
        Vec dscale = test_support::random_vector(rng, n, 0.2, 3.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) scaled(i, j) *= dscale[i] * dscale[j];
        CHECK(coherence(scaled) == doctest::Approx(mu).epsilon(1e-10));
    }
}

TEST_CASE("inf_op_norm is the max absolute row sum") {
    CHECK(inf_op_norm(Mat::identity(5)) == doctest::Approx(1.0));
    Mat m(2, 2);
    m(0, 0) = 1.0;
    m(0, 1) = -2.0;
    m(1, 1) = 3.0;
    CHECK(inf_op_norm(m) == doctest::Approx(3.0));
}

TEST_CASE("inf_op_norm attains the operator-norm maximum over sign vectors") {
    CounterRng rng(5);
    Mat p = test_support::random_matrix(rng, 4, 4);
    double best = 0.0;
    for (int mask = 0; mask < 16; ++mask) {
        Vec x(4);
        for (int j = 0; j < 4; ++j) x[j] = (mask >> j) & 1 ? 1.0 : -1.0;
        best = std::max(best, norm_inf(matvec(p, x)));
    }
    CHECK(inf_op_norm(p) == doctest::Approx(best).epsilon(1e-10));
}

TEST_CASE("inf_op_norm is sub-multiplicative") {
    CounterRng rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        Mat a = test_support::random_matrix(rng, 5, 5);
        Mat b = test_support::random_matrix(rng, 5, 5);
        CHECK(inf_op_norm(matmul(a, b)) <= inf_op_norm(a) * inf_op_norm(b) + 1e-12);
    }
}

TEST_CASE("metrics on perfect and null recovery") {
    CounterRng rng(7);
    Mat m = test_support::random_matrix(rng, 6, 5);
    GroundTruth truth;
    truth.z_star = {1.0, 1.0, 0.0, 0.0, 0.0};
    truth.eps.assign(6, 0.0);

    MetricsRow perfect = metrics(truth.z_star, truth, m, 2);
    CHECK(perfect.tpr == doctest::Approx(1.0));
    CHECK(perfect.prediction_error == doctest::Approx(0.0));
    CHECK(perfect.successful_recovery_rate == doctest::Approx(1.0));
    CHECK(perfect.nonzeros == 2);

    MetricsRow null = metrics(Vec(5, 0.0), truth, m, 2);
    CHECK(null.tpr == doctest::Approx(0.0));
    CHECK(null.prediction_error == doctest::Approx(1.0));
    CHECK(null.nonzeros == 0);
}

TEST_CASE("metrics snr matches the quadratic-form identity for the model 2 covariance") {
    Mat cov = model2_sigma(6, 2, 1.2, 1.05, 1.0);
    GroundTruth truth;
    truth.z_star = {1.0, 1.0, 0.0, 0.0, 0.0, 0.0};
    truth.eps.assign(4, 0.0);
    truth.cov = cov;
    truth.noise_param = 1.0;
    CounterRng rng(8);
    Mat m = test_support::random_matrix(rng, 4, 6);
    MetricsRow row = metrics(truth.z_star, truth, m, 2);
    // || Sigma^{1/2}_{[d],S} z*_S ||^2 = z*_S^T Sigma_{S,S} z*_S
    IndexSet s{0, 1};
    Vec zs{1.0, 1.0};
    const double expect = dot(zs, matvec(submatrix(cov, s, s), zs));
    CHECK(row.snr == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("metrics are permutation equivariant") {
    CounterRng rng(9);
    const int d = 6, n = 8;
    Mat m = test_support::random_matrix(rng, n, d);
    GroundTruth truth;
    truth.z_star = {1.0, -1.0, 0.0, 0.0, 0.0, 0.0};
    truth.eps.assign(n, 0.0);
    Vec z = test_support::random_vector(rng, d);
    MetricsRow base = metrics(z, truth, m, 2);

    std::vector<int> perm{3, 0, 5, 1, 4, 2};
    Mat mp(n, d);
    Vec zp(d), zsp(d);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < n; ++i) mp(i, perm[j]) = m(i, j);
        zp[perm[j]] = z[j];
        zsp[perm[j]] = truth.z_star[j];
    }
    GroundTruth truth_p = truth;
    truth_p.z_star = zsp;
    MetricsRow permuted = metrics(zp, truth_p, mp, 2);
    CHECK(permuted.tpr == doctest::Approx(base.tpr));
    CHECK(permuted.prediction_error == doctest::Approx(base.prediction_error).epsilon(1e-10));
    CHECK(permuted.successful_recovery_rate == doctest::Approx(base.successful_recovery_rate));
    CHECK(permuted.nonzeros == base.nonzeros);
}

TEST_CASE("metrics rejects M z* = 0") {
    Mat m(3, 2);
    GroundTruth truth;
    truth.z_star = {1.0, 0.0};
    truth.eps.assign(3, 0.0);
    CHECK_THROWS_AS(metrics({1.0, 0.0}, truth, m, 1), std::invalid_argument);
}

TEST_CASE("instance files round-trip bit-identically") {
    CounterRng rng(10);
    Generated g = gen_model2({.model_id = 2, .n = 7, .d = 5, .sigma = 2,
                              .noise_param = 0.3, .c = 1.2, .c_prime = 1.05,
                              .c_dprime = 1.0, .seed = 99});
    const std::string path = "roundtrip_instance.txt";
    save_instance(path, g.instance, &g.truth);
    auto [inst2, truth2] = load_instance(path);
    REQUIRE(truth2.has_value());
    CHECK(inst2.m == g.instance.m);
    CHECK(inst2.b == g.instance.b);
    CHECK(inst2.sigma == g.instance.sigma);
    CHECK(truth2->z_star == g.truth.z_star);
    CHECK(truth2->eps == g.truth.eps);
    REQUIRE(truth2->cov.has_value());
    CHECK(*truth2->cov == *g.truth.cov);
    REQUIRE(truth2->m1.has_value());
    CHECK(*truth2->m1 == *g.truth.m1);
    CHECK(truth2->noise_param == g.truth.noise_param);
    std::remove(path.c_str());
}

TEST_CASE("top_sigma_support breaks ties by lowest index") {
    IndexSet top = top_sigma_support({1.0, -1.0, 1.0}, 2);
    REQUIRE_EQ(top.size(), 2);
    CHECK(top[0] == 0);
    CHECK(top[1] == 1);
}
