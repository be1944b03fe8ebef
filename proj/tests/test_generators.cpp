#include <doctest.h>

#include <stdexcept>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sils/generators.hpp"
#include "test_support.hpp"

using namespace sils;

TEST_CASE("model 1 magnitude pattern and linear-model identity") {
    ModelSpec spec{.model_id = 1, .n = 8, .d = 6, .sigma = 2, .noise_param = 0.4, .seed = 5};
    Generated g = gen_model1(spec);
    for (int i = 0; i < 6; ++i)
        CHECK(std::fabs(g.truth.z_star[i]) == doctest::Approx(i < 2 ? 2.0 : 1.0));
    // b - M z* = eps bit-exactly, by construction
    Vec resid = g.instance.b - matvec(g.instance.m, g.truth.z_star);
    CHECK(resid == g.truth.eps);
}

TEST_CASE("identical seeds reproduce byte-identical instances, distinct seeds differ") {
    ModelSpec spec{.model_id = 3, .n = 6, .d = 5, .sigma = 2, .noise_param = 0.5, .seed = 7};
    Generated a = gen_model3(spec);
    Generated b = gen_model3(spec);
    CHECK(a.instance.m == b.instance.m);
    CHECK(a.instance.b == b.instance.b);
    CHECK(a.truth.z_star == b.truth.z_star);

    spec.seed = 8;
    Generated c = gen_model3(spec);
    CHECK(a.instance.m != c.instance.m);

    const std::string p1 = "gen_seed7a.txt", p2 = "gen_seed7b.txt";
    save_instance(p1, a.instance, &a.truth);
    save_instance(p2, b.instance, &b.truth);
    std::ifstream f1(p1), f2(p2);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("model 1 empirical column covariance approaches the identity") {
    ModelSpec spec{.model_id = 1, .n = 2000, .d = 50, .sigma = 3, .noise_param = 0.0, .seed = 12};
    Generated g = gen_model1(spec);
    Mat cov = gram(g.instance.m);
    cov *= 1.0 / spec.n;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j)
            worst = std::max(worst, std::fabs(cov(i, j) - (i == j ? 1.0 : 0.0)));
    CHECK(worst < 0.15);
}

TEST_CASE("model 2 covariance matches the block display and stays PSD") {
    Mat cov = model2_sigma(10, 2, 1.2, 1.05, 1.0);
    CHECK(cov(0, 0) == doctest::Approx(1.2));
    CHECK(cov(0, 2) == doctest::Approx(1.0));
    CHECK(cov(2, 2) == doctest::Approx(1.05 * 2 + 1.0));
    CHECK(cov(2, 3) == doctest::Approx(1.05 * 2));
    CHECK(lambda_min(cov) >= -1e-10);

    // degenerate tail: bottom-right is the 1x1 block c' sigma + c''
    Mat tiny = model2_sigma(3, 2, 1.5, 1.1, 0.7);
    CHECK(tiny(2, 2) == doctest::Approx(1.1 * 2 + 0.7));
}

TEST_CASE("model 2 rejects bad parameters and keeps the split consistent") {
    ModelSpec bad{.model_id = 2, .n = 5, .d = 4, .sigma = 2, .noise_param = 0.1,
                  .c = 0.9, .c_prime = 1.05, .c_dprime = 1.0, .seed = 1};
    CHECK_THROWS_AS(gen_model2(bad), std::invalid_argument);

    ModelSpec spec{.model_id = 2, .n = 40, .d = 8, .sigma = 2, .noise_param = 0.2,
                   .c = 1.2, .c_prime = 1.05, .c_dprime = 1.0, .seed = 3};
    Generated g = gen_model2(spec);
    REQUIRE(g.truth.m1.has_value());
    // M and M1 agree on the support columns (the noise part lives on the tail)
    for (int i = 0; i < spec.n; ++i)
        for (int j = 0; j < spec.sigma; ++j)
            CHECK(g.instance.m(i, j) == (*g.truth.m1)(i, j));
    CHECK(g.truth.z_star[0] != 0.0);
    CHECK(g.truth.z_star[spec.sigma] == 0.0);
}

TEST_CASE("model 2 empirical gram coherence is high") {
    ModelSpec spec{.model_id = 2, .n = 5000, .d = 30, .sigma = 3, .noise_param = 0.0,
                   .c = 1.2, .c_prime = 1.05, .c_dprime = 1.0, .seed = 21};
    Generated g = gen_model2(spec);
    Mat gr = gram(g.instance.m);
    CHECK(coherence(gr) >= 0.3);
}

TEST_CASE("model 3 sparsity boundary cases") {
    ModelSpec full{.model_id = 3, .n = 4, .d = 3, .sigma = 3, .noise_param = 0.0, .seed = 2};
    Generated g = gen_model3(full);
    for (double v : g.truth.z_star) CHECK(std::fabs(v) == 1.0);

    ModelSpec spec{.model_id = 3, .n = 4, .d = 6, .sigma = 2, .noise_param = 0.1, .seed = 0};
    for (int trial = 0; trial < 100; ++trial) {
        spec.seed = trial;
        Generated gt = gen_model3(spec);
        int nnz = 0;
        for (double v : gt.truth.z_star) nnz += v != 0.0;
        CHECK(nnz == 2);
    }
}

TEST_CASE("permutation of a generated instance commutes with the metrics") {
    ModelSpec spec{.model_id = 3, .n = 10, .d = 5, .sigma = 2, .noise_param = 0.3, .seed = 77};
    Generated g = gen_model3(spec);
    CounterRng rng(1);
    Vec z = test_support::random_vector(rng, 5);
    MetricsRow base = metrics(z, g.truth, g.instance.m, 2);

    std::vector<int> perm{4, 2, 0, 1, 3};
    Mat mp(10, 5);
    Vec zp(5), zsp(5);
    for (int j = 0; j < 5; ++j) {
        for (int i = 0; i < 10; ++i) mp(i, perm[j]) = g.instance.m(i, j);
        zp[perm[j]] = z[j];
        zsp[perm[j]] = g.truth.z_star[j];
    }
    GroundTruth tp = g.truth;
    tp.z_star = zsp;
    tp.cov.reset();
    MetricsRow after = metrics(zp, tp, mp, 2);
    CHECK(after.tpr == doctest::Approx(base.tpr));
    CHECK(after.prediction_error == doctest::Approx(base.prediction_error).epsilon(1e-10));
    CHECK(after.successful_recovery_rate == doctest::Approx(base.successful_recovery_rate));
}

TEST_CASE("psd_sqrt of the full model 2 covariance has the two-block structure") {
    Mat cov = model2_sigma(10, 2, 1.2, 1.05, 1.0);
    Mat half = psd_sqrt(cov);
    // (S, S^c) block constant
    const double cross = half(0, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 2; j < 10; ++j) CHECK(half(i, j) == doctest::Approx(cross).epsilon(1e-9));
    // (S^c, S^c) block: constant plus a scaled identity
    const double off = half(2, 3);
    const double diag = half(2, 2);
    for (int i = 2; i < 10; ++i)
        for (int j = 2; j < 10; ++j)
            CHECK(half(i, j) == doctest::Approx(i == j ? diag : off).epsilon(1e-9));
}

TEST_CASE("psd_sqrt of the planted part matches the rank-structure lemma") {
    Mat sigma1 = model2_sigma1(10, 2, 1.2, 1.05);
    Mat half = psd_sqrt(sigma1, 1e-8);
    const double a = half(0, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 2; j < 10; ++j) CHECK(half(i, j) == doctest::Approx(a).epsilon(1e-8));
    const double b = half(2, 2);
    for (int i = 2; i < 10; ++i)
        for (int j = 2; j < 10; ++j) CHECK(half(i, j) == doctest::Approx(b).epsilon(1e-8));
}
