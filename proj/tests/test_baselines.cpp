#include <doctest.h>

#include <stdexcept>

#include "sils/baselines.hpp"
#include "sils/generators.hpp"
#include "test_support.hpp"

using namespace sils;

TEST_CASE("lasso with lambda = 0 solves least squares on invertible designs") {
    CounterRng rng(51);
    Mat m = test_support::random_matrix(rng, 4, 4);
    for (int i = 0; i < 4; ++i) m(i, i) += 3.0;   // keep it well-conditioned
    Vec b = test_support::random_vector(rng, 4);
    BaselineResult res = lasso(m, b, 0.0);
    // residual of the normal equations
    Vec grad = matvec_t(m, matvec(m, res.z) - b);
    CHECK(norm_inf(grad) / 4.0 <= 1e-6);
}

TEST_CASE("lasso shrinks to zero at and above the threshold") {
    CounterRng rng(52);
    Mat m = test_support::random_matrix(rng, 6, 4);
    Vec b = test_support::random_vector(rng, 6);
    const double lam_max = norm_inf(matvec_t(m, b)) / 6.0;
    BaselineResult res = lasso(m, b, lam_max * 1.0001);
    for (double z : res.z) CHECK(z == 0.0);
}

TEST_CASE("lasso satisfies its KKT conditions on random instances") {
    CounterRng rng(53);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 4 + static_cast<int>(rng.next_u64() % 10);
        const int d = 2 + static_cast<int>(rng.next_u64() % 8);
        Mat m = test_support::random_matrix(rng, n, d);
        Vec b = test_support::random_vector(rng, n);
        const double lam = rng.next_uniform(0.01, 0.5);
        BaselineResult res = lasso(m, b, lam);
        CHECK(res.kkt_violation <= 1e-6);
    }
}

TEST_CASE("lasso objective never increases across sweeps (spot check via restart)") {
    CounterRng rng(54);
    Mat m = test_support::random_matrix(rng, 8, 5);
    Vec b = test_support::random_vector(rng, 8);
    BaselineResult coarse = lasso(m, b, 0.1);
    // a solution at the same lambda from a tighter tolerance can only match
    BaselineParams tight;
    tight.coord_tol = 1e-12;
    BaselineResult fine = lasso(m, b, 0.1, tight);
    CHECK(fine.objective_or_l1 <= coarse.objective_or_l1 + 1e-12);
}

TEST_CASE("dantzig at large eta returns zero, at eta = 0 solves the normal equations") {
    CounterRng rng(55);
    Mat m = test_support::random_matrix(rng, 5, 4);
    Vec b = test_support::random_vector(rng, 5);
    const double big = norm_inf(matvec_t(m, b)) * 1.01;
    BaselineResult zero = dantzig(m, b, big);
    CHECK(norm1(zero.z) <= 1e-9);
    CHECK(zero.kkt_violation <= 1e-6);

    Mat sq = test_support::random_matrix(rng, 4, 4);
    for (int i = 0; i < 4; ++i) sq(i, i) += 3.0;
    Vec bs = test_support::random_vector(rng, 4);
    BaselineResult eq = dantzig(sq, bs, 0.0);
    Vec resid = matvec_t(sq, matvec(sq, eq.z) - bs);
    CHECK(norm_inf(resid) <= 1e-6);
    CHECK(eq.kkt_violation <= 1e-6);
}

TEST_CASE("dantzig duality gap stays small on random instances") {
    CounterRng rng(56);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 4 + static_cast<int>(rng.next_u64() % 8);
        const int d = 2 + static_cast<int>(rng.next_u64() % 6);
        Mat m = test_support::random_matrix(rng, n, d);
        Vec b = test_support::random_vector(rng, n);
        const double eta = rng.next_uniform(0.05, 0.8) * norm_inf(matvec_t(m, b));
        BaselineResult res = dantzig(m, b, eta);
        CHECK(res.kkt_violation <= 1e-6);
        CHECK(res.constraint_residual <= 1e-7);
    }
}

TEST_CASE("dantzig l1 norm is minimal among feasible ground truths") {
    ModelSpec spec{.model_id = 3, .n = 30, .d = 8, .sigma = 2, .noise_param = 0.1, .seed = 4};
    Generated g = gen_model3(spec);
    const double eta = dantzig_paper_eta(spec.d, spec.noise_param);
    BaselineResult res = dantzig(g.instance.m, g.instance.b, eta);
    Vec box = matvec_t(g.instance.m, matvec(g.instance.m, g.truth.z_star) - g.instance.b);
    if (norm_inf(box) <= eta)   // z* feasible => returned z cannot have larger l1 norm
        CHECK(norm1(res.z) <= norm1(g.truth.z_star) + 1e-7);
}

TEST_CASE("cross_validate returns the single grid element and refits on all rows") {
    CounterRng rng(57);
    Mat m = test_support::random_matrix(rng, 12, 4);
    Vec b = test_support::random_vector(rng, 12);
    BaselineResult res = cross_validate(m, b, BaselineMethod::lasso, {0.05}, 3);
    CHECK(res.parameter == doctest::Approx(0.05));
    REQUIRE(res.cv_trace.has_value());
    CHECK(res.cv_trace->size() == 1);
    BaselineResult direct = lasso(m, b, 0.05);
    for (std::size_t i = 0; i < res.z.size(); ++i)
        CHECK(res.z[i] == doctest::Approx(direct.z[i]).epsilon(1e-9));
}

TEST_CASE("cross_validate picks small lambda for noiseless representable data") {
    CounterRng rng(58);
    Mat half = test_support::random_matrix(rng, 10, 4);
    Mat m(20, 4);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 4; ++j) {
            m(i, j) = half(i, j);
            m(10 + i, j) = half(i, j);   // duplicated rows
        }
    Vec z{1.0, -1.0, 0.5, 0.0};
    Vec b = matvec(m, z);
    auto grid = default_lasso_grid(m, b);
    BaselineResult res = cross_validate(m, b, BaselineMethod::lasso, grid, 5);
    // every lambda that zeroes the fit must lose to the selected one
    const double lam_zero = norm_inf(matvec_t(m, b)) / 20.0;
    CHECK(res.parameter < lam_zero);
}

TEST_CASE("cross_validate rejects bad arguments") {
    CounterRng rng(59);
    Mat m = test_support::random_matrix(rng, 6, 3);
    Vec b = test_support::random_vector(rng, 6);
    CHECK_THROWS_AS(cross_validate(m, b, BaselineMethod::lasso, {}, 3), std::invalid_argument);
    CHECK_THROWS_AS(cross_validate(m, b, BaselineMethod::lasso, {0.1}, 1), std::invalid_argument);
    CHECK_THROWS_AS(cross_validate(m, b, BaselineMethod::lasso, {0.1}, 7), std::invalid_argument);
}

TEST_CASE("simplex handles phase-1 starts") {
    // min x1 + x2 s.t. -x1 - x2 <= -1 (i.e. x1 + x2 >= 1), x >= 0
    Mat a(1, 2);
    a(0, 0) = -1.0;
    a(0, 1) = -1.0;
    Vec b{-1.0};
    Vec c{1.0, 1.0};
    LpResult lp = solve_lp(a, b, c);
    REQUIRE(lp.feasible);
    CHECK(lp.value == doctest::Approx(1.0));
    CHECK(lp.x[0] + lp.x[1] == doctest::Approx(1.0));
    // dual bound matches the primal value
    CHECK(lp.value - (-(b[0] * lp.dual[0])) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("simplex detects infeasible systems") {
    // x1 <= -1, x1 >= 0 is infeasible
    Mat a(1, 1);
    a(0, 0) = 1.0;
    LpResult lp = solve_lp(a, {-1.0}, {1.0});
    CHECK_FALSE(lp.feasible);
}
