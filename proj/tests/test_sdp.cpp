#include <doctest.h>

#include <stdexcept>

#include "sils/exact.hpp"
#include "sils/generators.hpp"
#include "sils/sdp.hpp"
#include "test_support.hpp"

using namespace sils;

namespace {

double polytope_violation(const Mat& w, int sigma) {
    const std::size_t d = w.rows() - 1;
    double viol = std::fabs(w(0, 0) - 1.0);
    double tr = 0.0, l1 = 0.0;
    for (std::size_t i = 1; i <= d; ++i) {
        tr += w(i, i);
        viol = std::max(viol, w(i, i) - 1.0);
        for (std::size_t j = 1; j <= d; ++j) l1 += std::fabs(w(i, j));
    }
    viol = std::max(viol, std::fabs(tr - sigma));
    viol = std::max(viol, l1 - static_cast<double>(sigma) * sigma);
    return viol;
}

SparseSignVector sign_vec(std::vector<int> entries) {
    return SparseSignVector::from_entries(entries);
}

} // namespace

TEST_CASE("l1 ball projection: inactive, boundary, and oracle checks") {
    Vec inside{0.5, -0.5};
    CHECK(project_l1_ball(inside, 2.0) == inside);

    Vec v{3.0, -1.0};
    Vec p = project_l1_ball(v, 2.0);
    CHECK(norm1(p) == doctest::Approx(2.0));
    // projection of (3,-1) onto the l1 ball of radius 2 is (2,0)
    CHECK(p[0] == doctest::Approx(2.0));
    CHECK(p[1] == doctest::Approx(0.0));

    CounterRng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 12);
        Vec x = test_support::random_vector(rng, n, -2.0, 2.0);
        const double radius = rng.next_uniform(0.1, 2.5);
        Vec proj = project_l1_ball(x, radius);
        CHECK(norm1(proj) <= radius + 1e-9);
        // no random feasible candidate is closer
        const double dist = norm2_sq(proj - x);
        for (int k = 0; k < 200; ++k) {
            Vec cand = test_support::random_vector(rng, n, -1.0, 1.0);
            const double scale = radius / std::max(norm1(cand), 1e-12);
            if (scale < 1.0)
                for (auto& c : cand) c *= scale;
            CHECK(norm2_sq(cand - x) >= dist - 1e-9);
        }
    }
}

TEST_CASE("project_polytope: feasible fixed point and the trace-repair example") {
    SolverParams params;
    // zero matrix, sigma = 2, d = 3
    Mat zero(4, 4);
    bool converged = false;
    Mat w = project_polytope(zero, 2, params, &converged);
    CHECK(converged);
    CHECK(w(0, 0) == doctest::Approx(1.0));
    for (int i = 1; i <= 3; ++i) CHECK(w(i, i) == doctest::Approx(2.0 / 3.0));
    CHECK(polytope_violation(w, 2) <= 1e-9);

    // a feasible input projects to itself
    Mat feas = project_polytope(w, 2, params, &converged);
    CHECK(frob_norm(feas - w) <= 1e-9);
}

TEST_CASE("project_polytope output satisfies all four constraints") {
    SolverParams params;
    CounterRng rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 2 + static_cast<int>(rng.next_u64() % 5);
        const int sigma = 1 + static_cast<int>(rng.next_u64() % d);
        Mat sym = test_support::random_symmetric(rng, d + 1, 2.0);
        Mat w = project_polytope(sym, sigma, params);
        CHECK(polytope_violation(w, sigma) <= 1e-7);
    }
}

TEST_CASE("lift produces feasible rank-one matrices") {
    SparseSignVector x = sign_vec({1, -1, 0});
    Mat w = lift(x);
    CHECK(w(0, 0) == 1.0);
    CHECK(w(1, 1) == 1.0);
    CHECK(w(1, 2) == -1.0);
    CHECK(w(2, 2) == 1.0);
    CHECK(w(3, 3) == 0.0);
    CHECK(polytope_violation(w, 2) <= 1e-12);

    SparseSignVector zero = sign_vec({0, 0, 0});
    Mat wz = lift(zero);
    CHECK(wz(0, 0) == 1.0);
    CHECK(frob_norm(wz) == doctest::Approx(1.0));
}

TEST_CASE("extract_rank_one round-trips lifts and rejects rank-two mixtures") {
    CounterRng rng(43);
    SolverParams params;
    SilsInstance inst = test_support::random_instance(rng, 6, 4, 2);
    SparseSignVector x = sign_vec({1, 0, -1, 0});
    const double obj = objective(inst, x.dense());
    auto round_trip = extract_rank_one(lift(x), inst, params, obj);
    REQUIRE(round_trip.has_value());
    CHECK(round_trip->x == x.x);

    SparseSignVector y = sign_vec({0, 1, 0, 1});
    Mat mix = lift(x) + lift(y);
    mix *= 0.5;
    CHECK_FALSE(extract_rank_one(mix, inst, params, obj).has_value());
}

TEST_CASE("solve_sdp is exact on a representable fit") {
    SilsInstance inst;
    inst.m = Mat::identity(4);
    inst.b = {1.0, 1.0, 1.0, 1.0};
    inst.sigma = 4;
    SolverParams params;
    SdpSolution sol = solve_sdp(inst, params);
    CHECK(sol.status == SolveStatus::Converged);
    CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-6));
    SparseSignVector ones = sign_vec({1, 1, 1, 1});
    CHECK(frob_norm(sol.w - lift(ones)) <= 1e-4);
    auto x = extract_rank_one(sol.w, inst, params, sol.objective);
    REQUIRE(x.has_value());
    CHECK(x->x == ones.x);
}

TEST_CASE("sdp objective lower-bounds the combinatorial optimum") {
    CounterRng rng(44);
    SolverParams params;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 9);
        const int d = 2 + static_cast<int>(rng.next_u64() % 5);
        const int sigma = 1 + static_cast<int>(rng.next_u64() % std::min(d, 3));
        SilsInstance inst = test_support::random_instance(rng, n, d, sigma);
        SdpSolution sol = solve_sdp(inst, params);
        if (sol.status != SolveStatus::Converged) continue;
        ExactResult ex = solve_exact(inst);
        CHECK(sol.objective <= ex.best_value + 1e-6);
    }
}

TEST_CASE("solver invariants: feasibility of the returned matrix") {
    CounterRng rng(45);
    SolverParams params;
    SilsInstance inst = test_support::random_instance(rng, 8, 5, 2);
    SdpSolution sol = solve_sdp(inst, params);
    REQUIRE(sol.status == SolveStatus::Converged);
    CHECK(polytope_violation(sol.w, 2) <= 1e-6);
    CHECK(lambda_min(sol.w) >= -params.feas_tol);
    CHECK(sol.primal_residual <= params.feas_tol);
    CHECK(sol.dual_residual <= params.feas_tol);
}

TEST_CASE("objective under lift equals the combinatorial objective") {
    CounterRng rng(46);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 3 + static_cast<int>(rng.next_u64() % 4);
        const int sigma = 1 + static_cast<int>(rng.next_u64() % d);
        SilsInstance inst = test_support::random_instance(rng, 5, d, sigma);
        std::vector<int> entries(d, 0);
        for (int k = 0; k < sigma; ++k) entries[k] = rng.next_sign() ? 1 : -1;
        SparseSignVector x = SparseSignVector::from_entries(entries);
        CHECK(frob_inner(gram_lift(inst), lift(x)) ==
              doctest::Approx(objective(inst, x.dense())).epsilon(1e-10));
    }
}
