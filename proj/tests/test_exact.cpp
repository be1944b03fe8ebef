#include <doctest.h>

#include <stdexcept>

#include "sils/exact.hpp"
#include "test_support.hpp"

using namespace sils;

TEST_CASE("exact solver on the identity pick") {
    SilsInstance inst;
    inst.m = Mat::identity(3);
    inst.b = {1.0, 0.0, 0.0};
    inst.sigma = 1;
    ExactResult res = solve_exact(inst);
    CHECK(res.best_value == doctest::Approx(0.0));
    CHECK(res.best_x.x == std::vector<int>{1, 0, 0});
    CHECK(res.unique);
    CHECK(res.candidates == 6);   // C(3,1) * 2
}

TEST_CASE("zero observation makes the optimum sign-ambiguous") {
    CounterRng rng(31);
    SilsInstance inst = test_support::random_instance(rng, 4, 3, 1);
    inst.b.assign(4, 0.0);
    ExactResult res = solve_exact(inst);
    double min_col = 1e300;
    for (int j = 0; j < 3; ++j) {
        double nrm = 0.0;
        for (int i = 0; i < 4; ++i) nrm += inst.m(i, j) * inst.m(i, j);
        min_col = std::min(min_col, nrm / 4.0);
    }
    CHECK(res.best_value == doctest::Approx(min_col).epsilon(1e-12));
    CHECK_FALSE(res.unique);   // +-x symmetry ties the optimum
}

TEST_CASE("sign-flip symmetry: negating b negates the optimizer") {
    CounterRng rng(32);
    for (int trial = 0; trial < 10; ++trial) {
        SilsInstance inst = test_support::random_instance(rng, 5, 4, 2);
        ExactResult plus = solve_exact(inst);
        SilsInstance neg = inst;
        for (auto& v : neg.b) v = -v;
        ExactResult minus = solve_exact(neg);
        CHECK(minus.best_value == doctest::Approx(plus.best_value).epsilon(1e-12));
        for (std::size_t i = 0; i < plus.best_x.x.size(); ++i)
            CHECK(minus.best_x.x[i] == -plus.best_x.x[i]);
    }
}

TEST_CASE("enumeration visits exactly C(d,sigma) 2^sigma candidates") {
    CounterRng rng(33);
    SilsInstance inst = test_support::random_instance(rng, 3, 6, 3);
    ExactResult res = solve_exact(inst);
    CHECK(res.candidates == 20ull * 8ull);   // C(6,3) = 20
    CHECK(enumeration_count(6, 3) == 160);
    CHECK_THROWS_AS(enumeration_count(40, 20, 1000000ull), std::invalid_argument);
}

TEST_CASE("solve_sils0 finds exact fits and rejects non-representable data") {
    SilsInstance inst;
    inst.m = Mat::identity(2);
    inst.b = {1.0, 2.0};
    inst.sigma = 1;
    CHECK_FALSE(solve_sils0(inst).has_value());

    // planted exact fit
    CounterRng rng(34);
    SilsInstance p = test_support::random_instance(rng, 5, 4, 2);
    Vec x{1.0, 0.0, -1.0, 0.0};
    p.b = matvec(p.m, x);
    auto found = solve_sils0(p);
    REQUIRE(found.has_value());
    CHECK(objective(p, found->dense()) <= 1e-18);
}

TEST_CASE("oracle consistency: sils0 feasibility iff the exact optimum is zero") {
    CounterRng rng(35);
    int feasible_seen = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 3 + static_cast<int>(rng.next_u64() % 3);
        const int sigma = 1 + static_cast<int>(rng.next_u64() % d);
        SilsInstance inst = test_support::random_instance(rng, 4, d, sigma);
        if (trial % 3 == 0) {
            // plant a representable b so both branches of the equivalence run
            std::vector<int> entries(d, 0);
            for (int k = 0; k < sigma; ++k) entries[k] = rng.next_sign() ? 1 : -1;
            inst.b = matvec(inst.m, SparseSignVector::from_entries(entries).dense());
        }
        const bool feasible = solve_sils0(inst).has_value();
        const double best = solve_exact(inst).best_value;
        if (feasible) ++feasible_seen;
        CHECK(feasible == (best <= 1e-12));
    }
    CHECK(feasible_seen >= 30);
}
