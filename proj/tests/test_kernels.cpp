#include <doctest.h>

#include "sils/kernels.hpp"
#include "sils/rng.hpp"
#include "test_support.hpp"

using namespace sils;

namespace {

// run fn under both ISAs, restoring the ambient one
template <typename Fn>
void with_both_isas(Fn&& fn) {
    const kern::Isa ambient = kern::active_isa();
    REQUIRE(kern::force_isa(kern::Isa::scalar));
    auto scalar_result = fn();
    const bool have_avx2 = kern::force_isa(kern::Isa::avx2);
    if (have_avx2) {
        auto simd_result = fn();
        REQUIRE_EQ(scalar_result.size(), simd_result.size());
        for (std::size_t i = 0; i < scalar_result.size(); ++i)
            CHECK(scalar_result[i] == doctest::Approx(simd_result[i]).epsilon(1e-12));
    }
    kern::force_isa(ambient);
}

} // namespace

TEST_CASE("kernel ISA selection honors overrides") {
    const kern::Isa ambient = kern::active_isa();
    REQUIRE(kern::force_isa(kern::Isa::scalar));
    CHECK(kern::active_isa() == kern::Isa::scalar);
    kern::force_isa(ambient);
}

TEST_CASE("scalar and simd kernels agree on random inputs") {
    CounterRng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 70);
        Vec a = test_support::random_vector(rng, n, -3.0, 3.0);
        Vec b = test_support::random_vector(rng, n, -3.0, 3.0);
        const double alpha = rng.next_uniform(-2.0, 2.0);
        const double t = rng.next_uniform(0.0, 1.5);

        with_both_isas([&] {
            return Vec{kern::dot(a.data(), b.data(), n)};
        });
        with_both_isas([&] {
            return Vec{kern::sum_sq(a.data(), n), kern::sum_abs(a.data(), n),
                       kern::max_abs(a.data(), n)};
        });
        with_both_isas([&] {
            Vec y = b;
            kern::axpy(alpha, a.data(), y.data(), n);
            return y;
        });
        with_both_isas([&] {
            Vec y = a;
            kern::scal(alpha, y.data(), n);
            return y;
        });
        with_both_isas([&] {
            Vec out(n);
            kern::soft_threshold(a.data(), t, out.data(), n);
            return out;
        });
    }
}

TEST_CASE("matrix kernels agree across ISAs") {
    CounterRng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const int m = 2 + static_cast<int>(rng.next_u64() % 9);
        const int n = 2 + static_cast<int>(rng.next_u64() % 9);
        const int k = 2 + static_cast<int>(rng.next_u64() % 9);
        Mat a = test_support::random_matrix(rng, m, n);
        Mat b = test_support::random_matrix(rng, n, k);
        Vec x = test_support::random_vector(rng, n);
        Vec xt = test_support::random_vector(rng, m);

        with_both_isas([&] {
            Vec y(m);
            kern::gemv(a.data(), m, n, x.data(), y.data());
            return y;
        });
        with_both_isas([&] {
            Vec y(n);
            kern::gemv_t(a.data(), m, n, xt.data(), y.data());
            return y;
        });
        with_both_isas([&] {
            Vec c(n * n);
            kern::gram(a.data(), m, n, c.data());
            return c;
        });
        with_both_isas([&] {
            Vec c(m * k);
            kern::matmul(a.data(), m, n, b.data(), k, c.data());
            return c;
        });
    }
}

TEST_CASE("soft threshold matches the closed form") {
    double out = -1.0;
    double x = 0.5;
    kern::soft_threshold(&x, 1.0, &out, 1);
    CHECK(out == 0.0);
    x = -2.5;
    kern::soft_threshold(&x, 1.0, &out, 1);
    CHECK(out == doctest::Approx(-1.5));
}

TEST_CASE("gram equals explicit transpose product") {
    CounterRng rng(11);
    Mat a = test_support::random_matrix(rng, 7, 5);
    Mat g(5, 5);
    kern::gram(a.data(), 7, 5, g.data());
    Mat ref = matmul(transpose(a), a);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            CHECK(g(i, j) == doctest::Approx(ref(i, j)).epsilon(1e-12));
}
