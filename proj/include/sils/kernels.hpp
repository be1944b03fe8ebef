#pragma once
// Double-precision arithmetic kernels used by the dense linear algebra and
// the solvers. Every kernel ships a scalar reference implementation and an
// AVX2+FMA variant; the active implementation is chosen once at startup from
// CPUID, and can be overridden with the environment variable
// SILS_SIMD=scalar|avx2|auto (or programmatically via force_isa, for the
// equivalence tests).

#include <cstddef>

namespace sils::kern {

enum class Isa { scalar, avx2 };

Isa active_isa();
// Returns false if the requested ISA is not available on this CPU.
bool force_isa(Isa isa);

// a . b
double dot(const double* a, const double* b, std::size_t n);
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
// x *= alpha
void scal(double alpha, double* x, std::size_t n);
// sum x_i^2
double sum_sq(const double* x, std::size_t n);
// sum |x_i|
double sum_abs(const double* x, std::size_t n);
// max |x_i|, 0 for empty input
double max_abs(const double* x, std::size_t n);
// out_i = sign(x_i) * max(|x_i| - t, 0)
void soft_threshold(const double* x, double t, double* out, std::size_t n);

// Row-major m x n matrix A.
// y = A x
void gemv(const double* a, std::size_t m, std::size_t n, const double* x, double* y);
// y = A^T x
void gemv_t(const double* a, std::size_t m, std::size_t n, const double* x, double* y);
// C = A^T A, C is n x n row-major
void gram(const double* a, std::size_t m, std::size_t n, double* c);
// C = A B, A m x k, B k x n, C m x n, all row-major
void matmul(const double* a, std::size_t m, std::size_t k, const double* b,
            std::size_t n, double* c);

} // namespace sils::kern
