#include "sils/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

#if defined(__x86_64__) || defined(_M_X64)
#define SILS_X86 1
#include <immintrin.h>
#else
#define SILS_X86 0
#endif

namespace sils::kern {

// ---------------------------------------------------------------- scalar ---

namespace scalar {

static double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

static void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

static void scal(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

static double sum_sq(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

static double sum_abs(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(x[i]);
    return s;
}

static double max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

static void soft_threshold(const double* x, double t, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double m = std::fabs(x[i]) - t;
        out[i] = m > 0.0 ? (x[i] < 0.0 ? -m : m) : 0.0;
    }
}

} // namespace scalar

// ------------------------------------------------------------------ avx2 ---

#if SILS_X86

namespace avx2 {

__attribute__((target("avx2,fma")))
static double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

__attribute__((target("avx2,fma")))
static double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

__attribute__((target("avx2,fma")))
static void axpy(double alpha, const double* x, double* y, std::size_t n) {
    __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

__attribute__((target("avx2,fma")))
static void scal(double alpha, double* x, std::size_t n) {
    __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

__attribute__((target("avx2,fma")))
static double sum_sq(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * x[i];
    return s;
}

__attribute__((target("avx2,fma")))
static double sum_abs(const double* x, std::size_t n) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_and_pd(mask, _mm256_loadu_pd(x + i)));
    double s = hsum(acc);
    for (; i < n; ++i) s += std::fabs(x[i]);
    return s;
}

__attribute__((target("avx2,fma")))
static double max_abs(const double* x, std::size_t n) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_max_pd(acc, _mm256_and_pd(mask, _mm256_loadu_pd(x + i)));
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    lo = _mm_max_pd(lo, hi);
    double m = std::max(_mm_cvtsd_f64(lo), _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

__attribute__((target("avx2,fma")))
static void soft_threshold(const double* x, double t, double* out, std::size_t n) {
    const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    const __m256d sign_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x8000000000000000LL));
    const __m256d vt = _mm256_set1_pd(t);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        __m256d mag = _mm256_max_pd(_mm256_sub_pd(_mm256_and_pd(abs_mask, v), vt), zero);
        _mm256_storeu_pd(out + i, _mm256_or_pd(mag, _mm256_and_pd(sign_mask, v)));
    }
    for (; i < n; ++i) {
        double m = std::fabs(x[i]) - t;
        out[i] = m > 0.0 ? (x[i] < 0.0 ? -m : m) : 0.0;
    }
}

} // namespace avx2

#endif // SILS_X86

// -------------------------------------------------------------- dispatch ---

namespace {

struct Table {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scal)(double, double*, std::size_t);
    double (*sum_sq)(const double*, std::size_t);
    double (*sum_abs)(const double*, std::size_t);
    double (*max_abs)(const double*, std::size_t);
    void (*soft_threshold)(const double*, double, double*, std::size_t);
};

constexpr Table kScalar{scalar::dot,     scalar::axpy,    scalar::scal,
                        scalar::sum_sq,  scalar::sum_abs, scalar::max_abs,
                        scalar::soft_threshold};

#if SILS_X86
constexpr Table kAvx2{avx2::dot,     avx2::axpy,    avx2::scal,
                      avx2::sum_sq,  avx2::sum_abs, avx2::max_abs,
                      avx2::soft_threshold};
#endif

bool avx2_available() {
#if SILS_X86
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa g_isa = Isa::scalar;
const Table* g_table = &kScalar;

void select(Isa isa) {
#if SILS_X86
    if (isa == Isa::avx2) {
        g_isa = Isa::avx2;
        g_table = &kAvx2;
        return;
    }
#endif
    (void)isa;
    g_isa = Isa::scalar;
    g_table = &kScalar;
}

struct Init {
    Init() {
        Isa isa = avx2_available() ? Isa::avx2 : Isa::scalar;
        if (const char* env = std::getenv("SILS_SIMD")) {
            if (std::strcmp(env, "scalar") == 0) isa = Isa::scalar;
            else if (std::strcmp(env, "avx2") == 0 && avx2_available()) isa = Isa::avx2;
        }
        select(isa);
    }
};
const Init g_init;

} // namespace

Isa active_isa() { return g_isa; }

bool force_isa(Isa isa) {
    if (isa == Isa::avx2 && !avx2_available()) return false;
    select(isa);
    return true;
}

double dot(const double* a, const double* b, std::size_t n) { return g_table->dot(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { g_table->axpy(alpha, x, y, n); }
void scal(double alpha, double* x, std::size_t n) { g_table->scal(alpha, x, n); }
double sum_sq(const double* x, std::size_t n) { return g_table->sum_sq(x, n); }
double sum_abs(const double* x, std::size_t n) { return g_table->sum_abs(x, n); }
double max_abs(const double* x, std::size_t n) { return g_table->max_abs(x, n); }
void soft_threshold(const double* x, double t, double* out, std::size_t n) {
    g_table->soft_threshold(x, t, out, n);
}

// The matrix kernels are written on top of the vector kernels, so they pick
// up the active ISA through them.

void gemv(const double* a, std::size_t m, std::size_t n, const double* x, double* y) {
    for (std::size_t i = 0; i < m; ++i) y[i] = dot(a + i * n, x, n);
}

void gemv_t(const double* a, std::size_t m, std::size_t n, const double* x, double* y) {
    for (std::size_t j = 0; j < n; ++j) y[j] = 0.0;
    for (std::size_t i = 0; i < m; ++i) axpy(x[i], a + i * n, y, n);
}

void gram(const double* a, std::size_t m, std::size_t n, double* c) {
    for (std::size_t i = 0; i < n * n; ++i) c[i] = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        const double* row = a + r * n;
        for (std::size_t i = 0; i < n; ++i)
            if (row[i] != 0.0) axpy(row[i], row + i, c + i * n + i, n - i);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) c[i * n + j] = c[j * n + i];
}

void matmul(const double* a, std::size_t m, std::size_t k, const double* b,
            std::size_t n, double* c) {
    for (std::size_t i = 0; i < m * n; ++i) c[i] = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p)
            if (arow[p] != 0.0) axpy(arow[p], b + p * n, crow, n);
    }
}

} // namespace sils::kern
