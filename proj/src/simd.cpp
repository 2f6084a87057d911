#include "iia/simd.hpp"

#include <atomic>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define IIA_X86 1
#endif
#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>
#define IIA_NEON 1
#endif

namespace iia::simd {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void jet_fma(Jet2& acc, const Jet2& a, const Jet2& b) {
    acc.val += a.val * b.val;
    for (int i = 0; i < kDim; ++i) acc.grad[i] += a.val * b.grad[i] + b.val * a.grad[i];
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
            acc.h(i, j) += a.val * b.h(i, j) + b.val * a.h(i, j) +
                           a.grad[i] * b.grad[j] + b.grad[i] * a.grad[j];
}

}  // namespace scalar

namespace avx2 {

#ifdef IIA_X86

bool available() {
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok;
}

__attribute__((target("avx2,fma"))) double dot(const double* a, const double* b,
                                               std::size_t n) {
    __m256d s0 = _mm256_setzero_pd();
    __m256d s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
    }
    for (; i + 4 <= n; i += 4)
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s0 = _mm256_add_pd(s0, s1);
    __m128d lo = _mm256_castpd256_pd128(s0);
    __m128d hi = _mm256_extractf128_pd(s0, 1);
    lo = _mm_add_pd(lo, hi);
    double s = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

__attribute__((target("avx2,fma"))) void axpy(double alpha, const double* x, double* y,
                                              std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, r);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

// Rows of the Hessian are 6 wide: one 4-lane and one 2-lane chunk each.
__attribute__((target("avx2,fma"))) void jet_fma(Jet2& acc, const Jet2& a, const Jet2& b) {
    const double av = a.val, bv = b.val;
    acc.val += av * bv;
    const __m256d vav = _mm256_set1_pd(av);
    const __m256d vbv = _mm256_set1_pd(bv);
    const __m256d ag0 = _mm256_loadu_pd(a.grad.data());
    const __m256d bg0 = _mm256_loadu_pd(b.grad.data());
    const __m128d ag1 = _mm_loadu_pd(a.grad.data() + 4);
    const __m128d bg1 = _mm_loadu_pd(b.grad.data() + 4);
    {
        __m256d g = _mm256_loadu_pd(acc.grad.data());
        g = _mm256_fmadd_pd(vav, bg0, g);
        g = _mm256_fmadd_pd(vbv, ag0, g);
        _mm256_storeu_pd(acc.grad.data(), g);
        __m128d g1 = _mm_loadu_pd(acc.grad.data() + 4);
        g1 = _mm_fmadd_pd(_mm256_castpd256_pd128(vav), bg1, g1);
        g1 = _mm_fmadd_pd(_mm256_castpd256_pd128(vbv), ag1, g1);
        _mm_storeu_pd(acc.grad.data() + 4, g1);
    }
    for (int i = 0; i < kDim; ++i) {
        double* row = acc.hess.data() + i * kDim;
        const double* ra = a.hess.data() + i * kDim;
        const double* rb = b.hess.data() + i * kDim;
        const __m256d ai = _mm256_set1_pd(a.grad[i]);
        const __m256d bi = _mm256_set1_pd(b.grad[i]);
        __m256d h0 = _mm256_loadu_pd(row);
        h0 = _mm256_fmadd_pd(vav, _mm256_loadu_pd(rb), h0);
        h0 = _mm256_fmadd_pd(vbv, _mm256_loadu_pd(ra), h0);
        h0 = _mm256_fmadd_pd(ai, bg0, h0);
        h0 = _mm256_fmadd_pd(bi, ag0, h0);
        _mm256_storeu_pd(row, h0);
        __m128d h1 = _mm_loadu_pd(row + 4);
        h1 = _mm_fmadd_pd(_mm256_castpd256_pd128(vav), _mm_loadu_pd(rb + 4), h1);
        h1 = _mm_fmadd_pd(_mm256_castpd256_pd128(vbv), _mm_loadu_pd(ra + 4), h1);
        h1 = _mm_fmadd_pd(_mm256_castpd256_pd128(ai), bg1, h1);
        h1 = _mm_fmadd_pd(_mm256_castpd256_pd128(bi), ag1, h1);
        _mm_storeu_pd(row + 4, h1);
    }
}

#else

bool available() { return false; }
double dot(const double* a, const double* b, std::size_t n) { return scalar::dot(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) {
    scalar::axpy(alpha, x, y, n);
}
void jet_fma(Jet2& acc, const Jet2& a, const Jet2& b) { scalar::jet_fma(acc, a, b); }

#endif

}  // namespace avx2

namespace neon {

#ifdef IIA_NEON

bool available() { return true; }

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t s0 = vdupq_n_f64(0.0);
    float64x2_t s1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 = vfmaq_f64(s0, vld1q_f64(a + i), vld1q_f64(b + i));
        s1 = vfmaq_f64(s1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(s0, s1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

// Three 2-lane chunks per 6-wide row.
void jet_fma(Jet2& acc, const Jet2& a, const Jet2& b) {
    const double av = a.val, bv = b.val;
    acc.val += av * bv;
    const float64x2_t vav = vdupq_n_f64(av);
    const float64x2_t vbv = vdupq_n_f64(bv);
    float64x2_t ag[3], bg[3];
    for (int c = 0; c < 3; ++c) {
        ag[c] = vld1q_f64(a.grad.data() + 2 * c);
        bg[c] = vld1q_f64(b.grad.data() + 2 * c);
        float64x2_t g = vld1q_f64(acc.grad.data() + 2 * c);
        g = vfmaq_f64(g, vav, bg[c]);
        g = vfmaq_f64(g, vbv, ag[c]);
        vst1q_f64(acc.grad.data() + 2 * c, g);
    }
    for (int i = 0; i < kDim; ++i) {
        double* row = acc.hess.data() + i * kDim;
        const double* ra = a.hess.data() + i * kDim;
        const double* rb = b.hess.data() + i * kDim;
        const float64x2_t ai = vdupq_n_f64(a.grad[i]);
        const float64x2_t bi = vdupq_n_f64(b.grad[i]);
        for (int c = 0; c < 3; ++c) {
            float64x2_t h = vld1q_f64(row + 2 * c);
            h = vfmaq_f64(h, vav, vld1q_f64(rb + 2 * c));
            h = vfmaq_f64(h, vbv, vld1q_f64(ra + 2 * c));
            h = vfmaq_f64(h, ai, bg[c]);
            h = vfmaq_f64(h, bi, ag[c]);
            vst1q_f64(row + 2 * c, h);
        }
    }
}

#else

bool available() { return false; }
double dot(const double* a, const double* b, std::size_t n) { return scalar::dot(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) {
    scalar::axpy(alpha, x, y, n);
}
void jet_fma(Jet2& acc, const Jet2& a, const Jet2& b) { scalar::jet_fma(acc, a, b); }

#endif

}  // namespace neon

namespace {
std::atomic<Isa> g_isa{detected_isa()};
}

Isa detected_isa() {
    if (avx2::available()) return Isa::Avx2;
    if (neon::available()) return Isa::Neon;
    return Isa::Scalar;
}

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
        default: return "scalar";
    }
}

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::Avx2: return avx2::available();
        case Isa::Neon: return neon::available();
        default: return true;
    }
}

void set_isa(Isa isa) {
    if (!isa_available(isa)) isa = Isa::Scalar;
    g_isa.store(isa, std::memory_order_relaxed);
}

Isa active_isa() { return g_isa.load(std::memory_order_relaxed); }

double dot(const double* a, const double* b, std::size_t n) {
    switch (active_isa()) {
        case Isa::Avx2: return avx2::dot(a, b, n);
        case Isa::Neon: return neon::dot(a, b, n);
        default: return scalar::dot(a, b, n);
    }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    switch (active_isa()) {
        case Isa::Avx2: avx2::axpy(alpha, x, y, n); break;
        case Isa::Neon: neon::axpy(alpha, x, y, n); break;
        default: scalar::axpy(alpha, x, y, n);
    }
}

void jet_fma(Jet2& acc, const Jet2& a, const Jet2& b) {
    switch (active_isa()) {
        case Isa::Avx2: avx2::jet_fma(acc, a, b); break;
        case Isa::Neon: neon::jet_fma(acc, a, b); break;
        default: scalar::jet_fma(acc, a, b);
    }
}

}  // namespace iia::simd
