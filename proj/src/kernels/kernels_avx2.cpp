// AVX2/FMA variants of the kernel table. This translation unit is compiled
// with -mavx2 -mfma; nothing here runs unless CPUID reports both features.

#include "layergen/kernels/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#define LAYERGEN_X86 1
#include <immintrin.h>
#else
#define LAYERGEN_X86 0
#endif

#include <cmath>
#include <cstddef>

namespace layergen::kernels {

#if LAYERGEN_X86

namespace {

// ---------------------------------------------------------------- float ---

void add_f(const float* a, const float* b, float* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(out + i, _mm256_add_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
    for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_f(const float* a, const float* b, float* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(out + i, _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul_f(const float* a, const float* b, float* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(out + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void div_f(const float* a, const float* b, float* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(out + i, _mm256_div_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
    for (; i < n; ++i) out[i] = a[i] / b[i];
}

void scale_f(const float* x, float s, float* out, std::size_t n) {
    const __m256 vs = _mm256_set1_ps(s);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(out + i, _mm256_mul_ps(vs, _mm256_loadu_ps(x + i)));
    for (; i < n; ++i) out[i] = s * x[i];
}

void axpy_f(float s, const float* x, float* y, std::size_t n) {
    const __m256 vs = _mm256_set1_ps(s);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(y + i, _mm256_fmadd_ps(vs, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
    for (; i < n; ++i) y[i] = std::fma(s, x[i], y[i]);
}

float hsum(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    lo = _mm_add_ps(lo, hi);
    lo = _mm_hadd_ps(lo, lo);
    lo = _mm_hadd_ps(lo, lo);
    return _mm_cvtss_f32(lo);
}

float dot_f(const float* a, const float* b, std::size_t n) {
    __m256 acc0 = _mm256_setzero_ps();
    __m256 acc1 = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
        acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8), _mm256_loadu_ps(b + i + 8), acc1);
    }
    for (; i + 8 <= n; i += 8)
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
    float r = hsum(_mm256_add_ps(acc0, acc1));
    for (; i < n; ++i) r += a[i] * b[i];
    return r;
}

float sum_f(const float* x, std::size_t n) {
    __m256 acc = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) acc = _mm256_add_ps(acc, _mm256_loadu_ps(x + i));
    float r = hsum(acc);
    for (; i < n; ++i) r += x[i];
    return r;
}

float max_f(const float* x, std::size_t n) {
    float best = x[0];
    std::size_t i = 0;
    if (n >= 8) {
        __m256 acc = _mm256_loadu_ps(x);
        for (i = 8; i + 8 <= n; i += 8) acc = _mm256_max_ps(acc, _mm256_loadu_ps(x + i));
        alignas(32) float lanes[8];
        _mm256_store_ps(lanes, acc);
        for (float v : lanes)
            if (v > best) best = v;
    }
    for (; i < n; ++i)
        if (x[i] > best) best = x[i];
    return best;
}

// C row i accumulates broadcast(A[i,l]) * B row l; SIMD runs along n.
void gemm_f(std::size_t m, std::size_t n, std::size_t k,
            const float* a, const float* b, float* c) {
    for (std::size_t i = 0; i < m; ++i) {
        float* crow = c + i * n;
        for (std::size_t l = 0; l < k; ++l) {
            const float s = a[i * k + l];
            if (s == 0.0f) continue;
            const float* brow = b + l * n;
            const __m256 vs = _mm256_set1_ps(s);
            std::size_t j = 0;
            for (; j + 8 <= n; j += 8)
                _mm256_storeu_ps(crow + j,
                                 _mm256_fmadd_ps(vs, _mm256_loadu_ps(brow + j), _mm256_loadu_ps(crow + j)));
            for (; j < n; ++j) crow[j] = std::fma(s, brow[j], crow[j]);
        }
    }
}

void cmul_f(const float* a, const float* b, float* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256 va = _mm256_loadu_ps(a + 2 * i);
        const __m256 vb = _mm256_loadu_ps(b + 2 * i);
        const __m256 t1 = _mm256_mul_ps(va, _mm256_moveldup_ps(vb));
        const __m256 t2 = _mm256_mul_ps(_mm256_permute_ps(va, 0xB1), _mm256_movehdup_ps(vb));
        _mm256_storeu_ps(out + 2 * i, _mm256_addsub_ps(t1, t2));
    }
    for (; i < n; ++i) {
        const float ar = a[2 * i], ai = a[2 * i + 1], br = b[2 * i], bi = b[2 * i + 1];
        out[2 * i] = ar * br - ai * bi;
        out[2 * i + 1] = ai * br + ar * bi;
    }
}

void cmul_conj_f(const float* a, const float* b, float* out, std::size_t n) {
    const __m256 neg = _mm256_set1_ps(-0.0f);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256 va = _mm256_loadu_ps(a + 2 * i);
        const __m256 vb = _mm256_loadu_ps(b + 2 * i);
        const __m256 t1 = _mm256_mul_ps(va, _mm256_moveldup_ps(vb));
        const __m256 t2 = _mm256_mul_ps(_mm256_permute_ps(va, 0xB1), _mm256_movehdup_ps(vb));
        _mm256_storeu_ps(out + 2 * i, _mm256_addsub_ps(t1, _mm256_xor_ps(t2, neg)));
    }
    for (; i < n; ++i) {
        const float ar = a[2 * i], ai = a[2 * i + 1], br = b[2 * i], bi = b[2 * i + 1];
        out[2 * i] = ar * br + ai * bi;
        out[2 * i + 1] = ai * br - ar * bi;
    }
}

void cbutterfly_f(float* lo, float* hi, float wr, float wi, std::size_t n) {
    const __m256 vwr = _mm256_set1_ps(wr);
    const __m256 vwi = _mm256_set1_ps(wi);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256 h = _mm256_loadu_ps(hi + 2 * i);
        const __m256 t = _mm256_addsub_ps(_mm256_mul_ps(h, vwr),
                                          _mm256_mul_ps(_mm256_permute_ps(h, 0xB1), vwi));
        const __m256 l = _mm256_loadu_ps(lo + 2 * i);
        _mm256_storeu_ps(lo + 2 * i, _mm256_add_ps(l, t));
        _mm256_storeu_ps(hi + 2 * i, _mm256_sub_ps(l, t));
    }
    for (; i < n; ++i) {
        const float hr = hi[2 * i], hj = hi[2 * i + 1];
        const float tr = hr * wr - hj * wi;
        const float ti = hj * wr + hr * wi;
        const float lr = lo[2 * i], lj = lo[2 * i + 1];
        lo[2 * i] = lr + tr;
        lo[2 * i + 1] = lj + ti;
        hi[2 * i] = lr - tr;
        hi[2 * i + 1] = lj - ti;
    }
}

void adam_f(float* p, const float* g, float* m, float* v, std::size_t n,
            float lr, float beta1, float beta2, float eps, float inv_bc1, float inv_bc2) {
    const __m256 vb1 = _mm256_set1_ps(beta1), vc1 = _mm256_set1_ps(1.0f - beta1);
    const __m256 vb2 = _mm256_set1_ps(beta2), vc2 = _mm256_set1_ps(1.0f - beta2);
    const __m256 vbc1 = _mm256_set1_ps(inv_bc1), vbc2 = _mm256_set1_ps(inv_bc2);
    const __m256 vlr = _mm256_set1_ps(lr), veps = _mm256_set1_ps(eps);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 vg = _mm256_loadu_ps(g + i);
        const __m256 vm = _mm256_add_ps(_mm256_mul_ps(vb1, _mm256_loadu_ps(m + i)), _mm256_mul_ps(vc1, vg));
        const __m256 vv = _mm256_add_ps(_mm256_mul_ps(vb2, _mm256_loadu_ps(v + i)),
                                        _mm256_mul_ps(vc2, _mm256_mul_ps(vg, vg)));
        _mm256_storeu_ps(m + i, vm);
        _mm256_storeu_ps(v + i, vv);
        const __m256 num = _mm256_mul_ps(vlr, _mm256_mul_ps(vm, vbc1));
        const __m256 den = _mm256_add_ps(_mm256_sqrt_ps(_mm256_mul_ps(vv, vbc2)), veps);
        _mm256_storeu_ps(p + i, _mm256_sub_ps(_mm256_loadu_ps(p + i), _mm256_div_ps(num, den)));
    }
    for (; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0f - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0f - beta2) * (g[i] * g[i]);
        p[i] -= lr * (m[i] * inv_bc1) / (std::sqrt(v[i] * inv_bc2) + eps);
    }
}

// --------------------------------------------------------------- double ---

void add_d(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_d(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul_d(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void div_d(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] / b[i];
}

void scale_d(const double* x, double s, double* out, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(vs, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) out[i] = s * x[i];
}

void axpy_d(double s, const double* x, double* y, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vs, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] = std::fma(s, x[i], y[i]);
}

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_d(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    double r = hsum(acc);
    for (; i < n; ++i) r += a[i] * b[i];
    return r;
}

double sum_d(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double r = hsum(acc);
    for (; i < n; ++i) r += x[i];
    return r;
}

double max_d(const double* x, std::size_t n) {
    double best = x[0];
    for (std::size_t i = 1; i < n; ++i)
        if (x[i] > best) best = x[i];
    return best;
}

void gemm_d(std::size_t m, std::size_t n, std::size_t k,
            const double* a, const double* b, double* c) {
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        for (std::size_t l = 0; l < k; ++l) {
            const double s = a[i * k + l];
            if (s == 0.0) continue;
            const double* brow = b + l * n;
            const __m256d vs = _mm256_set1_pd(s);
            std::size_t j = 0;
            for (; j + 4 <= n; j += 4)
                _mm256_storeu_pd(crow + j,
                                 _mm256_fmadd_pd(vs, _mm256_loadu_pd(brow + j), _mm256_loadu_pd(crow + j)));
            for (; j < n; ++j) crow[j] = std::fma(s, brow[j], crow[j]);
        }
    }
}

void cmul_d(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(a + 2 * i);
        const __m256d vb = _mm256_loadu_pd(b + 2 * i);
        const __m256d t1 = _mm256_mul_pd(va, _mm256_movedup_pd(vb));
        const __m256d t2 = _mm256_mul_pd(_mm256_permute_pd(va, 0x5), _mm256_permute_pd(vb, 0xF));
        _mm256_storeu_pd(out + 2 * i, _mm256_addsub_pd(t1, t2));
    }
    for (; i < n; ++i) {
        const double ar = a[2 * i], ai = a[2 * i + 1], br = b[2 * i], bi = b[2 * i + 1];
        out[2 * i] = ar * br - ai * bi;
        out[2 * i + 1] = ai * br + ar * bi;
    }
}

void cmul_conj_d(const double* a, const double* b, double* out, std::size_t n) {
    const __m256d neg = _mm256_set1_pd(-0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(a + 2 * i);
        const __m256d vb = _mm256_loadu_pd(b + 2 * i);
        const __m256d t1 = _mm256_mul_pd(va, _mm256_movedup_pd(vb));
        const __m256d t2 = _mm256_mul_pd(_mm256_permute_pd(va, 0x5), _mm256_permute_pd(vb, 0xF));
        _mm256_storeu_pd(out + 2 * i, _mm256_addsub_pd(t1, _mm256_xor_pd(t2, neg)));
    }
    for (; i < n; ++i) {
        const double ar = a[2 * i], ai = a[2 * i + 1], br = b[2 * i], bi = b[2 * i + 1];
        out[2 * i] = ar * br + ai * bi;
        out[2 * i + 1] = ai * br - ar * bi;
    }
}

void cbutterfly_d(double* lo, double* hi, double wr, double wi, std::size_t n) {
    const __m256d vwr = _mm256_set1_pd(wr);
    const __m256d vwi = _mm256_set1_pd(wi);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d h = _mm256_loadu_pd(hi + 2 * i);
        const __m256d t = _mm256_addsub_pd(_mm256_mul_pd(h, vwr),
                                           _mm256_mul_pd(_mm256_permute_pd(h, 0x5), vwi));
        const __m256d l = _mm256_loadu_pd(lo + 2 * i);
        _mm256_storeu_pd(lo + 2 * i, _mm256_add_pd(l, t));
        _mm256_storeu_pd(hi + 2 * i, _mm256_sub_pd(l, t));
    }
    for (; i < n; ++i) {
        const double hr = hi[2 * i], hj = hi[2 * i + 1];
        const double tr = hr * wr - hj * wi;
        const double ti = hj * wr + hr * wi;
        const double lr = lo[2 * i], lj = lo[2 * i + 1];
        lo[2 * i] = lr + tr;
        lo[2 * i + 1] = lj + ti;
        hi[2 * i] = lr - tr;
        hi[2 * i + 1] = lj - ti;
    }
}

void adam_d(double* p, const double* g, double* m, double* v, std::size_t n,
            double lr, double beta1, double beta2, double eps, double inv_bc1, double inv_bc2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
        p[i] -= lr * (m[i] * inv_bc1) / (std::sqrt(v[i] * inv_bc2) + eps);
    }
}

const Table<float> kAvx2F32 = {
    "avx2", add_f, sub_f, mul_f, div_f, scale_f, axpy_f, dot_f, sum_f, max_f,
    gemm_f, cmul_f, cmul_conj_f, cbutterfly_f, adam_f,
};

const Table<double> kAvx2F64 = {
    "avx2", add_d, sub_d, mul_d, div_d, scale_d, axpy_d, dot_d, sum_d, max_d,
    gemm_d, cmul_d, cmul_conj_d, cbutterfly_d, adam_d,
};

}  // namespace

bool cpu_has_avx2() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

template <> const Table<float>* avx2<float>() {
    return cpu_has_avx2() ? &kAvx2F32 : nullptr;
}
template <> const Table<double>* avx2<double>() {
    return cpu_has_avx2() ? &kAvx2F64 : nullptr;
}

#else  // !LAYERGEN_X86

bool cpu_has_avx2() { return false; }
template <> const Table<float>* avx2<float>() { return nullptr; }
template <> const Table<double>* avx2<double>() { return nullptr; }

#endif

}  // namespace layergen::kernels
