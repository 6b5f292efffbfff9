#pragma once

#include <cstddef>

// Data-parallel inner loops used by the tensor ops, the FFT and the
// optimizer. Every entry has a scalar reference implementation and an
// AVX2 variant; the active table is picked once at startup from CPUID,
// overridable with LAYERGEN_KERNELS=scalar|avx2|auto. Complex arrays are
// interleaved (re, im) pairs.
namespace layergen::kernels {

template <typename T>
struct Table {
    const char* name;

    void (*add)(const T* a, const T* b, T* out, std::size_t n);
    void (*sub)(const T* a, const T* b, T* out, std::size_t n);
    void (*mul)(const T* a, const T* b, T* out, std::size_t n);
    void (*div)(const T* a, const T* b, T* out, std::size_t n);
    // out = s * x
    void (*scale)(const T* x, T s, T* out, std::size_t n);
    // y += s * x  (contracted: one rounding per element)
    void (*axpy)(T s, const T* x, T* y, std::size_t n);

    T (*dot)(const T* a, const T* b, std::size_t n);
    T (*sum)(const T* x, std::size_t n);
    T (*max_value)(const T* x, std::size_t n);  // n >= 1, inputs free of NaN

    // Row-major C[m x n] += A[m x k] * B[k x n], tightly packed.
    void (*gemm)(std::size_t m, std::size_t n, std::size_t k,
                 const T* a, const T* b, T* c);

    // n complex elements: out = a * b, out = a * conj(b)
    void (*cmul)(const T* a, const T* b, T* out, std::size_t n);
    void (*cmul_conj)(const T* a, const T* b, T* out, std::size_t n);
    // radix-2 butterflies with a shared twiddle w = (wr, wi):
    //   t = hi[i] * w; hi[i] = lo[i] - t; lo[i] = lo[i] + t
    void (*cbutterfly)(T* lo, T* hi, T wr, T wi, std::size_t n);

    // Bias-corrected Adam update; inv_bc1 = 1/(1-beta1^t), inv_bc2 likewise.
    void (*adam_step)(T* p, const T* g, T* m, T* v, std::size_t n,
                      T lr, T beta1, T beta2, T eps, T inv_bc1, T inv_bc2);
};

template <typename T> const Table<T>& scalar();
template <typename T> const Table<T>* avx2();   // nullptr when unavailable
template <typename T> const Table<T>& active();

bool cpu_has_avx2();
const char* active_name();

}  // namespace layergen::kernels
