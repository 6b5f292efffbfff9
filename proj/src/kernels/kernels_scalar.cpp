#include "layergen/kernels/kernels.hpp"

#include <cmath>

namespace layergen::kernels {
namespace {

template <typename T>
void add_(const T* a, const T* b, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

template <typename T>
void sub_(const T* a, const T* b, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

template <typename T>
void mul_(const T* a, const T* b, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

template <typename T>
void div_(const T* a, const T* b, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] / b[i];
}

template <typename T>
void scale_(const T* x, T s, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = s * x[i];
}

// std::fma keeps the contraction identical to the FMA-based SIMD path.
template <typename T>
void axpy_(T s, const T* x, T* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(s, x[i], y[i]);
}

template <typename T>
T dot_(const T* a, const T* b, std::size_t n) {
    T acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

template <typename T>
T sum_(const T* x, std::size_t n) {
    T acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

template <typename T>
T max_value_(const T* x, std::size_t n) {
    T best = x[0];
    for (std::size_t i = 1; i < n; ++i)
        if (x[i] > best) best = x[i];
    return best;
}

template <typename T>
void gemm_(std::size_t m, std::size_t n, std::size_t k,
           const T* a, const T* b, T* c) {
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            T acc = 0;
            for (std::size_t l = 0; l < k; ++l) acc += a[i * k + l] * b[l * n + j];
            c[i * n + j] += acc;
        }
    }
}

template <typename T>
void cmul_(const T* a, const T* b, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const T ar = a[2 * i], ai = a[2 * i + 1];
        const T br = b[2 * i], bi = b[2 * i + 1];
        out[2 * i] = ar * br - ai * bi;
        out[2 * i + 1] = ai * br + ar * bi;
    }
}

template <typename T>
void cmul_conj_(const T* a, const T* b, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const T ar = a[2 * i], ai = a[2 * i + 1];
        const T br = b[2 * i], bi = b[2 * i + 1];
        out[2 * i] = ar * br + ai * bi;
        out[2 * i + 1] = ai * br - ar * bi;
    }
}

template <typename T>
void cbutterfly_(T* lo, T* hi, T wr, T wi, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const T hr = hi[2 * i], hj = hi[2 * i + 1];
        const T tr = hr * wr - hj * wi;
        const T ti = hj * wr + hr * wi;
        const T lr = lo[2 * i], lj = lo[2 * i + 1];
        lo[2 * i] = lr + tr;
        lo[2 * i + 1] = lj + ti;
        hi[2 * i] = lr - tr;
        hi[2 * i + 1] = lj - ti;
    }
}

template <typename T>
void adam_step_(T* p, const T* g, T* m, T* v, std::size_t n,
                T lr, T beta1, T beta2, T eps, T inv_bc1, T inv_bc2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (T(1) - beta1) * g[i];
        v[i] = beta2 * v[i] + (T(1) - beta2) * (g[i] * g[i]);
        const T mhat = m[i] * inv_bc1;
        const T vhat = v[i] * inv_bc2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

template <typename T>
constexpr Table<T> make_table() {
    return Table<T>{
        "scalar",  add_<T>,  sub_<T>,  mul_<T>, div_<T>, scale_<T>,
        axpy_<T>,  dot_<T>,  sum_<T>,  max_value_<T>,    gemm_<T>,
        cmul_<T>,  cmul_conj_<T>,      cbutterfly_<T>,   adam_step_<T>,
    };
}

const Table<float> kScalarF32 = make_table<float>();
const Table<double> kScalarF64 = make_table<double>();

}  // namespace

template <> const Table<float>& scalar<float>() { return kScalarF32; }
template <> const Table<double>& scalar<double>() { return kScalarF64; }

}  // namespace layergen::kernels
