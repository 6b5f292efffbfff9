#pragma once

#include <vector>

#include "layergen/core/tensor.hpp"

// Differentiable operations. Elementwise binaries accept equal shapes, a
// rank-0/size-1 scalar operand, or a vector matching the other operand's
// last axis. Learned convolutions use cross-correlation semantics;
// conv2d_fft is true linear convolution (kernel flipped).
namespace layergen {

template <typename T> Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> div(const Tensor<T>& a, const Tensor<T>& b);

template <typename T> Tensor<T> neg(const Tensor<T>& t);
template <typename T> Tensor<T> exp(const Tensor<T>& t);
template <typename T> Tensor<T> log(const Tensor<T>& t);  // rejects non-positive input
template <typename T> Tensor<T> sigmoid(const Tensor<T>& t);
template <typename T> Tensor<T> relu(const Tensor<T>& t);     // subgradient 0 at 0
template <typename T> Tensor<T> elu(const Tensor<T>& t);      // alpha = 1
template <typename T> Tensor<T> tanh(const Tensor<T>& t);
template <typename T> Tensor<T> abs(const Tensor<T>& t);      // subgradient 0 at 0
template <typename T> Tensor<T> scale(const Tensor<T>& t, T c);
template <typename T> Tensor<T> add_const(const Tensor<T>& t, T c);
// x*log(x) with 0 log 0 := 0; inputs must be >= 0.
template <typename T> Tensor<T> xlogx(const Tensor<T>& t);

template <typename T> Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

// reduce over the given axes (empty = all axes -> rank-0 scalar)
template <typename T> Tensor<T> reduce_sum(const Tensor<T>& t, std::vector<int> axes = {});
template <typename T> Tensor<T> reduce_mean(const Tensor<T>& t, std::vector<int> axes = {});
// max is non-differentiable at ties; subgradient goes to the first maximal
// element of each slice.
template <typename T> Tensor<T> reduce_max(const Tensor<T>& t, std::vector<int> axes = {});
template <typename T> Tensor<T> sum_all(const Tensor<T>& t);

template <typename T> Tensor<T> softmax(const Tensor<T>& t, int axis);

template <typename T> Tensor<T> reshape(const Tensor<T>& t, Shape shape);
template <typename T> Tensor<T> slice(const Tensor<T>& t, int axis, int start, int len);
template <typename T> Tensor<T> concat(const std::vector<Tensor<T>>& parts, int axis);

// CHW helpers: per-channel bias and per-pixel map broadcast.
template <typename T> Tensor<T> bias_chw(const Tensor<T>& x, const Tensor<T>& b);
template <typename T> Tensor<T> mul_map(const Tensor<T>& x, const Tensor<T>& m);

// image [C,H,W] (+) kernel [K,C,h,w] -> [K,H',W'], cross-correlation,
// H' = floor((H + 2p - h)/stride) + 1
template <typename T>
Tensor<T> conv2d(const Tensor<T>& image, const Tensor<T>& kernel, int stride, int padding);

// input [K,H,W] (+) kernel [K,C,h,w] -> [C,Ho,Wo], Ho = (H-1)*stride - 2p + h;
// exact adjoint of conv2d with the same kernel/stride/padding.
template <typename T>
Tensor<T> transpose_conv2d(const Tensor<T>& input, const Tensor<T>& kernel, int stride, int padding);

enum class FftConvMode { kFull, kSameCentered };

// Single-channel true linear convolution evaluated in Fourier space.
// kSameCentered crops the full result so a one-hot kernel at index
// (floor(h/2), floor(w/2)) reproduces the image.
template <typename T>
Tensor<T> conv2d_fft(const Tensor<T>& image, const Tensor<T>& kernel, FftConvMode mode);

template <typename T> Tensor<T> operator+(const Tensor<T>& a, const Tensor<T>& b) { return add(a, b); }
template <typename T> Tensor<T> operator-(const Tensor<T>& a, const Tensor<T>& b) { return sub(a, b); }
template <typename T> Tensor<T> operator*(const Tensor<T>& a, const Tensor<T>& b) { return mul(a, b); }
template <typename T> Tensor<T> operator/(const Tensor<T>& a, const Tensor<T>& b) { return div(a, b); }
template <typename T> Tensor<T> operator-(const Tensor<T>& t) { return neg(t); }
template <typename T> Tensor<T> operator*(T c, const Tensor<T>& t) { return scale(t, c); }

}  // namespace layergen
