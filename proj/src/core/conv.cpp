#include <cstdint>
#include <vector>

#include "layergen/core/ops.hpp"
#include "layergen/kernels/kernels.hpp"

// Spatial convolutions lowered to GEMM over im2col patches; both ops and
// both gradients reduce to the same two primitives, which keeps the
// adjoint identity <conv(x,k), y> == <x, tconv(y,k)> exact by construction.
namespace layergen {

namespace {

using std::int64_t;
using std::size_t;

struct ConvDims {
    int c, h, w;        // input
    int k, kh, kw;      // kernel
    int stride, pad;
    int oh, ow;         // output
};

ConvDims conv_dims(const char* op, const Shape& x, const Shape& ker, int stride, int padding) {
    if (x.size() != 3 || ker.size() != 4)
        throw_shape_mismatch(op, x, ker);
    ConvDims d{};
    d.c = x[0];
    d.h = x[1];
    d.w = x[2];
    d.k = ker[0];
    d.kh = ker[2];
    d.kw = ker[3];
    d.stride = stride;
    d.pad = padding;
    if (stride < 1) throw ShapeError(std::string(op) + ": stride must be >= 1");
    if (padding < 0) throw ShapeError(std::string(op) + ": padding must be >= 0");
    return d;
}

// col[(c*kh + u)*kw + v][i*ow + j] = x_pad[c][i*stride + u][j*stride + v]
template <typename T>
std::vector<T> im2col(const T* x, const ConvDims& d) {
    const int64_t rows = static_cast<int64_t>(d.c) * d.kh * d.kw;
    const int64_t cols = static_cast<int64_t>(d.oh) * d.ow;
    std::vector<T> col(rows * cols, T(0));
    for (int c = 0; c < d.c; ++c) {
        for (int u = 0; u < d.kh; ++u) {
            for (int v = 0; v < d.kw; ++v) {
                T* dst = col.data() + ((static_cast<int64_t>(c) * d.kh + u) * d.kw + v) * cols;
                for (int i = 0; i < d.oh; ++i) {
                    const int r = i * d.stride + u - d.pad;
                    if (r < 0 || r >= d.h) continue;
                    const T* src = x + (static_cast<int64_t>(c) * d.h + r) * d.w;
                    for (int j = 0; j < d.ow; ++j) {
                        const int s = j * d.stride + v - d.pad;
                        if (s >= 0 && s < d.w) dst[i * d.ow + j] = src[s];
                    }
                }
            }
        }
    }
    return col;
}

template <typename T>
void col2im(const T* col, const ConvDims& d, T* x /* accumulated into */) {
    const int64_t cols = static_cast<int64_t>(d.oh) * d.ow;
    for (int c = 0; c < d.c; ++c) {
        for (int u = 0; u < d.kh; ++u) {
            for (int v = 0; v < d.kw; ++v) {
                const T* src = col + ((static_cast<int64_t>(c) * d.kh + u) * d.kw + v) * cols;
                for (int i = 0; i < d.oh; ++i) {
                    const int r = i * d.stride + u - d.pad;
                    if (r < 0 || r >= d.h) continue;
                    T* dst = x + (static_cast<int64_t>(c) * d.h + r) * d.w;
                    for (int j = 0; j < d.ow; ++j) {
                        const int s = j * d.stride + v - d.pad;
                        if (s >= 0 && s < d.w) dst[s] += src[i * d.ow + j];
                    }
                }
            }
        }
    }
}

template <typename T>
std::vector<T> transpose2d(const T* src, size_t rows, size_t cols) {
    std::vector<T> out(rows * cols);
    for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j) out[j * rows + i] = src[i * cols + j];
    return out;
}

}  // namespace

template <typename T>
Tensor<T> conv2d(const Tensor<T>& image, const Tensor<T>& kernel, int stride, int padding) {
    ConvDims d = conv_dims("conv2d", image.shape(), kernel.shape(), stride, padding);
    if (kernel.shape()[1] != d.c)
        throw_shape_mismatch("conv2d", image.shape(), kernel.shape());
    if (d.kh > d.h + 2 * d.pad || d.kw > d.w + 2 * d.pad)
        throw ShapeError("conv2d: kernel " + shape_str(kernel.shape()) + " larger than padded image " +
                         shape_str(image.shape()) + " with padding " + std::to_string(padding));
    d.oh = (d.h + 2 * d.pad - d.kh) / d.stride + 1;
    d.ow = (d.w + 2 * d.pad - d.kw) / d.stride + 1;

    const int64_t patch = static_cast<int64_t>(d.c) * d.kh * d.kw;
    const int64_t cols = static_cast<int64_t>(d.oh) * d.ow;
    auto col = std::make_shared<std::vector<T>>(im2col(image.data(), d));
    std::vector<T> out(static_cast<size_t>(d.k) * cols, T(0));
    kernels::active<T>().gemm(d.k, cols, patch, kernel.data(), col->data(), out.data());

    auto xn = image.node_ptr();
    auto kn = kernel.node_ptr();
    return Tensor<T>::make(
        {d.k, d.oh, d.ow}, std::move(out), {image, kernel}, [xn, kn, d, col, patch, cols](TensorNode<T>& o) {
            const T* g = o.grad.data();
            if (kn->requires_grad) {
                auto colT = transpose2d(col->data(), static_cast<size_t>(patch), static_cast<size_t>(cols));
                kernels::active<T>().gemm(d.k, patch, cols, g, colT.data(), kn->ensure_grad().data());
            }
            if (xn->requires_grad) {
                auto wT = transpose2d(kn->value.data(), static_cast<size_t>(d.k), static_cast<size_t>(patch));
                std::vector<T> gcol(static_cast<size_t>(patch) * cols, T(0));
                kernels::active<T>().gemm(patch, cols, d.k, wT.data(), g, gcol.data());
                col2im(gcol.data(), d, xn->ensure_grad().data());
            }
        });
}

template <typename T>
Tensor<T> transpose_conv2d(const Tensor<T>& input, const Tensor<T>& kernel, int stride, int padding) {
    // input plays the role of conv2d's output: [K,H,W] -> [C,Ho,Wo]
    if (input.shape().size() != 3 || kernel.shape().size() != 4 || kernel.shape()[0] != input.shape()[0])
        throw_shape_mismatch("transpose_conv2d", input.shape(), kernel.shape());
    ConvDims d{};
    d.k = input.shape()[0];
    d.c = kernel.shape()[1];
    d.kh = kernel.shape()[2];
    d.kw = kernel.shape()[3];
    d.stride = stride;
    d.pad = padding;
    if (stride < 1 || padding < 0)
        throw ShapeError("transpose_conv2d: invalid stride/padding combination");
    d.oh = input.shape()[1];
    d.ow = input.shape()[2];
    d.h = (d.oh - 1) * stride + d.kh - 2 * padding;  // produced extent
    d.w = (d.ow - 1) * stride + d.kw - 2 * padding;
    if (d.h < 1 || d.w < 1)
        throw ShapeError("transpose_conv2d: invalid stride/padding combination for input " +
                         shape_str(input.shape()) + " and kernel " + shape_str(kernel.shape()));

    const int64_t patch = static_cast<int64_t>(d.c) * d.kh * d.kw;
    const int64_t cols = static_cast<int64_t>(d.oh) * d.ow;

    auto wT = transpose2d(kernel.data(), static_cast<size_t>(d.k), static_cast<size_t>(patch));
    std::vector<T> gcol(static_cast<size_t>(patch) * cols, T(0));
    kernels::active<T>().gemm(patch, cols, d.k, wT.data(), input.data(), gcol.data());
    std::vector<T> out(static_cast<size_t>(d.c) * d.h * d.w, T(0));
    col2im(gcol.data(), d, out.data());

    auto xn = input.node_ptr();
    auto kn = kernel.node_ptr();
    return Tensor<T>::make(
        {d.c, d.h, d.w}, std::move(out), {input, kernel}, [xn, kn, d, patch, cols](TensorNode<T>& o) {
            const T* g = o.grad.data();
            auto gcol = im2col(g, d);  // [patch, cols]
            if (xn->requires_grad) {
                kernels::active<T>().gemm(d.k, cols, patch, kn->value.data(), gcol.data(),
                                          xn->ensure_grad().data());
            }
            if (kn->requires_grad) {
                auto gcolT = transpose2d(gcol.data(), static_cast<size_t>(patch), static_cast<size_t>(cols));
                kernels::active<T>().gemm(d.k, patch, cols, xn->value.data(), gcolT.data(),
                                          kn->ensure_grad().data());
            }
        });
}

template Tensor<float> conv2d<float>(const Tensor<float>&, const Tensor<float>&, int, int);
template Tensor<double> conv2d<double>(const Tensor<double>&, const Tensor<double>&, int, int);
template Tensor<float> transpose_conv2d<float>(const Tensor<float>&, const Tensor<float>&, int, int);
template Tensor<double> transpose_conv2d<double>(const Tensor<double>&, const Tensor<double>&, int, int);

}  // namespace layergen
