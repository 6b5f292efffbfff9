#include <vector>

#include "layergen/core/fft.hpp"
#include "layergen/core/ops.hpp"

namespace layergen {

namespace {

// Embed a cropped gradient back into full-convolution coordinates.
template <typename T>
std::vector<T> embed_full(const T* g, int h, int w, int fh, int fw, int ro, int co) {
    std::vector<T> out(static_cast<std::size_t>(fh) * fw, T(0));
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) out[(r + ro) * fw + (c + co)] = g[r * w + c];
    return out;
}

}  // namespace

template <typename T>
Tensor<T> conv2d_fft(const Tensor<T>& image, const Tensor<T>& kernel, FftConvMode mode) {
    if (image.shape().size() != 2 || kernel.shape().size() != 2)
        throw_shape_mismatch("conv2d_fft", image.shape(), kernel.shape());
    const int h = image.shape()[0], w = image.shape()[1];
    const int kh = kernel.shape()[0], kw = kernel.shape()[1];
    const int fh = h + kh - 1, fw = w + kw - 1;

    std::vector<T> full = fft::conv_full(image.data(), h, w, kernel.data(), kh, kw);
    Shape out_shape;
    std::vector<T> out;
    if (mode == FftConvMode::kFull) {
        out_shape = {fh, fw};
        out = std::move(full);
    } else {
        // crop so a one-hot kernel at (kh/2, kw/2) reproduces the image
        out_shape = {h, w};
        out.resize(static_cast<std::size_t>(h) * w);
        const int ro = kh / 2, co = kw / 2;
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) out[r * w + c] = full[(r + ro) * fw + (c + co)];
    }

    auto in = image.node_ptr();
    auto kn = kernel.node_ptr();
    return Tensor<T>::make(
        std::move(out_shape), std::move(out), {image, kernel},
        [in, kn, mode, h, w, kh, kw, fh, fw](TensorNode<T>& o) {
            std::vector<T> gfull;
            if (mode == FftConvMode::kFull)
                gfull = o.grad;
            else
                gfull = embed_full(o.grad.data(), h, w, fh, fw, kh / 2, kw / 2);
            if (in->requires_grad) {
                auto c = fft::corr_full(gfull.data(), fh, fw, kn->value.data(), kh, kw);
                const int cw = fw + kw - 1;
                T* gi = in->ensure_grad().data();
                for (int r = 0; r < h; ++r)
                    for (int cc = 0; cc < w; ++cc) gi[r * w + cc] += c[(r + kh - 1) * cw + (cc + kw - 1)];
            }
            if (kn->requires_grad) {
                auto c = fft::corr_full(gfull.data(), fh, fw, in->value.data(), h, w);
                const int cw = fw + w - 1;
                T* gk = kn->ensure_grad().data();
                for (int r = 0; r < kh; ++r)
                    for (int cc = 0; cc < kw; ++cc) gk[r * kw + cc] += c[(r + h - 1) * cw + (cc + w - 1)];
            }
        });
}

template Tensor<float> conv2d_fft<float>(const Tensor<float>&, const Tensor<float>&, FftConvMode);
template Tensor<double> conv2d_fft<double>(const Tensor<double>&, const Tensor<double>&, FftConvMode);

}  // namespace layergen
