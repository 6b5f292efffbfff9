#include "layergen/compositor/compositor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "layergen/core/fft.hpp"
#include "layergen/kernels/kernels.hpp"

namespace layergen::compositor {

namespace {

using std::int64_t;
using std::size_t;

template <typename T>
void check_normalized(const char* op, const Tensor<T>& weights) {
    double s = 0;
    for (T v : weights.value()) s += static_cast<double>(v);
    if (std::abs(s - 1.0) > 1e-3)
        throw ValueError(std::string(op) + ": position weights sum to " + std::to_string(s) +
                         ", expected 1");
}

// padded spectral grid helpers (interleaved complex of size p x p)
template <typename T>
std::vector<T> fft_pad(const T* src, int h, int w, int p) {
    std::vector<T> buf(static_cast<size_t>(p) * 2 * p, T(0));
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) buf[(static_cast<int64_t>(r) * p + c) * 2] = src[r * w + c];
    fft::fft2d(buf.data(), p, p, false);
    return buf;
}

// read the real part of an inverse transform at ((r0 + dr) mod p, ...)
template <typename T>
void read_shifted(const std::vector<T>& buf, int p, int h, int w, int dr, int dc, T* out, bool accumulate) {
    for (int r = 0; r < h; ++r) {
        const int rr = ((r + dr) % p + p) % p;
        for (int c = 0; c < w; ++c) {
            const int cc = ((c + dc) % p + p) % p;
            const T v = buf[(static_cast<int64_t>(rr) * p + cc) * 2];
            if (accumulate)
                out[r * w + c] += v;
            else
                out[r * w + c] = v;
        }
    }
}

}  // namespace

template <typename T>
Tensor<T> place(const Tensor<T>& canvas, const Tensor<T>& weights) {
    if (canvas.shape().size() != 3 || weights.shape().size() != 2 ||
        weights.shape()[0] != weights.shape()[1] || canvas.shape()[1] != canvas.shape()[2])
        throw_shape_mismatch("place", canvas.shape(), weights.shape());
    const int ch = canvas.shape()[0];
    const int m = canvas.shape()[1];
    const int n = weights.shape()[0];
    if (m > n)
        throw ShapeError("place: canvas side " + std::to_string(m) + " exceeds image side " +
                         std::to_string(n));
    check_normalized("place", weights);

    const int p = fft::next_pow2(n + m - 1);
    const int m2 = m / 2;
    const auto& K = kernels::active<T>();
    const size_t pcplx = static_cast<size_t>(p) * p;

    auto fw = fft_pad(weights.data(), n, n, p);
    std::vector<T> out(static_cast<size_t>(ch) * n * n);
    std::vector<T> prod(2 * pcplx);
    for (int c = 0; c < ch; ++c) {
        auto fc = fft_pad(canvas.data() + static_cast<int64_t>(c) * m * m, m, m, p);
        K.cmul(fc.data(), fw.data(), prod.data(), pcplx);
        fft::fft2d(prod.data(), p, p, true);
        read_shifted(prod, p, n, n, m2, m2, out.data() + static_cast<int64_t>(c) * n * n, false);
    }

    auto cn = canvas.node_ptr();
    auto wn = weights.node_ptr();
    return Tensor<T>::make(
        {ch, n, n}, std::move(out), {canvas, weights}, [cn, wn, ch, m, n, p, m2](TensorNode<T>& o) {
            const auto& K = kernels::active<T>();
            const size_t pcplx = static_cast<size_t>(p) * p;
            std::vector<T> fw;
            if (cn->requires_grad) fw = fft_pad(wn->value.data(), n, n, p);
            std::vector<T> wacc(2 * pcplx, T(0));
            std::vector<T> prod(2 * pcplx);
            for (int c = 0; c < ch; ++c) {
                auto fg = fft_pad(o.grad.data() + static_cast<int64_t>(c) * n * n, n, n, p);
                if (cn->requires_grad) {
                    K.cmul_conj(fg.data(), fw.data(), prod.data(), pcplx);
                    fft::fft2d(prod.data(), p, p, true);
                    read_shifted(prod, p, m, m, -m2, -m2,
                                 cn->ensure_grad().data() + static_cast<int64_t>(c) * m * m, true);
                }
                if (wn->requires_grad) {
                    auto fc = fft_pad(cn->value.data() + static_cast<int64_t>(c) * m * m, m, m, p);
                    K.cmul_conj(fg.data(), fc.data(), prod.data(), pcplx);
                    K.add(wacc.data(), prod.data(), wacc.data(), 2 * pcplx);
                }
            }
            if (wn->requires_grad) {
                fft::fft2d(wacc.data(), p, p, true);
                read_shifted(wacc, p, n, n, -m2, -m2, wn->ensure_grad().data(), true);
            }
        });
}

template <typename T>
Tensor<T> attention_crop(const Tensor<T>& image, const Tensor<T>& weights, int m) {
    if (image.shape().size() != 3 || weights.shape().size() != 2 ||
        weights.shape()[0] != weights.shape()[1] || image.shape()[1] != image.shape()[2] ||
        image.shape()[1] != weights.shape()[0])
        throw_shape_mismatch("attention_crop", image.shape(), weights.shape());
    const int ch = image.shape()[0];
    const int n = image.shape()[1];
    if (m > n)
        throw ShapeError("attention_crop: crop side " + std::to_string(m) + " exceeds image side " +
                         std::to_string(n));
    if (m < 1) throw ShapeError("attention_crop: crop side must be positive");
    check_normalized("attention_crop", weights);

    const int p = fft::next_pow2(n + m - 1);
    const int m2 = m / 2;
    const auto& K = kernels::active<T>();
    const size_t pcplx = static_cast<size_t>(p) * p;

    auto fw = fft_pad(weights.data(), n, n, p);
    std::vector<T> out(static_cast<size_t>(ch) * m * m);
    std::vector<T> prod(2 * pcplx);
    for (int c = 0; c < ch; ++c) {
        auto fi = fft_pad(image.data() + static_cast<int64_t>(c) * n * n, n, n, p);
        K.cmul_conj(fi.data(), fw.data(), prod.data(), pcplx);
        fft::fft2d(prod.data(), p, p, true);
        read_shifted(prod, p, m, m, -m2, -m2, out.data() + static_cast<int64_t>(c) * m * m, false);
    }

    auto in = image.node_ptr();
    auto wn = weights.node_ptr();
    return Tensor<T>::make(
        {ch, m, m}, std::move(out), {image, weights}, [in, wn, ch, m, n, p, m2](TensorNode<T>& o) {
            const auto& K = kernels::active<T>();
            const size_t pcplx = static_cast<size_t>(p) * p;
            std::vector<T> fw;
            if (in->requires_grad) fw = fft_pad(wn->value.data(), n, n, p);
            std::vector<T> wacc(2 * pcplx, T(0));
            std::vector<T> prod(2 * pcplx);
            for (int c = 0; c < ch; ++c) {
                auto fg = fft_pad(o.grad.data() + static_cast<int64_t>(c) * m * m, m, m, p);
                if (in->requires_grad) {
                    K.cmul(fg.data(), fw.data(), prod.data(), pcplx);
                    fft::fft2d(prod.data(), p, p, true);
                    read_shifted(prod, p, n, n, m2, m2,
                                 in->ensure_grad().data() + static_cast<int64_t>(c) * n * n, true);
                }
                if (wn->requires_grad) {
                    auto fi = fft_pad(in->value.data() + static_cast<int64_t>(c) * n * n, n, n, p);
                    K.cmul_conj(fi.data(), fg.data(), prod.data(), pcplx);
                    K.add(wacc.data(), prod.data(), wacc.data(), 2 * pcplx);
                }
            }
            if (wn->requires_grad) {
                fft::fft2d(wacc.data(), p, p, true);
                read_shifted(wacc, p, n, n, -m2, -m2, wn->ensure_grad().data(), true);
            }
        });
}

template <typename T>
Tensor<T> composite_hard(const SceneAssembly<T>& assembly) {
    const Shape& bg_shape = assembly.background.shape();
    if (bg_shape.size() != 3) throw ShapeError("composite_hard: background must be [C,N,N]");
    const size_t chw = static_cast<size_t>(shape_numel(bg_shape));
    const size_t hw = static_cast<size_t>(bg_shape[1]) * bg_shape[2];
    const int ch = bg_shape[0];

    std::vector<size_t> order(assembly.objects.size());
    std::iota(order.begin(), order.end(), size_t(0));
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return assembly.objects[a].depth.item() > assembly.objects[b].depth.item();
    });

    std::vector<T> out = assembly.background.value();
    for (size_t oi : order) {
        const auto& obj = assembly.objects[oi];
        if (obj.pixels.shape() != bg_shape)
            throw_shape_mismatch("composite_hard", bg_shape, obj.pixels.shape());
        const T* a = obj.alpha.data();
        const T* x = obj.pixels.data();
        for (int c = 0; c < ch; ++c)
            for (size_t i = 0; i < hw; ++i) {
                T& px = out[c * hw + i];
                px = (T(1) - a[i]) * px + a[i] * x[c * hw + i];
            }
    }
    return Tensor<T>::from(bg_shape, std::move(out));
}

template <typename T>
Tensor<T> composite_soft(const SceneAssembly<T>& assembly, T tau_depth) {
    if (!(tau_depth > T(0)))
        throw ValueError("composite_soft: tau_depth must be positive, got " + std::to_string(tau_depth));
    const Shape& bg_shape = assembly.background.shape();
    if (bg_shape.size() != 3) throw ShapeError("composite_soft: background must be [C,N,N]");
    const int ch = bg_shape[0];
    const size_t hw = static_cast<size_t>(bg_shape[1]) * bg_shape[2];
    const size_t j_count = assembly.objects.size();

    std::vector<double> expo(j_count);  // (1 - d_j) / tau
    for (size_t j = 0; j < j_count; ++j) {
        const auto& obj = assembly.objects[j];
        if (obj.pixels.shape() != bg_shape)
            throw_shape_mismatch("composite_soft", bg_shape, obj.pixels.shape());
        const double d = static_cast<double>(obj.depth.item());
        if (!(d > 0.0 && d < 1.0))
            throw ValueError("composite_soft: depth " + std::to_string(d) + " outside (0, 1)");
        expo[j] = (1.0 - d) / static_cast<double>(tau_depth);
    }

    // Per-pixel weights with a per-pixel shift over the supported layers;
    // the shift cancels between numerator and denominator, so values and
    // gradients are those of the unshifted formula without overflow.
    std::vector<T> out(static_cast<size_t>(ch) * hw);
    auto wnorm = std::make_shared<std::vector<T>>(static_cast<size_t>(j_count + 1) * hw);  // S_j, S_bg
    for (size_t i = 0; i < hw; ++i) {
        double k = 0.0;  // background exponent
        for (size_t j = 0; j < j_count; ++j)
            if (assembly.objects[j].alpha.value()[i] > T(0)) k = std::max(k, expo[j]);
        double den = std::exp(-k);
        for (size_t j = 0; j < j_count; ++j) {
            const double a = static_cast<double>(assembly.objects[j].alpha.value()[i]);
            const double w = a > 0.0 ? a * std::exp(expo[j] - k) : 0.0;
            (*wnorm)[j * hw + i] = static_cast<T>(w);
            den += w;
        }
        (*wnorm)[j_count * hw + i] = static_cast<T>(std::exp(-k));
        const double inv = 1.0 / den;
        for (size_t j = 0; j <= j_count; ++j)
            (*wnorm)[j * hw + i] = static_cast<T>(static_cast<double>((*wnorm)[j * hw + i]) * inv);
        for (int c = 0; c < ch; ++c) {
            double acc = static_cast<double>((*wnorm)[j_count * hw + i]) *
                         static_cast<double>(assembly.background.value()[c * hw + i]);
            for (size_t j = 0; j < j_count; ++j)
                acc += static_cast<double>((*wnorm)[j * hw + i]) *
                       static_cast<double>(assembly.objects[j].pixels.value()[c * hw + i]);
            out[c * hw + i] = static_cast<T>(acc);
        }
    }

    std::vector<Tensor<T>> parents = {assembly.background};
    for (const auto& obj : assembly.objects) {
        parents.push_back(obj.pixels);
        parents.push_back(obj.alpha);
        parents.push_back(obj.depth);
    }
    std::vector<std::shared_ptr<TensorNode<T>>> nodes;
    for (const auto& p : parents) nodes.push_back(p.node_ptr());

    return Tensor<T>::make(
        bg_shape, std::move(out), parents,
        [nodes, wnorm, expo, ch, hw, j_count, tau_depth](TensorNode<T>& o) {
            const T* g = o.grad.data();
            const T* y = o.value.data();
            auto* bg = nodes[0].get();
            for (size_t i = 0; i < hw; ++i) {
                // recover the per-pixel shift to evaluate exp(e_j - k) for alpha grads
                double k = 0.0;
                for (size_t j = 0; j < j_count; ++j)
                    if (nodes[1 + 3 * j + 1]->value[i] > T(0)) k = std::max(k, expo[j]);
                double den = std::exp(-k);
                for (size_t j = 0; j < j_count; ++j) {
                    const double a = static_cast<double>(nodes[1 + 3 * j + 1]->value[i]);
                    if (a > 0.0) den += a * std::exp(expo[j] - k);
                }
                for (size_t j = 0; j < j_count; ++j) {
                    auto* xn = nodes[1 + 3 * j].get();
                    auto* an = nodes[1 + 3 * j + 1].get();
                    auto* dn = nodes[1 + 3 * j + 2].get();
                    const T s = (*wnorm)[j * hw + i];
                    double depth_acc = 0.0, alpha_acc = 0.0;
                    for (int c = 0; c < ch; ++c) {
                        const double gc = static_cast<double>(g[c * hw + i]);
                        const double diff =
                            static_cast<double>(xn->value[c * hw + i]) - static_cast<double>(y[c * hw + i]);
                        if (xn->requires_grad) xn->ensure_grad()[c * hw + i] += g[c * hw + i] * s;
                        alpha_acc += gc * diff;
                        depth_acc += gc * diff;
                    }
                    if (an->requires_grad) {
                        // d out / d alpha = exp(e_j - k) * (x_j - out) / den;
                        // at alpha == 0 with e_j > k the factor is clamped to
                        // keep the subgradient finite.
                        const double e = expo[j] - k;
                        const double factor = e <= 0.0 ? std::exp(e) / den : 0.0;
                        an->ensure_grad()[i] += static_cast<T>(alpha_acc * factor);
                    }
                    if (dn->requires_grad)
                        dn->ensure_grad()[0] += static_cast<T>(
                            -depth_acc * static_cast<double>(s) / static_cast<double>(tau_depth));
                }
                if (bg->requires_grad) {
                    const T sbg = (*wnorm)[j_count * hw + i];
                    for (int c = 0; c < ch; ++c) bg->ensure_grad()[c * hw + i] += g[c * hw + i] * sbg;
                }
            }
        });
}

#define LAYERGEN_INSTANTIATE(T)                                                        \
    template Tensor<T> place<T>(const Tensor<T>&, const Tensor<T>&);                   \
    template Tensor<T> attention_crop<T>(const Tensor<T>&, const Tensor<T>&, int);     \
    template Tensor<T> composite_hard<T>(const SceneAssembly<T>&);                     \
    template Tensor<T> composite_soft<T>(const SceneAssembly<T>&, T);

LAYERGEN_INSTANTIATE(float)
LAYERGEN_INSTANTIATE(double)

#undef LAYERGEN_INSTANTIATE

}  // namespace layergen::compositor
