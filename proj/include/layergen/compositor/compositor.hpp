#pragma once

#include <vector>

#include "layergen/core/tensor.hpp"

// Placement of decoded canvases into the image by linear convolution with a
// position weight map, depth-ordered alpha blending (hard and softened
// differentiable forms), and the adjoint attention crop. Placement and crop
// are evaluated in Fourier space and are exact adjoints of each other.
namespace layergen::compositor {

template <typename T>
struct ObjectCanvas {
    Tensor<T> pixels;  // [3, M, M], values in (0, 1)
    Tensor<T> alpha;   // [M, M], values in [0, 1]
};

template <typename T>
struct PlacedObject {
    Tensor<T> pixels;  // [C, N, N]
    Tensor<T> alpha;   // [N, N]
    Tensor<T> depth;   // scalar in (0, 1); smaller = nearer
};

template <typename T>
struct SceneAssembly {
    Tensor<T> background;  // [C, N, N]
    std::vector<PlacedObject<T>> objects;
};

// canvas [C,M,M] convolved with a normalized [N,N] weight map -> [C,N,N].
// Under a one-hot weight at (r, c), canvas cell (a, b) lands at image pixel
// (r + a - floor(M/2), c + b - floor(M/2)); off-image mass is discarded.
// Linear in both arguments.
template <typename T>
Tensor<T> place(const Tensor<T>& canvas, const Tensor<T>& weights);

// Weighted average of all center-aligned M x M crops of image [C,N,N],
// weights from the position map; the exact adjoint of place. Out-of-bounds
// crop regions contribute zeros.
template <typename T>
Tensor<T> attention_crop(const Tensor<T>& image, const Tensor<T>& weights, int m);

// Back-to-front over-blending, farthest (largest depth) first; depth ties
// broken by ascending object index (lower index blends first). Returns a
// plain tensor with no gradient history.
template <typename T>
Tensor<T> composite_hard(const SceneAssembly<T>& assembly);

// Softened ordering: per pixel, w_j = alpha_j * exp((1 - d_j)/tau) and
// w_bg = exp((1 - d_bg)/tau) with d_bg pinned at 1; the output is the
// weight-normalized convex combination. Differentiable in pixels, alphas,
// and depths; reproduces composite_hard as tau -> 0 for binary alphas.
template <typename T>
Tensor<T> composite_soft(const SceneAssembly<T>& assembly, T tau_depth);

}  // namespace layergen::compositor
