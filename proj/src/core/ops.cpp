#include "layergen/core/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "layergen/kernels/kernels.hpp"

namespace layergen {

namespace {

using std::int64_t;
using std::size_t;

// Broadcast classification for elementwise binaries: equal shapes, one
// size-1 scalar operand, or a rank-1 vector matching the other side's
// last axis.
enum class Bc { kEq, kScalarL, kScalarR, kVecL, kVecR };

Bc classify(const char* op, const Shape& a, const Shape& b) {
    if (a == b) return Bc::kEq;
    if (shape_numel(b) == 1) return Bc::kScalarR;
    if (shape_numel(a) == 1) return Bc::kScalarL;
    if (b.size() == 1 && !a.empty() && a.back() == b[0]) return Bc::kVecR;
    if (a.size() == 1 && !b.empty() && b.back() == a[0]) return Bc::kVecL;
    throw_shape_mismatch(op, a, b);
}

template <typename T, typename F>
Tensor<T> binary_op(const char* name, const Tensor<T>& a, const Tensor<T>& b, F f,
                    void (*fast)(const T*, const T*, T*, size_t),
                    // d(out)/da and d(out)/db as functions of (av, bv)
                    T (*da)(T, T), T (*db)(T, T)) {
    const Bc bc = classify(name, a.shape(), b.shape());
    const Shape& out_shape = (bc == Bc::kScalarL || bc == Bc::kVecL) ? b.shape() : a.shape();
    const size_t n = static_cast<size_t>(shape_numel(out_shape));
    const size_t ka = (bc == Bc::kVecL) ? static_cast<size_t>(a.numel()) : 0;
    const size_t kb = (bc == Bc::kVecR) ? static_cast<size_t>(b.numel()) : 0;

    const T* av = a.data();
    const T* bv = b.data();
    std::vector<T> out(n);
    switch (bc) {
        case Bc::kEq:
            if (fast != nullptr) {
                fast(av, bv, out.data(), n);
            } else {
                for (size_t i = 0; i < n; ++i) out[i] = f(av[i], bv[i]);
            }
            break;
        case Bc::kScalarR:
            for (size_t i = 0; i < n; ++i) out[i] = f(av[i], bv[0]);
            break;
        case Bc::kScalarL:
            for (size_t i = 0; i < n; ++i) out[i] = f(av[0], bv[i]);
            break;
        case Bc::kVecR:
            for (size_t i = 0; i < n; ++i) out[i] = f(av[i], bv[i % kb]);
            break;
        case Bc::kVecL:
            for (size_t i = 0; i < n; ++i) out[i] = f(av[i % ka], bv[i]);
            break;
    }

    auto an = a.node_ptr();
    auto bn = b.node_ptr();
    return Tensor<T>::make(
        out_shape, std::move(out), {a, b}, [an, bn, bc, n, ka, kb, da, db](TensorNode<T>& o) {
            const T* g = o.grad.data();
            const T* av = an->value.data();
            const T* bv = bn->value.data();
            auto idx_a = [&](size_t i) { return bc == Bc::kScalarL ? size_t(0) : (bc == Bc::kVecL ? i % ka : i); };
            auto idx_b = [&](size_t i) { return bc == Bc::kScalarR ? size_t(0) : (bc == Bc::kVecR ? i % kb : i); };
            if (an->requires_grad) {
                T* ga = an->ensure_grad().data();
                for (size_t i = 0; i < n; ++i) ga[idx_a(i)] += g[i] * da(av[idx_a(i)], bv[idx_b(i)]);
            }
            if (bn->requires_grad) {
                T* gb = bn->ensure_grad().data();
                for (size_t i = 0; i < n; ++i) gb[idx_b(i)] += g[i] * db(av[idx_a(i)], bv[idx_b(i)]);
            }
        });
}

template <typename T, typename F, typename DF>
Tensor<T> unary_op(const Tensor<T>& t, F f, DF df) {
    const size_t n = static_cast<size_t>(t.numel());
    const T* x = t.data();
    std::vector<T> out(n);
    for (size_t i = 0; i < n; ++i) out[i] = f(x[i]);
    auto tn = t.node_ptr();
    return Tensor<T>::make(t.shape(), std::move(out), {t}, [tn, n, df](TensorNode<T>& o) {
        if (!tn->requires_grad) return;
        T* gt = tn->ensure_grad().data();
        const T* g = o.grad.data();
        const T* x = tn->value.data();
        const T* y = o.value.data();
        for (size_t i = 0; i < n; ++i) gt[i] += g[i] * df(x[i], y[i]);
    });
}

template <typename T>
std::vector<T> transpose2d(const T* src, size_t rows, size_t cols) {
    std::vector<T> out(rows * cols);
    for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j) out[j * rows + i] = src[i * cols + j];
    return out;
}

// axis bookkeeping for reductions: split the shape into kept/reduced parts
struct ReducePlan {
    Shape out_shape;
    std::vector<int64_t> in_strides;
    std::vector<int64_t> out_stride_for_axis;  // 0 for reduced axes
    int64_t n_in = 0;
    int64_t n_out = 0;
};

ReducePlan plan_reduce(const Shape& shape, std::vector<int> axes, const char* op) {
    const int rank = static_cast<int>(shape.size());
    std::vector<bool> reduced(rank, false);
    if (axes.empty()) {
        reduced.assign(rank, true);
    } else {
        for (int a : axes) {
            if (a < 0 || a >= rank)
                throw ShapeError(std::string(op) + ": axis " + std::to_string(a) + " out of range for shape " +
                                 shape_str(shape));
            reduced[a] = true;
        }
    }
    ReducePlan p;
    for (int i = 0; i < rank; ++i)
        if (!reduced[i]) p.out_shape.push_back(shape[i]);
    p.n_in = shape_numel(shape);
    p.n_out = shape_numel(p.out_shape);
    p.in_strides.assign(rank, 1);
    for (int i = rank - 2; i >= 0; --i) p.in_strides[i] = p.in_strides[i + 1] * shape[i + 1];
    std::vector<int64_t> out_strides(p.out_shape.size(), 1);
    for (int i = static_cast<int>(p.out_shape.size()) - 2; i >= 0; --i)
        out_strides[i] = out_strides[i + 1] * p.out_shape[i + 1];
    p.out_stride_for_axis.assign(rank, 0);
    int o = 0;
    for (int i = 0; i < rank; ++i)
        if (!reduced[i]) p.out_stride_for_axis[i] = out_strides[o++];
    return p;
}

int64_t out_index(const ReducePlan& p, const Shape& shape, int64_t lin) {
    int64_t out = 0;
    for (size_t i = 0; i < shape.size(); ++i) {
        const int64_t coord = (lin / p.in_strides[i]) % shape[i];
        out += coord * p.out_stride_for_axis[i];
    }
    return out;
}

// split shape around an axis: outer x k x inner, row-major
void axis_split(const Shape& shape, int axis, const char* op, int64_t& outer, int64_t& k, int64_t& inner) {
    if (axis < 0 || axis >= static_cast<int>(shape.size()))
        throw ShapeError(std::string(op) + ": axis " + std::to_string(axis) + " out of range for shape " +
                         shape_str(shape));
    outer = 1;
    inner = 1;
    for (int i = 0; i < axis; ++i) outer *= shape[i];
    k = shape[axis];
    for (size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
}

}  // namespace

// ------------------------------------------------------------ binaries ---

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
    return binary_op<T>(
        "add", a, b, [](T x, T y) { return x + y; }, kernels::active<T>().add,
        [](T, T) { return T(1); }, [](T, T) { return T(1); });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
    return binary_op<T>(
        "sub", a, b, [](T x, T y) { return x - y; }, kernels::active<T>().sub,
        [](T, T) { return T(1); }, [](T, T) { return T(-1); });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
    return binary_op<T>(
        "mul", a, b, [](T x, T y) { return x * y; }, kernels::active<T>().mul,
        [](T, T y) { return y; }, [](T x, T) { return x; });
}

template <typename T>
Tensor<T> div(const Tensor<T>& a, const Tensor<T>& b) {
    for (T y : b.value())
        if (y == T(0)) throw ValueError("div: zero denominator");
    return binary_op<T>(
        "div", a, b, [](T x, T y) { return x / y; }, kernels::active<T>().div,
        [](T, T y) { return T(1) / y; }, [](T x, T y) { return -x / (y * y); });
}

// -------------------------------------------------------------- unaries ---

template <typename T>
Tensor<T> neg(const Tensor<T>& t) {
    return scale(t, T(-1));
}

template <typename T>
Tensor<T> exp(const Tensor<T>& t) {
    return unary_op(t, [](T x) { return std::exp(x); }, [](T, T y) { return y; });
}

template <typename T>
Tensor<T> log(const Tensor<T>& t) {
    for (T x : t.value())
        if (x <= T(0)) throw ValueError("log: non-positive input " + std::to_string(x));
    return unary_op(t, [](T x) { return std::log(x); }, [](T x, T) { return T(1) / x; });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& t) {
    return unary_op(
        t,
        [](T x) {
            if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
            const T e = std::exp(x);
            return e / (T(1) + e);
        },
        [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& t) {
    return unary_op(t, [](T x) { return x > T(0) ? x : T(0); },
                    [](T x, T) { return x > T(0) ? T(1) : T(0); });
}

template <typename T>
Tensor<T> elu(const Tensor<T>& t) {
    return unary_op(t, [](T x) { return x > T(0) ? x : std::expm1(x); },
                    [](T x, T y) { return x > T(0) ? T(1) : y + T(1); });
}

template <typename T>
Tensor<T> tanh(const Tensor<T>& t) {
    return unary_op(t, [](T x) { return std::tanh(x); }, [](T, T y) { return T(1) - y * y; });
}

template <typename T>
Tensor<T> abs(const Tensor<T>& t) {
    return unary_op(t, [](T x) { return std::abs(x); },
                    [](T x, T) { return x > T(0) ? T(1) : (x < T(0) ? T(-1) : T(0)); });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& t, T c) {
    const size_t n = static_cast<size_t>(t.numel());
    std::vector<T> out(n);
    kernels::active<T>().scale(t.data(), c, out.data(), n);
    auto tn = t.node_ptr();
    return Tensor<T>::make(t.shape(), std::move(out), {t}, [tn, c, n](TensorNode<T>& o) {
        if (!tn->requires_grad) return;
        kernels::active<T>().axpy(c, o.grad.data(), tn->ensure_grad().data(), n);
    });
}

template <typename T>
Tensor<T> add_const(const Tensor<T>& t, T c) {
    return unary_op(t, [c](T x) { return x + c; }, [](T, T) { return T(1); });
}

template <typename T>
Tensor<T> xlogx(const Tensor<T>& t) {
    for (T x : t.value())
        if (x < T(0)) throw ValueError("xlogx: negative input " + std::to_string(x));
    return unary_op(t, [](T x) { return x > T(0) ? x * std::log(x) : T(0); },
                    [](T x, T) { return x > T(0) ? std::log(x) + T(1) : T(0); });
}

// --------------------------------------------------------------- matmul ---

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.shape().size() != 2 || b.shape().size() != 2 || a.shape()[1] != b.shape()[0])
        throw_shape_mismatch("matmul", a.shape(), b.shape());
    const size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
    std::vector<T> out(m * n, T(0));
    kernels::active<T>().gemm(m, n, k, a.data(), b.data(), out.data());
    auto an = a.node_ptr();
    auto bn = b.node_ptr();
    return Tensor<T>::make(
        {static_cast<int>(m), static_cast<int>(n)}, std::move(out), {a, b},
        [an, bn, m, k, n](TensorNode<T>& o) {
            const T* g = o.grad.data();
            if (an->requires_grad) {
                // dA += dC * B^T
                auto bt = transpose2d(bn->value.data(), k, n);
                kernels::active<T>().gemm(m, k, n, g, bt.data(), an->ensure_grad().data());
            }
            if (bn->requires_grad) {
                // dB += A^T * dC
                auto at = transpose2d(an->value.data(), m, k);
                kernels::active<T>().gemm(k, n, m, at.data(), g, bn->ensure_grad().data());
            }
        });
}

// ----------------------------------------------------------- reductions ---

template <typename T>
Tensor<T> reduce_sum(const Tensor<T>& t, std::vector<int> axes) {
    const ReducePlan p = plan_reduce(t.shape(), axes, "reduce_sum");
    const Shape in_shape = t.shape();
    std::vector<T> out(static_cast<size_t>(p.n_out), T(0));
    if (p.n_out == 1) {
        out[0] = kernels::active<T>().sum(t.data(), static_cast<size_t>(p.n_in));
    } else {
        const T* x = t.data();
        for (int64_t i = 0; i < p.n_in; ++i) out[out_index(p, in_shape, i)] += x[i];
    }
    auto tn = t.node_ptr();
    return Tensor<T>::make(p.out_shape, std::move(out), {t}, [tn, p, in_shape](TensorNode<T>& o) {
        if (!tn->requires_grad) return;
        T* gt = tn->ensure_grad().data();
        const T* g = o.grad.data();
        for (int64_t i = 0; i < p.n_in; ++i) gt[i] += g[out_index(p, in_shape, i)];
    });
}

template <typename T>
Tensor<T> reduce_mean(const Tensor<T>& t, std::vector<int> axes) {
    const ReducePlan p = plan_reduce(t.shape(), axes, "reduce_mean");
    const T inv = static_cast<T>(static_cast<double>(p.n_out) / static_cast<double>(p.n_in));
    return scale(reduce_sum(t, std::move(axes)), inv);
}

template <typename T>
Tensor<T> reduce_max(const Tensor<T>& t, std::vector<int> axes) {
    const ReducePlan p = plan_reduce(t.shape(), axes, "reduce_max");
    const Shape in_shape = t.shape();
    const T* x = t.data();
    std::vector<T> out(static_cast<size_t>(p.n_out));
    auto argmax = std::make_shared<std::vector<int64_t>>(static_cast<size_t>(p.n_out), int64_t(-1));
    for (int64_t i = 0; i < p.n_in; ++i) {
        const int64_t o = out_index(p, in_shape, i);
        if ((*argmax)[o] < 0 || x[i] > out[o]) {
            out[o] = x[i];
            (*argmax)[o] = i;
        }
    }
    auto tn = t.node_ptr();
    return Tensor<T>::make(p.out_shape, std::move(out), {t}, [tn, p, argmax](TensorNode<T>& o) {
        if (!tn->requires_grad) return;
        T* gt = tn->ensure_grad().data();
        const T* g = o.grad.data();
        for (int64_t j = 0; j < p.n_out; ++j) gt[(*argmax)[j]] += g[j];
    });
}

template <typename T>
Tensor<T> sum_all(const Tensor<T>& t) {
    return reduce_sum(t, {});
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& t, int axis) {
    int64_t outer, k, inner;
    axis_split(t.shape(), axis, "softmax", outer, k, inner);
    const T* x = t.data();
    std::vector<T> out(static_cast<size_t>(t.numel()));
    for (int64_t o = 0; o < outer; ++o) {
        for (int64_t in = 0; in < inner; ++in) {
            const int64_t base = o * k * inner + in;
            T m = x[base];
            for (int64_t j = 1; j < k; ++j) m = std::max(m, x[base + j * inner]);
            T z = 0;
            for (int64_t j = 0; j < k; ++j) {
                const T e = std::exp(x[base + j * inner] - m);
                out[base + j * inner] = e;
                z += e;
            }
            const T invz = T(1) / z;
            for (int64_t j = 0; j < k; ++j) out[base + j * inner] *= invz;
        }
    }
    auto tn = t.node_ptr();
    return Tensor<T>::make(t.shape(), std::move(out), {t}, [tn, outer, k, inner](TensorNode<T>& o) {
        if (!tn->requires_grad) return;
        T* gt = tn->ensure_grad().data();
        const T* g = o.grad.data();
        const T* y = o.value.data();
        for (int64_t ou = 0; ou < outer; ++ou) {
            for (int64_t in = 0; in < inner; ++in) {
                const int64_t base = ou * k * inner + in;
                T s = 0;
                for (int64_t j = 0; j < k; ++j) s += g[base + j * inner] * y[base + j * inner];
                for (int64_t j = 0; j < k; ++j)
                    gt[base + j * inner] += (g[base + j * inner] - s) * y[base + j * inner];
            }
        }
    });
}

// ------------------------------------------------------------ shape ops ---

template <typename T>
Tensor<T> reshape(const Tensor<T>& t, Shape shape) {
    if (shape_numel(shape) != t.numel())
        throw_shape_mismatch("reshape", t.shape(), shape);
    auto tn = t.node_ptr();
    const size_t n = static_cast<size_t>(t.numel());
    return Tensor<T>::make(std::move(shape), t.value(), {t}, [tn, n](TensorNode<T>& o) {
        if (!tn->requires_grad) return;
        kernels::active<T>().axpy(T(1), o.grad.data(), tn->ensure_grad().data(), n);
    });
}

template <typename T>
Tensor<T> slice(const Tensor<T>& t, int axis, int start, int len) {
    int64_t outer, k, inner;
    axis_split(t.shape(), axis, "slice", outer, k, inner);
    if (start < 0 || len < 1 || start + len > k)
        throw ShapeError("slice: range [" + std::to_string(start) + ", " + std::to_string(start + len) +
                         ") out of bounds for axis " + std::to_string(axis) + " of shape " + shape_str(t.shape()));
    Shape out_shape = t.shape();
    out_shape[axis] = len;
    std::vector<T> out(static_cast<size_t>(outer * len * inner));
    const T* x = t.data();
    for (int64_t o = 0; o < outer; ++o)
        std::copy_n(x + (o * k + start) * inner, len * inner, out.data() + o * len * inner);
    auto tn = t.node_ptr();
    return Tensor<T>::make(std::move(out_shape), std::move(out), {t},
                           [tn, outer, k, inner, start, len](TensorNode<T>& o) {
                               if (!tn->requires_grad) return;
                               T* gt = tn->ensure_grad().data();
                               const T* g = o.grad.data();
                               for (int64_t ou = 0; ou < outer; ++ou) {
                                   T* dst = gt + (ou * k + start) * inner;
                                   const T* src = g + ou * len * inner;
                                   for (int64_t j = 0; j < len * inner; ++j) dst[j] += src[j];
                               }
                           });
}

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, int axis) {
    if (parts.empty()) throw ShapeError("concat: no inputs");
    int64_t outer, k0, inner;
    axis_split(parts[0].shape(), axis, "concat", outer, k0, inner);
    int64_t ktotal = 0;
    for (const auto& p : parts) {
        Shape s = p.shape();
        if (s.size() != parts[0].shape().size()) throw_shape_mismatch("concat", parts[0].shape(), s);
        for (size_t i = 0; i < s.size(); ++i)
            if (static_cast<int>(i) != axis && s[i] != parts[0].shape()[i])
                throw_shape_mismatch("concat", parts[0].shape(), s);
        ktotal += s[axis];
    }
    Shape out_shape = parts[0].shape();
    out_shape[axis] = static_cast<int>(ktotal);
    std::vector<T> out(static_cast<size_t>(outer * ktotal * inner));
    std::vector<int64_t> offsets;
    int64_t off = 0;
    for (const auto& p : parts) {
        offsets.push_back(off);
        const int64_t kp = p.shape()[axis];
        const T* x = p.data();
        for (int64_t o = 0; o < outer; ++o)
            std::copy_n(x + o * kp * inner, kp * inner, out.data() + (o * ktotal + off) * inner);
        off += kp;
    }
    std::vector<std::shared_ptr<TensorNode<T>>> nodes;
    for (const auto& p : parts) nodes.push_back(p.node_ptr());
    return Tensor<T>::make(std::move(out_shape), std::move(out), parts,
                           [nodes, offsets, outer, ktotal, inner](TensorNode<T>& o) {
                               const T* g = o.grad.data();
                               for (size_t pi = 0; pi < nodes.size(); ++pi) {
                                   if (!nodes[pi]->requires_grad) continue;
                                   const int64_t kp = shape_numel(nodes[pi]->shape) / std::max<int64_t>(outer * inner, 1);
                                   T* gt = nodes[pi]->ensure_grad().data();
                                   for (int64_t ou = 0; ou < outer; ++ou) {
                                       const T* src = g + (ou * ktotal + offsets[pi]) * inner;
                                       T* dst = gt + ou * kp * inner;
                                       for (int64_t j = 0; j < kp * inner; ++j) dst[j] += src[j];
                                   }
                               }
                           });
}

// ----------------------------------------------------------- CHW helpers ---

template <typename T>
Tensor<T> bias_chw(const Tensor<T>& x, const Tensor<T>& b) {
    if (x.shape().size() != 3 || b.shape().size() != 1 || b.shape()[0] != x.shape()[0])
        throw_shape_mismatch("bias_chw", x.shape(), b.shape());
    const int64_t c = x.shape()[0];
    const int64_t hw = static_cast<int64_t>(x.shape()[1]) * x.shape()[2];
    std::vector<T> out(static_cast<size_t>(c * hw));
    const T* xv = x.data();
    const T* bv = b.data();
    for (int64_t ch = 0; ch < c; ++ch)
        for (int64_t i = 0; i < hw; ++i) out[ch * hw + i] = xv[ch * hw + i] + bv[ch];
    auto xn = x.node_ptr();
    auto bn = b.node_ptr();
    return Tensor<T>::make(x.shape(), std::move(out), {x, b}, [xn, bn, c, hw](TensorNode<T>& o) {
        const T* g = o.grad.data();
        if (xn->requires_grad)
            kernels::active<T>().axpy(T(1), g, xn->ensure_grad().data(), static_cast<size_t>(c * hw));
        if (bn->requires_grad) {
            T* gb = bn->ensure_grad().data();
            for (int64_t ch = 0; ch < c; ++ch)
                gb[ch] += kernels::active<T>().sum(g + ch * hw, static_cast<size_t>(hw));
        }
    });
}

template <typename T>
Tensor<T> mul_map(const Tensor<T>& x, const Tensor<T>& m) {
    if (x.shape().size() != 3 || m.shape().size() != 2 || m.shape()[0] != x.shape()[1] ||
        m.shape()[1] != x.shape()[2])
        throw_shape_mismatch("mul_map", x.shape(), m.shape());
    const int64_t c = x.shape()[0];
    const size_t hw = static_cast<size_t>(x.shape()[1]) * x.shape()[2];
    std::vector<T> out(c * hw);
    for (int64_t ch = 0; ch < c; ++ch)
        kernels::active<T>().mul(x.data() + ch * hw, m.data(), out.data() + ch * hw, hw);
    auto xn = x.node_ptr();
    auto mn = m.node_ptr();
    return Tensor<T>::make(x.shape(), std::move(out), {x, m}, [xn, mn, c, hw](TensorNode<T>& o) {
        const T* g = o.grad.data();
        std::vector<T> tmp(hw);
        if (xn->requires_grad) {
            T* gx = xn->ensure_grad().data();
            for (int64_t ch = 0; ch < c; ++ch) {
                kernels::active<T>().mul(g + ch * hw, mn->value.data(), tmp.data(), hw);
                kernels::active<T>().add(gx + ch * hw, tmp.data(), gx + ch * hw, hw);
            }
        }
        if (mn->requires_grad) {
            T* gm = mn->ensure_grad().data();
            for (int64_t ch = 0; ch < c; ++ch) {
                kernels::active<T>().mul(g + ch * hw, xn->value.data() + ch * hw, tmp.data(), hw);
                kernels::active<T>().add(gm, tmp.data(), gm, hw);
            }
        }
    });
}

#define LAYERGEN_INSTANTIATE(T)                                                              \
    template Tensor<T> add<T>(const Tensor<T>&, const Tensor<T>&);                           \
    template Tensor<T> sub<T>(const Tensor<T>&, const Tensor<T>&);                           \
    template Tensor<T> mul<T>(const Tensor<T>&, const Tensor<T>&);                           \
    template Tensor<T> div<T>(const Tensor<T>&, const Tensor<T>&);                           \
    template Tensor<T> neg<T>(const Tensor<T>&);                                             \
    template Tensor<T> exp<T>(const Tensor<T>&);                                             \
    template Tensor<T> log<T>(const Tensor<T>&);                                             \
    template Tensor<T> sigmoid<T>(const Tensor<T>&);                                         \
    template Tensor<T> relu<T>(const Tensor<T>&);                                            \
    template Tensor<T> elu<T>(const Tensor<T>&);                                             \
    template Tensor<T> tanh<T>(const Tensor<T>&);                                            \
    template Tensor<T> abs<T>(const Tensor<T>&);                                             \
    template Tensor<T> scale<T>(const Tensor<T>&, T);                                        \
    template Tensor<T> add_const<T>(const Tensor<T>&, T);                                    \
    template Tensor<T> xlogx<T>(const Tensor<T>&);                                           \
    template Tensor<T> matmul<T>(const Tensor<T>&, const Tensor<T>&);                        \
    template Tensor<T> reduce_sum<T>(const Tensor<T>&, std::vector<int>);                    \
    template Tensor<T> reduce_mean<T>(const Tensor<T>&, std::vector<int>);                   \
    template Tensor<T> reduce_max<T>(const Tensor<T>&, std::vector<int>);                    \
    template Tensor<T> sum_all<T>(const Tensor<T>&);                                         \
    template Tensor<T> softmax<T>(const Tensor<T>&, int);                                    \
    template Tensor<T> reshape<T>(const Tensor<T>&, Shape);                                  \
    template Tensor<T> slice<T>(const Tensor<T>&, int, int, int);                            \
    template Tensor<T> concat<T>(const std::vector<Tensor<T>>&, int);                        \
    template Tensor<T> bias_chw<T>(const Tensor<T>&, const Tensor<T>&);                      \
    template Tensor<T> mul_map<T>(const Tensor<T>&, const Tensor<T>&);

LAYERGEN_INSTANTIATE(float)
LAYERGEN_INSTANTIATE(double)

#undef LAYERGEN_INSTANTIATE

}  // namespace layergen
