#pragma once

#include <functional>
#include <memory>
#include <type_traits>
#include <vector>

#include "layergen/core/shape.hpp"

namespace layergen {

// Reverse-mode autodiff over dense row-major arrays. A Tensor is a value
// handle onto a graph node; ops record parents and a vector-Jacobian
// callback. Nodes whose inputs carry no gradient are constant-folded out
// of the graph, so evaluation with plain inputs builds no tape.
//
// A graph is owned by one logical thread for the duration of a
// forward/backward pass; distinct graphs are independent.

template <typename T>
struct TensorNode {
    static_assert(std::is_floating_point_v<T>);

    Shape shape;
    std::vector<T> value;
    std::vector<T> grad;  // empty until first accumulation
    bool requires_grad = false;
    std::vector<std::shared_ptr<TensorNode>> parents;
    std::function<void(TensorNode&)> backward;

    std::vector<T>& ensure_grad() {
        if (grad.empty()) grad.assign(value.size(), T(0));
        return grad;
    }
};

template <typename T>
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape, bool requires_grad = false) {
        return leaf(std::move(shape), {}, requires_grad, true);
    }
    static Tensor full(Shape shape, T v, bool requires_grad = false) {
        auto t = zeros(std::move(shape), requires_grad);
        for (auto& x : t.n_->value) x = v;
        return t;
    }
    static Tensor from(Shape shape, std::vector<T> data, bool requires_grad = false) {
        if (shape_numel(shape) != static_cast<std::int64_t>(data.size()))
            throw ShapeError("Tensor::from: shape " + shape_str(shape) + " does not match data length " +
                             std::to_string(data.size()));
        return leaf(std::move(shape), std::move(data), requires_grad, false);
    }
    static Tensor scalar(T v, bool requires_grad = false) {
        return from({}, {v}, requires_grad);
    }

    // Graph-node constructor used by every op.
    static Tensor make(Shape shape, std::vector<T> value, std::vector<Tensor> parents,
                       std::function<void(TensorNode<T>&)> backward) {
        Tensor t = from(std::move(shape), std::move(value), false);
        bool needs = false;
        for (const auto& p : parents) needs = needs || (p.defined() && p.requires_grad());
        if (needs) {
            t.n_->requires_grad = true;
            t.n_->backward = std::move(backward);
            t.n_->parents.reserve(parents.size());
            for (auto& p : parents) t.n_->parents.push_back(p.n_);
        }
        return t;
    }

    bool defined() const { return n_ != nullptr; }
    const Shape& shape() const { return n_->shape; }
    int dim(std::size_t axis) const { return n_->shape.at(axis); }
    std::int64_t numel() const { return static_cast<std::int64_t>(n_->value.size()); }
    const std::vector<T>& value() const { return n_->value; }
    std::vector<T>& raw_value() { return n_->value; }
    const T* data() const { return n_->value.data(); }

    T item() const {
        if (numel() != 1)
            throw ShapeError("item: tensor of shape " + shape_str(shape()) + " is not a scalar");
        return n_->value[0];
    }

    bool requires_grad() const { return n_->requires_grad; }
    void set_requires_grad(bool v) { n_->requires_grad = v; }

    bool has_grad() const { return !n_->grad.empty(); }
    const std::vector<T>& grad() const { return n_->grad; }
    std::vector<T>& ensure_grad() { return n_->ensure_grad(); }
    void zero_grad() { n_->grad.clear(); }

    // New leaf sharing no graph history (value copied).
    Tensor detach() const { return from(n_->shape, n_->value, false); }

    // Accumulates gradients of this scalar into every requires_grad leaf.
    // Repeated calls keep accumulating; zero_grad() resets a tensor.
    void backward() const;

    TensorNode<T>* node() const { return n_.get(); }
    const std::shared_ptr<TensorNode<T>>& node_ptr() const { return n_; }

private:
    static Tensor leaf(Shape shape, std::vector<T> data, bool requires_grad, bool fill_zero) {
        Tensor t;
        t.n_ = std::make_shared<TensorNode<T>>();
        t.n_->shape = std::move(shape);
        if (fill_zero)
            t.n_->value.assign(static_cast<std::size_t>(shape_numel(t.n_->shape)), T(0));
        else
            t.n_->value = std::move(data);
        t.n_->requires_grad = requires_grad;
        return t;
    }

    std::shared_ptr<TensorNode<T>> n_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace layergen
