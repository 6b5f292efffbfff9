#include "layergen/core/tensor.hpp"

#include <unordered_set>

namespace layergen {

namespace {

template <typename T>
void topo_sort(TensorNode<T>* root, std::vector<TensorNode<T>*>& order) {
    // Iterative post-order DFS; each node appears after all of its parents'
    // consumers, so the reverse is a valid backward schedule.
    std::unordered_set<TensorNode<T>*> visited;
    std::vector<std::pair<TensorNode<T>*, std::size_t>> stack;
    stack.emplace_back(root, 0);
    visited.insert(root);
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            TensorNode<T>* p = node->parents[next++].get();
            if (p->requires_grad && visited.insert(p).second) stack.emplace_back(p, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }
}

}  // namespace

template <typename T>
void Tensor<T>::backward() const {
    if (numel() != 1)
        throw ShapeError("backward: loss must be scalar, got shape " + shape_str(shape()));
    if (!n_->requires_grad) return;

    std::vector<TensorNode<T>*> order;
    topo_sort(n_.get(), order);

    // Interior grads are scratch for this pass; only leaves accumulate
    // across repeated backward calls.
    for (TensorNode<T>* node : order)
        if (node->backward) node->grad.assign(node->value.size(), T(0));

    n_->ensure_grad()[0] += T(1);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        TensorNode<T>* node = *it;
        if (node->backward) node->backward(*node);
    }
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace layergen
