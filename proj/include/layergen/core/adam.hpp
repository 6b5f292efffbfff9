#pragma once

#include <cstdint>
#include <vector>

#include "layergen/core/tensor.hpp"

namespace layergen {

// Bias-corrected Adam over an ordered parameter list. Moment buffers are
// stored here, aligned with the list, so they can be checkpointed.
template <typename T>
class Adam {
public:
    explicit Adam(T lr, T beta1 = T(0.9), T beta2 = T(0.999), T eps = T(1e-8))
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    // Consumes each parameter's accumulated gradient (missing grad = zero)
    // and clears it.
    void step(std::vector<Tensor<T>>& params);

    std::int64_t steps() const { return t_; }
    T learning_rate() const { return lr_; }
    void set_learning_rate(T lr) { lr_ = lr; }

    std::vector<std::vector<T>>& moment1() { return m_; }
    std::vector<std::vector<T>>& moment2() { return v_; }
    void set_steps(std::int64_t t) { t_ = t; }

private:
    T lr_, beta1_, beta2_, eps_;
    std::int64_t t_ = 0;
    std::vector<std::vector<T>> m_, v_;
};

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace layergen
