#include "layergen/core/adam.hpp"

#include <cmath>

#include "layergen/kernels/kernels.hpp"

namespace layergen {

template <typename T>
void Adam<T>::step(std::vector<Tensor<T>>& params) {
    if (m_.empty()) {
        m_.resize(params.size());
        v_.resize(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i].assign(static_cast<std::size_t>(params[i].numel()), T(0));
            v_[i].assign(static_cast<std::size_t>(params[i].numel()), T(0));
        }
    }
    if (m_.size() != params.size())
        throw ShapeError("Adam::step: parameter list changed size");

    ++t_;
    const T inv_bc1 = T(1) / (T(1) - static_cast<T>(std::pow(static_cast<double>(beta1_), static_cast<double>(t_))));
    const T inv_bc2 = T(1) / (T(1) - static_cast<T>(std::pow(static_cast<double>(beta2_), static_cast<double>(t_))));

    const auto& K = kernels::active<T>();
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& p = params[i];
        const std::size_t n = static_cast<std::size_t>(p.numel());
        if (m_[i].size() != n)
            throw ShapeError("Adam::step: parameter " + std::to_string(i) + " changed shape");
        K.adam_step(p.raw_value().data(), p.ensure_grad().data(), m_[i].data(), v_[i].data(), n, lr_,
                    beta1_, beta2_, eps_, inv_bc1, inv_bc2);
        p.zero_grad();
    }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace layergen
