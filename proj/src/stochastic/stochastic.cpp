#include "layergen/stochastic/stochastic.hpp"

#include <cmath>

namespace layergen::stochastic {

template <typename T>
Tensor<T> sample_gaussian(const DiagGaussian<T>& d, const Tensor<T>& noise) {
    if (d.mean.shape() != d.log_var.shape())
        throw_shape_mismatch("sample_gaussian", d.mean.shape(), d.log_var.shape());
    if (noise.shape() != d.mean.shape())
        throw_shape_mismatch("sample_gaussian", d.mean.shape(), noise.shape());
    return add(d.mean, mul(exp(scale(d.log_var, T(0.5))), noise));
}

template <typename T>
Tensor<T> kl_gaussian_std(const DiagGaussian<T>& d) {
    if (d.mean.shape() != d.log_var.shape())
        throw_shape_mismatch("kl_gaussian_std", d.mean.shape(), d.log_var.shape());
    auto sq = mul(d.mean, d.mean);
    auto inner = sub(add(sq, exp(d.log_var)), add_const(d.log_var, T(1)));
    return scale(sum_all(inner), T(0.5));
}

template <typename T>
Tensor<T> sample_position(const PositionDistribution<T>& p, const Tensor<T>& gumbel_noise) {
    if (!(p.temperature > T(0)))
        throw ValueError("sample_position: temperature must be positive, got " +
                         std::to_string(p.temperature));
    if (p.logits.shape() != gumbel_noise.shape())
        throw_shape_mismatch("sample_position", p.logits.shape(), gumbel_noise.shape());
    const Shape shape = p.logits.shape();
    const int n = static_cast<int>(p.logits.numel());
    auto flat = reshape(scale(add(p.logits, gumbel_noise), T(1) / p.temperature), {n});
    return reshape(softmax(flat, 0), shape);
}

template <typename T>
Tensor<T> aggregated_position_l1(const std::vector<Tensor<T>>& posteriors) {
    if (posteriors.empty()) throw ValueError("aggregated_position_l1: empty batch");
    const Shape shape = posteriors[0].shape();
    const T n = static_cast<T>(posteriors[0].numel());
    Tensor<T> acc;
    for (const auto& p : posteriors) {
        if (p.shape() != shape) throw_shape_mismatch("aggregated_position_l1", shape, p.shape());
        const double total = static_cast<double>(sum_all(p).item());
        if (std::abs(total - 1.0) > 1e-3)
            throw ValueError("aggregated_position_l1: posterior sums to " + std::to_string(total) +
                             ", expected 1");
        acc = acc.defined() ? add(acc, p) : p;
    }
    auto mean_map = scale(acc, T(1) / static_cast<T>(posteriors.size()));
    return sum_all(abs(add_const(mean_map, T(-1) / n)));
}

template <typename T>
Tensor<T> gaussian_log_likelihood(const Tensor<T>& x, const Tensor<T>& mean, T sigma) {
    if (!(sigma > T(0)))
        throw ValueError("gaussian_log_likelihood: sigma must be positive, got " + std::to_string(sigma));
    if (x.shape() != mean.shape()) throw_shape_mismatch("gaussian_log_likelihood", x.shape(), mean.shape());
    const double s2 = static_cast<double>(sigma) * static_cast<double>(sigma);
    const T log_norm =
        static_cast<T>(-0.5 * static_cast<double>(x.numel()) * std::log(2.0 * 3.14159265358979323846 * s2));
    auto r = sub(x, mean);
    auto quad = scale(sum_all(mul(r, r)), static_cast<T>(-0.5 / s2));
    return add_const(quad, log_norm);
}

template <typename T>
Tensor<T> alpha_entropy(const Tensor<T>& alpha) {
    for (T a : alpha.value())
        if (a < T(0) || a > T(1))
            throw ValueError("alpha_entropy: entry " + std::to_string(a) + " outside [0, 1]");
    return sum_all(xlogx(alpha));
}

double gumbel_temperature(std::int64_t epoch) {
    if (epoch < 0) throw ValueError("gumbel_temperature: negative epoch");
    return 0.3 * std::pow(2.0, 1e-4 * static_cast<double>(epoch));
}

double sigma_schedule(std::int64_t epoch) {
    if (epoch < 0) throw ValueError("sigma_schedule: negative epoch");
    return epoch <= 150 ? 0.01 / std::sqrt(3.0) : 0.01 / std::sqrt(5.0);
}

#define LAYERGEN_INSTANTIATE(T)                                                               \
    template Tensor<T> sample_gaussian<T>(const DiagGaussian<T>&, const Tensor<T>&);          \
    template Tensor<T> kl_gaussian_std<T>(const DiagGaussian<T>&);                            \
    template Tensor<T> sample_position<T>(const PositionDistribution<T>&, const Tensor<T>&);  \
    template Tensor<T> aggregated_position_l1<T>(const std::vector<Tensor<T>>&);              \
    template Tensor<T> gaussian_log_likelihood<T>(const Tensor<T>&, const Tensor<T>&, T);     \
    template Tensor<T> alpha_entropy<T>(const Tensor<T>&);

LAYERGEN_INSTANTIATE(float)
LAYERGEN_INSTANTIATE(double)

#undef LAYERGEN_INSTANTIATE

}  // namespace layergen::stochastic
