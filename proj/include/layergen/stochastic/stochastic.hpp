#pragma once

#include <cstdint>
#include <vector>

#include "layergen/core/ops.hpp"
#include "layergen/core/tensor.hpp"

// Distributions, reparameterized sampling, and the divergence terms and
// schedules used by the training objective. All randomness enters through
// explicitly passed noise tensors drawn by the caller.
namespace layergen::stochastic {

template <typename T>
struct DiagGaussian {
    Tensor<T> mean;
    Tensor<T> log_var;
};

template <typename T>
struct PositionDistribution {
    Tensor<T> logits;  // [N, N]
    T temperature = T(1);
};

// mean + exp(log_var / 2) * noise; noise ~ N(0, 1) injected by the caller
template <typename T>
Tensor<T> sample_gaussian(const DiagGaussian<T>& d, const Tensor<T>& noise);

// KL(N(mean, exp(log_var)) || N(0, 1)) = 1/2 sum(mean^2 + var - 1 - log_var)
template <typename T>
Tensor<T> kl_gaussian_std(const DiagGaussian<T>& d);

// softmax((logits + g) / temperature); g = -log(-log u) injected
template <typename T>
Tensor<T> sample_position(const PositionDistribution<T>& p, const Tensor<T>& gumbel_noise);

// L1 distance between the average of the posterior maps and the uniform map
template <typename T>
Tensor<T> aggregated_position_l1(const std::vector<Tensor<T>>& posteriors);

// sum of per-pixel log N(x | mean, sigma^2)
template <typename T>
Tensor<T> gaussian_log_likelihood(const Tensor<T>& x, const Tensor<T>& mean, T sigma);

// sum alpha * log(alpha), 0 log 0 := 0; <= 0 for alpha in [0,1]
template <typename T>
Tensor<T> alpha_entropy(const Tensor<T>& alpha);

// Gumbel-Softmax temperature at a training epoch: 0.3 * 2^(0.0001 * epoch)
double gumbel_temperature(std::int64_t epoch);

// pixel-noise std: 0.01/sqrt(3) through epoch 150, 0.01/sqrt(5) after
double sigma_schedule(std::int64_t epoch);

}  // namespace layergen::stochastic
