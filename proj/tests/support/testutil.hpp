#pragma once

// Test-side oracles and helpers. Everything here is independent of the
// library's own computation paths: finite differences for gradients,
// plain-loop reference maths, and classical goodness-of-fit tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "layergen/core/rng.hpp"
#include "layergen/core/tensor.hpp"

namespace testutil {

using layergen::Rng;
using layergen::Shape;
using layergen::Tensor;

inline Tensor<double> random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0,
                                    bool requires_grad = true) {
    std::vector<double> v(static_cast<std::size_t>(layergen::shape_numel(shape)));
    rng.fill_uniform(v, lo, hi);
    return Tensor<double>::from(std::move(shape), std::move(v), requires_grad);
}

// Central-difference gradient check at 64-bit. Rebuilds the graph through
// `f` for every probe; returns the worst relative error across all leaf
// elements. Leaves must have requires_grad set.
inline double finite_diff_check(const std::function<Tensor<double>(const std::vector<Tensor<double>>&)>& f,
                                std::vector<Tensor<double>>& leaves, double step = 1e-5) {
    Tensor<double> loss = f(leaves);
    loss.backward();
    std::vector<std::vector<double>> analytic;
    for (auto& l : leaves) analytic.push_back(l.ensure_grad());

    double worst = 0.0;
    for (std::size_t li = 0; li < leaves.size(); ++li) {
        auto& vals = leaves[li].raw_value();
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const double keep = vals[i];
            vals[i] = keep + step;
            const double up = f(leaves).item();
            vals[i] = keep - step;
            const double dn = f(leaves).item();
            vals[i] = keep;
            const double fd = (up - dn) / (2.0 * step);
            const double a = analytic[li][i];
            const double denom = std::max({1.0, std::abs(a), std::abs(fd)});
            worst = std::max(worst, std::abs(a - fd) / denom);
        }
    }
    for (auto& l : leaves) l.zero_grad();
    return worst;
}

// ---- classical distribution tests ----------------------------------------

// Regularized incomplete gamma functions (series + continued fraction).
inline double gamma_p(double a, double x) {
    if (x <= 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // continued fraction for Q, P = 1 - Q
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - lg) * h;
}

// P(chi2 >= stat) with `dof` degrees of freedom
inline double chi2_pvalue(double stat, double dof) {
    return 1.0 - gamma_p(dof / 2.0, stat / 2.0);
}

// Pearson chi-square p-value for observed counts vs expected probabilities.
inline double chi2_test(const std::vector<long>& observed, const std::vector<double>& expected_prob,
                        long total) {
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = expected_prob[i] * total;
        const double d = observed[i] - e;
        stat += d * d / e;
    }
    return chi2_pvalue(stat, static_cast<double>(observed.size() - 1));
}

// Kolmogorov-Smirnov p-value against the U(0,1) CDF.
inline double ks_uniform_pvalue(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double cdf = samples[i];
        d = std::max(d, std::abs((i + 1) / n - cdf));
        d = std::max(d, std::abs(cdf - i / n));
    }
    const double lam = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        p += sign * 2.0 * std::exp(-2.0 * k * k * lam * lam);
        sign = -sign;
    }
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace testutil
