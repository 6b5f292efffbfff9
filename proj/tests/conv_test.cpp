#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "layergen/core/ops.hpp"
#include "support/testutil.hpp"

using namespace layergen;
using testutil::finite_diff_check;
using testutil::random_tensor;

namespace {

// Quadruple-loop cross-correlation oracle, independent of the im2col path.
std::vector<double> conv_oracle(const std::vector<double>& x, int C, int H, int W,
                                const std::vector<double>& k, int K, int kh, int kw, int stride,
                                int pad, int& oh, int& ow) {
    oh = (H + 2 * pad - kh) / stride + 1;
    ow = (W + 2 * pad - kw) / stride + 1;
    std::vector<double> y(static_cast<std::size_t>(K) * oh * ow, 0.0);
    for (int f = 0; f < K; ++f)
        for (int i = 0; i < oh; ++i)
            for (int j = 0; j < ow; ++j) {
                double acc = 0;
                for (int c = 0; c < C; ++c)
                    for (int u = 0; u < kh; ++u)
                        for (int v = 0; v < kw; ++v) {
                            const int r = i * stride + u - pad;
                            const int s = j * stride + v - pad;
                            if (r < 0 || r >= H || s < 0 || s >= W) continue;
                            acc += x[(c * H + r) * W + s] * k[((f * C + c) * kh + u) * kw + v];
                        }
                y[(f * oh + i) * ow + j] = acc;
            }
    return y;
}

// Direct zero-padded true linear convolution (kernel flipped).
std::vector<double> linconv_oracle(const std::vector<double>& a, int ha, int wa,
                                   const std::vector<double>& b, int hb, int wb) {
    const int oh = ha + hb - 1, ow = wa + wb - 1;
    std::vector<double> out(static_cast<std::size_t>(oh) * ow, 0.0);
    for (int r = 0; r < ha; ++r)
        for (int c = 0; c < wa; ++c)
            for (int u = 0; u < hb; ++u)
                for (int v = 0; v < wb; ++v) out[(r + u) * ow + (c + v)] += a[r * wa + c] * b[u * wb + v];
    return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

TEST_CASE("conv2d: 1x1 unit kernel is the identity") {
    Rng rng(1);
    auto x = random_tensor({2, 5, 5}, rng, -1, 1, false);
    auto k = Tensor<double>::from({2, 2, 1, 1}, {1, 0, 0, 1});
    auto y = conv2d(x, k, 1, 0);
    CHECK(y.shape() == Shape{2, 5, 5});
    for (int i = 0; i < 50; ++i) CHECK(y.value()[i] == doctest::Approx(x.value()[i]));
}

TEST_CASE("conv2d: centered delta kernel with padding 1 preserves the input") {
    Rng rng(2);
    auto x = random_tensor({1, 6, 7}, rng, -1, 1, false);
    std::vector<double> kv(9, 0.0);
    kv[4] = 1.0;  // center of the 3x3 kernel
    auto k = Tensor<double>::from({1, 1, 3, 3}, std::move(kv));
    auto y = conv2d(x, k, 1, 1);
    CHECK(y.shape() == x.shape());
    for (std::size_t i = 0; i < x.value().size(); ++i) CHECK(y.value()[i] == doctest::Approx(x.value()[i]));
}

TEST_CASE("conv2d matches the quadruple-loop oracle") {
    Rng rng(3);
    for (int trial = 0; trial < 12; ++trial) {
        const int C = 1 + rng.uniform_int(3), K = 1 + rng.uniform_int(3);
        const int H = 8, W = 8;
        const int kh = 1 + rng.uniform_int(3), kw = 1 + rng.uniform_int(3);
        const int stride = 1 + rng.uniform_int(2), pad = rng.uniform_int(2);
        auto x = random_tensor({C, H, W}, rng, -1, 1, false);
        auto k = random_tensor({K, C, kh, kw}, rng, -1, 1, false);
        int oh, ow;
        auto ref = conv_oracle(x.value(), C, H, W, k.value(), K, kh, kw, stride, pad, oh, ow);
        auto y = conv2d(x, k, stride, pad);
        CHECK(y.shape() == Shape{K, oh, ow});
        for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(y.value()[i] - ref[i]) < 1e-12);
    }
}

TEST_CASE("conv2d rejects kernels larger than the padded image") {
    Rng rng(4);
    auto x = random_tensor({1, 3, 3}, rng, -1, 1, false);
    auto k = random_tensor({1, 1, 5, 5}, rng, -1, 1, false);
    CHECK_THROWS_AS(conv2d(x, k, 1, 0), ShapeError);
    CHECK_NOTHROW(conv2d(x, k, 1, 1));
}

TEST_CASE("conv2d and transpose_conv2d gradients match central differences") {
    Rng rng(5);
    for (const auto& [stride, pad] : std::vector<std::pair<int, int>>{{1, 0}, {1, 1}, {2, 1}}) {
        std::vector<Tensor<double>> leaves = {random_tensor({2, 6, 6}, rng), random_tensor({3, 2, 3, 3}, rng)};
        const auto seed = rng.next_u64();
        const int s = stride, p = pad;
        auto err = finite_diff_check(
            [&, s, p](const std::vector<Tensor<double>>& l) {
                Rng r(seed);
                std::vector<double> w(static_cast<std::size_t>(conv2d(l[0], l[1], s, p).numel()));
                r.fill_uniform(w, -1.0, 1.0);
                auto y = conv2d(l[0], l[1], s, p);
                return sum_all(mul(y, Tensor<double>::from(y.shape(), std::move(w))));
            },
            leaves);
        CHECK(err < 1e-4);

        std::vector<Tensor<double>> tleaves = {random_tensor({3, 4, 4}, rng), random_tensor({3, 2, 3, 3}, rng)};
        auto terr = finite_diff_check(
            [&, s, p](const std::vector<Tensor<double>>& l) {
                Rng r(seed + 1);
                auto y = transpose_conv2d(l[0], l[1], s, p);
                std::vector<double> w(static_cast<std::size_t>(y.numel()));
                r.fill_uniform(w, -1.0, 1.0);
                return sum_all(mul(y, Tensor<double>::from(y.shape(), std::move(w))));
            },
            tleaves);
        CHECK(terr < 1e-4);
    }
}

TEST_CASE("transpose_conv2d: stride-1 1x1 unit kernel is the identity") {
    Rng rng(6);
    auto x = random_tensor({1, 4, 4}, rng, -1, 1, false);
    auto k = Tensor<double>::from({1, 1, 1, 1}, {1});
    auto y = transpose_conv2d(x, k, 1, 0);
    CHECK(y.shape() == Shape{1, 4, 4});
    CHECK(y.value() == x.value());
}

TEST_CASE("transpose_conv2d: 2x2 unit kernel with stride 2 block-upsamples") {
    auto x = Tensor<double>::from({1, 2, 2}, {1, 2, 3, 4});
    auto k = Tensor<double>::from({1, 1, 2, 2}, {1, 1, 1, 1});
    auto y = transpose_conv2d(x, k, 2, 0);
    CHECK(y.shape() == Shape{1, 4, 4});
    CHECK(y.value() == std::vector<double>{1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4});
}

TEST_CASE("transpose_conv2d output extent follows (H-1)*s - 2p + h") {
    Rng rng(7);
    auto x = random_tensor({2, 5, 5}, rng, -1, 1, false);
    auto k = random_tensor({2, 3, 4, 4}, rng, -1, 1, false);
    CHECK(transpose_conv2d(x, k, 2, 1).shape() == Shape{3, 10, 10});
    CHECK_THROWS_AS(transpose_conv2d(x, k, 1, 4), ShapeError);
}

TEST_CASE("conv/transpose-conv adjoint identity holds to 1e-10") {
    // geometry where (H + 2p - h) divides the stride, so the pair is an
    // exact adjoint on matching extents
    Rng rng(8);
    struct Geom {
        int h, stride, pad;
    };
    for (const auto& g : std::vector<Geom>{{7, 1, 0}, {7, 1, 1}, {7, 2, 1}, {8, 3, 2}}) {
        auto x = random_tensor({2, g.h, g.h}, rng, -1, 1, false);
        auto k = random_tensor({3, 2, 3, 3}, rng, -1, 1, false);
        auto cx = conv2d(x, k, g.stride, g.pad);
        auto y = random_tensor(cx.shape(), rng, -1, 1, false);
        auto ty = transpose_conv2d(y, k, g.stride, g.pad);
        REQUIRE(ty.shape() == x.shape());
        const double lhs = dot(cx.value(), y.value());
        const double rhs = dot(x.value(), ty.value());
        CHECK(std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}) < 1e-10);
    }
}

TEST_CASE("conv2d_fft: one-hot kernel at the center index preserves the image") {
    Rng rng(9);
    auto img = random_tensor({9, 11}, rng, -1, 1, false);
    for (int kh : {1, 3, 4, 5}) {
        std::vector<double> kv(static_cast<std::size_t>(kh) * kh, 0.0);
        kv[(kh / 2) * kh + (kh / 2)] = 1.0;
        auto k = Tensor<double>::from({kh, kh}, std::move(kv));
        auto y = conv2d_fft(img, k, FftConvMode::kSameCentered);
        CHECK(y.shape() == img.shape());
        for (std::size_t i = 0; i < img.value().size(); ++i)
            CHECK(std::abs(y.value()[i] - img.value()[i]) < 1e-12);
    }
}

TEST_CASE("conv2d_fft: all-zero kernel gives all zeros") {
    Rng rng(10);
    auto img = random_tensor({8, 8}, rng, -1, 1, false);
    auto k = Tensor<double>::zeros({3, 3});
    for (auto mode : {FftConvMode::kFull, FftConvMode::kSameCentered}) {
        auto y = conv2d_fft(img, k, mode);
        for (double v : y.value()) CHECK(std::abs(v) < 1e-13);
    }
}

TEST_CASE("conv2d_fft equals direct zero-padded convolution within 1e-9 at 64-bit") {
    Rng rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const int ha = 1 + rng.uniform_int(16), wa = 1 + rng.uniform_int(16);
        const int hb = 1 + rng.uniform_int(8), wb = 1 + rng.uniform_int(8);
        auto a = random_tensor({ha, wa}, rng, -1, 1, false);
        auto b = random_tensor({hb, wb}, rng, -1, 1, false);
        auto ref = linconv_oracle(a.value(), ha, wa, b.value(), hb, wb);
        auto y = conv2d_fft(a, b, FftConvMode::kFull);
        CHECK(y.shape() == Shape{ha + hb - 1, wa + wb - 1});
        double worst = 0;
        for (std::size_t i = 0; i < ref.size(); ++i)
            worst = std::max(worst, std::abs(y.value()[i] - ref[i]));
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("conv2d_fft at 32-bit stays within 1e-3 of the direct oracle") {
    Rng rng(12);
    auto a64 = random_tensor({16, 16}, rng, -1, 1, false);
    auto b64 = random_tensor({7, 7}, rng, -1, 1, false);
    auto ref = linconv_oracle(a64.value(), 16, 16, b64.value(), 7, 7);
    std::vector<float> af(a64.value().begin(), a64.value().end());
    std::vector<float> bf(b64.value().begin(), b64.value().end());
    auto y = conv2d_fft(Tensor<float>::from({16, 16}, std::move(af)),
                        Tensor<float>::from({7, 7}, std::move(bf)), FftConvMode::kFull);
    double worst = 0;
    for (std::size_t i = 0; i < ref.size(); ++i)
        worst = std::max(worst, std::abs(static_cast<double>(y.value()[i]) - ref[i]));
    CHECK(worst < 1e-3);
}

TEST_CASE("conv2d_fft gradients match central differences in both modes") {
    Rng rng(13);
    for (auto mode : {FftConvMode::kFull, FftConvMode::kSameCentered}) {
        std::vector<Tensor<double>> leaves = {random_tensor({6, 5}, rng), random_tensor({3, 4}, rng)};
        const auto seed = rng.next_u64();
        auto err = finite_diff_check(
            [&, mode](const std::vector<Tensor<double>>& l) {
                Rng r(seed);
                auto y = conv2d_fft(l[0], l[1], mode);
                std::vector<double> w(static_cast<std::size_t>(y.numel()));
                r.fill_uniform(w, -1.0, 1.0);
                return sum_all(mul(y, Tensor<double>::from(y.shape(), std::move(w))));
            },
            leaves);
        CHECK(err < 1e-4);
    }
}
