#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "layergen/compositor/compositor.hpp"
#include "layergen/core/ops.hpp"
#include "support/testutil.hpp"

using namespace layergen;
using namespace layergen::compositor;
using testutil::random_tensor;

namespace {

Tensor<double> one_hot(int n, int r, int c) {
    std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
    v[r * n + c] = 1.0;
    return Tensor<double>::from({n, n}, std::move(v));
}

Tensor<double> normalized_map(int n, Rng& rng) {
    std::vector<double> v(static_cast<std::size_t>(n) * n);
    rng.fill_uniform(v, 0.01, 1.0);
    double s = 0;
    for (double x : v) s += x;
    for (double& x : v) x /= s;
    return Tensor<double>::from({n, n}, std::move(v));
}

// index-shift placement oracle: canvas cell (a,b) lands at
// (r + a - M/2, c + b - M/2), out-of-image contributions dropped
std::vector<double> shift_oracle(const std::vector<double>& canvas, int ch, int m, int n, int r, int c) {
    std::vector<double> out(static_cast<std::size_t>(ch) * n * n, 0.0);
    const int m2 = m / 2;
    for (int cc = 0; cc < ch; ++cc)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                const int i = r + a - m2, j = c + b - m2;
                if (i < 0 || i >= n || j < 0 || j >= n) continue;
                out[(cc * n + i) * n + j] = canvas[(cc * m + a) * m + b];
            }
    return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

PlacedObject<double> make_object(Tensor<double> pixels, Tensor<double> alpha, double depth) {
    return PlacedObject<double>{std::move(pixels), std::move(alpha), Tensor<double>::scalar(depth)};
}

// per-pixel back-to-front over-operator oracle
std::vector<double> over_oracle(const SceneAssembly<double>& asm_, const std::vector<int>& order) {
    const int ch = asm_.background.shape()[0];
    const int hw = asm_.background.shape()[1] * asm_.background.shape()[2];
    std::vector<double> out = asm_.background.value();
    for (int idx : order) {
        const auto& o = asm_.objects[idx];
        for (int c = 0; c < ch; ++c)
            for (int i = 0; i < hw; ++i) {
                const double a = o.alpha.value()[i];
                out[c * hw + i] = (1 - a) * out[c * hw + i] + a * o.pixels.value()[c * hw + i];
            }
    }
    return out;
}

}  // namespace

TEST_CASE("place: one-hot at the image center reproduces the canvas (M = N)") {
    Rng rng(1);
    const int n = 8;
    auto canvas = random_tensor({3, n, n}, rng, 0, 1, false);
    auto placed = place(canvas, one_hot(n, n / 2, n / 2));
    for (std::size_t i = 0; i < canvas.value().size(); ++i)
        CHECK(placed.value()[i] == doctest::Approx(canvas.value()[i]).epsilon(1e-10));
}

TEST_CASE("place: all-zero canvas gives all-zero output") {
    Rng rng(2);
    auto placed = place(Tensor<double>::zeros({3, 5, 5}), normalized_map(9, rng));
    for (double v : placed.value()) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("place: one-hot at corner keeps exactly the surviving quadrant") {
    Rng rng(3);
    const int m = 5, n = 12;
    auto canvas = random_tensor({2, m, m}, rng, -1, 1, false);
    auto placed = place(canvas, one_hot(n, 0, 0));
    auto oracle = shift_oracle(canvas.value(), 2, m, n, 0, 0);
    for (std::size_t i = 0; i < oracle.size(); ++i)
        CHECK(std::abs(placed.value()[i] - oracle[i]) < 1e-11);
    // only the bottom-right ceil(M/2) x ceil(M/2) quadrant survives
    int nonzero = 0;
    for (double v : oracle)
        if (std::abs(v) > 0) ++nonzero;
    CHECK(nonzero <= 2 * ((m + 1) / 2) * ((m + 1) / 2));
}

TEST_CASE("place matches the shift oracle at random one-hot positions") {
    Rng rng(4);
    const int m = 5, n = 11;
    for (int trial = 0; trial < 10; ++trial) {
        auto canvas = random_tensor({1, m, m}, rng, -1, 1, false);
        const int r = rng.uniform_int(n), c = rng.uniform_int(n);
        auto placed = place(canvas, one_hot(n, r, c));
        auto oracle = shift_oracle(canvas.value(), 1, m, n, r, c);
        for (std::size_t i = 0; i < oracle.size(); ++i)
            CHECK(std::abs(placed.value()[i] - oracle[i]) < 1e-11);
    }
}

TEST_CASE("place is linear in the canvas") {
    Rng rng(5);
    const int m = 4, n = 9;
    auto c1 = random_tensor({2, m, m}, rng, -1, 1, false);
    auto c2 = random_tensor({2, m, m}, rng, -1, 1, false);
    auto w = normalized_map(n, rng);
    auto lhs = place(add(scale(c1, 2.0), scale(c2, -0.5)), w);
    auto p1 = place(c1, w);
    auto p2 = place(c2, w);
    for (std::size_t i = 0; i < lhs.value().size(); ++i)
        CHECK(std::abs(lhs.value()[i] - (2.0 * p1.value()[i] - 0.5 * p2.value()[i])) < 1e-12);
}

TEST_CASE("place conserves alpha mass for fully interior one-hot placements") {
    Rng rng(6);
    const int m = 4, n = 12;
    auto alpha = random_tensor({1, m, m}, rng, 0, 1, false);
    auto placed = place(alpha, one_hot(n, 6, 5));
    double sum_in = 0, sum_out = 0;
    for (double v : alpha.value()) sum_in += v;
    for (double v : placed.value()) sum_out += v;
    CHECK(sum_out == doctest::Approx(sum_in).epsilon(1e-10));
}

TEST_CASE("place rejects unnormalized weights") {
    CHECK_THROWS_AS(place(Tensor<double>::zeros({1, 3, 3}), Tensor<double>::full({8, 8}, 1.0)),
                    ValueError);
    CHECK_THROWS_AS(place(Tensor<double>::zeros({1, 9, 9}), one_hot(8, 1, 1)), ShapeError);
}

TEST_CASE("attention_crop: one-hot at center is the plain center crop") {
    Rng rng(7);
    const int n = 10, m = 4;
    auto img = random_tensor({3, n, n}, rng, 0, 1, false);
    const int r = 5, c = 5;
    auto crop = attention_crop(img, one_hot(n, r, c), m);
    const int m2 = m / 2;
    for (int ch = 0; ch < 3; ++ch)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                CHECK(crop.value()[(ch * m + a) * m + b] ==
                      doctest::Approx(img.value()[(ch * n + (r + a - m2)) * n + (c + b - m2)])
                          .epsilon(1e-10));
}

TEST_CASE("attention_crop: uniform weights on a constant image scale by the in-bounds fraction") {
    const int n = 6, m = 4;
    auto img = Tensor<double>::full({1, n, n}, 1.0);
    auto w = Tensor<double>::full({n, n}, 1.0 / (n * n));
    auto crop = attention_crop(img, w, m);
    // cell (a,b) is in bounds for exactly the positions where the shifted
    // crop stays inside the image
    const int m2 = m / 2;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            int count = 0;
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) {
                    const int i = r + a - m2, j = c + b - m2;
                    if (i >= 0 && i < n && j >= 0 && j < n) ++count;
                }
            CHECK(crop.value()[a * m + b] ==
                  doctest::Approx(static_cast<double>(count) / (n * n)).epsilon(1e-10));
        }
    CHECK_THROWS_AS(attention_crop(img, w, n + 1), ShapeError);
}

TEST_CASE("place and attention_crop are adjoint to 1e-10") {
    Rng rng(8);
    for (const auto& [m, n] : std::vector<std::pair<int, int>>{{4, 9}, {5, 12}, {8, 8}}) {
        auto canvas = random_tensor({3, m, m}, rng, -1, 1, false);
        auto img = random_tensor({3, n, n}, rng, -1, 1, false);
        auto w = normalized_map(n, rng);
        const double lhs = dot(place(canvas, w).value(), img.value());
        const double rhs = dot(canvas.value(), attention_crop(img, w, m).value());
        CHECK(std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}) < 1e-10);
    }
}

TEST_CASE("place and attention_crop gradients match central differences") {
    Rng rng(9);
    const int m = 3, n = 6;
    {
        std::vector<Tensor<double>> leaves = {random_tensor({2, m, m}, rng)};
        auto w = normalized_map(n, rng);
        auto err = testutil::finite_diff_check(
            [&](const std::vector<Tensor<double>>& l) {
                auto p = place(l[0], w);
                return sum_all(mul(p, p));
            },
            leaves);
        CHECK(err < 1e-6);
    }
    {
        // weights gradient probed through a softmax so perturbed weights stay normalized
        std::vector<Tensor<double>> leaves = {random_tensor({n * n}, rng)};
        auto canvas = random_tensor({2, m, m}, rng, -1, 1, false);
        auto img = random_tensor({2, n, n}, rng, -1, 1, false);
        auto err = testutil::finite_diff_check(
            [&](const std::vector<Tensor<double>>& l) {
                auto w = reshape(softmax(l[0], 0), {n, n});
                auto p = place(canvas, w);
                auto crop = attention_crop(img, w, m);
                return add(sum_all(mul(p, p)), sum_all(mul(crop, crop)));
            },
            leaves);
        CHECK(err < 1e-6);
    }
}

TEST_CASE("composite_hard: all-zero alphas return the background exactly") {
    Rng rng(10);
    auto bg = random_tensor({3, 6, 6}, rng, 0, 1, false);
    SceneAssembly<double> asm_{bg,
                               {make_object(random_tensor({3, 6, 6}, rng, 0, 1, false),
                                            Tensor<double>::zeros({6, 6}), 0.4)}};
    CHECK(composite_hard(asm_).value() == bg.value());
}

TEST_CASE("composite_hard: opaque object covers its support") {
    Rng rng(11);
    const int n = 5;
    auto bg = random_tensor({3, n, n}, rng, 0, 1, false);
    std::vector<double> av(n * n, 0.0);
    av[7] = 1.0;
    av[13] = 1.0;
    auto pix = random_tensor({3, n, n}, rng, 0, 1, false);
    SceneAssembly<double> asm_{bg, {make_object(pix, Tensor<double>::from({n, n}, av), 0.5)}};
    auto out = composite_hard(asm_);
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < n * n; ++i) {
            const double want = av[i] == 1.0 ? pix.value()[c * n * n + i] : bg.value()[c * n * n + i];
            CHECK(out.value()[c * n * n + i] == want);
        }
}

TEST_CASE("composite_hard matches the per-pixel over oracle on translucent layers") {
    Rng rng(12);
    const int n = 7;
    auto bg = random_tensor({3, n, n}, rng, 0, 1, false);
    SceneAssembly<double> asm_{bg, {}};
    asm_.objects.push_back(make_object(random_tensor({3, n, n}, rng, 0, 1, false),
                                       random_tensor({n, n}, rng, 0, 1, false), 0.6));
    asm_.objects.push_back(make_object(random_tensor({3, n, n}, rng, 0, 1, false),
                                       random_tensor({n, n}, rng, 0, 1, false), 0.2));
    asm_.objects.push_back(make_object(random_tensor({3, n, n}, rng, 0, 1, false),
                                       random_tensor({n, n}, rng, 0, 1, false), 0.9));
    // back-to-front by depth: farthest (0.9) first, then 0.6, then 0.2
    auto oracle = over_oracle(asm_, {2, 0, 1});
    auto out = composite_hard(asm_);
    for (std::size_t i = 0; i < oracle.size(); ++i) CHECK(std::abs(out.value()[i] - oracle[i]) < 1e-12);
}

TEST_CASE("composite_hard is invariant under object permutation") {
    Rng rng(13);
    const int n = 6;
    auto bg = random_tensor({3, n, n}, rng, 0, 1, false);
    std::vector<PlacedObject<double>> objs;
    for (int j = 0; j < 4; ++j)
        objs.push_back(make_object(random_tensor({3, n, n}, rng, 0, 1, false),
                                   random_tensor({n, n}, rng, 0, 1, false), 0.15 + 0.2 * j));
    SceneAssembly<double> a{bg, objs};
    SceneAssembly<double> b{bg, {objs[2], objs[0], objs[3], objs[1]}};
    CHECK(composite_hard(a).value() == composite_hard(b).value());
}

TEST_CASE("composite_hard breaks depth ties by ascending object index") {
    const int n = 2;
    auto bg = Tensor<double>::zeros({1, n, n});
    auto ones = Tensor<double>::full({n, n}, 1.0);
    SceneAssembly<double> asm_{bg,
                               {make_object(Tensor<double>::full({1, n, n}, 0.25), ones, 0.5),
                                make_object(Tensor<double>::full({1, n, n}, 0.75), ones, 0.5)}};
    // index 0 blends first (farther), index 1 paints over it
    for (double v : composite_hard(asm_).value()) CHECK(v == 0.75);
}

TEST_CASE("composite_soft: all-zero alphas return the background for any tau") {
    Rng rng(14);
    auto bg = random_tensor({3, 5, 5}, rng, 0, 1, false);
    for (double tau : {1e-3, 0.1, 10.0}) {
        SceneAssembly<double> asm_{bg,
                                   {make_object(random_tensor({3, 5, 5}, rng, 0, 1, false),
                                                Tensor<double>::zeros({5, 5}), 0.3)}};
        auto out = composite_soft(asm_, tau);
        for (std::size_t i = 0; i < bg.value().size(); ++i)
            CHECK(out.value()[i] == doctest::Approx(bg.value()[i]).epsilon(1e-12));
    }
}

TEST_CASE("composite_soft: opaque near object at tiny tau reproduces its pixels") {
    Rng rng(15);
    auto bg = random_tensor({3, 4, 4}, rng, 0, 1, false);
    auto pix = random_tensor({3, 4, 4}, rng, 0, 1, false);
    SceneAssembly<double> asm_{bg, {make_object(pix, Tensor<double>::full({4, 4}, 1.0), 0.5)}};
    auto out = composite_soft(asm_, 1e-3);
    for (std::size_t i = 0; i < pix.value().size(); ++i)
        CHECK(std::abs(out.value()[i] - pix.value()[i]) < 1e-6);
}

TEST_CASE("composite_soft approaches composite_hard for binary alphas at tau = 1e-3") {
    Rng rng(16);
    const int n = 6;
    for (int trial = 0; trial < 20; ++trial) {
        auto bg = random_tensor({3, n, n}, rng, 0, 1, false);
        SceneAssembly<double> asm_{bg, {}};
        const std::vector<double> depths = {0.2, 0.6};
        for (double d : depths) {
            std::vector<double> av(n * n);
            for (auto& v : av) v = rng.uniform() < 0.5 ? 1.0 : 0.0;
            asm_.objects.push_back(make_object(random_tensor({3, n, n}, rng, 0, 1, false),
                                               Tensor<double>::from({n, n}, std::move(av)), d));
        }
        auto hard = composite_hard(asm_);
        auto soft = composite_soft(asm_, 1e-3);
        double worst = 0;
        for (std::size_t i = 0; i < hard.value().size(); ++i)
            worst = std::max(worst, std::abs(hard.value()[i] - soft.value()[i]));
        CHECK(worst < 1e-3);
    }
}

TEST_CASE("composite_soft output is a per-pixel convex combination") {
    Rng rng(17);
    const int n = 5;
    auto bg = random_tensor({1, n, n}, rng, 0, 1, false);
    SceneAssembly<double> asm_{bg, {}};
    for (int j = 0; j < 3; ++j)
        asm_.objects.push_back(make_object(random_tensor({1, n, n}, rng, 0, 1, false),
                                           random_tensor({n, n}, rng, 0, 1, false),
                                           0.1 + 0.25 * j));
    auto out = composite_soft(asm_, 0.2);
    for (int i = 0; i < n * n; ++i) {
        double lo = bg.value()[i], hi = bg.value()[i];
        for (const auto& o : asm_.objects) {
            lo = std::min(lo, o.pixels.value()[i]);
            hi = std::max(hi, o.pixels.value()[i]);
        }
        CHECK(out.value()[i] >= lo - 1e-12);
        CHECK(out.value()[i] <= hi + 1e-12);
    }
    CHECK_THROWS_AS(composite_soft(asm_, 0.0), ValueError);
}

TEST_CASE("composite_soft gradients match central differences") {
    Rng rng(18);
    const int n = 4;
    // leaves: bg, pixels x2, alphas x2 (via sigmoid to stay in [0,1]), depth logits x2
    std::vector<Tensor<double>> leaves = {
        random_tensor({2, n, n}, rng, 0.1, 0.9), random_tensor({2, n, n}, rng, 0.1, 0.9),
        random_tensor({2, n, n}, rng, 0.1, 0.9), random_tensor({n, n}, rng, -1, 1),
        random_tensor({n, n}, rng, -1, 1),       random_tensor({}, rng, -0.5, 0.5),
        random_tensor({}, rng, -0.5, 0.5)};
    auto err = testutil::finite_diff_check(
        [&](const std::vector<Tensor<double>>& l) {
            SceneAssembly<double> asm_{l[0],
                                       {PlacedObject<double>{l[1], sigmoid(l[3]), sigmoid(l[5])},
                                        PlacedObject<double>{l[2], sigmoid(l[4]), sigmoid(l[6])}}};
            auto out = composite_soft(asm_, 0.3);
            return sum_all(mul(out, out));
        },
        leaves);
    CHECK(err < 1e-4);
}
