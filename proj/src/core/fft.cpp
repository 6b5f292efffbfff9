#include "layergen/core/fft.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "layergen/kernels/kernels.hpp"

namespace layergen::fft {

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

// twiddle per stage half-index: w_m^j = exp(-i*tau*j/m) (forward)
template <typename T>
std::vector<std::pair<T, T>> stage_twiddles(int m, bool inverse) {
    std::vector<std::pair<T, T>> w(m / 2);
    for (int j = 0; j < m / 2; ++j) {
        const double a = (inverse ? kTau : -kTau) * j / m;
        w[j] = {static_cast<T>(std::cos(a)), static_cast<T>(std::sin(a))};
    }
    return w;
}

template <typename T>
void bit_reverse_rows(T* data, int rows, std::int64_t row_elems) {
    for (int i = 1, j = 0; i < rows; ++i) {
        int bit = rows >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) {
            T* a = data + static_cast<std::int64_t>(i) * row_elems;
            T* b = data + static_cast<std::int64_t>(j) * row_elems;
            for (std::int64_t e = 0; e < row_elems; ++e) std::swap(a[e], b[e]);
        }
    }
}

// One 1D FFT over a contiguous interleaved row.
template <typename T>
void fft_row(T* row, int n, bool inverse) {
    bit_reverse_rows(row, n, 2);
    for (int m = 2; m <= n; m <<= 1) {
        const auto w = stage_twiddles<T>(m, inverse);
        for (int start = 0; start < n; start += m) {
            for (int j = 0; j < m / 2; ++j) {
                T* lo = row + 2 * (start + j);
                T* hi = row + 2 * (start + j + m / 2);
                const T tr = hi[0] * w[j].first - hi[1] * w[j].second;
                const T ti = hi[1] * w[j].first + hi[0] * w[j].second;
                hi[0] = lo[0] - tr;
                hi[1] = lo[1] - ti;
                lo[0] += tr;
                lo[1] += ti;
            }
        }
    }
}

}  // namespace

template <typename T>
void fft2d(T* data, int rows, int cols, bool inverse) {
    if ((rows & (rows - 1)) != 0 || (cols & (cols - 1)) != 0)
        throw std::invalid_argument("fft2d: dimensions must be powers of two");
    for (int r = 0; r < rows; ++r) fft_row(data + static_cast<std::int64_t>(r) * 2 * cols, cols, inverse);

    // Column pass as row-wide butterflies; contiguous rows keep it SIMD.
    const auto& K = kernels::active<T>();
    const std::int64_t row_elems = 2 * static_cast<std::int64_t>(cols);
    bit_reverse_rows(data, rows, row_elems);
    for (int m = 2; m <= rows; m <<= 1) {
        const auto w = stage_twiddles<T>(m, inverse);
        for (int start = 0; start < rows; start += m) {
            for (int j = 0; j < m / 2; ++j) {
                T* lo = data + static_cast<std::int64_t>(start + j) * row_elems;
                T* hi = data + static_cast<std::int64_t>(start + j + m / 2) * row_elems;
                K.cbutterfly(lo, hi, w[j].first, w[j].second, static_cast<std::size_t>(cols));
            }
        }
    }

    if (inverse) {
        const T norm = T(1) / (static_cast<T>(rows) * static_cast<T>(cols));
        K.scale(data, norm, data, static_cast<std::size_t>(rows) * 2 * cols);
    }
}

namespace {

template <typename T>
std::vector<T> pad_complex(const T* src, int h, int w, int pr, int pc) {
    std::vector<T> buf(static_cast<std::size_t>(pr) * 2 * pc, T(0));
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) buf[(static_cast<std::int64_t>(r) * pc + c) * 2] = src[r * w + c];
    return buf;
}

template <typename T>
std::vector<T> spectral_combine(const T* a, int ha, int wa, const T* b, int hb, int wb, bool conj_b) {
    const int oh = ha + hb - 1, ow = wa + wb - 1;
    const int pr = next_pow2(oh), pc = next_pow2(ow);
    auto fa = pad_complex(a, ha, wa, pr, pc);
    auto fb = pad_complex(b, hb, wb, pr, pc);
    fft2d(fa.data(), pr, pc, false);
    fft2d(fb.data(), pr, pc, false);
    const auto& K = kernels::active<T>();
    if (conj_b)
        K.cmul_conj(fa.data(), fb.data(), fa.data(), static_cast<std::size_t>(pr) * pc);
    else
        K.cmul(fa.data(), fb.data(), fa.data(), static_cast<std::size_t>(pr) * pc);
    fft2d(fa.data(), pr, pc, true);
    std::vector<T> out(static_cast<std::size_t>(oh) * ow);
    if (!conj_b) {
        for (int r = 0; r < oh; ++r)
            for (int c = 0; c < ow; ++c) out[r * ow + c] = fa[(static_cast<std::int64_t>(r) * pc + c) * 2];
    } else {
        // circular lag m lives at index (m mod P); map lag l - (hb-1) of row l
        for (int r = 0; r < oh; ++r) {
            const int rr = ((r - (hb - 1)) % pr + pr) % pr;
            for (int c = 0; c < ow; ++c) {
                const int cc = ((c - (wb - 1)) % pc + pc) % pc;
                out[r * ow + c] = fa[(static_cast<std::int64_t>(rr) * pc + cc) * 2];
            }
        }
    }
    return out;
}

}  // namespace

template <typename T>
std::vector<T> conv_full(const T* a, int ha, int wa, const T* b, int hb, int wb) {
    return spectral_combine(a, ha, wa, b, hb, wb, false);
}

template <typename T>
std::vector<T> corr_full(const T* a, int ha, int wa, const T* b, int hb, int wb) {
    return spectral_combine(a, ha, wa, b, hb, wb, true);
}

template void fft2d<float>(float*, int, int, bool);
template void fft2d<double>(double*, int, int, bool);
template std::vector<float> conv_full<float>(const float*, int, int, const float*, int, int);
template std::vector<double> conv_full<double>(const double*, int, int, const double*, int, int);
template std::vector<float> corr_full<float>(const float*, int, int, const float*, int, int);
template std::vector<double> corr_full<double>(const double*, int, int, const double*, int, int);

}  // namespace layergen::fft
