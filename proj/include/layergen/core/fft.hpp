#pragma once

#include <vector>

namespace layergen::fft {

int next_pow2(int n);

// In-place 2D FFT over a row-major grid of `rows` x `cols` complex values
// stored interleaved (re, im). Both dims must be powers of two. The inverse
// transform includes the 1/(rows*cols) normalization.
template <typename T>
void fft2d(T* data, int rows, int cols, bool inverse);

// Full linear 2D convolution: out[Ha+Hb-1][Wa+Wb-1], zero-padded to the
// next power of two per axis internally.
template <typename T>
std::vector<T> conv_full(const T* a, int ha, int wa, const T* b, int hb, int wb);

// Full linear 2D cross-correlation, corr[lr][lc] = sum_{r,c} a[r+lr, c+lc] * b[r, c]
// for lags lr in [-(hb-1), ha-1]; the returned array of size
// (ha+hb-1) x (wa+wb-1) stores lag l at index l + (hb-1).
template <typename T>
std::vector<T> corr_full(const T* a, int ha, int wa, const T* b, int hb, int wb);

}  // namespace layergen::fft
