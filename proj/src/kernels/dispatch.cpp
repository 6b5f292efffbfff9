#include "layergen/kernels/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace layergen::kernels {
namespace {

enum class Lane { kScalar, kAvx2 };

Lane pick_lane() {
    const char* env = std::getenv("LAYERGEN_KERNELS");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) return Lane::kScalar;
        if (std::strcmp(env, "avx2") == 0 && avx2<float>() != nullptr) return Lane::kAvx2;
        // "auto" or anything unrecognized falls through to detection
    }
    return avx2<float>() != nullptr ? Lane::kAvx2 : Lane::kScalar;
}

Lane active_lane() {
    static const Lane lane = pick_lane();
    return lane;
}

}  // namespace

template <> const Table<float>& active<float>() {
    return active_lane() == Lane::kAvx2 ? *avx2<float>() : scalar<float>();
}

template <> const Table<double>& active<double>() {
    return active_lane() == Lane::kAvx2 ? *avx2<double>() : scalar<double>();
}

const char* active_name() { return active<float>().name; }

}  // namespace layergen::kernels
