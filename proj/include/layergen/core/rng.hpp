#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace layergen {

// Seedable generator with fully specified value mappings (uniform via the
// top 53 bits, normal via Box-Muller), so every draw is reproducible from
// the seed alone. fork(i) derives an independent stream from the original
// seed and an index, independent of how many draws were made.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // (0, 1)
    double uniform_open() { return uniform() + 0x1.0p-54; }

    double uniform_in(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // [0, n)
    int uniform_int(int n) { return static_cast<int>(uniform() * n); }

    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    double gumbel() { return -std::log(-std::log(uniform_open())); }

    std::uint64_t seed() const { return seed_; }

    Rng fork(std::uint64_t index) const { return Rng(mix(seed_, index)); }

    // splitmix64 finalizer over seed and stream index
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    template <typename T>
    void fill_normal(std::vector<T>& v) {
        for (auto& x : v) x = static_cast<T>(normal());
    }
    template <typename T>
    void fill_gumbel(std::vector<T>& v) {
        for (auto& x : v) x = static_cast<T>(gumbel());
    }
    template <typename T>
    void fill_uniform(std::vector<T>& v, double lo, double hi) {
        for (auto& x : v) x = static_cast<T>(uniform_in(lo, hi));
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace layergen
