#pragma once
#include <cmath>
#include <cstdint>
#include <random>

#include "ffr/units.hpp"

namespace ffr {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Mixes (seed, stream) into one well-spread engine seed so that substreams
/// with nearby ids do not overlap statistically.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s ^= stream * 0xda942042e4dd58b5ULL;
    std::uint64_t b = splitmix64(s);
    return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

/// Seeded random stream with hand-rolled variate transforms so that a given
/// (seed, stream) pair reproduces the identical sequence on any platform.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
        : engine_(stream_seed(seed, stream)) {}

    /// Uniform in (0, 1]; never returns 0 so log() is always safe.
    double uniform() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    /// Unit-mean exponential.
    double exponential() { return -std::log(uniform()); }

    /// Box-Muller pair of independent standard normals.
    void normal_pair(double& z0, double& z1) {
        const double rad = std::sqrt(-2.0 * std::log(uniform()));
        const double ang = 2.0 * pi * uniform();
        z0 = rad * std::cos(ang);
        z1 = rad * std::sin(ang);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace ffr
