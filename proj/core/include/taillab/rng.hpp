#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace taillab {

// One independently seeded engine per (seed, stream) pair. Monte Carlo
// replicate r always uses stream r, so results do not depend on how
// replicates are scheduled across threads.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

// Uniform on [0,1) with 53-bit resolution.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform on (0,1); rejects the zero draw.
inline double uniform_open01(std::mt19937_64& gen) {
    double u;
    do {
        u = uniform01(gen);
    } while (u <= 0.0);
    return u;
}

// Unbiased integer in [0, n) by rejection.
inline std::uint64_t uniform_index(std::mt19937_64& gen, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = gen();
    } while (x >= limit);
    return x % n;
}

// Standard normal draws via the Marsaglia polar method. Not stateless: the
// spare value is cached, so keep one sampler per stream.
class NormalSampler {
public:
    double operator()(std::mt19937_64& gen) {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01(gen) - 1.0;
            v = 2.0 * uniform01(gen) - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

private:
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace taillab
