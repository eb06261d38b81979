#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace sigkit {

// splitmix64 step; used to derive independent stream seeds from (seed, index).
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 0x632be59bd9b4e019ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// mt19937_64 with explicit variate transforms so that streams are bit-stable
// across standard library implementations (std distributions are not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // inclusive bounds
    int uniform_int(int lo, int hi)
    {
        const std::uint64_t span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) -
                                                              static_cast<std::int64_t>(lo)) + 1;
        return lo + static_cast<int>(gen_() % span);
    }

    // Box-Muller without caching: one variate per call, fixed consumption of
    // two uniforms, so the stream layout is easy to reason about.
    double normal(double mean, double sigma)
    {
        double u1 = uniform();
        const double u2 = uniform();
        if (u1 <= 0.0)
            u1 = 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 gen_;
};

} // namespace sigkit
