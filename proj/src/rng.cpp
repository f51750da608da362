#include "tennis/rng.hpp"

#include <cmath>
#include <numbers>

namespace tennis {

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t index)
{
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL)));
}

std::uint64_t Rng::below(std::uint64_t bound)
{
    // Largest multiple of bound that fits; draws above it are rejected.
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t draw = engine_();
    while (draw >= limit) {
        draw = engine_();
    }
    return draw % bound;
}

double Rng::normal()
{
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace tennis
