#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace tennis {

/// Portable seeded generator. std::mt19937_64 is bit-identical across standard
/// libraries; the std distributions are not, so sampling helpers live here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream for replicate `index` of a run seeded with `seed`.
    static Rng stream(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), rejection sampled. bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller.
    double normal();

    template <typename T>
    void shuffle(std::span<T> items)
    {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

} // namespace tennis
