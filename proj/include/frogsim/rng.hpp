#pragma once

#include <cstdint>
#include <limits>

namespace frogsim {

/// Counter-based randomness. Every draw is a pure function of its key, so a
/// decision can be replayed from any module without carrying stream state.
inline constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t combine(std::uint64_t h, std::uint64_t v)
{
    return mix64(h ^ mix64(v));
}

/// 53-bit uniform in [0,1).
inline constexpr double to_unit(std::uint64_t bits)
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// 53-bit uniform in (0,1].
inline constexpr double to_unit_open0(std::uint64_t bits)
{
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

enum class Purpose : std::uint64_t {
    Eta = 1,
    Lifetime = 2,
    Jump = 3,
    Coin = 4,
    Auxiliary = 5,
};

/// Per-trial key root: (master seed, trial index).
struct KeyedRng {
    std::uint64_t root = 0;

    static constexpr KeyedRng for_trial(std::uint64_t master_seed, std::uint64_t trial)
    {
        return KeyedRng{combine(mix64(master_seed), trial)};
    }

    constexpr std::uint64_t bits(Purpose purpose, std::uint64_t site_key,
                                 std::uint64_t index = 0, std::uint64_t step = 0) const
    {
        std::uint64_t h = combine(root, static_cast<std::uint64_t>(purpose));
        h = combine(h, site_key);
        h = combine(h, index);
        return combine(h, step);
    }

    constexpr double uniform(Purpose purpose, std::uint64_t site_key,
                             std::uint64_t index = 0, std::uint64_t step = 0) const
    {
        return to_unit(bits(purpose, site_key, index, step));
    }
};

/// Sequential generator for plain Monte Carlo (walk statistics, GW trees).
/// Satisfies UniformRandomBitGenerator so it also works with <random>.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()()
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform() { return to_unit((*this)()); }

    /// Uniform integer in [0, n) by multiply-shift; bias is below 2^-32 for n < 2^32.
    std::uint32_t below(std::uint32_t n)
    {
        return static_cast<std::uint32_t>(((*this)() >> 32) * static_cast<std::uint64_t>(n) >> 32);
    }

private:
    std::uint64_t state_;
};

/// Neighbor choice from one uniform bit pattern.
inline std::uint32_t pick_below(std::uint64_t bits, std::uint32_t n)
{
    return static_cast<std::uint32_t>((bits >> 32) * static_cast<std::uint64_t>(n) >> 32);
}

} // namespace frogsim
