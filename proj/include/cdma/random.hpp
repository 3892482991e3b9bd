#pragma once

#include <cstdint>
#include <random>

namespace cdma {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Independent stream for unit of work `index` under `master_seed`.
///
/// The stream depends only on the pair, never on how many other streams
/// were drawn before it, so trials can run in any order or in parallel.
inline Rng stream_for(std::uint64_t master_seed, std::uint64_t index, std::uint64_t domain = 0)
{
    const std::uint64_t a = splitmix64(master_seed);
    const std::uint64_t b = splitmix64(a ^ splitmix64(index));
    const std::uint64_t c = splitmix64(b ^ splitmix64(domain + 0x632BE59BD9B4E019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    return Rng(seq);
}

} // namespace cdma
