#pragma once

#include <cstdint>
#include <random>

namespace aggr {

struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Deterministic seed of substream `index` (and optional sub-index) of a SeedSpec.
std::uint64_t derive_seed(const SeedSpec& seed, std::uint64_t index, std::uint64_t sub = 0) noexcept;

using Engine = std::mt19937_64;

inline Engine make_engine(const SeedSpec& seed, std::uint64_t index, std::uint64_t sub = 0) {
    return Engine(derive_seed(seed, index, sub));
}

} // namespace aggr
