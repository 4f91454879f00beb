#include "aggr/core/seed.hpp"

namespace aggr {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(const SeedSpec& seed, std::uint64_t index, std::uint64_t sub) noexcept {
    std::uint64_t h = splitmix64(seed.master_seed);
    h = splitmix64(h ^ seed.stream_id);
    h = splitmix64(h ^ index);
    return splitmix64(h ^ sub);
}

} // namespace aggr
