#include "randinfo/rng.hpp"

namespace randinfo {

std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view label) {
    // FNV-1a over the label bytes, then one avalanche round folding in the
    // base seed. Stable across platforms and releases by construction.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return mix64(h ^ mix64(base_seed + 0x9E3779B97F4A7C15ULL));
}

}  // namespace randinfo
