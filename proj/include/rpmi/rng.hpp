#pragma once

#include <cstdint>
#include <random>

namespace rpmi {

/// splitmix64 finalizer; used to derive independent stream seeds so that
/// parallel trials/periods do not share random state.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic per-stream seed from a base seed and a stream index.
inline std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t stream_index) {
    return splitmix64(splitmix64(base_seed) ^ splitmix64(stream_index + 0x51ed2700215001a9ULL));
}

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
/// Bit-identical across platforms, unlike std::uniform_real_distribution.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace rpmi
