#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace myo {

/// SplitMix64 finaliser; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a over a byte string.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

using RngStream = std::mt19937_64;

/// Stream keyed by (seed, index, purpose). Streams for different keys are
/// unrelated, so results never depend on the order in which they are drawn.
inline RngStream derive_stream(std::uint64_t seed, std::uint64_t index, std::string_view purpose) {
    const std::uint64_t key = mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL) ^ fnv1a64(purpose));
    return RngStream(key);
}

}  // namespace myo
