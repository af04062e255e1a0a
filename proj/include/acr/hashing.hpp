#pragma once

// Stable 64-bit hashing used for manifests, checkpoint chains and the
// deterministic mocks. FNV-1a is endian-independent over bytes and gives the
// same digests on every platform, unlike std::hash.

#include <cstdint>
#include <string>
#include <string_view>

namespace acr {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = kFnvOffset) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= static_cast<std::uint64_t>(c);
        h *= kFnvPrime;
    }
    return h;
}

std::string hash_hex(std::uint64_t h);

// Hash of a whole file's bytes; throws IoError if unreadable.
std::uint64_t hash_file(const std::string& path);

// Splitmix64: turns a seed into a well-mixed stream key. Used to derive
// independent sub-seeds (per stage, per epoch) from one pipeline seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace acr
