#ifndef MCC_RNG_HPP
#define MCC_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace mcc {

/// SplitMix64 finalizer; mixes a 64-bit state into a well-distributed word.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a over a purpose tag.
inline std::uint64_t hash_tag(std::string_view tag) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : tag) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

/// Derives an independent seed from (master seed, purpose tag, indices).
/// Streams for different tags or indices do not collide, so adding a new
/// consumer never perturbs the draws of an existing one.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t s = splitmix64(master ^ hash_tag(tag));
    s = splitmix64(s ^ a);
    s = splitmix64(s ^ b);
    return s;
}

/// Generator stream keyed by (master seed, tag, indices).
inline std::mt19937_64 make_stream(std::uint64_t master, std::string_view tag,
                                   std::uint64_t a = 0, std::uint64_t b = 0) {
    return std::mt19937_64(derive_seed(master, tag, a, b));
}

}  // namespace mcc

#endif
