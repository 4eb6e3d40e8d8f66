#include "magring/rng.hpp"

namespace magring {
namespace {

// SplitMix64 finalizer
std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t counter_hash(std::uint64_t base_seed, std::uint64_t run, std::uint64_t j) {
    std::uint64_t h = mix(base_seed);
    h = mix(h ^ (run * 0xA24BAED4963EE407ull));
    h = mix(h ^ (j * 0x9FB21C651E98DF25ull));
    return h;
}

double uniform01(std::uint64_t base_seed, std::uint64_t run, std::uint64_t j) {
    return static_cast<double>(counter_hash(base_seed, run, j) >> 11) * 0x1.0p-53;
}

} // namespace magring
