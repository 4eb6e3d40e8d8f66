#pragma once

#include <cstdint>

namespace magring {

// Counter-based uniform draw on [0, 1). The value depends only on the key
// triple, never on call order, so ensembles are reproducible under any
// parallel schedule. Construction: SplitMix64 finalizer applied per level
// with distinct odd offsets.
double uniform01(std::uint64_t base_seed, std::uint64_t run, std::uint64_t j);

// The raw 64-bit hash behind uniform01, exposed for tests.
std::uint64_t counter_hash(std::uint64_t base_seed, std::uint64_t run, std::uint64_t j);

} // namespace magring
