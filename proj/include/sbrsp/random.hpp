#pragma once

#include <cstdint>
#include <random>

namespace sbrsp {

// Draws built straight from the engine output so that a seed gives the same
// stream on every standard library.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline int uniform_index(Rng& rng, int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

}  // namespace sbrsp
