#pragma once

#include "mzprobe/types.hpp"

#include <cstdint>
#include <random>

namespace mz {

// SplitMix64 step; mixes a 64-bit value into a well-distributed output.
std::uint64_t splitmix64(std::uint64_t x);

// Deterministic per-trial engine: trial substreams are independent of
// scheduling order, so concurrent trials reproduce serial results.
std::mt19937_64 substream_engine(std::uint64_t seed, std::uint64_t trial);

// Uniform on [0,1) with 53 random bits.
double uniform01(std::mt19937_64& eng);

// Standard normal via Box-Muller on uniform01 draws. Implementation-defined
// std::normal_distribution is avoided to keep streams bit-stable.
double standard_normal(std::mt19937_64& eng);

// Complex standard-normal amplitudes, normalized.
SpinState random_probe(SpinJ j, std::mt19937_64& eng);

}  // namespace mz
