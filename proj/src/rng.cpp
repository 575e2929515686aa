#include "mzprobe/rng.hpp"

#include <cmath>

namespace mz {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 substream_engine(std::uint64_t seed, std::uint64_t trial) {
  const std::uint64_t mixed =
      splitmix64(seed ^ (0x9E3779B97F4A7C15ULL * (trial + 1)));
  return std::mt19937_64(mixed);
}

double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& eng) {
  // Box-Muller; u1 lifted away from zero to keep the log finite.
  const double u1 = uniform01(eng);
  const double u2 = uniform01(eng);
  const double r = std::sqrt(-2.0 * std::log(u1 + 0x1.0p-53));
  return r * std::cos(2.0 * kPi * u2);
}

SpinState random_probe(SpinJ j, std::mt19937_64& eng) {
  CVec amps(j.dim());
  for (int i = 0; i < j.dim(); ++i) {
    const double re = standard_normal(eng);
    const double im = standard_normal(eng);
    amps(i) = Complex(re, im);
  }
  amps /= amps.norm();
  return {j, std::move(amps)};
}

}  // namespace mz
