#pragma once

#include "mzprobe/types.hpp"

namespace mz {

// p_m = |psi_m|^2.
MeasurementDistribution distribution(const SpinState& state);

// Interference fringe distribution of the NOON probe after the full
// instrument: p_i = C(2j,i) 4^{-j} (1 + (-1)^i cos(2j(theta + pi/2) - zeta)),
// binomial factors in log space.
MeasurementDistribution noon_distribution_analytic(SpinJ j, double zeta,
                                                   double theta);

struct KlResult {
  double bits = 0.0;
  // True when any p2 term was lifted to kEpsFloor.
  bool clamped = false;
};

// sum p1 log2(p1/p2) with p1 <= kEpsZero terms contributing zero and p2
// clamped below at kEpsFloor. Throws DimensionMismatch.
KlResult kl_divergence(const MeasurementDistribution& p1,
                       const MeasurementDistribution& p2);

struct TypeBounds {
  int k = 0;
  double lower = 0.0;
  double upper = 0.0;
  // Relative entropy S[P1||P2] in bits.
  double exponent = 0.0;
};

// exponent = S[P1||P2]; upper = 2^{-k exponent}; lower = upper/(k+1)^dim.
TypeBounds type_bounds(const MeasurementDistribution& p1,
                       const MeasurementDistribution& p2, int k);

// -sum p log2 p with 0 log 0 = 0.
double shannon_entropy(const MeasurementDistribution& p);

}  // namespace mz
