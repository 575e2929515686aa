#include "mzprobe/info_metrics.hpp"

#include <cmath>

namespace mz {

namespace {
const double kLn2 = std::log(2.0);
}

MeasurementDistribution distribution(const SpinState& state) {
  return {state.j, state.amps.cwiseAbs2()};
}

MeasurementDistribution noon_distribution_analytic(SpinJ j, double zeta,
                                                   double theta) {
  const int d = j.dim();
  const int n = j.two_j;
  const double fringe = std::cos(n * (theta + 0.5 * kPi) - zeta);
  Vec probs(d);
  for (int i = 0; i < d; ++i) {
    const double logbin = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                          std::lgamma(n - i + 1.0) - n * kLn2;
    const double parity = i % 2 == 0 ? 1.0 : -1.0;
    probs(i) = std::exp(logbin) * (1.0 + parity * fringe);
  }
  return {j, std::move(probs)};
}

KlResult kl_divergence(const MeasurementDistribution& p1,
                       const MeasurementDistribution& p2) {
  if (p1.probs.size() != p2.probs.size())
    throw DimensionMismatch("distributions differ in dimension");
  KlResult out;
  for (int i = 0; i < p1.probs.size(); ++i) {
    const double a = p1.probs(i);
    if (a <= kEpsZero) continue;
    double b = p2.probs(i);
    if (b < kEpsFloor) {
      b = kEpsFloor;
      out.clamped = true;
    }
    out.bits += a * std::log2(a / b);
  }
  if (out.bits < 0.0 && out.bits > -1e-12) out.bits = 0.0;
  return out;
}

TypeBounds type_bounds(const MeasurementDistribution& p1,
                       const MeasurementDistribution& p2, int k) {
  if (p1.probs.size() != p2.probs.size())
    throw DimensionMismatch("distributions differ in dimension");
  if (k < 1) throw InvalidInterval("k must be positive");
  TypeBounds tb;
  tb.k = k;
  tb.exponent = kl_divergence(p1, p2).bits;
  tb.upper = std::exp2(-static_cast<double>(k) * tb.exponent);
  tb.lower =
      tb.upper * std::pow(k + 1.0, -static_cast<double>(p1.probs.size()));
  return tb;
}

double shannon_entropy(const MeasurementDistribution& p) {
  double bits = 0.0;
  for (int i = 0; i < p.probs.size(); ++i) {
    const double a = p.probs(i);
    if (a <= kEpsZero) continue;
    bits -= a * std::log2(a);
  }
  return bits < 0.0 ? 0.0 : bits;
}

}  // namespace mz
