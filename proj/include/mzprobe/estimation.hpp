#pragma once

#include "mzprobe/info_metrics.hpp"
#include "mzprobe/types.hpp"

#include <cstdint>
#include <vector>

namespace mz {

struct Window {
  double center = 0.0;
  double width = 0.0;

  double lo() const { return center - 0.5 * width; }
  double hi() const { return center + 0.5 * width; }
};

struct SampleRecord {
  double theta_true = 0.0;
  int k = 0;
  // Doubled m values; integer-exact for half-integer j.
  std::vector<int> outcomes_two_m;
  std::uint64_t seed = 0;
};

// k inverse-CDF draws from distribution(evolve(probe, theta)) on the
// deterministic substream for (seed, 0).
SampleRecord sample_outcomes(const SpinState& probe, double theta, int k,
                             std::uint64_t seed);

// Grid point in the window maximizing the outcome log-likelihood. Terms use
// log p with subnormal p lifted to kEpsFloor; exact p = 0 gives -inf, and
// DegenerateLikelihood is thrown when every grid point is -inf. Ties resolve
// toward the grid point nearest the window center (k = 0 returns the center).
double mle_grid(const SampleRecord& record, const SpinState& probe,
                Window window, int grid_points);

struct EstimationRun {
  Window window;
  int grid_points = 0;
  std::vector<double> estimates;
  double empirical_mse = 0.0;
  double crb = 0.0;
  int trials = 0;
};

// `trials` independent sample -> estimate pipelines; trial t draws from the
// (seed, t) substream, so results are scheduling-independent.
// crb = 1/(k J(theta_true)). Throws InvalidInterval if theta_true is outside
// the window.
EstimationRun mse_experiment(const SpinState& probe, double theta_true,
                             Window window, int k, int trials,
                             std::uint64_t seed, int grid_points = 601);

struct MisidResult {
  double p_empirical = 0.0;
  TypeBounds bounds;
};

// Draws `trials` datasets of size k from p2 and counts those whose empirical
// type equals the realizable k-type nearest p1 in relative entropy.
MisidResult misid_experiment(const MeasurementDistribution& p1,
                             const MeasurementDistribution& p2, int k,
                             int trials, std::uint64_t seed);

// Exact classification probability for two-outcome distributions: sums the
// binomial(k, c) p2-likelihood over counts c classified as typical of p1,
// log-space binomials. Throws UnsupportedDimension unless both distributions
// have exactly two outcomes and k <= 1e4.
double exact_binary_misid(const MeasurementDistribution& p1,
                          const MeasurementDistribution& p2, int k);

namespace detail {

// Count c* in 0..k whose type (c/k, 1-c/k) minimizes KL against p1;
// ties take the smaller count.
int nearest_type_count(const MeasurementDistribution& p1, int k);

// Realizable k-type nearest to p1: largest-remainder rounding, then greedy
// unit moves that minimize the KL increase. Deterministic.
std::vector<int> nearest_type(const MeasurementDistribution& p1, int k);

}  // namespace detail

}  // namespace mz
