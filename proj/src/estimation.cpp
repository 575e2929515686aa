#include "mzprobe/estimation.hpp"

#include "mzprobe/fisher.hpp"
#include "mzprobe/rng.hpp"
#include "mzprobe/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mz {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<int> draw_outcome_indices(const Vec& probs, int k,
                                      std::mt19937_64& eng) {
  const int d = static_cast<int>(probs.size());
  std::vector<double> cdf(d);
  double acc = 0.0;
  for (int i = 0; i < d; ++i) {
    acc += probs(i);
    cdf[i] = acc;
  }
  cdf[d - 1] = std::max(cdf[d - 1], 1.0);
  std::vector<int> out(k);
  for (int t = 0; t < k; ++t) {
    const double u = uniform01(eng);
    out[t] = static_cast<int>(
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  }
  return out;
}

// log p with subnormal lift; exact zero stays -inf so impossible outcomes
// disqualify a grid point.
double log_prob(double p) {
  if (p <= 0.0) return kNegInf;
  return std::log(std::max(p, kEpsFloor));
}

struct LogTable {
  std::vector<double> grid;
  // log_probs[g][i] over grid points g, outcome indices i.
  std::vector<std::vector<double>> log_probs;
};

LogTable build_log_table(const SpinState& probe, Window window,
                         int grid_points) {
  LogTable table;
  table.grid.resize(grid_points);
  table.log_probs.resize(grid_points);
  const auto engine = shared_engine(probe.j);
  for (int g = 0; g < grid_points; ++g) {
    const double theta =
        window.lo() + window.width * g / (grid_points - 1.0);
    table.grid[g] = theta;
    const MeasurementDistribution dist =
        distribution(engine->evolve(probe, theta));
    auto& row = table.log_probs[g];
    row.resize(dist.probs.size());
    for (int i = 0; i < dist.probs.size(); ++i)
      row[i] = log_prob(dist.probs(i));
  }
  return table;
}

double mle_from_counts(const LogTable& table, const std::vector<long>& counts,
                       Window window) {
  const int grid_points = static_cast<int>(table.grid.size());
  int best = -1;
  double best_ll = kNegInf;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int g = 0; g < grid_points; ++g) {
    double ll = 0.0;
    const auto& row = table.log_probs[g];
    for (size_t i = 0; i < counts.size(); ++i)
      if (counts[i] > 0) ll += counts[i] * row[i];
    if (ll == kNegInf) continue;
    const double dist = std::abs(table.grid[g] - window.center);
    if (ll > best_ll || (ll == best_ll && dist < best_dist)) {
      best = g;
      best_ll = ll;
      best_dist = dist;
    }
  }
  if (best < 0)
    throw DegenerateLikelihood(
        "all grid points have -inf log-likelihood");
  return table.grid[best];
}

std::vector<long> count_outcomes(const SpinJ& j,
                                 const std::vector<int>& outcomes_two_m) {
  std::vector<long> counts(j.dim(), 0);
  for (int two_m : outcomes_two_m) ++counts[j.index_of_two_m(two_m)];
  return counts;
}

}  // namespace

SampleRecord sample_outcomes(const SpinState& probe, double theta, int k,
                             std::uint64_t seed) {
  if (k < 1) throw InvalidInterval("k must be positive");
  const auto engine = shared_engine(probe.j);
  const MeasurementDistribution dist =
      distribution(engine->evolve(probe, theta));
  std::mt19937_64 eng = substream_engine(seed, 0);
  SampleRecord rec;
  rec.theta_true = theta;
  rec.k = k;
  rec.seed = seed;
  rec.outcomes_two_m.reserve(k);
  for (int idx : draw_outcome_indices(dist.probs, k, eng))
    rec.outcomes_two_m.push_back(probe.j.two_m(idx));
  return rec;
}

double mle_grid(const SampleRecord& record, const SpinState& probe,
                Window window, int grid_points) {
  if (grid_points < 3)
    throw std::invalid_argument("grid needs at least 3 points");
  if (!(window.width > 0.0) || window.width > 2.0 * kPi)
    throw InvalidInterval("window width must lie in (0, 2 pi]");
  const LogTable table = build_log_table(probe, window, grid_points);
  return mle_from_counts(table, count_outcomes(probe.j, record.outcomes_two_m),
                         window);
}

EstimationRun mse_experiment(const SpinState& probe, double theta_true,
                             Window window, int k, int trials,
                             std::uint64_t seed, int grid_points) {
  if (theta_true < window.lo() || theta_true > window.hi())
    throw InvalidInterval("true angle lies outside the window");
  if (trials < 1) throw InvalidInterval("trials must be positive");
  if (k < 1) throw InvalidInterval("k must be positive");
  if (grid_points < 3)
    throw std::invalid_argument("grid needs at least 3 points");
  if (!(window.width > 0.0) || window.width > 2.0 * kPi)
    throw InvalidInterval("window width must lie in (0, 2 pi]");

  EstimationRun run;
  run.window = window;
  run.grid_points = grid_points;
  run.trials = trials;
  run.crb = cramer_rao_bound(fisher_prob_derivative(probe, theta_true), k);

  const auto engine = shared_engine(probe.j);
  const MeasurementDistribution dist =
      distribution(engine->evolve(probe, theta_true));
  const LogTable table = build_log_table(probe, window, grid_points);

  run.estimates.reserve(trials);
  double sq = 0.0;
  std::vector<long> counts(probe.j.dim());
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 eng = substream_engine(seed, t);
    std::fill(counts.begin(), counts.end(), 0L);
    for (int idx : draw_outcome_indices(dist.probs, k, eng)) ++counts[idx];
    const double est = mle_from_counts(table, counts, window);
    run.estimates.push_back(est);
    sq += (est - theta_true) * (est - theta_true);
  }
  run.empirical_mse = sq / trials;
  return run;
}

namespace detail {

int nearest_type_count(const MeasurementDistribution& p1, int k) {
  int best = 0;
  double best_kl = std::numeric_limits<double>::infinity();
  for (int c = 0; c <= k; ++c) {
    MeasurementDistribution q{p1.j, Vec(2)};
    q.probs << static_cast<double>(c) / k, static_cast<double>(k - c) / k;
    const double kl = kl_divergence(q, p1).bits;
    if (kl < best_kl) {
      best_kl = kl;
      best = c;
    }
  }
  return best;
}

std::vector<int> nearest_type(const MeasurementDistribution& p1, int k) {
  const int d = static_cast<int>(p1.probs.size());
  if (d == 2) {
    const int c = nearest_type_count(p1, k);
    return {c, k - c};
  }
  // Largest-remainder rounding, then greedy single-unit moves while they
  // reduce the divergence. Deterministic tie order by index.
  std::vector<int> type(d);
  std::vector<std::pair<double, int>> rem(d);
  int assigned = 0;
  for (int i = 0; i < d; ++i) {
    const double target = k * p1.probs(i);
    type[i] = static_cast<int>(std::floor(target));
    assigned += type[i];
    rem[i] = {-(target - type[i]), i};
  }
  std::sort(rem.begin(), rem.end());
  for (int r = 0; r < k - assigned; ++r) ++type[rem[r].second];

  auto kl_of = [&](const std::vector<int>& t) {
    MeasurementDistribution q{p1.j, Vec(d)};
    for (int i = 0; i < d; ++i) q.probs(i) = static_cast<double>(t[i]) / k;
    return kl_divergence(q, p1).bits;
  };
  double current = kl_of(type);
  for (int pass = 0; pass < k * d; ++pass) {
    double best_kl = current;
    int from = -1, to = -1;
    for (int i = 0; i < d; ++i) {
      if (type[i] == 0) continue;
      for (int jdx = 0; jdx < d; ++jdx) {
        if (jdx == i) continue;
        --type[i];
        ++type[jdx];
        const double kl = kl_of(type);
        ++type[i];
        --type[jdx];
        if (kl < best_kl - 1e-15) {
          best_kl = kl;
          from = i;
          to = jdx;
        }
      }
    }
    if (from < 0) break;
    --type[from];
    ++type[to];
    current = best_kl;
  }
  return type;
}

}  // namespace detail

MisidResult misid_experiment(const MeasurementDistribution& p1,
                             const MeasurementDistribution& p2, int k,
                             int trials, std::uint64_t seed) {
  if (p1.probs.size() != p2.probs.size())
    throw DimensionMismatch("distributions differ in dimension");
  if (k < 1) throw InvalidInterval("k must be positive");
  if (trials < 1) throw InvalidInterval("trials must be positive");
  const std::vector<int> target = detail::nearest_type(p1, k);
  const int d = static_cast<int>(p1.probs.size());
  std::vector<int> counts(d);
  long hits = 0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 eng = substream_engine(seed, t);
    std::fill(counts.begin(), counts.end(), 0);
    for (int idx : draw_outcome_indices(p2.probs, k, eng)) ++counts[idx];
    if (std::equal(counts.begin(), counts.end(), target.begin())) ++hits;
  }
  MisidResult out;
  out.p_empirical = static_cast<double>(hits) / trials;
  out.bounds = type_bounds(p1, p2, k);
  return out;
}

double exact_binary_misid(const MeasurementDistribution& p1,
                          const MeasurementDistribution& p2, int k) {
  if (p1.probs.size() != 2 || p2.probs.size() != 2)
    throw UnsupportedDimension("exact enumeration needs two outcomes");
  if (k < 1 || k > 10000)
    throw UnsupportedDimension("exact enumeration needs 1 <= k <= 1e4");
  const int target = detail::nearest_type_count(p1, k);
  const double q0 = p2.probs(0);
  const double q1 = p2.probs(1);
  double total = 0.0;
  for (int c = 0; c <= k; ++c) {
    if (c != target) continue;
    if ((q0 <= 0.0 && c > 0) || (q1 <= 0.0 && k - c > 0)) continue;
    double lp = std::lgamma(k + 1.0) - std::lgamma(c + 1.0) -
                std::lgamma(k - c + 1.0);
    if (c > 0) lp += c * std::log(q0);
    if (k - c > 0) lp += (k - c) * std::log(q1);
    total += std::exp(lp);
  }
  return total;
}

}  // namespace mz
