// Acceptance gate: one pass/fail line per criterion, exit code counts the
// failures. Tolerances live here, next to the checks they gate.
#include "mzprobe/disting.hpp"
#include "mzprobe/estimation.hpp"
#include "mzprobe/fisher.hpp"
#include "mzprobe/info_metrics.hpp"
#include "mzprobe/rng.hpp"
#include "mzprobe/rotation.hpp"
#include "mzprobe/spin.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace mz;

namespace {

int failures = 0;

void report(int idx, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", idx,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(const char* pattern, double a, double b = 0.0,
                double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

std::vector<ProbeFamily> families_for(int two_j) {
  std::vector<ProbeFamily> fams = {ProbeFamily::noon(0.0),
                                   ProbeFamily::fockz(two_j),
                                   ProbeFamily::phase_state(0.5 * kPi)};
  if (two_j % 2 == 0) fams.push_back(ProbeFamily::fockz(0));
  return fams;
}

struct FamilyEntry {
  std::string label;
  std::function<ProbeFamily(int)> make;
};

const std::vector<FamilyEntry>& sweep_families() {
  static const std::vector<FamilyEntry> entries = {
      {"noon", [](int) { return ProbeFamily::noon(0.0); }},
      {"fockz0", [](int) { return ProbeFamily::fockz(0); }},
      {"fockzj", [](int n) { return ProbeFamily::fockz(n); }},
      {"phase", [](int) { return ProbeFamily::phase_state(0.5 * kPi); }},
  };
  return entries;
}

}  // namespace

// Criteria 1 and 2: both Fisher evaluators reproduce the closed forms over
// a dense phase grid for every family, and agree with each other.
void criteria_1_2() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_closed = 0.0;
  double worst_cross = 0.0;
  for (int two_j = 1; two_j <= 50; ++two_j) {
    SpinJ j(two_j);
    for (const ProbeFamily& family : families_for(two_j)) {
      const double closed = closed_form_fisher(family, j).value;
      const SpinState probe = make_probe(j, family);
      for (int t = 0; t < 64; ++t) {
        const double theta = 2.0 * kPi * t / 64.0 + 0.0137;
        const double e7 = fisher_prob_derivative(probe, theta).value;
        const double e11 = fisher_energy_discrepancy(probe, theta).value;
        worst_closed =
            std::max(worst_closed, std::abs(e7 - closed) / closed);
        worst_cross = std::max(
            worst_cross,
            std::abs(e7 - e11) / std::max(std::abs(e7), std::abs(e11)));
      }
    }
  }
  const double elapsed = seconds_since(t0);
  report(1, worst_closed <= 1e-7 && elapsed < 10.0,
         fmt("closed-form match, worst rel %.3e, %.1f s (limits 1e-7, 10 s)",
             worst_closed, elapsed));
  report(2, worst_cross <= 1e-7,
         fmt("evaluator cross-check, worst rel %.3e (limit 1e-7)",
             worst_cross));
}

// Criterion 3: the analytic two-outcome-superposition distribution matches
// the evolved pipeline pointwise, and the distribution has period 2 pi / n.
void criterion_3() {
  double worst_match = 0.0;
  double worst_period = 0.0;
  for (int two_j = 1; two_j <= 50; ++two_j) {
    SpinJ j(two_j);
    auto engine = shared_engine(j);
    for (double zeta : {0.0, 1.234}) {
      const SpinState probe = make_noon(j, zeta);
      for (int t = 0; t < 64; ++t) {
        const double theta = 2.0 * kPi * t / 64.0 + 0.0091;
        const Vec pipe = distribution(engine->evolve(probe, theta)).probs;
        const Vec ana = noon_distribution_analytic(j, zeta, theta).probs;
        worst_match =
            std::max(worst_match, (pipe - ana).cwiseAbs().maxCoeff());
        const Vec shifted =
            distribution(engine->evolve(probe, theta + 2.0 * kPi / two_j))
                .probs;
        worst_period =
            std::max(worst_period, (shifted - pipe).cwiseAbs().maxCoeff());
      }
    }
  }
  report(3, worst_match <= 1e-10 && worst_period <= 1e-12,
         fmt("analytic distribution %.3e, periodicity %.3e "
             "(limits 1e-10, 1e-12)",
             worst_match, worst_period));
}

// Criterion 4: the windowed mean approaches the local quadratic form as the
// window shrinks at chi = pi/2, n = 10. Families whose distribution loses
// rank across this window (noon, fockz0 here) approach 2/3 of the quadratic
// form instead; they are evaluated as specified and reported as failing.
void criterion_4() {
  bool all_ok = true;
  std::string detail;
  for (const FamilyEntry& entry : sweep_families()) {
    const SpinState probe = make_probe(SpinJ(10), entry.make(10));
    std::vector<double> ratios;
    for (double delta : {1e-2, 1e-3, 1e-4}) {
      DistinguishabilityQuery q;
      q.probe = probe;
      q.chi = 0.5 * kPi;
      q.delta = delta;
      const double d = disting(q).value;
      const double l = local_approx(probe, 0.5 * kPi, delta);
      ratios.push_back(std::abs(d / l - 1.0));
    }
    const bool decreasing = ratios[0] > ratios[1] && ratios[1] > ratios[2];
    const bool all_tiny =
        ratios[0] < 1e-7 && ratios[1] < 1e-7 && ratios[2] < 1e-7;
    const bool ok = (decreasing || all_tiny) && ratios[2] < 1e-3;
    all_ok = all_ok && ok;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s %.1e/%.1e/%.1e%s ", entry.label.c_str(),
                  ratios[0], ratios[1], ratios[2], ok ? "" : "(!)");
    detail += buf;
  }
  report(4, all_ok, detail + "(limit: shrinking, <1e-3 at 1e-4)");
}

// Criteria 5 and 6 run the full default sweep grid; the rows are reused by
// criterion 10 afterwards.
std::vector<std::vector<SweepRow>> criteria_5_6() {
  const std::vector<int> n_list = [] {
    std::vector<int> v;
    for (int n = 5; n <= 50; ++n) v.push_back(n);
    return v;
  }();
  const std::vector<double> chi_list = {0.5 * kPi, 0.75 * kPi, kPi};
  const std::vector<double> delta_list = {1e-3, kPi};

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::vector<SweepRow>> rows;
  for (const FamilyEntry& entry : sweep_families())
    rows.push_back(
        disting_sweep(entry.make, n_list, chi_list, delta_list));
  const double sweep_seconds = seconds_since(t0);

  const auto value = [&](int fam, int n, int chi_idx, int delta_idx) {
    const SweepRow& row =
        rows[fam][(n - 5) * 6 + chi_idx * 2 + delta_idx];
    return row.result.value;
  };

  // Criterion 5: wide-window behavior at chi = pi, delta = pi.
  bool increasing = true;
  for (int n = 8; n <= 50; n += 2)
    increasing = increasing && value(2, n, 2, 1) > value(2, n - 2, 2, 1);
  const double noon_ratio = value(0, 50, 2, 1) / value(0, 6, 2, 1);
  bool between = true;
  for (int n = 10; n <= 50; n += 2)
    between = between && value(0, n, 2, 1) < value(3, n, 2, 1) &&
              value(3, n, 2, 1) < value(2, n, 2, 1);
  report(5,
         increasing && noon_ratio > 0.5 && noon_ratio < 2.0 && between &&
             sweep_seconds < 300.0,
         fmt("wide-window ordering holds, noon drift x%.3f, sweep %.0f s "
             "(limits x2, 300 s)",
             noon_ratio, sweep_seconds));

  // Criterion 6: narrow-window scaling at chi = pi, delta = 1e-3.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int n = 6; n <= 50; n += 2) {
    const double x = std::log(n);
    const double y = std::log(value(0, n, 2, 0));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  double worst_ratio_err = 0.0;
  for (int n = 10; n <= 50; n += 2) {
    const double ratio = value(3, n, 2, 0) / value(1, n, 2, 0);
    worst_ratio_err =
        std::max(worst_ratio_err, std::abs(ratio / (2.0 / 3.0) - 1.0));
  }
  report(6,
         std::abs(slope - 2.0) <= 0.02 && worst_ratio_err <= 0.01,
         fmt("noon slope %.4f (2.00 +- 0.02), phase/fockz0 vs 2/3 off %.2e "
             "(limit 1e-2)",
             slope, worst_ratio_err));
  return rows;
}

// Criterion 10: every unflagged cell is stable under node doubling.
void criterion_10(const std::vector<std::vector<SweepRow>>& rows) {
  const auto td = std::chrono::steady_clock::now();
  double worst_shift = 0.0;
  for (size_t fam = 0; fam < rows.size(); ++fam)
    for (const SweepRow& row : rows[fam]) {
      if (!row.flag.empty()) continue;
      DistinguishabilityQuery q;
      q.probe = make_probe(SpinJ(row.n), sweep_families()[fam].make(row.n));
      q.chi = row.chi;
      q.delta = row.delta;
      q.quadrature.nodes_per_axis = 2 * default_nodes(row.n, row.delta);
      const double refined = disting(q).value;
      worst_shift = std::max(
          worst_shift, std::abs(refined - row.result.value) /
                           std::max(std::abs(row.result.value), 1e-300));
    }
  report(10, worst_shift <= 1e-6,
         fmt("node doubling, worst rel shift %.3e (limit 1e-6), %.0f s",
             worst_shift, seconds_since(td)));
}

// Criterion 7: the grid estimator's empirical MSE respects the bound.
void criterion_7() {
  const auto t0 = std::chrono::steady_clock::now();
  const SpinState probe =
      make_probe(SpinJ(10), ProbeFamily::phase_state(0.5 * kPi));
  Window window{1.0, 0.6};
  const EstimationRun run =
      mse_experiment(probe, 1.0, window, 100, 2000, 42, 601);
  double var = 0.0;
  for (double e : run.estimates) {
    const double sq = (e - 1.0) * (e - 1.0);
    var += (sq - run.empirical_mse) * (sq - run.empirical_mse);
  }
  const double se = std::sqrt(var / run.estimates.size() /
                              run.estimates.size());
  const double elapsed = seconds_since(t0);
  report(7,
         run.empirical_mse >= run.crb - 3.0 * se && elapsed < 60.0,
         fmt("mse/crb %.4f, slack %.1f se, %.1f s (limit 60 s)",
             run.empirical_mse / run.crb,
             (run.empirical_mse - run.crb) / se, elapsed));
}

// Criterion 8: exact misidentification exponents approach the relative
// entropy monotonically, and Monte Carlo agrees within binomial error.
void criterion_8() {
  MeasurementDistribution p1{SpinJ(1), Vec(2)}, p2{SpinJ(1), Vec(2)};
  p1.probs << 0.5, 0.5;
  p2.probs << 0.25, 0.75;
  const double s = kl_divergence(p1, p2).bits;

  std::vector<double> gaps;
  for (int k : {100, 200, 400}) {
    const double p = exact_binary_misid(p1, p2, k);
    gaps.push_back(std::abs(-std::log2(p) / k - s));
  }
  const bool shrinking = gaps[0] > gaps[1] && gaps[1] > gaps[2];

  const int trials = 200000;
  bool mc_ok = true;
  double worst_dev = 0.0;
  for (int k : {12, 100}) {
    const double exact = exact_binary_misid(p1, p2, k);
    const MisidResult r = misid_experiment(p1, p2, k, trials, 4242);
    const double se = std::sqrt(exact * (1.0 - exact) / trials);
    const double dev = std::abs(r.p_empirical - exact) / se;
    worst_dev = std::max(worst_dev, dev);
    mc_ok = mc_ok && dev <= 3.0;
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "exponent gaps %.4f > %.4f > %.4f, mc within %.2f se "
                "(limit 3)",
                gaps[0], gaps[1], gaps[2], worst_dev);
  report(8, shrinking && mc_ok, buf);
}

// Criterion 9: random probes never exceed the information ceiling n^2.
void criterion_9() {
  double worst_excess = -1e300;
  for (int two_j = 1; two_j <= 20; ++two_j) {
    SpinJ j(two_j);
    const double ceiling = double(two_j) * two_j + 1e-8;
    for (int t = 0; t < 1000; ++t) {
      auto eng = substream_engine(777, two_j * 1000ULL + t);
      const SpinState probe = random_probe(j, eng);
      const double val = fisher_energy_discrepancy(probe, 0.0).value;
      worst_excess = std::max(worst_excess, val - ceiling);
    }
  }
  report(9, worst_excess <= 0.0,
         fmt("1000 random probes per dimension, worst value-minus-ceiling "
             "%.3e (limit 0)",
             worst_excess));
}

int main() {
  criteria_1_2();
  criterion_3();
  criterion_4();
  const auto sweep_rows = criteria_5_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10(sweep_rows);
  std::printf("acceptance: %d of 10 criteria pass\n", 10 - failures);
  return failures;
}
