#include "mzprobe/disting.hpp"

#include "mzprobe/fisher.hpp"
#include "mzprobe/spin.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

namespace mz {

namespace detail {

namespace {

const double kLn2 = std::log(2.0);
const double kLnEpsZero = std::log(kEpsZero);
const double kLnEpsFloor = std::log(kEpsFloor);
const double kLog2EpsFloor = std::log2(kEpsFloor);

// Coefficient magnitudes below this fraction of the largest are treated as
// structural zeros when classifying the polynomial's ends and term count.
constexpr double kCoeffStrip = 1e-250;

// Interior coefficients this far below the largest cannot move a near-circle
// root by more than the representation noise already carried by the large
// coefficients; a polynomial whose interior sits under this line is handled
// as two-term so its fringe roots land exactly on the circle.
constexpr double kTwoTermRel = 1e-14;

struct GL12 {
  double x, w;
};
constexpr GL12 kGl12[12] = {
    {-9.81560634246719244e-01, 4.71753363865120220e-02},
    {-9.04117256370474798e-01, 1.06939325995318885e-01},
    {-7.69902674194304693e-01, 1.60078328543346110e-01},
    {-5.87317954286617483e-01, 2.03167426723065647e-01},
    {-3.67831498998180184e-01, 2.33492536538354639e-01},
    {-1.25233408511468913e-01, 2.49147045813402690e-01},
    {1.25233408511468913e-01, 2.49147045813402690e-01},
    {3.67831498998180184e-01, 2.33492536538354639e-01},
    {5.87317954286617483e-01, 2.03167426723065647e-01},
    {7.69902674194304693e-01, 1.60078328543346110e-01},
    {9.04117256370474798e-01, 1.06939325995318885e-01},
    {9.81560634246719244e-01, 4.71753363865120220e-02},
};

// EISPACK-style radix-2 balancing; similarity transform, eigenvalues kept.
void balance(CMat& a) {
  const int n = static_cast<int>(a.rows());
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (int k = 0; k < n; ++k) {
        if (k == i) continue;
        c += std::abs(a(k, i));
        r += std::abs(a(i, k));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      while (c < r / 2.0) {
        f *= 2.0;
        c *= 4.0;
      }
      while (c >= r * 2.0) {
        f /= 2.0;
        c /= 4.0;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

std::vector<Complex> companion_roots(const std::vector<Complex>& cc) {
  const int n = static_cast<int>(cc.size()) - 1;
  CMat a = CMat::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) a(i + 1, i) = 1.0;
  for (int i = 0; i < n; ++i) a(i, n - 1) = -cc[i] / cc[n];
  balance(a);
  Eigen::ComplexEigenSolver<CMat> es(a, false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("companion eigensolve failed");
  std::vector<Complex> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = es.eigenvalues()(i);
  return roots;
}

}  // namespace

std::vector<Complex> poly_roots(const std::vector<Complex>& coeffs) {
  double mx = 0.0;
  for (const Complex& c : coeffs) mx = std::max(mx, std::abs(c));
  if (mx <= 0.0) return {};
  const double cut = kCoeffStrip * mx;
  int lo = 0, hi = static_cast<int>(coeffs.size());
  while (lo < hi && std::abs(coeffs[lo]) <= cut) ++lo;
  while (hi > lo && std::abs(coeffs[hi - 1]) <= cut) --hi;
  std::vector<Complex> cc(coeffs.begin() + lo, coeffs.begin() + hi);
  if (cc.size() <= 1) return {};
  std::vector<int> nz;
  for (int s = 0; s < static_cast<int>(cc.size()); ++s)
    if (std::abs(cc[s]) > cut) nz.push_back(s);
  const auto two_term = [&](int s1, int s2) {
    // k-th roots of -c_{s1}/c_{s2}, exact on the circle when the magnitudes
    // match (the two-peak fringe case).
    const int k = s2 - s1;
    const Complex ratio = -cc[s1] / cc[s2];
    const double r = std::pow(std::abs(ratio), 1.0 / k);
    const double ph0 = std::arg(ratio) / k;
    std::vector<Complex> roots(k);
    for (int i = 0; i < k; ++i) {
      const double ph = ph0 + 2.0 * kPi * i / k;
      roots[i] = Complex(r * std::cos(ph), r * std::sin(ph));
    }
    return roots;
  };
  if (nz.size() == 2) return two_term(nz[0], nz[1]);
  const int last = static_cast<int>(cc.size()) - 1;
  if (std::abs(cc[0]) > kTwoTermRel * mx &&
      std::abs(cc[last]) > kTwoTermRel * mx) {
    bool interior_negligible = true;
    for (int s = 1; s < last && interior_negligible; ++s)
      interior_negligible = std::abs(cc[s]) <= kTwoTermRel * mx;
    const double end_ratio = std::abs(cc[0]) / std::abs(cc[last]);
    if (interior_negligible && end_ratio > 1e-2 && end_ratio < 1e2)
      return two_term(0, last);
  }
  return companion_roots(cc);
}

namespace {

// log|leading coefficient| of the end-stripped polynomial, or nothing when
// all coefficients vanish.
std::optional<double> poly_log_lead(const std::vector<Complex>& coeffs) {
  double mx = 0.0;
  for (const Complex& c : coeffs) mx = std::max(mx, std::abs(c));
  if (mx <= 0.0) return std::nullopt;
  const double cut = kCoeffStrip * mx;
  for (int s = static_cast<int>(coeffs.size()) - 1; s >= 0; --s)
    if (std::abs(coeffs[s]) > cut) return std::log(std::abs(coeffs[s]));
  return std::nullopt;
}

}  // namespace

std::vector<OutcomePoly> outcome_polynomials(const SpinState& probe) {
  const CMat v = y_eigenbasis(probe.j);
  const CVec y = v.adjoint() * probe.amps;
  const int d = probe.j.dim();
  std::vector<OutcomePoly> polys;
  polys.reserve(d);
  for (int mi = 0; mi < d; ++mi) {
    std::vector<Complex> coeffs(d);
    for (int s = 0; s < d; ++s) coeffs[s] = v(mi, s) * y(s);
    OutcomePoly poly;
    const auto lead = poly_log_lead(coeffs);
    if (!lead) {
      poly.log_lead = -std::numeric_limits<double>::infinity();
    } else {
      poly.log_lead = *lead;
      poly.roots = poly_roots(coeffs);
    }
    polys.push_back(std::move(poly));
  }
  return polys;
}

double lnp_eval(double theta, const OutcomePoly& poly) {
  const Complex z(std::cos(theta), std::sin(theta));
  double acc = poly.log_lead;
  for (const Complex& r : poly.roots) {
    const double dist = std::max(std::abs(z - r), 1e-320);
    acc += std::log(dist);
  }
  return 2.0 * acc;
}

namespace {

using Panel = std::pair<double, double>;

// Geometric halving panels refining toward one end, innermost >= min_width.
void ladder(double lo, double hi, bool toward_lo, double min_width,
            std::vector<Panel>& out) {
  const double w = hi - lo;
  if (w <= 4.0 * min_width) {
    out.emplace_back(lo, hi);
    return;
  }
  const int nlev =
      std::max(1, static_cast<int>(std::ceil(std::log2(w / min_width))) - 1);
  if (toward_lo) {
    double x = hi;
    for (int lev = 0; lev < nlev; ++lev) {
      const double nx = lo + (x - lo) / 2.0;
      out.emplace_back(nx, x);
      x = nx;
      if (x - lo <= 2.0 * min_width) break;
    }
    out.emplace_back(lo, x);
  } else {
    double x = lo;
    for (int lev = 0; lev < nlev; ++lev) {
      const double nx = hi - (hi - x) / 2.0;
      out.emplace_back(x, nx);
      x = nx;
      if (hi - x <= 2.0 * min_width) break;
    }
    out.emplace_back(x, hi);
  }
}

}  // namespace

std::vector<double> build_panels_impl(double a, double b,
                                      const std::vector<double>& targets,
                                      int base_panels, double min_width,
                                      std::vector<Panel>& panels) {
  std::vector<double> ts;
  for (double t : targets)
    if (t >= a && t <= b) ts.push_back(t);
  std::sort(ts.begin(), ts.end());
  std::vector<double> merged;
  for (double t : ts) {
    if (!merged.empty() && t - merged.back() < 4.0 * min_width) continue;
    merged.push_back(t);
  }
  const double bw = (b - a) / base_panels;
  const double endtol = std::max(4.0 * min_width, 1e-15 * (b - a));
  for (double& t : merged) {
    if (t <= a + endtol)
      t = a;
    else if (t >= b - endtol)
      t = b;
  }
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

  std::vector<double> cuts;
  cuts.push_back(a);
  for (int i = 1; i < base_panels; ++i) {
    // Base cuts landing near a target would leave sliver panels that defeat
    // the refinement ladder; the target supplies the cut instead.
    const double c = a + (b - a) * i / base_panels;
    bool near = false;
    for (double t : merged)
      if (std::abs(c - t) <= 0.1 * bw) {
        near = true;
        break;
      }
    if (!near) cuts.push_back(c);
  }
  cuts.push_back(b);
  for (double t : merged)
    if (t > a && t < b) cuts.push_back(t);
  std::sort(cuts.begin(), cuts.end());

  auto is_target = [&merged](double x) {
    return std::binary_search(merged.begin(), merged.end(), x);
  };
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    const bool lt = is_target(lo);
    const bool rt = is_target(hi);
    if (!lt && !rt) {
      panels.emplace_back(lo, hi);
    } else if (lt && rt) {
      const double mid = 0.5 * (lo + hi);
      ladder(lo, mid, true, min_width, panels);
      ladder(mid, hi, false, min_width, panels);
    } else {
      ladder(lo, hi, lt, min_width, panels);
    }
  }
  return merged;
}

std::vector<double> build_panels(double a, double b,
                                 const std::vector<double>& targets,
                                 int base_panels, double min_width) {
  std::vector<Panel> panels;
  build_panels_impl(a, b, targets, base_panels, min_width, panels);
  std::vector<double> flat;
  flat.reserve(2 * panels.size());
  for (const Panel& p : panels) {
    flat.push_back(p.first);
    flat.push_back(p.second);
  }
  return flat;
}

namespace {

void panels_to_nodes(const std::vector<Panel>& panels, QuadratureRule rule,
                     std::vector<double>& th, std::vector<double>& w) {
  th.clear();
  w.clear();
  if (rule == QuadratureRule::GaussLegendre) {
    th.reserve(panels.size() * 12);
    w.reserve(panels.size() * 12);
    for (const Panel& p : panels) {
      const double mid = 0.5 * (p.first + p.second);
      const double hw = 0.5 * (p.second - p.first);
      for (const GL12& g : kGl12) {
        th.push_back(mid + hw * g.x);
        w.push_back(hw * g.w);
      }
    }
  } else {
    // Composite trapezoid with 12 intervals per panel.
    constexpr int kIntervals = 12;
    for (const Panel& p : panels) {
      const double h = (p.second - p.first) / kIntervals;
      for (int i = 0; i <= kIntervals; ++i) {
        th.push_back(p.first + h * i);
        w.push_back(h * ((i == 0 || i == kIntervals) ? 0.5 : 1.0));
      }
    }
  }
}

std::vector<double> root_targets(double a, double b,
                                 const std::vector<Complex>& roots,
                                 double margin) {
  std::vector<double> ts;
  for (const Complex& zk : roots) {
    const double r = std::abs(zk);
    if (r < 0.75 || r > 4.0 / 3.0) continue;
    const double ph = std::arg(zk);
    const double k0 = std::floor((a - margin - ph) / (2.0 * kPi));
    for (int dk = 0; dk < 4; ++dk) {
      const double t = ph + 2.0 * kPi * (k0 + dk);
      if (t >= a - margin && t <= b + margin)
        ts.push_back(std::min(std::max(t, a), b));
    }
  }
  return ts;
}

// x_out has ln p >= threshold, x_in below; returns the crossing abscissa
// approached from the outside.
double bisect_cross(double x_out, double x_in, const OutcomePoly& poly,
                    double threshold) {
  if (lnp_eval(x_out, poly) - threshold < 0.0) return x_out;
  double lo = x_out, hi = x_in;
  for (int it = 0; it < 90; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (lnp_eval(mid, poly) - threshold >= 0.0)
      lo = mid;
    else
      hi = mid;
    if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(hi))) break;
  }
  return lo;
}

struct OutcomeAccum {
  double t = 0.0;
  double mu_active = 0.0;
  double mu_clamped = 0.0;
  long nodes = 0;
};

OutcomeAccum accumulate_outcome(const OutcomePoly& poly, double a, double b,
                                int base_panels, double min_width,
                                QuadratureRule rule) {
  OutcomeAccum acc;
  const double delta = b - a;
  std::vector<double> targets = root_targets(a, b, poly.roots, 0.05 * delta);

  std::vector<Panel> panels;
  build_panels_impl(a, b, targets, base_panels, min_width, panels);
  std::vector<double> th, w;
  panels_to_nodes(panels, rule, th, w);

  std::vector<double> lnp(th.size());
  for (size_t i = 0; i < th.size(); ++i) lnp[i] = lnp_eval(th[i], poly);

  double zone_width = 0.0;
  bool any_below = false;
  for (double v : lnp)
    if (v < kLnEpsFloor) {
      any_below = true;
      break;
    }
  if (any_below) {
    // Locate the floor-clamp zones on the theta-sorted node sequence,
    // excise them, and re-mesh the retained subintervals grading toward
    // the zone edges. Zones contribute width * log2(eps_floor) to the
    // log-average and nothing to the probability side.
    std::vector<size_t> order(th.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&th](size_t x, size_t y) { return th[x] < th[y]; });
    std::vector<Panel> zones;
    size_t i = 0;
    while (i < order.size()) {
      if (lnp[order[i]] < kLnEpsFloor) {
        const size_t j0 = i;
        while (i < order.size() && lnp[order[i]] < kLnEpsFloor) ++i;
        const double lo =
            j0 > 0 ? bisect_cross(th[order[j0 - 1]], th[order[j0]], poly,
                                  kLnEpsFloor)
                   : a;
        const double hi =
            i < order.size()
                ? bisect_cross(th[order[i]], th[order[i - 1]], poly,
                               kLnEpsFloor)
                : b;
        zones.emplace_back(std::min(lo, hi), std::max(lo, hi));
      } else {
        ++i;
      }
    }
    std::sort(zones.begin(), zones.end());
    std::vector<Panel> mzones;
    for (const Panel& z : zones) {
      if (!mzones.empty() && z.first <= mzones.back().second)
        mzones.back().second = std::max(mzones.back().second, z.second);
      else
        mzones.push_back(z);
    }
    for (const Panel& z : mzones) zone_width += z.second - z.first;

    panels.clear();
    std::vector<double> edges;
    edges.push_back(a);
    for (const Panel& z : mzones) {
      edges.push_back(z.first);
      edges.push_back(z.second);
    }
    edges.push_back(b);
    for (size_t e = 0; e + 1 < edges.size(); e += 2) {
      const double lo = edges[e], hi = edges[e + 1];
      if (hi - lo < 2.0 * min_width) continue;
      std::vector<double> sub_t;
      for (double t : targets)
        if (t >= lo && t <= hi) sub_t.push_back(t);
      for (double edge : {lo, hi})
        if (edge > a && edge < b) sub_t.push_back(edge);
      const int p0s = std::max(
          2, static_cast<int>(std::ceil(base_panels * (hi - lo) / (b - a))));
      build_panels_impl(lo, hi, sub_t, p0s, min_width, panels);
    }
    panels_to_nodes(panels, rule, th, w);
    lnp.resize(th.size());
    for (size_t k = 0; k < th.size(); ++k) lnp[k] = lnp_eval(th[k], poly);
  }

  acc.nodes = static_cast<long>(th.size());

  double sum_w = 0.0, sum_wl = 0.0;
  for (size_t k = 0; k < th.size(); ++k) {
    sum_w += w[k];
    sum_wl += w[k] * std::max(lnp[k] / kLn2, kLog2EpsFloor);
  }
  // Averages divide by the realized measure, not the nominal width: the
  // quadrature weights reproduce the interval only to ~1e-12 relative, and
  // that error is amplified ~1e8x through the covariance at small widths.
  const double total = sum_w + zone_width;
  if (!(total > 0.0)) return acc;
  const double lbar = (sum_wl + kLog2EpsFloor * zone_width) / total;

  double t_sum = 0.0, mu_active = 0.0, mu_clamped = zone_width;
  bool any_active = false;
  for (size_t k = 0; k < th.size(); ++k) {
    const double p = lnp[k] < -745.0 ? 0.0 : std::exp(lnp[k]);
    const double l = std::max(lnp[k] / kLn2, kLog2EpsFloor);
    if (lnp[k] < kLnEpsFloor) mu_clamped += w[k];
    if (p > kEpsZero) {
      any_active = true;
      mu_active += w[k];
      t_sum += w[k] * p * (l - lbar);
    }
  }
  if (any_active) {
    acc.t = t_sum / total;
    acc.mu_active = mu_active;
    acc.mu_clamped = mu_clamped;
  }
  return acc;
}

}  // namespace

DistinguishabilityResult disting_polys(const std::vector<OutcomePoly>& polys,
                                       int dim, double chi, double delta,
                                       const QuadratureSpec& quadrature,
                                       int n_for_default) {
  if (!(delta > 0.0) || !(delta < 2.0 * kPi))
    throw InvalidInterval("window width must lie in (0, 2 pi)");
  int nodes = quadrature.nodes_per_axis;
  if (nodes == 0) nodes = default_nodes(n_for_default, delta);
  if (nodes < 8)
    throw std::invalid_argument("nodes_per_axis must be at least 8");
  const int base_panels =
      std::max(4, static_cast<int>(std::ceil(nodes / 12.0)));
  const double min_width = 1e-12 * delta;
  const double a = chi - 0.5 * delta;
  const double b = chi + 0.5 * delta;

  DistinguishabilityResult out;
  double clamp_measure = 0.0;
  double value = 0.0;
  for (const OutcomePoly& poly : polys) {
    if (!std::isfinite(poly.log_lead)) continue;
    double bound = poly.log_lead;
    for (const Complex& r : poly.roots) bound += std::log1p(std::abs(r));
    if (2.0 * bound < kLnEpsZero) continue;
    const OutcomeAccum acc =
        accumulate_outcome(poly, a, b, base_panels, min_width,
                           quadrature.rule);
    value += acc.t;
    out.nodes_used += acc.nodes;
    clamp_measure += acc.mu_active * acc.mu_clamped;
  }
  out.value = std::max(value, 0.0);
  out.clamped_fraction = clamp_measure / (delta * delta * dim);
  return out;
}

}  // namespace detail

int default_nodes(int n, double delta) {
  return std::max(48, static_cast<int>(std::ceil(12.0 * n * delta / kPi)));
}

DistinguishabilityResult disting(const DistinguishabilityQuery& q) {
  if (!(q.delta > 0.0) || !(q.delta < 2.0 * kPi))
    throw InvalidInterval("window width must lie in (0, 2 pi)");
  const auto polys = detail::outcome_polynomials(q.probe);
  return detail::disting_polys(polys, q.probe.j.dim(), q.chi, q.delta,
                               q.quadrature, q.probe.j.two_j);
}

double local_approx(const SpinState& probe, double chi, double delta) {
  if (!(delta > 0.0)) throw InvalidInterval("window width must be positive");
  const double j1 = fisher_prob_derivative(probe, chi - 0.5 * delta).value;
  const double j2 = fisher_prob_derivative(probe, chi + 0.5 * delta).value;
  return delta * delta * (j1 + j2) / (24.0 * std::log(2.0));
}

std::vector<SweepRow> disting_sweep(const ProbeFamily& family,
                                    const std::vector<int>& n_list,
                                    const std::vector<double>& chi_list,
                                    const std::vector<double>& delta_list,
                                    const QuadratureSpec& quadrature) {
  return disting_sweep([&](int) { return family; }, n_list, chi_list,
                       delta_list, quadrature);
}

std::vector<SweepRow> disting_sweep(
    const std::function<ProbeFamily(int)>& family_of,
    const std::vector<int>& n_list, const std::vector<double>& chi_list,
    const std::vector<double>& delta_list, const QuadratureSpec& quadrature) {
  struct Cell {
    size_t row;
    int n;
    double chi, delta;
  };
  std::vector<SweepRow> rows(n_list.size() * chi_list.size() *
                             delta_list.size());
  std::vector<std::vector<Cell>> by_n;
  size_t idx = 0;
  for (int n : n_list) {
    by_n.emplace_back();
    for (double chi : chi_list)
      for (double delta : delta_list)
        by_n.back().push_back(Cell{idx++, n, chi, delta});
  }

  auto run_group = [&](const std::vector<Cell>& cells) {
    // One probe and one root set per n, shared across the (chi, delta) grid.
    const int n = cells.front().n;
    const ProbeFamily family = family_of(n);
    std::vector<detail::OutcomePoly> polys;
    std::string prep_flag;
    int dim = 0;
    try {
      SpinJ j(n);
      const SpinState probe = make_probe(j, family);
      polys = detail::outcome_polynomials(probe);
      dim = j.dim();
    } catch (const InvalidM&) {
      prep_flag = "InvalidM";
    } catch (const UnsupportedDimension&) {
      prep_flag = "UnsupportedDimension";
    }
    for (const Cell& cell : cells) {
      SweepRow& row = rows[cell.row];
      row.family = family;
      row.n = cell.n;
      row.chi = cell.chi;
      row.delta = cell.delta;
      row.flag = prep_flag;
      if (!prep_flag.empty()) continue;
      try {
        row.result = detail::disting_polys(polys, dim, cell.chi, cell.delta,
                                           quadrature, cell.n);
      } catch (const InvalidInterval&) {
        row.flag = "InvalidInterval";
      } catch (const std::exception&) {
        row.flag = "EvaluationFailed";
      }
    }
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(by_n.size())));
  if (workers <= 1 || by_n.size() <= 1) {
    for (const auto& group : by_n) run_group(group);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t)
      pool.emplace_back([&]() {
        for (;;) {
          const size_t g = next.fetch_add(1);
          if (g >= by_n.size()) return;
          run_group(by_n[g]);
        }
      });
    for (std::thread& t : pool) t.join();
  }
  return rows;
}

}  // namespace mz
