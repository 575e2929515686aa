#pragma once

#include "mzprobe/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mz {

enum class QuadratureRule { GaussLegendre, Trapezoid };

struct QuadratureSpec {
  // 0 selects the default resolution max(48, ceil(12 n delta / pi)).
  int nodes_per_axis = 0;
  QuadratureRule rule = QuadratureRule::GaussLegendre;
};

struct DistinguishabilityQuery {
  SpinState probe;
  double chi = 0.0;
  double delta = 0.0;
  QuadratureSpec quadrature;
};

struct DistinguishabilityResult {
  // Mean relative entropy over the window, bits.
  double value = 0.0;
  // Fraction of the (outcome x angle) measure inside floor-clamp zones.
  double clamped_fraction = 0.0;
  long nodes_used = 0;
};

// Default node budget for window width delta at photon number n.
int default_nodes(int n, double delta);

// Mean of S[P(theta1)||P(theta2)] over the window [chi-delta/2, chi+delta/2]^2.
// Evaluated per outcome as the weighted covariance between p_m and log2 p_m;
// the two averages factor, and the covariance form is cancellation-free.
// Throws InvalidInterval unless 0 < delta < 2 pi.
DistinguishabilityResult disting(const DistinguishabilityQuery& q);

// Small-window limit: delta^2 [J(chi-delta/2) + J(chi+delta/2)] / (24 ln 2).
double local_approx(const SpinState& probe, double chi, double delta);

struct SweepRow {
  ProbeFamily family;
  int n = 0;
  double chi = 0.0;
  double delta = 0.0;
  DistinguishabilityResult result;
  // Empty on success; otherwise the error name for the skipped cell.
  std::string flag;
};

// Cartesian product over (n, chi, delta) for one family; invalid cells are
// flagged rows, not errors. Cells are evaluated concurrently; row order is
// the deterministic grid order regardless of scheduling.
std::vector<SweepRow> disting_sweep(const ProbeFamily& family,
                                    const std::vector<int>& n_list,
                                    const std::vector<double>& chi_list,
                                    const std::vector<double>& delta_list,
                                    const QuadratureSpec& quadrature = {});

// Variant with an n-dependent family, e.g. fockz with m tracking +j.
std::vector<SweepRow> disting_sweep(
    const std::function<ProbeFamily(int)>& family_of,
    const std::vector<int>& n_list, const std::vector<double>& chi_list,
    const std::vector<double>& delta_list,
    const QuadratureSpec& quadrature = {});

namespace detail {

// One outcome's probability as a polynomial on the unit circle:
// ln p(theta) = 2 (log_lead + sum_k ln|e^{i theta} - root_k|).
struct OutcomePoly {
  double log_lead = 0.0;
  std::vector<Complex> roots;
};

// Roots of sum_s c_s z^s. Ends with |c| <= 1e-250 max|c| are stripped;
// two-term polynomials get analytic circle roots; the rest use a balanced
// companion-matrix eigensolve.
std::vector<Complex> poly_roots(const std::vector<Complex>& coeffs);

// Outcome polynomials of p_m(theta) for a probe under the phase evolution.
std::vector<OutcomePoly> outcome_polynomials(const SpinState& probe);

double lnp_eval(double theta, const OutcomePoly& poly);

// Panel mesh over [a, b]: uniform base panels with cuts near refinement
// targets dropped, then geometric halving ladders toward each target.
std::vector<double> build_panels(double a, double b,
                                 const std::vector<double>& targets,
                                 int base_panels, double min_width);

// Evaluator entry point on prepared polynomials; dim is the outcome count
// of the underlying distribution (normalizes clamped_fraction).
DistinguishabilityResult disting_polys(const std::vector<OutcomePoly>& polys,
                                       int dim, double chi, double delta,
                                       const QuadratureSpec& quadrature,
                                       int n_for_default);

}  // namespace detail

}  // namespace mz
