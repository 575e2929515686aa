#include "mzprobe/fisher.hpp"

#include "mzprobe/spin.hpp"

#include <cmath>

namespace mz {

namespace {
// Probabilities below this use the degenerate-outcome limit rule.
constexpr double kDegenerate = 1e-14;
}  // namespace

FisherResult fisher_prob_derivative(const RotationEngine& engine,
                                    const SpinState& probe, double theta) {
  const SpinState psi = engine.evolve(probe, theta);
  const SpinState dpsi = engine.state_derivative(psi);
  FisherResult out;
  out.method = FisherMethod::ProbDerivative;
  out.theta = theta;
  for (int i = 0; i < psi.amps.size(); ++i) {
    const double p = std::norm(psi.amps(i));
    const double pdot = 2.0 * (std::conj(psi.amps(i)) * dpsi.amps(i)).real();
    if (p < kDegenerate) {
      // p(theta + d) ~ |psidot|^2 d^2, so pdot^2/p -> 4 |psidot|^2.
      out.value += 4.0 * std::norm(dpsi.amps(i));
      ++out.degenerate_terms;
    } else {
      out.value += pdot * pdot / p;
    }
  }
  return out;
}

FisherResult fisher_prob_derivative(const SpinState& probe, double theta) {
  return fisher_prob_derivative(*shared_engine(probe.j), probe, theta);
}

FisherResult fisher_energy_discrepancy(const RotationEngine& engine,
                                       const SpinState& probe, double theta) {
  const SpinState psi = engine.evolve(probe, theta);
  const SpinState dpsi = engine.state_derivative(psi);
  FisherResult out;
  out.method = FisherMethod::EnergyDiscrepancy;
  out.theta = theta;
  // <psidot|psidot> = <Jy^2> under the unitary flow.
  const double jy2 = dpsi.amps.squaredNorm();
  double classical = 0.0;
  for (int i = 0; i < psi.amps.size(); ++i) {
    const double r2 = std::norm(psi.amps(i));
    if (r2 < kDegenerate) {
      ++out.degenerate_terms;
      continue;
    }
    const double num = (std::conj(psi.amps(i)) * dpsi.amps(i)).imag();
    classical += num * num / r2;
  }
  out.value = 4.0 * (jy2 - classical);
  if (out.value < 0.0) out.value = 0.0;
  return out;
}

FisherResult fisher_energy_discrepancy(const SpinState& probe, double theta) {
  return fisher_energy_discrepancy(*shared_engine(probe.j), probe, theta);
}

FisherResult closed_form_fisher(const ProbeFamily& family, SpinJ j) {
  FisherResult out;
  out.method = FisherMethod::ClosedForm;
  const double jj = j.j() * (j.j() + 1.0);
  switch (family.kind) {
    case ProbeFamily::Kind::Noon:
      out.value = static_cast<double>(j.two_j) * j.two_j;
      return out;
    case ProbeFamily::Kind::FockZ: {
      j.index_of_two_m(family.two_m);
      const double m = 0.5 * family.two_m;
      out.value = 2.0 * (jj - m * m);
      return out;
    }
    case ProbeFamily::Kind::PhaseState:
      out.value = (4.0 / 3.0) * jj;
      return out;
  }
  throw UnsupportedFamily("unknown probe family tag");
}

double cramer_rao_bound(const FisherResult& f, int k) {
  if (k < 1) throw InvalidInterval("k must be positive");
  if (f.value <= kEpsFloor)
    throw ZeroInformation("Fisher information is numerically zero");
  return 1.0 / (k * f.value);
}

}  // namespace mz
