#pragma once

#include "mzprobe/rotation.hpp"
#include "mzprobe/types.hpp"

namespace mz {

enum class FisherMethod { ProbDerivative, EnergyDiscrepancy, ClosedForm };

struct FisherResult {
  double value = 0.0;
  FisherMethod method = FisherMethod::ClosedForm;
  double theta = 0.0;
  // Outcomes handled by the zero-probability limit rule.
  int degenerate_terms = 0;
};

// sum_m pdot_m^2 / p_m with pdot = 2 Re(psi* psidot), psidot = i Jy psi.
// Outcomes with p_m < 1e-14 use the limit value 4|psidot_m|^2, which is
// exact when psi_m = 0.
FisherResult fisher_prob_derivative(const RotationEngine& engine,
                                    const SpinState& probe, double theta);
FisherResult fisher_prob_derivative(const SpinState& probe, double theta);

// 4(<Jy^2> - sum_m r_m^2 phidot_m^2) with phidot = Im(psi* psidot)/r^2.
// Outcomes with r^2 < 1e-14 are excluded from the classical sum and counted
// in degenerate_terms.
FisherResult fisher_energy_discrepancy(const RotationEngine& engine,
                                       const SpinState& probe, double theta);
FisherResult fisher_energy_discrepancy(const SpinState& probe, double theta);

// Noon -> 4j^2; FockZ(m) -> 2[j(j+1) - m^2]; PhaseState -> (4/3) j(j+1).
FisherResult closed_form_fisher(const ProbeFamily& family, SpinJ j);

// 1/(k * value); throws ZeroInformation when value <= kEpsFloor.
double cramer_rao_bound(const FisherResult& f, int k);

}  // namespace mz
