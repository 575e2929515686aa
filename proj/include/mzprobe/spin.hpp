#pragma once

#include "mzprobe/types.hpp"

namespace mz {

struct Generators {
  CMat jx, jy, jz, jsq;
};

// Ladder construction in the Jz basis: Jz = diag(m), (J+)_{i+1,i} =
// sqrt(j(j+1) - m(m+1)), Jx = (J+ + J-)/2, Jy = (J+ - J-)/(2i).
// Satisfies [Jx, Jy] = i Jz and Jsq = j(j+1) I.
Generators make_generators(SpinJ j);

// Basis state |j,m>_z. Throws InvalidM unless |m| <= j and j - m is integer.
SpinState make_fock_z(SpinJ j, int two_m);

// Unitary whose columns are |j,m>_y in the Jz basis, ascending m.
// Equal to exp(i Jx pi/2), the beam-splitter transport of the z basis;
// this fixes all column phases at once and makes the NOON fringe formula
// hold with an unshifted relative phase.
CMat y_eigenbasis(SpinJ j);

// (|j,+j>_y + e^{i zeta} |j,-j>_y)/sqrt(2) in the Jz basis.
SpinState make_noon(SpinJ j, double zeta = 0.0);

// (2j+1)^{-1/2} sum_m e^{i m gamma} |j,m>_y in the Jz basis.
SpinState make_phase_state(SpinJ j, double gamma);

// Probe constructor dispatch on family tag.
SpinState make_probe(SpinJ j, const ProbeFamily& family);

// <psi|op|psi> for Hermitian op. Throws DimensionMismatch on size mismatch,
// NonHermitian if max|op - op^dagger| > 1e-12, and discards the residual
// imaginary part after checking it is below 1e-12.
double expectation(const SpinState& state, const CMat& op);

}  // namespace mz
