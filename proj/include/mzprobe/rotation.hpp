#pragma once

#include "mzprobe/types.hpp"

#include <memory>

namespace mz {

// Caches the Jy eigenstructure once per j; evolve is then O(dim^2) per angle.
// Immutable after construction; safe to share across threads.
class RotationEngine {
 public:
  explicit RotationEngine(SpinJ j);

  SpinJ j() const { return j_; }
  // Columns are Jy eigenvectors ascending in m (the beam-splitter unitary).
  const CMat& basis() const { return v_; }
  const CMat& jy() const { return jy_; }

  // exp(i Jy theta) |psi>, computed as V diag(e^{i m theta}) V^dagger psi.
  SpinState evolve(const SpinState& state, double theta) const;

  // i Jy |psi>, the generator derivative of evolve at theta = 0.
  SpinState state_derivative(const SpinState& state) const;

 private:
  SpinJ j_;
  CMat v_;
  CMat jy_;
};

// Shared immutable engine per dimension; avoids re-deriving the eigenbasis
// in angle sweeps that construct probes on the fly.
std::shared_ptr<const RotationEngine> shared_engine(SpinJ j);

// Entries <j,m'| e^{i Jy theta} |j,m>, a real orthogonal matrix.
// Computed by the log-gamma Wigner sum, independent of RotationEngine.
Mat wigner_d(SpinJ j, double theta);

// General matrix exponential by scaling and squaring with a Taylor core.
CMat matrix_exp(const CMat& a);

// exp(i Jx pi/2) exp(i Jz theta) exp(-i Jx pi/2) |psi>, each factor via
// matrix_exp. Equals evolve(state, +theta) up to global phase; the sign was
// fixed once numerically and is locked by tests.
SpinState mz_three_stage(const SpinState& state, double theta);

}  // namespace mz
