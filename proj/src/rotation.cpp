#include "mzprobe/rotation.hpp"

#include "mzprobe/spin.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace mz {

RotationEngine::RotationEngine(SpinJ j) : j_(j) {
  v_ = y_eigenbasis(j);
  jy_ = make_generators(j).jy;
}

SpinState RotationEngine::evolve(const SpinState& state, double theta) const {
  if (state.amps.size() != j_.dim())
    throw DimensionMismatch("state does not match engine dimension");
  CVec y = v_.adjoint() * state.amps;
  for (int i = 0; i < j_.dim(); ++i)
    y(i) *= std::exp(Complex(0.0, j_.m(i) * theta));
  return {j_, v_ * y};
}

SpinState RotationEngine::state_derivative(const SpinState& state) const {
  if (state.amps.size() != j_.dim())
    throw DimensionMismatch("state does not match engine dimension");
  return {j_, Complex(0.0, 1.0) * (jy_ * state.amps)};
}

std::shared_ptr<const RotationEngine> shared_engine(SpinJ j) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const RotationEngine>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[j.two_j];
  if (!slot) slot = std::make_shared<const RotationEngine>(j);
  return slot;
}

namespace {

double lg(int n) { return std::lgamma(n + 1.0); }

// d^j_{ab}(beta) by the alternating factorial sum, doubled-index arguments.
double wigner_d_entry(int two_j, int two_a, int two_b, double beta) {
  const int jpb = (two_j + two_b) / 2;
  const int jmb = (two_j - two_b) / 2;
  const int jpa = (two_j + two_a) / 2;
  const int jma = (two_j - two_a) / 2;
  const double logpre = 0.5 * (lg(jpb) + lg(jmb) + lg(jpa) + lg(jma));
  const double c = std::cos(0.5 * beta);
  const double s = std::sin(0.5 * beta);
  const int klo = std::max(0, (two_b - two_a) / 2);
  const int khi = std::min(jpb, jma);
  double sum = 0.0;
  for (int k = klo; k <= khi; ++k) {
    const int cos_pow = jpb - k + jma - k;
    const int sin_pow = 2 * k + (two_a - two_b) / 2;
    const double logterm = logpre - lg(jpb - k) - lg(k) - lg(jma - k) -
                           lg(k + (two_a - two_b) / 2);
    const double sign = (k + (two_a - two_b) / 2) % 2 == 0 ? 1.0 : -1.0;
    sum += sign * std::exp(logterm) * std::pow(c, cos_pow) *
           std::pow(s, sin_pow);
  }
  return sum;
}

}  // namespace

Mat wigner_d(SpinJ j, double theta) {
  const int d = j.dim();
  Mat out(d, d);
  // Entry (i', i) is <m'|e^{+i theta Jy}|m> = d^j_{m m'}(theta).
  for (int ip = 0; ip < d; ++ip)
    for (int i = 0; i < d; ++i)
      out(ip, i) = wigner_d_entry(j.two_j, j.two_m(i), j.two_m(ip), theta);
  return out;
}

CMat matrix_exp(const CMat& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.25) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  }
  const CMat b = a / std::pow(2.0, squarings);
  const int d = static_cast<int>(a.rows());
  CMat term = CMat::Identity(d, d);
  CMat sum = term;
  for (int k = 1; k <= 60; ++k) {
    term = (term * b) / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18 * sum.cwiseAbs().maxCoeff()) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

SpinState mz_three_stage(const SpinState& state, double theta) {
  const SpinJ j = state.j;
  if (state.amps.size() != j.dim())
    throw DimensionMismatch("state amplitudes do not match its dimension");
  const Generators g = make_generators(j);
  const Complex iu(0.0, 1.0);
  const CMat bs_in = matrix_exp(-iu * (0.5 * kPi) * g.jx);
  const CMat phase = matrix_exp(iu * theta * g.jz);
  const CMat bs_out = matrix_exp(iu * (0.5 * kPi) * g.jx);
  return {j, bs_out * (phase * (bs_in * state.amps))};
}

}  // namespace mz
