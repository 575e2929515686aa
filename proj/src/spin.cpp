#include "mzprobe/spin.hpp"

#include <Eigen/Eigenvalues>

#include <atomic>
#include <cmath>
#include <cstdio>

namespace mz {

namespace {

std::atomic<int>& max_two_j_storage() {
  static std::atomic<int> value{200};
  return value;
}

}  // namespace

int max_two_j() { return max_two_j_storage().load(); }

void set_max_two_j(int value) {
  if (value < 0) throw UnsupportedDimension("max two_j must be non-negative");
  max_two_j_storage().store(value);
}

SpinJ::SpinJ(int tj) : two_j(tj) {
  if (tj < 0) throw UnsupportedDimension("two_j must be non-negative");
  if (tj > max_two_j())
    throw UnsupportedDimension("two_j " + std::to_string(tj) +
                               " exceeds limit " +
                               std::to_string(max_two_j()));
}

int SpinJ::index_of_two_m(int two_m) const {
  if ((two_m + two_j) % 2 != 0 || two_m < -two_j || two_m > two_j) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "m = %g incompatible with j = %g",
                  0.5 * two_m, 0.5 * two_j);
    throw InvalidM(buf);
  }
  return (two_m + two_j) / 2;
}

std::string ProbeFamily::label() const {
  switch (kind) {
    case Kind::FockZ:
      return "fockz";
    case Kind::Noon:
      return "noon";
    case Kind::PhaseState:
      return "phase";
  }
  throw UnsupportedFamily("unknown probe family tag");
}

Generators make_generators(SpinJ j) {
  const int d = j.dim();
  CMat jp = CMat::Zero(d, d);
  CMat jz = CMat::Zero(d, d);
  const double jj = j.j() * (j.j() + 1.0);
  for (int i = 0; i < d; ++i) {
    const double m = j.m(i);
    jz(i, i) = m;
    if (i + 1 < d) jp(i + 1, i) = std::sqrt(jj - m * (m + 1.0));
  }
  const CMat jm = jp.adjoint();
  Generators g;
  g.jx = 0.5 * (jp + jm);
  g.jy = Complex(0.0, -0.5) * (jp - jm);
  g.jz = jz;
  g.jsq = jj * CMat::Identity(d, d);
  return g;
}

SpinState make_fock_z(SpinJ j, int two_m) {
  const int i = j.index_of_two_m(two_m);
  CVec amps = CVec::Zero(j.dim());
  amps(i) = 1.0;
  return {j, std::move(amps)};
}

CMat y_eigenbasis(SpinJ j) {
  const Generators g = make_generators(j);
  Eigen::SelfAdjointEigenSolver<CMat> es(g.jx);
  const Vec& w = es.eigenvalues();
  const CMat& u = es.eigenvectors();
  // Exponent uses eigenvalues rounded to exact half-integers, so the result
  // is exp(i Jx pi/2) free of O(1e-16) spectral noise.
  CVec phases(j.dim());
  for (int i = 0; i < j.dim(); ++i) {
    const double me = std::round(2.0 * w(i)) * 0.5;
    phases(i) = std::exp(Complex(0.0, me * kPi * 0.5));
  }
  return u * phases.asDiagonal() * u.adjoint();
}

SpinState make_noon(SpinJ j, double zeta) {
  if (j.two_j < 1) throw UnsupportedDimension("NOON probe needs two_j >= 1");
  const CMat v = y_eigenbasis(j);
  const Complex phase = std::exp(Complex(0.0, zeta));
  CVec amps = (v.col(j.two_j) + phase * v.col(0)) / std::sqrt(2.0);
  return {j, std::move(amps)};
}

SpinState make_phase_state(SpinJ j, double gamma) {
  const CMat v = y_eigenbasis(j);
  const int d = j.dim();
  CVec coeffs(d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i)
    coeffs(i) = norm * std::exp(Complex(0.0, j.m(i) * gamma));
  return {j, v * coeffs};
}

SpinState make_probe(SpinJ j, const ProbeFamily& family) {
  switch (family.kind) {
    case ProbeFamily::Kind::FockZ:
      return make_fock_z(j, family.two_m);
    case ProbeFamily::Kind::Noon:
      return make_noon(j, family.angle);
    case ProbeFamily::Kind::PhaseState:
      return make_phase_state(j, family.angle);
  }
  throw UnsupportedFamily("unknown probe family tag");
}

double expectation(const SpinState& state, const CMat& op) {
  if (op.rows() != state.amps.size() || op.cols() != state.amps.size())
    throw DimensionMismatch("operator does not match state dimension");
  const double herm_residual =
      (op - op.adjoint()).cwiseAbs().maxCoeff();
  if (herm_residual > 1e-12)
    throw NonHermitian("operator fails Hermitian check");
  const Complex val = state.amps.dot(op * state.amps);
  if (std::abs(val.imag()) > 1e-12)
    throw NonHermitian("expectation has non-negligible imaginary part");
  return val.real();
}

}  // namespace mz
