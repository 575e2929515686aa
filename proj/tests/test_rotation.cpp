#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mzprobe/rng.hpp"
#include "mzprobe/rotation.hpp"
#include "mzprobe/spin.hpp"

#include <cmath>

using namespace mz;

namespace {

double inf_norm(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

SpinState test_probe(SpinJ j) {
  auto eng = substream_engine(31, 0);
  return random_probe(j, eng);
}

}  // namespace

TEST_CASE("evolution preserves norm and composes as a group") {
  for (int two_j : {1, 2, 5, 12}) {
    CAPTURE(two_j);
    SpinJ j(two_j);
    RotationEngine engine(j);
    SpinState s = test_probe(j);

    SpinState once = engine.evolve(s, 0.9);
    CHECK(once.amps.norm() == doctest::Approx(1.0).epsilon(1e-12));

    SpinState composed = engine.evolve(engine.evolve(s, 0.4), 0.5);
    CHECK((composed.amps - once.amps).cwiseAbs().maxCoeff() < 1e-11);

    // One full turn is the identity up to the half-integer sign.
    const double sign = (two_j % 2 == 0) ? 1.0 : -1.0;
    SpinState turned = engine.evolve(s, 2.0 * kPi);
    CHECK((turned.amps - sign * s.amps).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("evolution equals the exponentiated y generator") {
  for (int two_j : {1, 3, 8}) {
    CAPTURE(two_j);
    SpinJ j(two_j);
    RotationEngine engine(j);
    SpinState s = test_probe(j);
    const double theta = 0.71;

    Generators g = make_generators(j);
    const CMat u = matrix_exp(Complex(0, theta) * g.jy);
    const CVec expect = u * s.amps;
    CHECK((engine.evolve(s, theta).amps - expect).cwiseAbs().maxCoeff() <
          1e-11);
  }
}

TEST_CASE("state derivative matches finite differences") {
  for (int two_j : {1, 4, 9}) {
    CAPTURE(two_j);
    SpinJ j(two_j);
    RotationEngine engine(j);
    SpinState s = test_probe(j);
    const double theta = 1.13, h = 1e-5;

    SpinState at = engine.evolve(s, theta);
    CVec fd = (engine.evolve(s, theta + h).amps -
               engine.evolve(s, theta - h).amps) /
              (2.0 * h);
    CVec an = engine.state_derivative(at).amps;
    CHECK((fd - an).cwiseAbs().maxCoeff() < 1e-8);

    // <psi|dpsi> is purely imaginary; |dpsi|^2 equals <Jy^2>.
    const Complex overlap = at.amps.dot(an);
    CHECK(std::abs(overlap.real()) < 1e-12);
    Generators g = make_generators(j);
    const CMat jy2 = (g.jy * g.jy).eval();
    CHECK(an.squaredNorm() ==
          doctest::Approx(expectation(at, jy2)).epsilon(1e-10));
  }
}

TEST_CASE("three-stage network equals the single rotation") {
  for (int two_j : {1, 2, 6, 11}) {
    CAPTURE(two_j);
    SpinJ j(two_j);
    RotationEngine engine(j);
    SpinState s = test_probe(j);
    const double theta = 2.31;

    SpinState direct = engine.evolve(s, theta);
    SpinState staged = mz_three_stage(s, theta);

    CHECK(std::abs(std::abs(direct.amps.dot(staged.amps)) - 1.0) < 1e-10);
    const Vec pd = direct.amps.cwiseAbs2();
    const Vec ps = staged.amps.cwiseAbs2();
    CHECK((pd - ps).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("small rotation matrices are the classic forms") {
  const double theta = 0.83;
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);

  Mat d_half = wigner_d(SpinJ(1), theta);
  CHECK(d_half(0, 0) == doctest::Approx(c).epsilon(1e-14));
  CHECK(d_half(0, 1) == doctest::Approx(-s).epsilon(1e-14));
  CHECK(d_half(1, 0) == doctest::Approx(s).epsilon(1e-14));
  CHECK(d_half(1, 1) == doctest::Approx(c).epsilon(1e-14));
}

TEST_CASE("rotation matrix columns agree with evolved basis states") {
  for (int two_j : {1, 2, 5, 10, 20}) {
    CAPTURE(two_j);
    SpinJ j(two_j);
    RotationEngine engine(j);
    for (double theta : {0.37, 1.9, -0.6}) {
      CAPTURE(theta);
      Mat d = wigner_d(j, theta);
      for (int i = 0; i < j.dim(); ++i) {
        SpinState basis = make_fock_z(j, j.two_m(i));
        CVec evolved = engine.evolve(basis, theta).amps;
        for (int ip = 0; ip < j.dim(); ++ip)
          CHECK(std::abs(evolved(ip) - d(ip, i)) < 1e-11);
      }
    }
  }
  // Alternating-sum cancellation loosens the largest sizes.
  SpinJ big(50);
  RotationEngine engine(big);
  Mat d = wigner_d(big, 0.9);
  SpinState basis = make_fock_z(big, 0);
  CVec evolved = engine.evolve(basis, 0.9).amps;
  for (int ip = 0; ip < big.dim(); ++ip)
    CHECK(std::abs(evolved(ip) - d(ip, big.index_of_two_m(0))) < 1e-6);
}

TEST_CASE("rotation matrices invert by angle reversal") {
  for (int two_j : {1, 4, 13}) {
    CAPTURE(two_j);
    SpinJ j(two_j);
    const Mat prod = wigner_d(j, 1.21) * wigner_d(j, -1.21);
    CHECK((prod - Mat::Identity(j.dim(), j.dim())).cwiseAbs().maxCoeff() <
          1e-11);
  }
}

TEST_CASE("matrix exponential basics") {
  SpinJ j(7);
  Generators g = make_generators(j);

  const CMat id = matrix_exp(CMat::Zero(j.dim(), j.dim()));
  CHECK(inf_norm(id - CMat::Identity(j.dim(), j.dim())) < 1e-15);

  // exp(i pi/2 Jx) reproduces the eigenbasis construction of the same
  // operator, so the two routes must agree to roundoff.
  const CMat direct = matrix_exp(Complex(0, 0.5 * kPi) * g.jx);
  CHECK(inf_norm(direct - y_eigenbasis(j)) < 1e-12);

  const CMat u = matrix_exp(Complex(0, 0.77) * g.jy);
  CHECK(inf_norm(u * u.adjoint() - CMat::Identity(j.dim(), j.dim())) < 1e-13);
}

TEST_CASE("shared engines are cached per dimension") {
  auto a = shared_engine(SpinJ(6));
  auto b = shared_engine(SpinJ(6));
  auto c = shared_engine(SpinJ(8));
  CHECK(a.get() == b.get());
  CHECK(a.get() != c.get());
  CHECK(a->j().two_j == 6);
}
