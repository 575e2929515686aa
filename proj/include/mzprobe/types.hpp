#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mz {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Probabilities at or below kEpsZero are structurally zero in entropy sums.
inline constexpr double kEpsZero = 1e-15;
// Lower clamp applied to logarithm arguments; clamped results carry a flag.
inline constexpr double kEpsFloor = 1e-300;

struct InvalidM : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NonHermitian : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidInterval : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ZeroInformation : std::domain_error {
  using std::domain_error::domain_error;
};
struct DegenerateLikelihood : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedDimension : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct UnsupportedFamily : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Dimension limit for spin systems; adjustable at runtime.
int max_two_j();
void set_max_two_j(int value);

// Spin magnitude j stored as the integer 2j; n = 2j photons, dim = 2j + 1.
struct SpinJ {
  int two_j = 0;

  SpinJ() = default;
  explicit SpinJ(int tj);

  int dim() const { return two_j + 1; }
  double j() const { return 0.5 * two_j; }
  // m value at array index i, ascending m = -j..+j.
  double m(int i) const { return 0.5 * (2 * i - two_j); }
  int two_m(int i) const { return 2 * i - two_j; }
  // Array index of a doubled m value; requires matching parity and range.
  int index_of_two_m(int two_m) const;

  friend bool operator==(SpinJ a, SpinJ b) { return a.two_j == b.two_j; }
};

// Pure state in the Jz eigenbasis, amplitudes ordered m = -j..+j.
struct SpinState {
  SpinJ j;
  CVec amps;
};

// Probability vector over the 2j+1 outcomes, ordered m = -j..+j.
struct MeasurementDistribution {
  SpinJ j;
  Vec probs;
};

// Probe family selector. two_m is meaningful for FockZ only; angle holds
// the NOON relative phase or the phase-state parameter.
struct ProbeFamily {
  enum class Kind { FockZ, Noon, PhaseState };

  Kind kind = Kind::Noon;
  int two_m = 0;
  double angle = 0.0;

  static ProbeFamily fockz(int two_m) {
    return {Kind::FockZ, two_m, 0.0};
  }
  static ProbeFamily noon(double zeta = 0.0) {
    return {Kind::Noon, 0, zeta};
  }
  static ProbeFamily phase_state(double gamma) {
    return {Kind::PhaseState, 0, gamma};
  }

  std::string label() const;
};

}  // namespace mz
