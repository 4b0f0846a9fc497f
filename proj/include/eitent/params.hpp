/*
 * Copyright 2026 The eitent Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace eitent {

using Complex = std::complex<double>;
inline constexpr Complex kI{0.0, 1.0};

using Vec4 = Eigen::Matrix<Complex, 4, 1>;
using Vec9 = Eigen::Matrix<Complex, 9, 1>;
using Mat3 = Eigen::Matrix<Complex, 3, 3>;
using Mat4 = Eigen::Matrix<Complex, 4, 4>;
using Mat9 = Eigen::Matrix<Complex, 9, 9>;
using Mat94 = Eigen::Matrix<Complex, 9, 4>;
using Mat49 = Eigen::Matrix<Complex, 4, 9>;

// Exceptions. The CLI maps each one onto its own exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameters : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  SingularSystem(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Physical and numerical knobs of one simulation. Units: the total excited
/// state decay rate is 1 and the medium occupies zeta in [0, 1].
struct SystemParams {
  double alpha = 1000.0;    // optical density
  double gamma_p = 0.0;     // ground-state decoherence rate
  double delta = 0.0;       // two-photon detuning
  double omega_c0 = 1.0;    // input coupling Rabi frequency (real)
  double r = 0.1;           // input |Omega_p / Omega_c|
  double gamma1 = 0.5;      // |3> -> |1> decay
  double gamma2 = 0.5;      // |3> -> |2> decay
  int n_steps = 200;        // base spatial grid
  double conv_tol = 1e-6;   // allowed change of V under grid doubling
  int max_refinements = 4;  // grid doublings tried before giving up
  bool symmetrize = true;   // average S with S^dagger once per step

  // One-photon detunings. When unset they follow the asymmetric
  // arrangement delta_p = +delta/2, delta_c = -delta/2.
  std::optional<double> delta_p_override;
  std::optional<double> delta_c_override;

  double gamma() const noexcept { return gamma1 + gamma2; }

  double delta_p() const noexcept {
    if (delta_p_override) return *delta_p_override;
    if (delta_c_override) return *delta_c_override + delta;
    return 0.5 * delta;
  }

  double delta_c() const noexcept {
    if (delta_c_override) return *delta_c_override;
    if (delta_p_override) return *delta_p_override - delta;
    return -0.5 * delta;
  }

  /// Detuning-scheme reduced detuning delta / Omega_c^2 (Gamma = 1).
  double eps() const noexcept { return gamma() * delta / (omega_c0 * omega_c0); }
};

/// Throws InvalidParameters describing the first violated constraint.
inline void validate(const SystemParams& p) {
  auto fail = [](const std::string& msg) { throw InvalidParameters(msg); };
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(p.alpha) || p.alpha <= 0.0) fail("alpha must be > 0");
  if (!finite(p.omega_c0) || p.omega_c0 <= 0.0) fail("omega_c must be > 0");
  if (!finite(p.gamma_p) || p.gamma_p < 0.0) fail("gamma_p must be >= 0");
  if (!finite(p.r) || p.r < 0.0) fail("r must be >= 0");
  if (!finite(p.delta)) fail("delta must be finite");
  if (p.n_steps < 2) fail("steps must be >= 2");
  if (!finite(p.conv_tol) || p.conv_tol <= 0.0) fail("conv_tol must be > 0");
  if (p.max_refinements < 1) fail("max_refinements must be >= 1");
  if (std::abs(p.gamma1 + p.gamma2 - 1.0) > 1e-12 || p.gamma1 < 0.0 || p.gamma2 < 0.0)
    fail("gamma1 + gamma2 must equal 1");
  if (p.delta_p_override && !finite(*p.delta_p_override)) fail("delta_p must be finite");
  if (p.delta_c_override && !finite(*p.delta_c_override)) fail("delta_c must be finite");
  if (p.delta_p_override && p.delta_c_override) {
    const double mismatch = *p.delta_p_override - *p.delta_c_override - p.delta;
    const double scale = 1.0 + std::abs(p.delta) + std::abs(*p.delta_p_override);
    if (std::abs(mismatch) > 1e-12 * scale) {
      std::ostringstream os;
      os << "delta_p - delta_c must equal delta (off by " << mismatch << ")";
      fail(os.str());
    }
  }
}

/// Local complex Rabi frequencies of the two fields.
struct FieldAmplitudes {
  Complex omega_p;
  Complex omega_c;

  bool finite() const noexcept {
    return std::isfinite(omega_p.real()) && std::isfinite(omega_p.imag()) &&
           std::isfinite(omega_c.real()) && std::isfinite(omega_c.imag());
  }
  /// EIT needs a probe weaker than the coupling; violations are allowed.
  bool eit_regime() const noexcept { return std::abs(omega_p) <= std::abs(omega_c); }
};

/// Input fields at zeta = 0: both real, Omega_p = r * Omega_c.
inline FieldAmplitudes input_fields(const SystemParams& p) {
  return {Complex(p.r * p.omega_c0, 0.0), Complex(p.omega_c0, 0.0)};
}

}  // namespace eitent
