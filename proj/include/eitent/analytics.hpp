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

// Closed-form small-r / small-lambda results for the detuning scheme and the
// decoherence-scheme coupling envelope. These are leading-order
// approximations; the numerical pipeline in covariance.hpp is exact within
// the linearized model.

#include <cmath>

#include "eitent/params.hpp"

namespace eitent::analytics {

/// Reduced parameters. eps is delta / Omega_c^2 (detuning scheme) and
/// eps_gamma is gamma_p / Omega_c^2 (decoherence scheme), both with Gamma = 1.
struct ReducedParams {
  double k = 0.0;       // alpha * eps, probe phase per unit length
  double lambda = 0.0;  // 2 alpha eps^2, probe amplitude loss
  double mu = 0.0;      // alpha * eps * r
  double r = 0.0;
  double eps = 0.0;
  double eps_gamma = 0.0;
};

inline ReducedParams reduced(double alpha, double eps, double r, double eps_gamma = 0.0) {
  ReducedParams red;
  red.eps = eps;
  red.eps_gamma = eps_gamma;
  red.r = r;
  red.k = alpha * eps;
  red.lambda = 2.0 * alpha * eps * eps;
  red.mu = alpha * eps * r;
  return red;
}

inline ReducedParams reduced(const SystemParams& p) {
  if (!(p.omega_c0 > 0.0)) throw InvalidParameters("omega_c must be > 0");
  const double wc2 = p.omega_c0 * p.omega_c0;
  return reduced(p.alpha, p.gamma() * p.delta / wc2, p.r, p.gamma() * p.gamma_p / wc2);
}

/// Drift coefficients of the two field-fluctuation equations,
/// d a_p = P1 a_p + Q1 a_p^+ + R1 a_c + S1 a_c^+ and likewise for a_c.
struct Coefficients {
  Complex p1, q1, r1, s1;
  Complex p2, q2, r2, s2;
};

/// Leading-order coefficients at position zeta for gamma_p = 0.
inline Coefficients analytic_coefficients(const ReducedParams& red, double zeta) {
  const double k = red.k, mu = red.mu, r = red.r;
  const Complex ph = std::exp(Complex(0.0, k * zeta));
  Coefficients c;
  c.p1 = Complex(-red.lambda, k);
  c.q1 = -2.0 * kI * mu * r * ph * ph;
  c.r1 = -kI * mu * ph;
  c.s1 = -kI * mu * ph;
  c.p2 = -kI * mu * std::conj(ph);
  c.q2 = -kI * mu * ph;
  c.r2 = kI * mu * r;
  c.s2 = 2.0 * kI * mu * r;
  return c;
}

namespace detail {

// (e^{-2x} + 2x - 1) / x^2 and (1 - e^{-x}) / x without cancellation.
inline double loss_quadratic(double x) {
  if (x < 1e-3) return 2.0 - (4.0 / 3.0) * x + (2.0 / 3.0) * x * x - (4.0 / 15.0) * x * x * x;
  return (std::expm1(-2.0 * x) + 2.0 * x) / (x * x);
}

inline double loss_linear(double x) {
  if (x == 0.0) return 1.0;
  return -std::expm1(-x) / x;
}

}  // namespace detail

/// V from the coefficients of zeroth and first order in r. The lambda -> 0
/// limit is 4 (1 + 2 mu^2 - 2 mu).
inline double v1(double mu, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("v1 requires lambda >= 0");
  return 4.0 * (1.0 + mu * mu * detail::loss_quadratic(lambda) - 2.0 * mu * detail::loss_linear(lambda));
}

/// v1 plus the photon number of single-mode squeezing at order r^2.
inline double v_modified(double mu, double lambda, double r) {
  const double s = std::sinh(2.0 * mu * r);
  return v1(mu, lambda) + 8.0 * s * s;
}

/// v_modified expanded to first order in lambda and second order in mu r.
inline double v_closed_form(double mu, double lambda, double r) {
  const double sq = 2.0 * mu * r;
  return 4.0 * (1.0 + 2.0 * mu * mu - 2.0 * mu) + 4.0 * mu * lambda * (1.0 - 4.0 * mu / 3.0) +
         8.0 * sq * sq;
}

struct Optimum {
  double eps_opt = 0.0;
  double r_best = 0.0;
  double v_best = 0.0;
};

/// Minimizer of the closed form on the mu = 1/2 ridge.
inline Optimum optimum_conditions(double alpha) {
  if (!(alpha > 0.0)) throw DomainError("alpha must be > 0");
  Optimum o;
  o.eps_opt = std::pow(1.5, 0.25) * std::pow(alpha, -0.75);
  o.r_best = std::pow(24.0 * alpha, -0.25);
  // 1/(3 alpha r^2) + 8 r^2 at its minimum is 2 sqrt(8 / (3 alpha)).
  o.v_best = 2.0 + std::pow(32.0 / 3.0, 0.5) * std::pow(alpha, -0.5);
  return o;
}

/// Closed form on mu = 1/2 as a function of r.
inline double v_opt_of_r(double alpha, double r) {
  if (!(r > 0.0)) throw DomainError("v_opt_of_r requires r > 0");
  return 2.0 + 1.0 / (3.0 * alpha * r * r) + 8.0 * r * r;
}

/// Closed form on mu = 1/2 as a function of eps.
inline double v_opt_of_eps(double alpha, double eps) {
  if (!(eps > 0.0)) throw DomainError("v_opt_of_eps requires eps > 0");
  return 2.0 + (4.0 * alpha / 3.0) * eps * eps + 2.0 / (alpha * alpha * eps * eps);
}

/// |S1| = |Q2| in the decoherence scheme: alpha eps_gamma r exp(-alpha eps_gamma zeta).
inline double decoherence_coefficient(double alpha, double eps_gamma, double r, double zeta) {
  if (!(eps_gamma >= 0.0)) throw DomainError("eps_gamma must be >= 0");
  const double k = alpha * eps_gamma;
  return k * r * std::exp(-k * zeta);
}

}  // namespace eitent::analytics
