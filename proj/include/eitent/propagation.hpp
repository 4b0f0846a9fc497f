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

#include <sstream>
#include <vector>

#include "eitent/bloch.hpp"
#include "eitent/ode.hpp"

namespace eitent {

/// Mean fields and atomic states on the zeta grid, node by node.
struct PropagationProfile {
  std::vector<double> zeta_grid;
  std::vector<FieldAmplitudes> fields;
  std::vector<AtomicSteadyState> states;

  std::size_t size() const noexcept { return zeta_grid.size(); }
  const FieldAmplitudes& output() const { return fields.back(); }
};

/// Field-only state used by the mean-field integrator.
struct FieldState {
  Complex omega_p;
  Complex omega_c;

  friend FieldState operator+(const FieldState& a, const FieldState& b) {
    return {a.omega_p + b.omega_p, a.omega_c + b.omega_c};
  }
  friend FieldState operator*(double s, const FieldState& a) {
    return {s * a.omega_p, s * a.omega_c};
  }
};

/// d Omega_p / d zeta = i (Gamma alpha / 2) sigma13,
/// d Omega_c / d zeta = i (Gamma alpha / 2) sigma23.
inline FieldState maxwell_rhs(const AtomicSteadyState& st, const SystemParams& p) {
  const Complex pre = kI * (0.5 * p.gamma() * p.alpha);
  return {pre * st(1, 3), pre * st(2, 3)};
}

/// Mean-field propagation on exactly n_steps uniform steps, re-solving the
/// steady state at every RK4 stage.
inline PropagationProfile integrate_mean_fields(const SystemParams& p, int n_steps) {
  const double h = 1.0 / n_steps;
  auto rhs = [&](double, const FieldState& y) {
    return maxwell_rhs(steady_state({y.omega_p, y.omega_c}, p), p);
  };
  PropagationProfile prof;
  prof.zeta_grid.reserve(n_steps + 1);
  prof.fields.reserve(n_steps + 1);
  prof.states.reserve(n_steps + 1);

  const FieldAmplitudes in = input_fields(p);
  FieldState y{in.omega_p, in.omega_c};
  for (int k = 0; k <= n_steps; ++k) {
    const FieldAmplitudes f{y.omega_p, y.omega_c};
    prof.zeta_grid.push_back(k == n_steps ? 1.0 : k * h);
    prof.fields.push_back(f);
    prof.states.push_back(steady_state(f, p));
    if (k < n_steps) y = rk4_step(y, k * h, h, rhs);
  }
  return prof;
}

/// Mean-field propagation certified by grid doubling: the returned profile
/// is the finest one whose |Omega_p(1)| moved by less than conv_tol.
inline PropagationProfile propagate_mean_fields(const SystemParams& p) {
  validate(p);
  int n = p.n_steps;
  PropagationProfile coarse = integrate_mean_fields(p, n);
  double change = 0.0;
  for (int k = 0; k < p.max_refinements; ++k) {
    n *= 2;
    PropagationProfile fine = integrate_mean_fields(p, n);
    change = std::abs(std::abs(fine.output().omega_p) - std::abs(coarse.output().omega_p));
    if (change < p.conv_tol) return fine;
    coarse = std::move(fine);
  }
  std::ostringstream os;
  os << "mean-field propagation not converged: |Omega_p(1)| changed by " << change
     << " at " << n << " steps";
  throw ConvergenceFailure(os.str());
}

}  // namespace eitent
