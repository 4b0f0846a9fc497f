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

#include <algorithm>
#include <numbers>
#include <sstream>

#include "eitent/fluctuation.hpp"
#include "eitent/propagation.hpp"

namespace eitent {

/// Second moments S_ij = <a_i a_j^dagger> of a = (a_p, a_p^+, a_c, a_c^+).
struct CovarianceState {
  Mat4 s = Mat4::Zero();
  double zeta = 0.0;
};

struct EntanglementResult {
  double v = 4.0;          // Duan quantity at the optimal quadrature
  double theta_opt = 0.0;  // in [0, pi)
  double n_p = 0.0;        // S22
  double n_c = 0.0;        // S44
  Complex cross{};         // S14 = <a_p a_c>
  double commutator_drift = 0.0;

  bool entangled() const noexcept { return v < 4.0; }
};

/// Coherent input: vacuum fluctuations only.
inline CovarianceState init_covariance() {
  CovarianceState st;
  st.s(0, 0) = 1.0;
  st.s(2, 2) = 1.0;
  return st;
}

/// max(|S11 - S22 - 1|, |S33 - S44 - 1|).
inline double commutator_drift(const Mat4& s) {
  return std::max(std::abs(s(0, 0) - s(1, 1) - 1.0), std::abs(s(2, 2) - s(3, 3) - 1.0));
}

inline double entanglement_V_theta(const CovarianceState& st, double theta) {
  const auto& s = st.s;
  return 4.0 * (1.0 + s(1, 1).real() + s(3, 3).real() +
                2.0 * (s(0, 3) * std::exp(Complex(0.0, -2.0 * theta))).real());
}

inline EntanglementResult entanglement_V(const CovarianceState& st) {
  constexpr double pi = std::numbers::pi;
  const auto& s = st.s;
  EntanglementResult res;
  res.n_p = s(1, 1).real();
  res.n_c = s(3, 3).real();
  res.cross = s(0, 3);
  res.v = 4.0 * (1.0 + res.n_p + res.n_c - 2.0 * std::abs(res.cross));
  double theta = 0.5 * (std::arg(res.cross) + pi);
  theta = std::fmod(theta, pi);
  if (theta < 0.0) theta += pi;
  if (theta >= pi) theta -= pi;
  res.theta_opt = theta;
  res.commutator_drift = commutator_drift(s);
  return res;
}

/// Mean fields and field second moments integrated together.
struct JointState {
  FieldState fields;
  Mat4 s;

  friend JointState operator+(const JointState& a, const JointState& b) {
    return {a.fields + b.fields, a.s + b.s};
  }
  friend JointState operator*(double k, const JointState& a) { return {k * a.fields, k * a.s}; }
};

/// dS/dzeta = C S + S C^dagger + Z with C, Z rebuilt from the local fields.
inline JointState covariance_rhs(const JointState& y, const SystemParams& p) {
  const LocalDynamics loc = local_dynamics({y.fields.omega_p, y.fields.omega_c}, p);
  const Mat4 cs = loc.c * y.s;
  return {maxwell_rhs(loc.state, p), cs + cs.adjoint() + loc.z};
}

struct CovarianceRun {
  CovarianceState state;       // at zeta = 1
  PropagationProfile profile;  // node values; empty unless requested
  std::vector<double> drift_profile;  // commutator drift per node, when recorded
  double commutator_drift = 0.0;      // max over nodes
  double hermiticity_drift = 0.0;     // max ||S - S^+|| / ||S|| before averaging
  int n_steps = 0;
  double v_change = 0.0;  // |V(n) - V(n/2)| of the certifying doubling

  EntanglementResult result() const {
    EntanglementResult r = entanglement_V(state);
    r.commutator_drift = commutator_drift;
    return r;
  }
};

/// Covariance propagation on exactly n_steps uniform RK4 steps.
inline CovarianceRun integrate_covariance(const SystemParams& p, int n_steps,
                                          bool record_profile = false) {
  const double h = 1.0 / n_steps;
  auto rhs = [&](double, const JointState& y) { return covariance_rhs(y, p); };

  CovarianceRun run;
  run.n_steps = n_steps;
  const FieldAmplitudes in = input_fields(p);
  JointState y{{in.omega_p, in.omega_c}, init_covariance().s};

  auto record = [&](int k) {
    const double drift = commutator_drift(y.s);
    run.commutator_drift = std::max(run.commutator_drift, drift);
    if (!record_profile) return;
    const FieldAmplitudes f{y.fields.omega_p, y.fields.omega_c};
    run.profile.zeta_grid.push_back(k == n_steps ? 1.0 : k * h);
    run.profile.fields.push_back(f);
    run.profile.states.push_back(steady_state(f, p));
    run.drift_profile.push_back(drift);
  };

  record(0);
  for (int k = 0; k < n_steps; ++k) {
    y = rk4_step(y, k * h, h, rhs);
    const double norm = y.s.norm();
    if (norm > 0.0)
      run.hermiticity_drift = std::max(run.hermiticity_drift, (y.s - y.s.adjoint()).norm() / norm);
    if (p.symmetrize) y.s = (0.5 * (y.s + y.s.adjoint())).eval();
    if (!std::isfinite(norm)) {
      std::ostringstream os;
      os << "covariance diverged at zeta = " << (k + 1) * h;
      throw ConvergenceFailure(os.str());
    }
    record(k + 1);
  }
  run.state.s = y.s;
  run.state.zeta = 1.0;
  return run;
}

/// Covariance at zeta = 1, certified by grid doubling: returns the first
/// doubled grid whose V moved by less than conv_tol.
inline CovarianceRun propagate_covariance(const SystemParams& p, bool record_profile = false) {
  validate(p);
  int n = p.n_steps;
  double v_prev = entanglement_V(integrate_covariance(p, n).state).v;
  double change = 0.0;
  for (int k = 0; k < p.max_refinements; ++k) {
    n *= 2;
    CovarianceRun fine = integrate_covariance(p, n, record_profile);
    const double v = entanglement_V(fine.state).v;
    change = std::abs(v - v_prev);
    if (change < p.conv_tol) {
      fine.v_change = change;
      return fine;
    }
    v_prev = v;
  }
  std::ostringstream os;
  os << "covariance propagation not converged: V changed by " << change << " at " << n
     << " steps";
  throw ConvergenceFailure(os.str());
}

}  // namespace eitent
