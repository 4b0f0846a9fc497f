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

#include "eitent/bloch.hpp"

namespace eitent {

/// Prefactor of the noise correlation Z = kNoisePrefactor * Gamma * alpha *
/// V D V^dagger. With this value a pure two-level absorber keeps
/// [a, a^dagger] = 1 exactly; see README for the measured drift.
inline constexpr double kNoisePrefactor = 0.25;

/// Linearized fluctuation machinery at one position.
struct FluctuationMatrices {
  Mat9 m1;    // atomic fluctuation coupling
  Mat94 m2;   // atom <- field coupling, columns (a_p, a_p^+, a_c, a_c^+)
  Mat9 t;     // y = T (M2 a + r), T = -M1^{-1}
  Mat4 c;     // drift of the field fluctuations
  Mat9 d;     // Langevin diffusion matrix
  Mat49 vsel; // rows (T_9., -T_1., T_8., -T_2.)
  Mat4 z;     // noise correlation <N N^dagger>
  AtomicSteadyState state;
};

/// M2 as printed, including its g/2 prefactor. Row 6 is zero.
inline Mat94 build_m2(const AtomicSteadyState& st, double g = 1.0) {
  using namespace idx;
  auto S = [&](int mu, int nu) { return st(mu, nu); };
  Mat94 m = Mat94::Zero();
  m(s31, 1) = -kI * (S(1, 1) - S(3, 3));
  m(s31, 3) = -kI * S(2, 1);
  m(s32, 1) = -kI * S(1, 2);
  m(s32, 3) = -kI * (S(2, 2) - S(3, 3));
  m(s21, 1) = kI * S(2, 3);
  m(s21, 2) = -kI * S(3, 1);
  m(s11, 0) = -kI * S(3, 1);
  m(s11, 1) = kI * S(1, 3);
  m(s22, 2) = -kI * S(3, 2);
  m(s22, 3) = kI * S(2, 3);
  m(s12, 0) = -kI * S(3, 2);
  m(s12, 3) = kI * S(1, 3);
  m(s23, 0) = kI * S(2, 1);
  m(s23, 2) = kI * (S(2, 2) - S(3, 3));
  m(s13, 0) = kI * (S(1, 1) - S(3, 3));
  m(s13, 2) = kI * S(1, 2);
  return 0.5 * g * m;
}

/// T = -M1^{-1}; throws SingularSystem.
inline Mat9 response_operator(const Mat9& m1) {
  return -detail::factor(m1).inverse();
}

/// Drift matrix from a precomputed T. Rows 1 and 3 come from the s13 and
/// s23 rows of T M2; rows 2 and 4 are their conjugate-permuted partners.
inline Mat4 drift_from(const Mat9& t, const Mat94& m2, const SystemParams& p, double g = 1.0) {
  const Complex pre = kI * (p.gamma() * p.alpha / (2.0 * g));
  const Eigen::Matrix<Complex, 1, 4> row_p = pre * (t.row(idx::s13) * m2);
  const Eigen::Matrix<Complex, 1, 4> row_c = pre * (t.row(idx::s23) * m2);
  Mat4 c;
  for (int blk = 0; blk < 2; ++blk) {
    const auto& row = blk == 0 ? row_p : row_c;
    const int i = 2 * blk;
    c.row(i) = row;
    c(i + 1, 0) = std::conj(row(1));
    c(i + 1, 1) = std::conj(row(0));
    c(i + 1, 2) = std::conj(row(3));
    c(i + 1, 3) = std::conj(row(2));
  }
  return c;
}

/// C = i (Gamma alpha / 2) [A1 B1 C1 D1; ...]. The bookkeeping constant g
/// cancels between M2 and the field-equation prefactor.
inline Mat4 build_drift(const AtomicSteadyState& st, const FieldAmplitudes& f,
                        const SystemParams& p, double g = 1.0) {
  return drift_from(response_operator(build_m1(f, p)), build_m2(st, g), p, g);
}

/// Diffusion matrix of the Langevin forces, ordered like the 9-vector.
inline Mat9 build_diffusion(const AtomicSteadyState& st, const SystemParams& p) {
  using namespace idx;
  auto S = [&](int mu, int nu) { return st(mu, nu); };
  const double G = p.gamma(), G1 = p.gamma1, G2 = p.gamma2, gp = p.gamma_p;
  Mat9 d = Mat9::Zero();
  d(s31, s21) = gp * S(3, 2);
  d(s32, s12) = gp * S(3, 1);
  d(s21, s31) = gp * S(2, 3);
  d(s21, s21) = 2.0 * gp * S(2, 2) + G2 * S(3, 3);
  d(s11, s11) = G1 * S(3, 3);
  d(s11, s23) = -G1 * S(3, 2);
  d(s11, s13) = -G1 * S(3, 1);
  d(s22, s22) = G2 * S(3, 3);
  d(s22, s23) = -G2 * S(3, 2);
  d(s22, s13) = -G2 * S(3, 1);
  d(s12, s32) = gp * S(1, 3);
  d(s12, s12) = 2.0 * gp * S(1, 1) + G1 * S(3, 3);
  d(s23, s11) = -G1 * S(2, 3);
  d(s23, s22) = -G2 * S(2, 3);
  d(s23, s23) = G2 * S(3, 3) + G * S(2, 2);
  d(s23, s13) = (G - gp) * S(2, 1);
  d(s13, s11) = -G1 * S(1, 3);
  d(s13, s22) = -G2 * S(1, 3);
  d(s13, s23) = (G - gp) * S(1, 2);
  d(s13, s13) = G1 * S(3, 3) + G * S(1, 1);
  return d;
}

/// Selector V: rows T_9., -T_1., T_8., -T_2. (1-based).
inline Mat49 build_selector(const Mat9& t) {
  Mat49 v;
  v.row(0) = t.row(idx::s13);
  v.row(1) = -t.row(idx::s31);
  v.row(2) = t.row(idx::s23);
  v.row(3) = -t.row(idx::s32);
  return v;
}

/// Z = (Gamma alpha / 4) V D V^dagger.
inline Mat4 build_noise_correlation(const Mat9& t, const Mat9& d, const SystemParams& p) {
  const Mat49 v = build_selector(t);
  return (kNoisePrefactor * p.gamma() * p.alpha) * (v * d * v.adjoint());
}

/// Drift, noise and mean state: the subset the propagators need at every
/// integration stage. Only the four rows of T that feed the field equations
/// are formed.
struct LocalDynamics {
  Mat4 c;
  Mat4 z;
  AtomicSteadyState state;
};

inline LocalDynamics local_dynamics(const FieldAmplitudes& f, const SystemParams& p) {
  const Mat9 m1 = build_m1(f, p);
  double rc = 1.0;
  const auto lu = detail::factor(m1, &rc);

  Vec9 e6 = Vec9::Zero();
  e6(idx::trace_row) = 1.0;
  LocalDynamics out;
  out.state = detail::state_from_vector(lu.solve(e6), rc);

  // Columns of M1^{-T} E are the requested rows of M1^{-1}.
  Mat94 unit = Mat94::Zero();
  unit(idx::s13, 0) = 1.0;
  unit(idx::s31, 1) = 1.0;
  unit(idx::s23, 2) = 1.0;
  unit(idx::s32, 3) = 1.0;
  const Mat94 rows_t = lu.transpose().solve(unit);
  // V rows are (T_9., -T_1., T_8., -T_2.) with T = -M1^{-1}.
  Mat49 v = rows_t.transpose();
  v.row(0) = -v.row(0);
  v.row(2) = -v.row(2);

  Mat9 t_rows = Mat9::Zero();
  t_rows.row(idx::s13) = v.row(0);
  t_rows.row(idx::s23) = v.row(2);
  out.c = drift_from(t_rows, build_m2(out.state), p);
  const Mat9 d = build_diffusion(out.state, p);
  out.z = (kNoisePrefactor * p.gamma() * p.alpha) * (v * d * v.adjoint());
  return out;
}

/// Everything above from a single LU of M1.
inline FluctuationMatrices assemble_fluctuations(const FieldAmplitudes& f, const SystemParams& p,
                                                 double g = 1.0) {
  LocalSolution loc = solve_local(f, p);
  FluctuationMatrices fm;
  fm.m1 = loc.m1;
  fm.t = loc.t;
  fm.state = loc.state;
  fm.m2 = build_m2(fm.state, g);
  fm.c = drift_from(fm.t, fm.m2, p, g);
  fm.d = build_diffusion(fm.state, p);
  fm.vsel = build_selector(fm.t);
  fm.z = build_noise_correlation(fm.t, fm.d, p);
  return fm;
}

}  // namespace eitent
