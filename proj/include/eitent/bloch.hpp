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

#include <array>
#include <cmath>
#include <sstream>

#include "eitent/params.hpp"

namespace eitent {

// Ordering of the nine atomic operators in every 9-vector and 9x9 matrix:
// (s31, s32, s21, s11, s22, s33, s12, s23, s13).
namespace idx {
inline constexpr int s31 = 0;
inline constexpr int s32 = 1;
inline constexpr int s21 = 2;
inline constexpr int s11 = 3;
inline constexpr int s22 = 4;
inline constexpr int s33 = 5;
inline constexpr int s12 = 6;
inline constexpr int s23 = 7;
inline constexpr int s13 = 8;
/// Row holding the trace closure instead of the s33 equation.
inline constexpr int trace_row = s33;
}  // namespace idx

/// (row, col) of sigma_{mu nu} (1-based levels) for each vector slot.
inline constexpr std::array<std::array<int, 2>, 9> kSlotLevels = {{
    {3, 1}, {3, 2}, {2, 1}, {1, 1}, {2, 2}, {3, 3}, {1, 2}, {2, 3}, {1, 3}}};

/// Mean values sigma_{mu nu}; sigma(mu-1, nu-1) is sigma_{mu nu}.
struct AtomicSteadyState {
  Mat3 sigma = Mat3::Zero();
  double rcond = 1.0;  // reciprocal condition estimate of the solve (pivot ratio)

  Complex operator()(int mu, int nu) const { return sigma(mu - 1, nu - 1); }

  Vec9 as_vector() const {
    Vec9 v;
    for (int k = 0; k < 9; ++k) v(k) = sigma(kSlotLevels[k][0] - 1, kSlotLevels[k][1] - 1);
    return v;
  }

  double trace() const { return (sigma(0, 0) + sigma(1, 1) + sigma(2, 2)).real(); }

  static AtomicSteadyState ground() {
    AtomicSteadyState s;
    s.sigma(0, 0) = 1.0;
    return s;
  }
};

/// Coupling matrix of the linearized atomic equations with d/dt = 0. Row 6
/// is the trace closure (0,0,0,1,1,1,0,0,0). The matrix depends only on the
/// local fields, never on sigma.
inline Mat9 build_m1(const FieldAmplitudes& f, const SystemParams& p) {
  using namespace idx;
  const double G = p.gamma();
  const Complex wp = f.omega_p, wc = f.omega_c;
  const Complex wps = std::conj(wp), wcs = std::conj(wc);
  const double dp = p.delta_p(), dc = p.delta_c(), d = p.delta, gp = p.gamma_p;
  const Complex h = 0.5 * kI;  // i/2

  Mat9 m = Mat9::Zero();
  m(s31, s31) = -(0.5 * G + kI * dp);
  m(s31, s21) = -h * wcs;
  m(s31, s11) = -h * wps;
  m(s31, s33) = h * wps;

  m(s32, s32) = -(0.5 * G + kI * dc);
  m(s32, s22) = -h * wcs;
  m(s32, s33) = h * wcs;
  m(s32, s12) = -h * wps;

  m(s21, s31) = -h * wc;
  m(s21, s21) = -(gp + kI * d);
  m(s21, s23) = h * wps;

  m(s11, s31) = -h * wp;
  m(s11, s33) = p.gamma1;
  m(s11, s13) = h * wps;

  m(s22, s32) = -h * wc;
  m(s22, s33) = p.gamma2;
  m(s22, s23) = h * wcs;

  m(trace_row, s11) = 1.0;
  m(trace_row, s22) = 1.0;
  m(trace_row, s33) = 1.0;

  m(s12, s32) = -h * wp;
  m(s12, s12) = -(gp - kI * d);
  m(s12, s13) = h * wcs;

  m(s23, s21) = h * wp;
  m(s23, s22) = h * wc;
  m(s23, s33) = -h * wc;
  m(s23, s23) = -(0.5 * G - kI * dc);

  m(s13, s11) = h * wp;
  m(s13, s33) = -h * wp;
  m(s13, s12) = h * wc;
  m(s13, s13) = -(0.5 * G - kI * dp);
  return m;
}

/// Right-hand sides of all nine mean-field Bloch equations (including the
/// s33 equation that the matrix form drops), written out term by term.
/// Ordered like the 9-vector. Vanishes at a steady state.
inline Vec9 bloch_rhs(const Mat3& s, const FieldAmplitudes& f, const SystemParams& p) {
  auto S = [&](int mu, int nu) { return s(mu - 1, nu - 1); };
  const double G = p.gamma();
  const Complex wp = f.omega_p, wc = f.omega_c;
  const Complex wps = std::conj(wp), wcs = std::conj(wc);
  const double dp = p.delta_p(), dc = p.delta_c(), d = p.delta, gp = p.gamma_p;
  const Complex h = 0.5 * kI;

  Vec9 out;
  out(idx::s31) = -(0.5 * G + kI * dp) * S(3, 1) - h * (S(1, 1) - S(3, 3)) * wps - h * wcs * S(2, 1);
  out(idx::s32) = -(0.5 * G + kI * dc) * S(3, 2) - h * (S(2, 2) - S(3, 3)) * wcs - h * wps * S(1, 2);
  out(idx::s21) = -(gp + kI * d) * S(2, 1) + h * wps * S(2, 3) - h * S(3, 1) * wc;
  out(idx::s11) = p.gamma1 * S(3, 3) - h * S(3, 1) * wp + h * wps * S(1, 3);
  out(idx::s22) = p.gamma2 * S(3, 3) - h * S(3, 2) * wc + h * wcs * S(2, 3);
  out(idx::s33) = -G * S(3, 3) + h * S(3, 1) * wp + h * S(3, 2) * wc - h * wps * S(1, 3) - h * wcs * S(2, 3);
  out(idx::s12) = -(gp - kI * d) * S(1, 2) - h * S(3, 2) * wp + h * wcs * S(1, 3);
  out(idx::s23) = -(0.5 * G - kI * dc) * S(2, 3) + h * (S(2, 2) - S(3, 3)) * wc + h * S(2, 1) * wp;
  out(idx::s13) = -(0.5 * G - kI * dp) * S(1, 3) + h * (S(1, 1) - S(3, 3)) * wp + h * S(1, 2) * wc;
  return out;
}

/// Largest steady-state residual, including |trace - 1|.
inline double steady_state_residual(const AtomicSteadyState& st, const FieldAmplitudes& f,
                                    const SystemParams& p) {
  const double r = bloch_rhs(st.sigma, f, p).cwiseAbs().maxCoeff();
  return std::max(r, std::abs(st.trace() - 1.0));
}

/// LU factorization of M1 together with everything derived from it at one
/// position: the response operator T = -M1^{-1} and the mean atomic state.
struct LocalSolution {
  Mat9 m1;
  Mat9 t;
  AtomicSteadyState state;
};

namespace detail {

inline constexpr double kSingularRcond = 1e-14;
inline constexpr double kIllConditioned = 1e12;

inline AtomicSteadyState state_from_vector(const Vec9& x, double rcond) {
  AtomicSteadyState st;
  st.rcond = rcond;
  for (int k = 0; k < 9; ++k) st.sigma(kSlotLevels[k][0] - 1, kSlotLevels[k][1] - 1) = x(k);
  // Hermitian by construction; the solve already is up to round-off.
  const Mat3 herm = 0.5 * (st.sigma + st.sigma.adjoint());
  st.sigma = herm;
  for (int i = 0; i < 3; ++i) st.sigma(i, i) = Complex(st.sigma(i, i).real(), 0.0);
  return st;
}

/// Smallest over largest |U_ii| of the LU factors: a cheap reciprocal
/// condition estimate, refined with Eigen's rcond() only when it is small.
inline double pivot_ratio(const Eigen::PartialPivLU<Mat9>& lu) {
  const auto diag = lu.matrixLU().diagonal().cwiseAbs();
  const double hi = diag.maxCoeff();
  return hi > 0.0 ? diag.minCoeff() / hi : 0.0;
}

inline Eigen::PartialPivLU<Mat9> factor(const Mat9& m1, double* rcond_out = nullptr) {
  Eigen::PartialPivLU<Mat9> lu(m1);
  double rc = pivot_ratio(lu);
  if (rc < 1e-8) rc = std::min(rc, lu.rcond());
  if (!(rc > kSingularRcond)) {
    const double cond = rc > 0 ? 1.0 / rc : INFINITY;
    std::ostringstream os;
    os << "atomic response matrix is singular (condition ~ " << cond
       << "); both fields zero or otherwise degenerate configuration";
    throw SingularSystem(os.str(), cond);
  }
  if (rcond_out) *rcond_out = rc;
  return lu;
}

}  // namespace detail

/// One LU of M1 gives both the steady state (M1 x = e6) and T = -M1^{-1}.
inline LocalSolution solve_local(const FieldAmplitudes& f, const SystemParams& p) {
  LocalSolution out;
  out.m1 = build_m1(f, p);
  double rc = 1.0;
  const auto lu = detail::factor(out.m1, &rc);
  out.t = -lu.inverse();
  const Vec9 x = -out.t.col(idx::trace_row);
  out.state = detail::state_from_vector(x, rc);
  return out;
}

/// Steady state of the mean-field Bloch equations for the given local
/// fields. Throws SingularSystem when the closure leaves the system rank
/// deficient.
inline AtomicSteadyState steady_state(const FieldAmplitudes& f, const SystemParams& p) {
  if (!f.finite()) throw InvalidParameters("field amplitudes must be finite");
  if (std::abs(f.omega_c) == 0.0) throw InvalidParameters("coupling field must be nonzero");
  const Mat9 m1 = build_m1(f, p);
  double rc = 1.0;
  const auto lu = detail::factor(m1, &rc);
  Vec9 rhs = Vec9::Zero();
  rhs(idx::trace_row) = 1.0;
  return detail::state_from_vector(lu.solve(rhs), rc);
}

}  // namespace eitent
