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

namespace eitent {

/// One classical fourth-order Runge-Kutta step. State needs +, and
/// multiplication by double; rhs is callable as rhs(x, state) -> State.
template <typename State, typename Rhs>
State rk4_step(const State& y, double x, double h, Rhs&& rhs) {
  const State k1 = rhs(x, y);
  const State k2 = rhs(x + 0.5 * h, y + (0.5 * h) * k1);
  const State k3 = rhs(x + 0.5 * h, y + (0.5 * h) * k2);
  const State k4 = rhs(x + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace eitent
