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
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "eitent/covariance.hpp"

namespace eitent {

class IoError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Axes

struct AxisSpec {
  std::string name;  // alpha, delta, gamma_p, omega_c, r or eps
  double start = 0.0;
  double stop = 0.0;
  int count = 2;
  bool log = false;

  std::vector<double> values() const {
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : double(i) / (count - 1);
      out[i] = log ? std::exp(std::log(start) + t * (std::log(stop) - std::log(start)))
                   : start + t * (stop - start);
    }
    out.front() = start;
    out.back() = stop;
    return out;
  }
};

inline constexpr std::string_view kAxisNames[] = {"alpha", "delta", "gamma_p", "omega_c", "r", "eps"};

inline bool is_axis_name(std::string_view n) {
  return std::find(std::begin(kAxisNames), std::end(kAxisNames), n) != std::end(kAxisNames);
}

inline void validate(const AxisSpec& a) {
  if (!is_axis_name(a.name)) throw InvalidParameters("unknown axis '" + a.name + "'");
  if (!(a.start < a.stop)) throw InvalidParameters("axis " + a.name + ": start must be < stop");
  if (a.count < 2) throw InvalidParameters("axis " + a.name + ": count must be >= 2");
  if (a.log && !(a.start > 0.0)) throw InvalidParameters("axis " + a.name + ": log scale needs start > 0");
}

namespace detail {

inline double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidParameters("malformed number '" + s + "' in " + what);
  }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace detail

/// Parses "name=start:stop:count[:log]".
inline AxisSpec parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw InvalidParameters("axis '" + text + "' lacks '='");
  AxisSpec a;
  a.name = text.substr(0, eq);
  const auto parts = detail::split(text.substr(eq + 1), ':');
  if (parts.size() < 3 || parts.size() > 4)
    throw InvalidParameters("axis '" + text + "' must be name=start:stop:count[:log]");
  a.start = detail::parse_number(parts[0], text);
  a.stop = detail::parse_number(parts[1], text);
  const double count = detail::parse_number(parts[2], text);
  if (count != std::floor(count) || count > 1e6) throw InvalidParameters("axis '" + text + "': bad count");
  a.count = static_cast<int>(count);
  if (parts.size() == 4) {
    if (parts[3] == "log") a.log = true;
    else if (parts[3] != "linear" && parts[3] != "lin")
      throw InvalidParameters("axis '" + text + "': scale must be log or linear");
  }
  validate(a);
  return a;
}

/// Sets one named knob. "eps" sets delta = eps * Omega_c^2 and therefore
/// must be applied after omega_c.
inline void apply_axis(SystemParams& p, std::string_view name, double value) {
  if (name == "alpha") p.alpha = value;
  else if (name == "delta") p.delta = value;
  else if (name == "gamma_p") p.gamma_p = value;
  else if (name == "omega_c") p.omega_c0 = value;
  else if (name == "r") p.r = value;
  else if (name == "eps") p.delta = value * p.omega_c0 * p.omega_c0 / p.gamma();
  else throw InvalidParameters("unknown axis '" + std::string(name) + "'");
}

inline double axis_value(const SystemParams& p, std::string_view name) {
  if (name == "alpha") return p.alpha;
  if (name == "delta") return p.delta;
  if (name == "gamma_p") return p.gamma_p;
  if (name == "omega_c") return p.omega_c0;
  if (name == "r") return p.r;
  if (name == "eps") return p.eps();
  throw InvalidParameters("unknown axis '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Ordered parallel evaluation

/// out[i] = fn(i) for i in [0, n), evaluated on up to `jobs` threads. The
/// result order never depends on scheduling.
template <typename Fn>
auto parallel_map(std::size_t n, int jobs, Fn&& fn) {
  using R = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<R> out(n);
  const std::size_t workers = std::clamp<std::size_t>(jobs < 1 ? 1 : jobs, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) out[i] = fn(i);
    });
  }
  pool.clear();  // joins
  return out;
}

// ---------------------------------------------------------------------------
// Single runs

struct RunRecord {
  SystemParams params;
  EntanglementResult result;
  bool converged = false;
  int n_steps_used = 0;
  double v_change = 0.0;
  double wall_time = 0.0;  // seconds
  std::string error;       // empty on success

  double v() const { return converged ? result.v : std::numeric_limits<double>::quiet_NaN(); }
};

/// Full pipeline for one parameter set. Throws InvalidParameters,
/// ConvergenceFailure or SingularSystem.
inline RunRecord run_single(const SystemParams& p) {
  validate(p);
  const auto t0 = std::chrono::steady_clock::now();
  const CovarianceRun run = propagate_covariance(p);
  RunRecord rec;
  rec.params = p;
  rec.result = run.result();
  rec.converged = true;
  rec.n_steps_used = run.n_steps;
  rec.v_change = run.v_change;
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

/// Like run_single, but failures become a record carrying the message.
inline RunRecord run_guarded(const SystemParams& p) {
  try {
    return run_single(p);
  } catch (const Error& e) {
    RunRecord rec;
    rec.params = p;
    rec.error = e.what();
    return rec;
  }
}

inline nlohmann::json params_to_json(const SystemParams& p) {
  return {{"alpha", p.alpha},       {"gamma_p", p.gamma_p},   {"delta", p.delta},
          {"delta_p", p.delta_p()}, {"delta_c", p.delta_c()}, {"omega_c", p.omega_c0},
          {"r", p.r},               {"eps", p.eps()},         {"gamma1", p.gamma1},
          {"gamma2", p.gamma2},     {"steps", p.n_steps},     {"conv_tol", p.conv_tol}};
}

inline nlohmann::json to_json(const RunRecord& rec) {
  nlohmann::json j;
  j["params"] = params_to_json(rec.params);
  j["converged"] = rec.converged;
  if (rec.converged) {
    j["V"] = rec.result.v;
    j["theta_opt"] = rec.result.theta_opt;
    j["n_p"] = rec.result.n_p;
    j["n_c"] = rec.result.n_c;
    j["abs_S14"] = std::abs(rec.result.cross);
    j["commutator_drift"] = rec.result.commutator_drift;
    j["steps_used"] = rec.n_steps_used;
    j["v_change"] = rec.v_change;
  } else {
    j["error"] = rec.error;
  }
  j["wall_time"] = rec.wall_time;
  return j;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kCsvHeader =
    "alpha,gamma_p,delta,omega_c,r,eps,V,theta_opt,n_p,n_c,abs_S14,commutator_drift,error";

/// 12 significant digits, '.' decimal point regardless of locale.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  std::string s(buf);
  std::replace(s.begin(), s.end(), ',', '.');
  return s;
}

inline std::string csv_escape(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    else if (ch == '\n' || ch == '\r') out += ' ';
    else out += ch;
  }
  return out + "\"";
}

inline std::string csv_row(const RunRecord& rec) {
  const SystemParams& p = rec.params;
  std::string row;
  auto add = [&](double x) { row += format_number(x); row += ','; };
  add(p.alpha);
  add(p.gamma_p);
  add(p.delta);
  add(p.omega_c0);
  add(p.r);
  add(p.eps());
  if (rec.converged) {
    add(rec.result.v);
    add(rec.result.theta_opt);
    add(rec.result.n_p);
    add(rec.result.n_c);
    add(std::abs(rec.result.cross));
    add(rec.result.commutator_drift);
  } else {
    row += ",,,,,,";
  }
  if (!rec.error.empty()) row += csv_escape(rec.error);
  return row;
}

inline std::string to_csv(const std::vector<RunRecord>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += csv_row(r);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

/// Parameter sets of a 1-D or 2-D sweep in row-major order (first axis
/// outermost). "eps" is always applied after "omega_c".
inline std::vector<SystemParams> sweep_points(const SystemParams& base, const std::vector<AxisSpec>& axes) {
  if (axes.empty() || axes.size() > 2) throw InvalidParameters("scan needs one or two axes");
  for (const auto& a : axes) validate(a);
  if (axes.size() == 2) {
    if (axes[0].name == axes[1].name) throw InvalidParameters("scan axes must differ");
    const bool has_delta = axes[0].name == "delta" || axes[1].name == "delta";
    const bool has_eps = axes[0].name == "eps" || axes[1].name == "eps";
    if (has_delta && has_eps) throw InvalidParameters("delta and eps axes are mutually exclusive");
  }
  const auto v0 = axes[0].values();
  const std::vector<double> v1 = axes.size() == 2 ? axes[1].values() : std::vector<double>{0.0};
  std::vector<SystemParams> pts;
  pts.reserve(v0.size() * v1.size());
  for (double a : v0) {
    for (double b : v1) {
      SystemParams p = base;
      std::vector<std::pair<std::string_view, double>> set{{axes[0].name, a}};
      if (axes.size() == 2) set.emplace_back(axes[1].name, b);
      std::stable_sort(set.begin(), set.end(),
                       [](const auto& x, const auto& y) { return x.first != "eps" && y.first == "eps"; });
      for (const auto& [name, value] : set) apply_axis(p, name, value);
      pts.push_back(p);
    }
  }
  return pts;
}

inline std::vector<RunRecord> scan(const SystemParams& base, const std::vector<AxisSpec>& axes, int jobs = 1) {
  const auto pts = sweep_points(base, axes);
  return parallel_map(pts.size(), jobs, [&](std::size_t i) { return run_guarded(pts[i]); });
}

// ---------------------------------------------------------------------------
// Optimization

struct FreeVariable {
  std::string name;  // delta, gamma_p, omega_c or r
  double lo = 0.0;
  double hi = 0.0;
};

struct OptimizeOptions {
  int grid_points = 32;    // per axis, log-spaced when lo > 0
  double rel_tol = 1e-4;   // golden-section stopping width relative to x
  int max_sweeps = 30;     // coordinate-descent sweeps (2-D)
  int jobs = 1;
};

struct OptimizeResult {
  RunRecord best;
  std::vector<double> x;  // optimum, one entry per free variable
  int evaluations = 0;
};

namespace detail {

inline bool is_free_name(std::string_view n) {
  return n == "delta" || n == "gamma_p" || n == "omega_c" || n == "r";
}

// Coordinates are mapped to log space when the whole interval is positive.
struct Coordinate {
  FreeVariable var;
  bool log = false;
  double to_u(double x) const { return log ? std::log(x) : x; }
  double to_x(double u) const { return log ? std::exp(u) : u; }
};

/// Golden-section minimum of f on [a, b] (in u space).
template <typename F>
double golden_section(F&& f, double a, double b, double rel_tol, const Coordinate& c) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200; ++it) {
    const double width = c.log ? (b - a) : (b - a) / std::max(std::abs(c.to_x(0.5 * (a + b))), 1e-300);
    if (width < rel_tol) break;
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace detail

/// Coarse grid search followed by golden-section refinement (one free
/// variable) or coordinate-descent golden section (two). Throws
/// ConvergenceFailure when the grid minimum sits on the boundary.
inline OptimizeResult optimize(const SystemParams& base, const std::vector<FreeVariable>& free,
                               const OptimizeOptions& opt = {}) {
  validate(base);
  if (free.empty() || free.size() > 2) throw InvalidParameters("optimize needs one or two free variables");
  if (opt.grid_points < 3) throw InvalidParameters("optimize needs at least 3 grid points");
  std::vector<detail::Coordinate> coords;
  for (const auto& v : free) {
    if (!detail::is_free_name(v.name)) throw InvalidParameters("cannot optimize over '" + v.name + "'");
    if (!(std::isfinite(v.lo) && std::isfinite(v.hi) && v.lo < v.hi))
      throw InvalidParameters("bounds for " + v.name + " must be finite with lo < hi");
    coords.push_back({v, v.lo > 0.0});
  }
  if (coords.size() == 2 && coords[0].var.name == coords[1].var.name)
    throw InvalidParameters("free variables must differ");

  const std::size_t dim = coords.size();
  const int n = opt.grid_points;
  std::vector<std::vector<double>> grid(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const auto& c = coords[d];
    const double ua = c.to_u(c.var.lo), ub = c.to_u(c.var.hi);
    for (int i = 0; i < n; ++i) grid[d].push_back(ua + (ub - ua) * i / (n - 1));
  }

  int evaluations = 0;
  auto params_at = [&](const std::vector<double>& u) {
    SystemParams p = base;
    for (std::size_t d = 0; d < dim; ++d) apply_axis(p, coords[d].var.name, coords[d].to_x(u[d]));
    return p;
  };
  auto objective = [&](const std::vector<double>& u) {
    ++evaluations;
    const RunRecord rec = run_guarded(params_at(u));
    return rec.converged ? rec.result.v : std::numeric_limits<double>::infinity();
  };

  // Coarse grid.
  const std::size_t total = dim == 1 ? n : std::size_t(n) * n;
  const auto values = parallel_map(total, opt.jobs, [&](std::size_t k) {
    std::vector<double> u(dim);
    if (dim == 1) u[0] = grid[0][k];
    else {
      u[0] = grid[0][k / n];
      u[1] = grid[1][k % n];
    }
    const RunRecord rec = run_guarded(params_at(u));
    return rec.converged ? rec.result.v : std::numeric_limits<double>::infinity();
  });
  evaluations += static_cast<int>(total);
  const std::size_t kbest = std::min_element(values.begin(), values.end()) - values.begin();
  if (!std::isfinite(values[kbest])) throw ConvergenceFailure("no grid point converged");
  std::vector<int> ibest(dim);
  if (dim == 1) ibest[0] = static_cast<int>(kbest);
  else {
    ibest[0] = static_cast<int>(kbest / n);
    ibest[1] = static_cast<int>(kbest % n);
  }
  for (std::size_t d = 0; d < dim; ++d) {
    if (ibest[d] == 0 || ibest[d] == n - 1)
      throw ConvergenceFailure("minimum over " + coords[d].var.name + " lies on the search boundary");
  }

  std::vector<double> u(dim);
  for (std::size_t d = 0; d < dim; ++d) u[d] = grid[d][ibest[d]];
  for (int sweep = 0; sweep < (dim == 1 ? 1 : opt.max_sweeps); ++sweep) {
    double moved = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double lo = grid[d][ibest[d] - 1], hi = grid[d][ibest[d] + 1];
      auto line = [&](double ud) {
        std::vector<double> trial = u;
        trial[d] = ud;
        return objective(trial);
      };
      const double before = u[d];
      u[d] = detail::golden_section(line, lo, hi, opt.rel_tol, coords[d]);
      const double scale = coords[d].log ? 1.0 : std::max(std::abs(coords[d].to_x(u[d])), 1e-300);
      moved = std::max(moved, std::abs(u[d] - before) / scale);
    }
    if (moved < opt.rel_tol) break;
  }

  OptimizeResult res;
  res.best = run_guarded(params_at(u));
  ++evaluations;
  if (!res.best.converged) throw ConvergenceFailure("optimum did not converge: " + res.best.error);
  for (std::size_t d = 0; d < dim; ++d) res.x.push_back(coords[d].to_x(u[d]));
  res.evaluations = evaluations;
  return res;
}

}  // namespace eitent
