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

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eitent/scan.hpp"
#include "eitent/version.hpp"

namespace eitent {

inline constexpr const char* kFigureIds[] = {"2a", "2b", "3a", "3b", "4a", "4b", "4c",
                                            "4d", "5a", "5b", "5c", "6"};

inline bool is_figure_id(std::string_view id) {
  return std::find(std::begin(kFigureIds), std::end(kFigureIds), id) != std::end(kFigureIds);
}

struct FigureOptions {
  SystemParams numerics;  // only n_steps, conv_tol, max_refinements are used
  int jobs = 1;
  int points = 0;         // points per axis; 0 keeps the figure default
  int inner_grid = 32;    // grid of the inner 1-D optimizations (figure 4)
  std::vector<double> alphas = {100.0, 300.0, 1000.0, 3000.0};  // figure 4 curves
};

/// Axis ranges used by the reproduced figures. None of them are legible in
/// the source figures; all are recorded as defaults in every manifest.
namespace figure_defaults {
inline const AxisSpec kGammaP{"gamma_p", 1e-4, 5e-2, 100, true};
inline const AxisSpec kDelta{"delta", 1e-4, 5e-2, 100, true};
inline const AxisSpec kOmegaC{"omega_c", 0.3, 6.0, 60, true};
inline const AxisSpec kRatio{"r", 0.02, 0.3, 40, true};
inline const AxisSpec kEps{"eps", 1e-3, 3e-2, 40, true};
inline const AxisSpec kRatio6{"r", 0.02, 0.3, 60, true};
inline const AxisSpec kEps6{"eps", 3e-3, 1e-2, 60, true};
inline const std::vector<double> kOmegaC5 = {0.85, 1.2, 1.7};
}  // namespace figure_defaults

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

inline nlohmann::json axis_json(const AxisSpec& a) {
  return {{"name", a.name}, {"start", a.start}, {"stop", a.stop}, {"count", a.count},
          {"scale", a.log ? "log" : "linear"}, {"default_range", true}};
}

inline AxisSpec with_points(AxisSpec a, int points) {
  if (points > 0) a.count = points;
  return a;
}

inline SystemParams figure_base(const FigureOptions& o) {
  SystemParams p;
  p.n_steps = o.numerics.n_steps;
  p.conv_tol = o.numerics.conv_tol;
  p.max_refinements = o.numerics.max_refinements;
  p.symmetrize = o.numerics.symmetrize;
  return p;
}

struct InnerOptimum {
  std::string x_name;
  AxisSpec x_axis;
  FreeVariable inner;
};

inline InnerOptimum figure4_setup(std::string_view id) {
  if (id == "4a") return {"gamma_p", {"gamma_p", 1e-4, 1e-2, 12, true}, {"omega_c", 0.05, 20.0}};
  if (id == "4b") return {"omega_c", {"omega_c", 0.3, 3.0, 12, true}, {"gamma_p", 1e-6, 0.5}};
  if (id == "4c") return {"delta", {"delta", 1e-3, 1e-1, 12, true}, {"omega_c", 0.05, 20.0}};
  return {"omega_c", {"omega_c", 0.3, 3.0, 12, true}, {"delta", 1e-5, 1.0}};
}

}  // namespace detail

/// Figure-4 style curve: for every x on the axis, V minimized over the inner
/// variable. Each row is the record at the inner optimum.
inline std::vector<RunRecord> optimized_curve(const SystemParams& base, const AxisSpec& x_axis,
                                              const FreeVariable& inner, int inner_grid, int jobs) {
  const auto pts = sweep_points(base, {x_axis});
  return parallel_map(pts.size(), jobs, [&](std::size_t i) {
    try {
      OptimizeOptions opt;
      opt.grid_points = inner_grid;
      return optimize(pts[i], {inner}, opt).best;
    } catch (const Error& e) {
      RunRecord rec;
      rec.params = pts[i];
      rec.error = e.what();
      return rec;
    }
  });
}

/// Writes the data behind one figure into out_dir and returns the manifest
/// (also written as fig<id>_manifest.json).
inline nlohmann::json reproduce_figure(const std::string& id, const std::filesystem::path& out_dir,
                                       const FigureOptions& opt = {}) {
  namespace fd = figure_defaults;
  if (!is_figure_id(id)) throw InvalidParameters("unknown figure '" + id + "'");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) throw IoError("cannot create " + out_dir.string());

  SystemParams base = detail::figure_base(opt);
  nlohmann::json man;
  man["figure"] = id;
  man["tool"] = "eitent";
  man["tool_version"] = kVersion;
  man["units"] = "Gamma = 1, zeta in [0, 1]";
  man["files"] = nlohmann::json::array();
  man["curves"] = nlohmann::json::array();

  auto emit = [&](const std::string& name, const std::string& text, nlohmann::json curve) {
    detail::write_text(out_dir / name, text);
    man["files"].push_back(name);
    curve["file"] = name;
    man["curves"].push_back(std::move(curve));
  };

  const char panel = id[0];
  if (id == "2a" || id == "2b" || id == "3a" || id == "3b") {
    base.alpha = 1000.0;
    base.r = 0.1;
    AxisSpec axis;
    if (id == "2a") { base.omega_c0 = 1.0; base.delta = 0.0; axis = fd::kGammaP; }
    if (id == "2b") { base.gamma_p = 0.005; base.delta = 0.0; axis = fd::kOmegaC; }
    if (id == "3a") { base.omega_c0 = 1.0; base.gamma_p = 0.0; axis = fd::kDelta; }
    if (id == "3b") { base.delta = 0.01; base.gamma_p = 0.0; axis = fd::kOmegaC; }
    axis = detail::with_points(axis, opt.points);
    const auto rows = scan(base, {axis}, opt.jobs);
    emit("fig" + id + ".csv", to_csv(rows), {{"axes", {detail::axis_json(axis)}}});
    man["parameters"] = params_to_json(base);
  } else if (panel == '4') {
    const auto setup = detail::figure4_setup(id);
    const AxisSpec axis = detail::with_points(setup.x_axis, opt.points);
    base.r = 0.1;
    base.omega_c0 = 1.0;
    base.delta = 0.0;
    base.gamma_p = 0.0;
    for (double alpha : opt.alphas) {
      SystemParams p = base;
      p.alpha = alpha;
      const auto rows = optimized_curve(p, axis, setup.inner, opt.inner_grid, opt.jobs);
      char name[64];
      std::snprintf(name, sizeof name, "fig%s_alpha%g.csv", id.c_str(), alpha);
      emit(name, to_csv(rows),
           {{"alpha", alpha},
            {"axes", {detail::axis_json(axis)}},
            {"minimized_over", {{"name", setup.inner.name}, {"lo", setup.inner.lo}, {"hi", setup.inner.hi},
                                {"grid", opt.inner_grid}}}});
    }
    man["parameters"] = params_to_json(base);
  } else if (panel == '5') {
    base.alpha = 1000.0;
    base.omega_c0 = fd::kOmegaC5[id[1] - 'a'];
    const AxisSpec ra = detail::with_points(fd::kRatio, opt.points);
    const AxisSpec ea = detail::with_points(fd::kEps, opt.points);
    const auto rows = scan(base, {ra, ea}, opt.jobs);
    emit("fig" + id + ".csv", to_csv(rows),
         {{"axes", {detail::axis_json(ra), detail::axis_json(ea)}},
          {"note", "Omega_p = r * omega_c; delta = eps * omega_c^2"}});
    man["parameters"] = params_to_json(base);
  } else {
    base.alpha = 1000.0;
    base.omega_c0 = 1.0;
    const AxisSpec ea = detail::with_points(fd::kEps6, opt.points);
    const AxisSpec ra = detail::with_points(fd::kRatio6, opt.points);
    const auto rows = scan(base, {ea, ra}, opt.jobs);
    emit("fig6.csv", to_csv(rows), {{"axes", {detail::axis_json(ea), detail::axis_json(ra)}}});
    std::string hyper = "eps,r\n";
    for (double e : ea.values()) hyper += format_number(e) + "," + format_number(0.5 / (base.alpha * e)) + "\n";
    emit("fig6_mu_half.csv", hyper, {{"curve", "alpha * eps * r = 1/2"}});
    man["parameters"] = params_to_json(base);
  }
  detail::write_text(out_dir / ("fig" + id + "_manifest.json"), man.dump(2) + "\n");
  return man;
}

}  // namespace eitent
