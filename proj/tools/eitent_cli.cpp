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

// Command-line front end: run, scan, optimize, figure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eitent/eitent.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitIo = 4;

struct CommonFlags {
  eitent::SystemParams params;
  std::optional<double> delta_p;
  std::optional<double> delta_c;
  int jobs = 1;
  std::string out;

  void attach(CLI::App* app) {
    app->add_option("--alpha", params.alpha, "optical density")->capture_default_str();
    app->add_option("--gamma-p", params.gamma_p, "ground-state decoherence rate")->capture_default_str();
    app->add_option("--delta", params.delta, "two-photon detuning")->capture_default_str();
    app->add_option("--omega-c", params.omega_c0, "input coupling Rabi frequency")->capture_default_str();
    app->add_option("--r", params.r, "input probe/coupling amplitude ratio")->capture_default_str();
    app->add_option("--delta-p", delta_p, "probe one-photon detuning (default +delta/2)");
    app->add_option("--delta-c", delta_c, "coupling one-photon detuning (default -delta/2)");
    app->add_option("--steps", params.n_steps, "base number of zeta steps")->capture_default_str();
    app->add_option("--conv-tol", params.conv_tol, "tolerance on V under grid doubling")->capture_default_str();
    app->add_option("--jobs", jobs, "worker threads for sweeps")->capture_default_str();
  }

  eitent::SystemParams resolved() const {
    eitent::SystemParams p = params;
    p.delta_p_override = delta_p;
    p.delta_c_override = delta_c;
    return p;
  }
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw eitent::IoError("cannot write " + path);
  f << text;
  if (!f) throw eitent::IoError("write failed for " + path);
}

void warn_if_outside_eit(const eitent::SystemParams& p) {
  if (p.r > 1.0) std::cerr << "warning: r > 1, probe stronger than coupling (outside the EIT regime)\n";
}

eitent::FreeVariable parse_free(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw eitent::InvalidParameters("--free expects name=lo:hi, got '" + text + "'");
  const auto parts = eitent::detail::split(text.substr(eq + 1), ':');
  if (parts.size() != 2) throw eitent::InvalidParameters("--free expects name=lo:hi, got '" + text + "'");
  return {text.substr(0, eq), eitent::detail::parse_number(parts[0], text),
          eitent::detail::parse_number(parts[1], text)};
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* docs = std::getenv("EITENT_SEED_DOCS"); docs && std::string(docs) == "1") {
    std::cout << "eitent " << eitent::kVersion << "\n"
              << "units: all rates and Rabi frequencies in units of the excited-state decay rate Gamma = 1;\n"
              << "       position zeta = z / L in [0, 1]; alpha is the optical density;\n"
              << "       eps = delta / omega_c^2, mu = alpha * eps * r.\n";
    return kExitOk;
  }

  CLI::App app{"Entanglement of probe and coupling light in an EIT medium"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(eitent::kVersion));

  CommonFlags run_flags, scan_flags, opt_flags;
  auto* run_cmd = app.add_subcommand("run", "single run, JSON record");
  run_flags.attach(run_cmd);
  run_cmd->add_option("--out", run_flags.out, "output file (default stdout)");

  std::vector<std::string> axis_texts;
  auto* scan_cmd = app.add_subcommand("scan", "1-D or 2-D sweep, CSV table");
  scan_flags.attach(scan_cmd);
  scan_cmd->add_option("--out", scan_flags.out, "output file (default stdout)");
  scan_cmd->add_option("--axis", axis_texts, "name=start:stop:count[:log]; names alpha, delta, gamma_p, omega_c, r, eps")
      ->required();

  std::vector<std::string> free_texts;
  int grid_points = 32;
  auto* opt_cmd = app.add_subcommand("optimize", "minimize V over 1 or 2 variables");
  opt_flags.attach(opt_cmd);
  opt_cmd->add_option("--out", opt_flags.out, "output file (default stdout)");
  opt_cmd->add_option("--free", free_texts, "name=lo:hi; names delta, gamma_p, omega_c, r")->required();
  opt_cmd->add_option("--grid", grid_points, "coarse grid points per axis")->capture_default_str();

  std::string fig_id, out_dir = ".";
  eitent::FigureOptions fig_opts;
  auto* fig_cmd = app.add_subcommand("figure", "write the data behind one figure");
  fig_cmd->add_option("id", fig_id, "2a 2b 3a 3b 4a 4b 4c 4d 5a 5b 5c 6")->required();
  fig_cmd->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  fig_cmd->add_option("--steps", fig_opts.numerics.n_steps, "base number of zeta steps")->capture_default_str();
  fig_cmd->add_option("--conv-tol", fig_opts.numerics.conv_tol, "tolerance on V under grid doubling")
      ->capture_default_str();
  fig_cmd->add_option("--jobs", fig_opts.jobs, "worker threads")->capture_default_str();
  fig_cmd->add_option("--points", fig_opts.points, "points per axis (0 = figure default)")->capture_default_str();
  fig_cmd->add_option("--inner-grid", fig_opts.inner_grid, "grid of inner optimizations (figure 4)")
      ->capture_default_str();
  fig_cmd->add_option("--alphas", fig_opts.alphas, "optical densities of figure 4 curves")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*run_cmd) {
      const auto p = run_flags.resolved();
      eitent::validate(p);
      warn_if_outside_eit(p);
      write_output(run_flags.out, eitent::to_json(eitent::run_single(p)).dump(2) + "\n");
    } else if (*scan_cmd) {
      const auto p = scan_flags.resolved();
      eitent::validate(p);
      warn_if_outside_eit(p);
      std::vector<eitent::AxisSpec> axes;
      for (const auto& t : axis_texts) axes.push_back(eitent::parse_axis(t));
      write_output(scan_flags.out, eitent::to_csv(eitent::scan(p, axes, scan_flags.jobs)));
    } else if (*opt_cmd) {
      const auto p = opt_flags.resolved();
      eitent::validate(p);
      std::vector<eitent::FreeVariable> free;
      for (const auto& t : free_texts) free.push_back(parse_free(t));
      eitent::OptimizeOptions opt;
      opt.grid_points = grid_points;
      opt.jobs = opt_flags.jobs;
      const auto res = eitent::optimize(p, free, opt);
      auto j = eitent::to_json(res.best);
      for (std::size_t i = 0; i < free.size(); ++i) j["optimum"][free[i].name] = res.x[i];
      j["evaluations"] = res.evaluations;
      write_output(opt_flags.out, j.dump(2) + "\n");
    } else if (*fig_cmd) {
      eitent::validate(fig_opts.numerics);
      const auto man = eitent::reproduce_figure(fig_id, out_dir, fig_opts);
      std::cout << man.dump(2) << "\n";
    }
  } catch (const eitent::InvalidParameters& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const eitent::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const eitent::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const eitent::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConvergence;
  }
  return kExitOk;
}
