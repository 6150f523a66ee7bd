/*
 * Copyright 2026 The linksim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "linksim/analysis.hpp"
#include "linksim/errors.hpp"
#include "linksim/experiments.hpp"

namespace fs = std::filesystem;
using namespace linksim;

namespace {

RunConfig load_config(const std::string& path, const std::vector<std::string>& sets) {
  RunConfig cfg = path.empty() ? RunConfig{} : RunConfig::load(path);
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value (got '" + s + "')");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
  (void)resolve(cfg);
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

void print_report(const SimReport& r) {
  const auto& t = r.translation;
  std::cout << "total_ns            " << format_number(r.total_ns) << '\n'
            << "gemm_ns             " << format_number(r.gemm_ns) << " (" << r.gemm_ops << " ops)\n"
            << "nongemm_ns          " << format_number(r.nongemm_ns) << " (" << r.nongemm_ops << " ops)\n"
            << "other_ns            " << format_number(r.other_ns) << '\n'
            << "bytes_h2d           " << r.bytes_h2d << '\n'
            << "bytes_d2h           " << r.bytes_d2h << '\n'
            << "compute_bound_ns    " << format_number(r.compute_bound_ns) << '\n'
            << "transfer_bound_ns   " << format_number(r.transfer_bound_ns) << '\n'
            << "translation         " << t.translation_count << " lookups, " << t.utlb_misses << " misses, "
            << t.ptw_count << " walks, overhead " << format_number(t.overhead_percent) << "%\n";
}

int cmd_run(const RunConfig& cfg, const std::string& out) {
  const SimReport r = simulate(cfg);
  print_report(r);
  if (!out.empty()) {
    const std::string csv = to_csv({r});
    const bool fresh = !fs::exists(out) || fs::file_size(out) == 0;
    std::ofstream f(out, std::ios::binary | std::ios::app);
    if (!f) throw ConfigError("cannot write " + out);
    f << (fresh ? csv : csv.substr(csv.find('\n') + 1));
  }
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::vector<std::string>& axis_specs, const std::string& out,
              unsigned jobs) {
  std::vector<Axis> axes;
  for (const auto& a : axis_specs) axes.push_back(parse_axis(a));
  const auto start = std::chrono::steady_clock::now();
  const auto cfgs = expand_sweep(cfg, axes);
  const auto reports = run_all(cfgs, jobs);
  const std::string csv = to_csv(reports);
  if (out.empty()) {
    std::cout << csv;
  } else {
    write_file(out, csv);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cerr << reports.size() << " points in " << secs << " s\n";
  return 0;
}

int cmd_figure(const std::string& name, const RunConfig& cfg, const std::string& out, bool quick, unsigned jobs) {
  const FigureResult f = run_figure(name, cfg, {quick, jobs});
  const fs::path dir = out.empty() ? fs::path("figures") : fs::path(out);
  write_file(dir / (name + ".csv"), to_csv(f.reports));
  for (const auto& s : f.series) write_file(dir / (name + "_" + s.name + ".dat"), plot_data(s));
  for (const auto& line : f.summary) std::cout << line << '\n';
  std::cout << "wrote " << (dir / (name + ".csv")).string() << " and " << f.series.size() << " plot-data files\n";
  return 0;
}

int cmd_calibrate(const RunConfig& cfg, const std::string& scope, const std::string& out, unsigned jobs) {
  const auto constants = calibration_constants(scope);
  const CalibrationResult r = coordinate_descent(cfg, constants, calibration_targets(scope, jobs));
  std::cout << r.report();
  const std::string text = constants_file(r);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
    std::cout << "wrote " << out << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linksim: system-level accelerator interconnect simulator"};
  app.require_subcommand(1);

  std::string config, out, scope = "all", figure;
  std::vector<std::string> sets, axes;
  bool quick = false;
  unsigned jobs = 1;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "key=value configuration file");
    sub->add_option("--set", sets, "override one key (key=value), repeatable");
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1u, 1024u));
  };
  auto* run = app.add_subcommand("run", "simulate one configuration");
  common(run);
  run->add_option("--out", out, "CSV file to append the result row to");
  auto* sweep = app.add_subcommand("sweep", "simulate the cartesian product of --axis values");
  common(sweep);
  sweep->add_option("--axis", axes, "key=v1,v2,... (repeatable)");
  sweep->add_option("--out", out, "CSV output file (stdout when omitted)");
  auto* fig = app.add_subcommand("figure", "run a canned figure recipe");
  common(fig);
  fig->add_option("name", figure, "fig2..fig9 or table5")->required();
  fig->add_option("--out", out, "output directory (default ./figures)");
  fig->add_flag("--quick", quick, "coarser grid");
  auto* cal = app.add_subcommand("calibrate", "fit calibration constants to the reference targets");
  common(cal);
  cal->add_option("--scope", scope, "packet, transformer or all");
  cal->add_option("--out", out, "constants file to write");
  auto* keys = app.add_subcommand("keys", "list every config key with its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (*keys) {
    for (const auto& k : config_keys()) std::cout << k.name << " = " << k.default_value << "  # " << k.help << '\n';
    return 0;
  }

  try {
    const RunConfig cfg = load_config(config, sets);
    if (*run) return cmd_run(cfg, out);
    if (*sweep) return cmd_sweep(cfg, axes, out, jobs);
    if (*fig) return cmd_figure(figure, cfg, out, quick, jobs);
    if (*cal) return cmd_calibrate(cfg, scope, out, jobs);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
