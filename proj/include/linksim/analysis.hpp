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

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "linksim/config.hpp"
#include "linksim/system.hpp"

namespace linksim {

// ---- roofline ---------------------------------------------------------------

enum class Region { MemoryBound, ComputeBound };
const char* to_string(Region r);

struct RooflinePoint {
  double compute_time_ns = 0.0;  // per-tile compute time
  double total_ns = 0.0;
  double halved_total_ns = 0.0;  // total with the per-tile time halved
  double normalized_exec_time = 0.0;
  double compute_bound_ns = 0.0;
  double transfer_bound_ns = 0.0;
  Region region = Region::MemoryBound;
};

struct RooflineResult {
  std::vector<RooflinePoint> points;
  /// Simulations at the full per-tile times, in point order.
  std::vector<SimReport> reports;
  /// Per-tile compute time where the labels flip; empty when they never do.
  std::optional<double> crossover_ns;
  std::string note;
};

/// Per-tile compute time of a GEMM with inner dimension k: scale * (k + fill).
double per_tile_compute_ns(const SystolicConfig& cfg, std::uint64_t k);

/// Sweeps per-tile compute time on a GEMM workload. A point is compute bound
/// when halving its compute time cuts total time by more than 5 percent.
/// Requires at least five points.
RooflineResult roofline_sweep(const RunConfig& base, const std::vector<double>& per_tile_ns, unsigned jobs = 1);

// ---- workload mix -----------------------------------------------------------

/// Time_overall = t_other + w_gemm / p_gemm + (1 - w_gemm) / p_nongemm.
struct MixModel {
  double t_other = 0.0;
  double w_gemm = 0.5;
  double p_gemm = 1.0;
  double p_nongemm = 1.0;

  void validate() const;
};

double mix_time(const MixModel& m);
double mix_time(const MixModel& m, double w_gemm);

/// Measured phase split of one system (seconds).
struct PhaseTimes {
  double total_s = 0.0;
  double gemm_s = 0.0;
  double nongemm_s = 0.0;

  static PhaseTimes from(const SimReport& r);
  double gemm_fraction() const { return gemm_s / (gemm_s + nongemm_s); }
};

/// Mix model of `sys` for a workload whose GEMM share of work is `w_ref`:
/// p_gemm = w_ref / gemm_s, p_nongemm = (1 - w_ref) / nongemm_s.
MixModel mix_model(const PhaseTimes& sys, double w_ref);

struct ThresholdResult {
  bool crossing = false;
  double w_gemm = 0.0;       // closed form
  double w_gemm_grid = 0.0;  // 0.01 % grid scan
  /// Which system is faster when there is no crossing: "devmem", "pcie" or "tie".
  std::string dominant;
  double w_nongemm() const { return 1.0 - w_gemm; }
};

/// Solves mix_time(dev, w) == mix_time(pcie, w) for w in [0, 1].
ThresholdResult devmem_threshold(const MixModel& dev, const MixModel& pcie);

/// Threshold of a DevMem system against a PCIe system, with the reference
/// GEMM share taken from the PCIe measurement.
ThresholdResult devmem_threshold(const PhaseTimes& dev, const PhaseTimes& pcie);

// ---- sweeps and CSV ---------------------------------------------------------

struct Axis {
  std::string key;
  std::vector<std::string> values;
};

/// Parses "key=v1,v2,...". Throws ConfigError naming the axis and token.
Axis parse_axis(const std::string& spec);

inline constexpr std::size_t kDefaultSweepCap = 10000;

/// Cartesian product of `axes` over `base`, in lexicographic key order with
/// the last key varying fastest. Each value is validated against the schema.
std::vector<RunConfig> expand_sweep(const RunConfig& base, std::vector<Axis> axes, std::size_t cap = kDefaultSweepCap);

/// Runs every config on its own engine with up to `jobs` threads; results are
/// returned in input order.
std::vector<SimReport> run_all(const std::vector<RunConfig>& configs, unsigned jobs = 1);

std::vector<std::string> csv_columns();
/// Full CSV with header; normalized_exec_time is relative to the fastest row.
std::string to_csv(const std::vector<SimReport>& reports);
std::string format_number(double v);

// ---- calibration ------------------------------------------------------------

struct CalibrationTarget {
  std::string name;
  double goal = 0.0;
  double tolerance = 0.0;
  double value = 0.0;
  double residual() const { return tolerance > 0 ? std::abs(value - goal) / tolerance : 0.0; }
  bool ok() const { return residual() <= 1.0; }
};

struct CalibrationConstant {
  std::string key;
  double lo = 0.0;
  double hi = 0.0;
  bool integer = false;
};

struct CalibrationResult {
  RunConfig constants;
  std::vector<CalibrationTarget> targets;
  double max_residual = 0.0;
  std::uint64_t evaluations = 0;
  std::string report() const;
};

using TargetFn = std::function<std::vector<CalibrationTarget>(const RunConfig&)>;

/// Coordinate descent over `constants` minimizing the largest
/// tolerance-normalized residual of `evaluate`. Stops as soon as every target
/// is within tolerance, so a start point that already satisfies them is
/// returned unchanged.
CalibrationResult coordinate_descent(const RunConfig& start, const std::vector<CalibrationConstant>& constants,
                                     const TargetFn& evaluate, int rounds = 6);

}  // namespace linksim
