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

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "linksim/analysis.hpp"

namespace linksim {

using Overrides = std::vector<std::pair<std::string, std::string>>;

RunConfig with_overrides(RunConfig base, const Overrides& o);

struct Variant {
  std::string name;
  Overrides overrides;
};

/// PCIe-2GB (4 x 4 Gbps), PCIe-8GB (8 x 8 Gbps), PCIe-64GB (16 x 32 Gbps) and
/// DevMem (HBM2 device memory), in that order.
const std::vector<Variant>& transformer_systems();

/// Derived quantities of one model run on the four transformer systems.
struct TransformerSummary {
  double speedup_64_over_2 = 0.0;
  double devmem_over_64 = 0.0;
  /// DevMem Non-GEMM time over the fastest PCIe Non-GEMM time.
  double nongemm_ratio = 0.0;
  double devmem_nongemm_share = 0.0;
  bool devmem_wins_gemm = false;
  /// DevMem against PCIe-2GB, PCIe-8GB and PCIe-64GB.
  std::vector<ThresholdResult> thresholds;
};

TransformerSummary summarize_transformer(const std::vector<SimReport>& systems);

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct FigureOptions {
  bool quick = false;
  unsigned jobs = 1;
};

struct FigureResult {
  std::string name;
  std::vector<SimReport> reports;
  std::vector<Series> series;
  std::vector<std::string> summary;
};

/// fig2 (roofline), fig3 .. fig9 and table5.
const std::vector<std::string>& figure_names();

/// Runs a canned recipe on top of `base` (normally the calibrated constants).
/// Throws ConfigError listing the valid names when `name` is unknown.
FigureResult run_figure(const std::string& name, const RunConfig& base, const FigureOptions& opt = {});

/// Plot-data text: one "x y" pair per line.
std::string plot_data(const Series& s);

// Recipe building blocks, shared with the acceptance checks.

/// GEMM runs of the fig4 packet-size sweep at one link bandwidth (GB/s).
std::vector<RunConfig> packet_sweep_configs(const RunConfig& base, double link_gbps,
                                            const std::vector<std::uint32_t>& packets);
inline const std::vector<std::uint32_t> kPacketSizes = {64, 128, 256, 512, 1024, 2048, 4096};

/// Overrides placing a run in the memory-bound GEMM regime used by the fig4 and fig6 recipes.
Overrides packet_recipe_overrides();
Overrides memory_recipe_overrides();

// Calibration.

/// "packet", "transformer" or "all".
std::vector<CalibrationConstant> calibration_constants(const std::string& scope);
TargetFn calibration_targets(const std::string& scope, unsigned jobs);
/// Config text holding `result` constants plus every non-default key of it.
std::string constants_file(const CalibrationResult& result);

}  // namespace linksim
