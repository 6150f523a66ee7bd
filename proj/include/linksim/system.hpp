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

#include <cstdint>
#include <string>

#include "linksim/accel.hpp"
#include "linksim/config.hpp"
#include "linksim/memsys.hpp"
#include "linksim/pcie.hpp"
#include "linksim/smmu.hpp"
#include "linksim/workload.hpp"

namespace linksim {

/// Typed view of a RunConfig.
struct SystemSetup {
  PcieConfig pcie;
  MemsysConfig memory;
  SmmuConfig smmu;
  SystolicConfig accel;
  CpuConfig cpu;
  double devmem_ctrl_ns = 20.0;
  double launch_ns = 2000.0;
  std::string workload_kind = "gemm";
  std::uint64_t gemm_n = 1024;
  VitSpec vit;
};

/// Throws ConfigError naming the offending key.
SystemSetup resolve(const RunConfig& cfg);

WorkloadGraph build_workload(const SystemSetup& setup);

struct SimReport {
  double total_ns = 0.0;
  double gemm_ns = 0.0;
  double nongemm_ns = 0.0;
  /// Launch overheads: total minus GEMM and Non-GEMM phases.
  double other_ns = 0.0;
  std::uint64_t bytes_h2d = 0;
  std::uint64_t bytes_d2h = 0;
  /// Analytic bounds summed over GEMM operations.
  double compute_bound_ns = 0.0;
  double transfer_bound_ns = 0.0;
  std::uint64_t gemm_ops = 0;
  std::uint64_t nongemm_ops = 0;
  TranslationStats translation;
  RunConfig config;
};

/// Runs one simulation on a private engine.
SimReport simulate(const RunConfig& cfg);

/// Non-GEMM phase time of `graph` exactly as simulate() accounts it.
double nongemm_phase_ns(const SystemSetup& setup, const WorkloadGraph& graph);

/// Re-evaluates the Non-GEMM phase of `r` under the CPU settings of `cfg`.
/// For configs differing only in cpu.* keys this matches simulate(cfg) up to
/// memory queue state carried across a changed Non-GEMM gap (about 1e-6
/// relative on ViT runs). Used by calibration to avoid re-simulating GEMMs.
SimReport reprice_nongemm(const SimReport& r, const RunConfig& cfg);

}  // namespace linksim
