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

#include "linksim/system.hpp"

#include <algorithm>
#include <memory>

#include "linksim/errors.hpp"

namespace linksim {

namespace {

Placement parse_placement(const std::string& v) {
  if (v == "host") return Placement::Host;
  if (v == "device") return Placement::Device;
  throw ConfigError("mem.placement must be host or device (got '" + v + "')");
}

}  // namespace

SystemSetup resolve(const RunConfig& cfg) {
  SystemSetup s;

  s.pcie.lanes = static_cast<std::uint32_t>(cfg.get_u64("pcie.lanes"));
  s.pcie.lane_rate_gbps = cfg.get_double("pcie.lane_rate_gbps");
  s.pcie.packet_payload_bytes = static_cast<std::uint32_t>(cfg.get_u64("pcie.packet_bytes"));
  s.pcie.header_bytes = static_cast<std::uint32_t>(cfg.get_u64("pcie.header_bytes"));
  s.pcie.rc_latency_ns = cfg.get_double("pcie.rc_latency_ns");
  s.pcie.switch_latency_ns = cfg.get_double("pcie.switch_latency_ns");
  s.pcie.turnaround_ns = cfg.get_double("pcie.turnaround_ns");
  s.pcie.inflight_window_bytes = cfg.get_u64("pcie.window_bytes");
  s.pcie.validate();

  const Placement placement = parse_placement(cfg.get("mem.placement"));
  const std::string preset = cfg.get("mem.preset");
  MemoryDeviceSpec spec;
  if (preset == "custom") {
    if (cfg.get("mem.bandwidth_gbps") == "preset" || cfg.get("mem.latency_ns") == "preset") {
      throw ConfigError("mem.preset=custom requires numeric mem.bandwidth_gbps and mem.latency_ns");
    }
    spec = MemoryDeviceSpec{"custom", 1, 64, 1.0, 0.0, 0.0, placement};
  } else {
    spec = memory_preset(preset, placement);
  }
  if (cfg.get("mem.bandwidth_gbps") != "preset") spec.bandwidth_gbps = cfg.get_double("mem.bandwidth_gbps");
  if (cfg.get("mem.latency_ns") != "preset") spec.fixed_latency_ns = cfg.get_double("mem.latency_ns");
  spec.validate();
  if (placement == Placement::Host) {
    s.memory.host = spec;
  } else {
    s.memory.device = spec;
  }
  s.memory.llc = CacheSpec::last_level(cfg.get_u64("cache.llc_bytes"));
  s.memory.iocache = CacheSpec::io_cache(cfg.get_u64("cache.iocache_bytes"));
  s.memory.mode = parse_access_mode(cfg.get("mode"));
  if (s.memory.mode == AccessMode::DevMem && placement != Placement::Device) {
    throw ConfigError("mode=devmem requires mem.placement=device");
  }
  s.memory.validate();

  s.smmu.enabled = cfg.get_bool("smmu.enabled");
  s.smmu.utlb_entries = static_cast<std::uint32_t>(cfg.get_u64("smmu.utlb_entries"));
  s.smmu.levels = static_cast<std::uint32_t>(cfg.get_u64("smmu.levels"));
  s.smmu.validate();

  s.accel.rows = static_cast<std::uint32_t>(cfg.get_u64("accel.rows"));
  s.accel.cols = static_cast<std::uint32_t>(cfg.get_u64("accel.cols"));
  s.accel.fill_cycles = static_cast<std::uint32_t>(cfg.get_u64("accel.fill_cycles"));
  s.accel.compute_scale = cfg.get_double("accel.compute_scale");
  s.accel.buffer_bytes = cfg.get_u64("accel.buffer_bytes");
  s.accel.block = static_cast<std::uint32_t>(cfg.get_u64("accel.block"));
  s.accel.validate();
  s.devmem_ctrl_ns = cfg.get_double("accel.devmem_ctrl_ns");

  s.cpu.softmax_ns = cfg.get_double("cpu.softmax_ns");
  s.cpu.layernorm_ns = cfg.get_double("cpu.layernorm_ns");
  s.cpu.gelu_ns = cfg.get_double("cpu.gelu_ns");
  s.cpu.residual_ns = cfg.get_double("cpu.residual_ns");
  s.cpu.host_bw_gbps = cfg.get_double("cpu.host_bw_gbps");
  s.cpu.numa_line_ns = cfg.get_double("cpu.numa_line_ns");
  s.cpu.validate();

  s.launch_ns = cfg.get_double("sys.launch_ns");
  if (!(s.launch_ns >= 0.0)) throw ConfigError("sys.launch_ns must be >= 0");

  s.workload_kind = cfg.get("workload.kind");
  if (s.workload_kind != "gemm" && s.workload_kind != "vit") {
    throw ConfigError("workload.kind must be gemm or vit (got '" + s.workload_kind + "')");
  }
  s.gemm_n = cfg.get_u64("workload.n");
  if (s.gemm_n == 0) throw ConfigError("workload.n must be >= 1");
  s.vit = vit_spec(cfg.get("workload.vit"), static_cast<std::uint32_t>(cfg.get_u64("workload.seq_len")));
  return s;
}

WorkloadGraph build_workload(const SystemSetup& setup) {
  WorkloadGraph g = setup.workload_kind == "vit" ? build_vit(setup.vit) : build_gemm(setup.gemm_n);
  g.check_well_formed();
  g.set_residency(setup.memory.mode == AccessMode::DevMem ? Placement::Device : Placement::Host);
  return g;
}

SimReport simulate(const RunConfig& cfg) {
  const SystemSetup setup = resolve(cfg);
  const WorkloadGraph graph = build_workload(setup);
  const bool devmem = setup.memory.mode == AccessMode::DevMem;

  const AddressRegion data{"data", 0, PageTable::kTableBase};
  MemorySystem memory(setup.memory, {data, PageTable::table_region()}, {data});
  PageTable table(setup.smmu.levels);
  std::unique_ptr<Smmu> smmu;
  if (setup.smmu.enabled && !devmem) smmu = std::make_unique<Smmu>(setup.smmu, table, memory);

  std::unique_ptr<DataPath> path;
  if (devmem) {
    path = std::make_unique<DevicePath>(memory, setup.devmem_ctrl_ns);
  } else {
    path = std::make_unique<HostPath>(setup.pcie, memory, setup.memory.mode, smmu.get());
  }

  // GEMM operands are staged in one page-aligned DMA arena at virtual address 0.
  std::uint64_t arena = 0;
  for (const auto& node : graph.nodes) {
    if (node.is_gemm()) arena = std::max(arena, GemmLayout::at(0, std::get<GemmNode>(node.body).op).end);
  }
  table.map(0, arena);

  Engine engine;
  GemmAccelerator accel(engine, setup.accel, *path);
  const ComponentId host = engine.register_component("host.cpu");
  auto advance = [&](double ns) {
    if (ns <= 0.0) return;
    engine.schedule(engine.now() + SimTime::ceil_ns(ns), host, [] {});
    engine.run();
  };

  SimReport r;
  r.config = cfg;
  for (const auto& node : graph.nodes) {
    if (const auto* g = std::get_if<GemmNode>(&node.body)) {
      advance(setup.launch_ns);
      const double t0 = engine.now().as_double();
      const GemmTiming t = accel.run(g->op, GemmLayout::at(0, g->op));
      r.gemm_ns += engine.now().as_double() - t0;
      r.compute_bound_ns += t.compute_ns;
      r.transfer_bound_ns += t.transfer_ns;
      ++r.gemm_ops;
    } else {
      const auto& ng = std::get<NonGemmNode>(node.body);
      const double t0 = engine.now().as_double();
      advance(nongemm_time_ns(ng.op, graph.tensors[node.output].residency, setup.cpu));
      r.nongemm_ns += engine.now().as_double() - t0;
      ++r.nongemm_ops;
    }
  }
  r.total_ns = engine.now().as_double();
  r.other_ns = r.total_ns - r.gemm_ns - r.nongemm_ns;
  r.bytes_h2d = path->bytes_in();
  r.bytes_d2h = path->bytes_out();
  if (smmu) {
    r.translation = smmu->report(r.total_ns);
  } else {
    r.translation.footprint_pages = table.mapped_pages();
  }
  return r;
}

double nongemm_phase_ns(const SystemSetup& setup, const WorkloadGraph& graph) {
  double total = 0.0;
  for (const auto& node : graph.nodes) {
    if (const auto* ng = std::get_if<NonGemmNode>(&node.body)) {
      const double ns = nongemm_time_ns(ng->op, graph.tensors[node.output].residency, setup.cpu);
      if (ns > 0.0) total += SimTime::ceil_ns(ns).as_double();
    }
  }
  return total;
}

SimReport reprice_nongemm(const SimReport& r, const RunConfig& cfg) {
  const SystemSetup setup = resolve(cfg);
  SimReport out = r;
  out.nongemm_ns = nongemm_phase_ns(setup, build_workload(setup));
  out.total_ns = out.gemm_ns + out.nongemm_ns + out.other_ns;
  out.config = cfg;
  return out;
}

}  // namespace linksim
