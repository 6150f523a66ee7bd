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
#include <string_view>
#include <variant>
#include <vector>

#include "linksim/accel.hpp"
#include "linksim/memsys.hpp"

namespace linksim {

enum class NonGemmKind { Softmax, LayerNorm, Gelu, ResidualAdd };

const char* to_string(NonGemmKind kind);
/// Memory passes over the element array (reads plus writes).
std::uint32_t passes(NonGemmKind kind);

struct Tensor {
  std::string name;
  std::uint64_t bytes = 0;
  bool parameter = false;
  Placement residency = Placement::Host;
};

struct GemmNode {
  std::string name;
  GemmOp op;
};

struct NonGemmOp {
  NonGemmKind kind = NonGemmKind::Softmax;
  std::uint64_t element_count = 0;

  std::uint64_t bytes_touched() const { return element_count * 4 * passes(kind); }
};

struct NonGemmNode {
  std::string name;
  NonGemmOp op;
};

struct WorkloadNode {
  std::variant<GemmNode, NonGemmNode> body;
  std::vector<std::size_t> inputs;
  std::size_t output = 0;

  bool is_gemm() const { return std::holds_alternative<GemmNode>(body); }
  const std::string& name() const;
};

/// Ordered operations over a tensor table. Inputs of every node are either
/// parameters or outputs of earlier nodes.
struct WorkloadGraph {
  std::string name;
  std::vector<Tensor> tensors;
  std::vector<WorkloadNode> nodes;

  std::size_t add_tensor(std::string tensor_name, std::uint64_t bytes, bool parameter = false);
  void add_gemm(std::string node_name, GemmOp op, std::vector<std::size_t> inputs, std::size_t output);
  void add_nongemm(std::string node_name, NonGemmOp op, std::vector<std::size_t> inputs, std::size_t output);

  /// Throws SimulationFault naming the first node that reads an unproduced tensor.
  void check_well_formed() const;
  void set_residency(Placement where);

  std::uint64_t gemm_count() const;
  std::uint64_t nongemm_count() const;
  /// 2*m*n*k summed over GEMM nodes.
  double gemm_flops() const;
};

struct VitSpec {
  std::string name = "base";
  std::uint32_t layers = 12;
  std::uint32_t hidden = 768;
  std::uint32_t heads = 12;
  std::uint32_t seq_len = 197;
  std::uint32_t mlp_ratio = 4;

  void validate() const;
  std::uint32_t head_dim() const { return hidden / heads; }
};

/// base 12/768/12, large 24/1024/16, huge 32/1280/16. Throws ConfigError.
VitSpec vit_spec(std::string_view name, std::uint32_t seq_len = 197);

WorkloadGraph build_gemm(std::uint64_t n);
WorkloadGraph build_vit(const VitSpec& spec);

/// Host CPU model for Non-GEMM operations.
struct CpuConfig {
  double softmax_ns = 0.8;
  double layernorm_ns = 0.6;
  double gelu_ns = 0.4;
  double residual_ns = 0.2;
  /// Streaming bandwidth from the CPU to host DRAM (GB/s).
  double host_bw_gbps = 25.6;
  /// Exposed latency per 64-byte line when data lives in device memory.
  double numa_line_ns = 11.0;

  void validate() const;
  double per_element_ns(NonGemmKind kind) const;
};

/// element_count * cost + bytes / bandwidth, plus the per-line NUMA term for
/// device-resident data.
double nongemm_time_ns(const NonGemmOp& op, Placement residency, const CpuConfig& cpu);

}  // namespace linksim
