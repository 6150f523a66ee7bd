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

#include "linksim/workload.hpp"

#include "linksim/errors.hpp"

namespace linksim {

const char* to_string(NonGemmKind kind) {
  switch (kind) {
    case NonGemmKind::Softmax: return "softmax";
    case NonGemmKind::LayerNorm: return "layernorm";
    case NonGemmKind::Gelu: return "gelu";
    case NonGemmKind::ResidualAdd: return "residual_add";
  }
  return "?";
}

std::uint32_t passes(NonGemmKind kind) {
  switch (kind) {
    case NonGemmKind::Softmax: return 3;
    case NonGemmKind::LayerNorm: return 3;
    case NonGemmKind::Gelu: return 2;
    case NonGemmKind::ResidualAdd: return 3;
  }
  return 1;
}

const std::string& WorkloadNode::name() const {
  return is_gemm() ? std::get<GemmNode>(body).name : std::get<NonGemmNode>(body).name;
}

std::size_t WorkloadGraph::add_tensor(std::string tensor_name, std::uint64_t bytes, bool parameter) {
  tensors.push_back(Tensor{std::move(tensor_name), bytes, parameter, Placement::Host});
  return tensors.size() - 1;
}

void WorkloadGraph::add_gemm(std::string node_name, GemmOp op, std::vector<std::size_t> inputs, std::size_t output) {
  if (op.m == 0 || op.n == 0 || op.k == 0) throw ConfigError("GEMM '" + node_name + "' has a zero dimension");
  nodes.push_back(WorkloadNode{GemmNode{std::move(node_name), op}, std::move(inputs), output});
}

void WorkloadGraph::add_nongemm(std::string node_name, NonGemmOp op, std::vector<std::size_t> inputs,
                                std::size_t output) {
  if (op.element_count == 0) throw ConfigError("Non-GEMM '" + node_name + "' has no elements");
  nodes.push_back(WorkloadNode{NonGemmNode{std::move(node_name), op}, std::move(inputs), output});
}

void WorkloadGraph::check_well_formed() const {
  std::vector<bool> ready(tensors.size(), false);
  for (std::size_t t = 0; t < tensors.size(); ++t) ready[t] = tensors[t].parameter;
  for (const auto& node : nodes) {
    for (std::size_t in : node.inputs) {
      if (in >= tensors.size() || !ready[in]) {
        throw SimulationFault("workload '" + name + "': node '" + node.name() + "' reads tensor " +
                              (in < tensors.size() ? "'" + tensors[in].name + "'" : std::to_string(in)) +
                              " before it is produced");
      }
    }
    if (node.output >= tensors.size()) throw SimulationFault("node '" + node.name() + "' writes an unknown tensor");
    ready[node.output] = true;
  }
}

void WorkloadGraph::set_residency(Placement where) {
  for (auto& t : tensors) t.residency = where;
}

std::uint64_t WorkloadGraph::gemm_count() const {
  std::uint64_t c = 0;
  for (const auto& n : nodes) c += n.is_gemm();
  return c;
}

std::uint64_t WorkloadGraph::nongemm_count() const { return nodes.size() - gemm_count(); }

double WorkloadGraph::gemm_flops() const {
  double f = 0.0;
  for (const auto& n : nodes) {
    if (!n.is_gemm()) continue;
    const GemmOp& op = std::get<GemmNode>(n.body).op;
    f += 2.0 * static_cast<double>(op.m) * static_cast<double>(op.n) * static_cast<double>(op.k);
  }
  return f;
}

void VitSpec::validate() const {
  if (layers == 0 || hidden == 0 || heads == 0 || seq_len == 0 || mlp_ratio == 0) {
    throw ConfigError("ViT dimensions must be >= 1");
  }
  if (hidden % heads != 0) {
    throw ConfigError("ViT hidden size " + std::to_string(hidden) + " is not divisible by " + std::to_string(heads) +
                      " heads");
  }
}

VitSpec vit_spec(std::string_view name, std::uint32_t seq_len) {
  VitSpec s;
  s.name = std::string(name);
  s.seq_len = seq_len;
  if (name == "base") {
    s.layers = 12, s.hidden = 768, s.heads = 12;
  } else if (name == "large") {
    s.layers = 24, s.hidden = 1024, s.heads = 16;
  } else if (name == "huge") {
    s.layers = 32, s.hidden = 1280, s.heads = 16;
  } else {
    throw ConfigError("workload.vit must be base, large or huge (got '" + std::string(name) + "')");
  }
  s.validate();
  return s;
}

WorkloadGraph build_gemm(std::uint64_t n) {
  if (n == 0) throw ConfigError("workload.n must be >= 1");
  WorkloadGraph g;
  g.name = "gemm-" + std::to_string(n);
  const std::uint64_t bytes = n * n * 4;
  const std::size_t a = g.add_tensor("A", bytes, true);
  const std::size_t b = g.add_tensor("B", bytes, true);
  const std::size_t c = g.add_tensor("C", bytes);
  g.add_gemm("gemm", GemmOp{n, n, n}, {a, b}, c);
  return g;
}

WorkloadGraph build_vit(const VitSpec& spec) {
  spec.validate();
  WorkloadGraph g;
  g.name = "vit-" + spec.name;
  const std::uint64_t s = spec.seq_len, d = spec.hidden, h = spec.heads, dh = spec.head_dim();
  const std::uint64_t f = d * spec.mlp_ratio;
  std::size_t x = g.add_tensor("embeddings", s * d * 4, true);
  for (std::uint32_t l = 0; l < spec.layers; ++l) {
    const std::string p = "l" + std::to_string(l) + ".";
    const std::size_t w_qkv = g.add_tensor(p + "w_qkv", d * 3 * d * 4, true);
    const std::size_t w_proj = g.add_tensor(p + "w_proj", d * d * 4, true);
    const std::size_t w_fc1 = g.add_tensor(p + "w_fc1", d * f * 4, true);
    const std::size_t w_fc2 = g.add_tensor(p + "w_fc2", f * d * 4, true);

    const std::size_t ln1 = g.add_tensor(p + "ln1", s * d * 4);
    g.add_nongemm(p + "ln1", NonGemmOp{NonGemmKind::LayerNorm, s * d}, {x}, ln1);
    const std::size_t qkv = g.add_tensor(p + "qkv", s * 3 * d * 4);
    g.add_gemm(p + "qkv", GemmOp{s, 3 * d, d}, {ln1, w_qkv}, qkv);
    const std::size_t scores = g.add_tensor(p + "scores", h * s * s * 4);
    for (std::uint64_t i = 0; i < h; ++i) {
      g.add_gemm(p + "score.h" + std::to_string(i), GemmOp{s, s, dh}, {qkv}, scores);
    }
    const std::size_t probs = g.add_tensor(p + "probs", h * s * s * 4);
    g.add_nongemm(p + "softmax", NonGemmOp{NonGemmKind::Softmax, h * s * s}, {scores}, probs);
    const std::size_t ctx = g.add_tensor(p + "ctx", s * d * 4);
    for (std::uint64_t i = 0; i < h; ++i) {
      g.add_gemm(p + "attn_v.h" + std::to_string(i), GemmOp{s, dh, s}, {probs, qkv}, ctx);
    }
    const std::size_t proj = g.add_tensor(p + "proj", s * d * 4);
    g.add_gemm(p + "proj", GemmOp{s, d, d}, {ctx, w_proj}, proj);
    const std::size_t res1 = g.add_tensor(p + "res1", s * d * 4);
    g.add_nongemm(p + "res1", NonGemmOp{NonGemmKind::ResidualAdd, s * d}, {x, proj}, res1);
    const std::size_t ln2 = g.add_tensor(p + "ln2", s * d * 4);
    g.add_nongemm(p + "ln2", NonGemmOp{NonGemmKind::LayerNorm, s * d}, {res1}, ln2);
    const std::size_t fc1 = g.add_tensor(p + "fc1", s * f * 4);
    g.add_gemm(p + "fc1", GemmOp{s, f, d}, {ln2, w_fc1}, fc1);
    const std::size_t act = g.add_tensor(p + "gelu", s * f * 4);
    g.add_nongemm(p + "gelu", NonGemmOp{NonGemmKind::Gelu, s * f}, {fc1}, act);
    const std::size_t fc2 = g.add_tensor(p + "fc2", s * d * 4);
    g.add_gemm(p + "fc2", GemmOp{s, d, f}, {act, w_fc2}, fc2);
    const std::size_t res2 = g.add_tensor(p + "res2", s * d * 4);
    g.add_nongemm(p + "res2", NonGemmOp{NonGemmKind::ResidualAdd, s * d}, {res1, fc2}, res2);
    x = res2;
  }
  return g;
}

void CpuConfig::validate() const {
  const double v[] = {softmax_ns, layernorm_ns, gelu_ns, residual_ns, numa_line_ns};
  for (double x : v) {
    if (!(x >= 0.0)) throw ConfigError("cpu.* costs must be >= 0");
  }
  if (!(host_bw_gbps > 0.0)) throw ConfigError("cpu.host_bw_gbps must be > 0");
}

double CpuConfig::per_element_ns(NonGemmKind kind) const {
  switch (kind) {
    case NonGemmKind::Softmax: return softmax_ns;
    case NonGemmKind::LayerNorm: return layernorm_ns;
    case NonGemmKind::Gelu: return gelu_ns;
    case NonGemmKind::ResidualAdd: return residual_ns;
  }
  return 0.0;
}

double nongemm_time_ns(const NonGemmOp& op, Placement residency, const CpuConfig& cpu) {
  if (op.element_count == 0) throw ConfigError("Non-GEMM op with zero elements");
  const double bytes = static_cast<double>(op.bytes_touched());
  double t = static_cast<double>(op.element_count) * cpu.per_element_ns(op.kind) + bytes / cpu.host_bw_gbps;
  if (residency == Placement::Device) t += bytes / 64.0 * cpu.numa_line_ns;
  return t;
}

}  // namespace linksim
