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

#include <doctest.h>

#include "linksim/errors.hpp"
#include "linksim/smmu.hpp"
#include "linksim/workload.hpp"

using namespace linksim;

namespace {

double vit_flops_formula(double layers, double s, double d, double h) {
  const double dh = d / h;
  return layers * (2 * s * d * 3 * d + 2 * 2 * h * s * s * dh + 2 * s * d * d + 2 * 2 * s * d * 4 * d);
}

std::uint64_t total_bytes(const WorkloadGraph& g) {
  std::uint64_t b = 0;
  for (const auto& t : g.tensors) b += t.bytes;
  return b;
}

}  // namespace

TEST_CASE("standalone GEMM graph") {
  const WorkloadGraph g = build_gemm(2048);
  CHECK(g.gemm_count() == 1);
  CHECK(g.nongemm_count() == 0);
  CHECK(total_bytes(g) == 3ull * 2048 * 2048 * 4);
  CHECK(total_bytes(g) == 48ull << 20);
  CHECK(footprint_pages(1024) == 3072);
  CHECK(build_gemm(1).gemm_flops() == 2.0);
  CHECK_THROWS_AS(build_gemm(0), ConfigError);
}

TEST_CASE("ViT GEMM FLOPs follow the closed form") {
  for (const char* name : {"base", "large", "huge"}) {
    const VitSpec s = vit_spec(name);
    const WorkloadGraph g = build_vit(s);
    CAPTURE(name);
    CHECK(g.gemm_flops() == doctest::Approx(vit_flops_formula(s.layers, s.seq_len, s.hidden, s.heads)));
  }
  const VitSpec base = vit_spec("base");
  CHECK(base.layers == 12);
  CHECK(base.hidden == 768);
  CHECK(base.seq_len == 197);
}

TEST_CASE("model dimensions") {
  CHECK(vit_spec("huge").head_dim() == 80);
  CHECK(vit_spec("large").head_dim() == 64);
  CHECK(vit_spec("base").head_dim() == 64);
  CHECK_THROWS_AS(vit_spec("giant"), ConfigError);
  VitSpec bad = vit_spec("base");
  bad.heads = 7;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("per-layer op inventory") {
  const VitSpec s = vit_spec("base");
  const WorkloadGraph g = build_vit(s);
  // qkv, h scores, h attn*V, proj, fc1, fc2 per layer
  CHECK(g.gemm_count() == s.layers * (2ull * s.heads + 4));
  // ln1, softmax, res1, ln2, gelu, res2 per layer
  CHECK(g.nongemm_count() == s.layers * 6ull);
  std::uint64_t softmax_elems = 0;
  for (const auto& n : g.nodes) {
    if (const auto* ng = std::get_if<NonGemmNode>(&n.body); ng && ng->op.kind == NonGemmKind::Softmax) {
      softmax_elems += ng->op.element_count;
    }
  }
  CHECK(softmax_elems == 12ull * 12 * 197 * 197);
}

TEST_CASE("every softmax reads a score GEMM output produced earlier") {
  for (const char* name : {"base", "large", "huge"}) {
    const WorkloadGraph g = build_vit(vit_spec(name));
    g.check_well_formed();
    std::vector<int> producer(g.tensors.size(), -1);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const auto& n = g.nodes[i];
      if (const auto* ng = std::get_if<NonGemmNode>(&n.body); ng && ng->op.kind == NonGemmKind::Softmax) {
        REQUIRE(!n.inputs.empty());
        for (std::size_t in : n.inputs) {
          REQUIRE(producer[in] >= 0);
          CHECK(g.nodes[static_cast<std::size_t>(producer[in])].is_gemm());
        }
      }
      producer[n.output] = static_cast<int>(i);
    }
  }
}

TEST_CASE("malformed graphs are reported") {
  WorkloadGraph g;
  g.name = "broken";
  const auto a = g.add_tensor("a", 64);
  const auto b = g.add_tensor("b", 64);
  g.add_nongemm("gelu", {NonGemmKind::Gelu, 16}, {a}, b);
  CHECK_THROWS_WITH_AS(g.check_well_formed(), doctest::Contains("gelu"), SimulationFault);
  CHECK_THROWS_AS(g.add_gemm("zero", GemmOp{0, 1, 1}, {}, b), ConfigError);
  CHECK_THROWS_AS(g.add_nongemm("empty", {NonGemmKind::Gelu, 0}, {}, b), ConfigError);
}

TEST_CASE("graphs are deterministic") {
  const WorkloadGraph a = build_vit(vit_spec("large"));
  const WorkloadGraph b = build_vit(vit_spec("large"));
  REQUIRE(a.nodes.size() == b.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    CHECK(a.nodes[i].name() == b.nodes[i].name());
    CHECK(a.nodes[i].inputs == b.nodes[i].inputs);
    CHECK(a.nodes[i].output == b.nodes[i].output);
  }
  CHECK(total_bytes(a) == total_bytes(b));
  CHECK(a.gemm_flops() == b.gemm_flops());
}

TEST_CASE("Non-GEMM time model") {
  CpuConfig cpu;
  cpu.softmax_ns = 4;
  cpu.host_bw_gbps = 8;
  cpu.numa_line_ns = 20;
  const NonGemmOp op{NonGemmKind::Softmax, 1000};
  // 1000 elements * 4 ns + 12000 bytes / 8 GB/s
  CHECK(nongemm_time_ns(op, Placement::Host, cpu) == doctest::Approx(4000 + 1500));
  // plus 12000 / 64 lines * 20 ns
  CHECK(nongemm_time_ns(op, Placement::Device, cpu) == doctest::Approx(5500 + 187.5 * 20));
  CHECK_THROWS_AS(nongemm_time_ns({NonGemmKind::Gelu, 0}, Placement::Host, cpu), ConfigError);
}

TEST_CASE("device residency never makes Non-GEMM faster") {
  CpuConfig cpu;
  for (auto kind : {NonGemmKind::Softmax, NonGemmKind::LayerNorm, NonGemmKind::Gelu, NonGemmKind::ResidualAdd}) {
    for (std::uint64_t n : {1ull, 63ull, 4096ull, 1ull << 22}) {
      const NonGemmOp op{kind, n};
      const double host = nongemm_time_ns(op, Placement::Host, cpu);
      const double dev = nongemm_time_ns(op, Placement::Device, cpu);
      CHECK(dev >= host);
      // Penalty is exactly the per-line NUMA term.
      CHECK(dev - host == doctest::Approx(static_cast<double>(op.bytes_touched()) / 64.0 * cpu.numa_line_ns));
    }
  }
}

TEST_CASE("residency assignment") {
  WorkloadGraph g = build_gemm(8);
  g.set_residency(Placement::Device);
  for (const auto& t : g.tensors) CHECK(t.residency == Placement::Device);
}
