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

#include <random>

#include "linksim/accel.hpp"
#include "linksim/errors.hpp"
#include "linksim/system.hpp"

using namespace linksim;

namespace {

IntMatrix naive(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix c(a.rows, b.cols);
  for (std::uint64_t i = 0; i < a.rows; ++i) {
    for (std::uint64_t j = 0; j < b.cols; ++j) {
      std::uint32_t acc = 0;
      for (std::uint64_t p = 0; p < a.cols; ++p) {
        acc += static_cast<std::uint32_t>(a.at(i, p)) * static_cast<std::uint32_t>(b.at(p, j));
      }
      c.at(i, j) = static_cast<std::int32_t>(acc);
    }
  }
  return c;
}

IntMatrix random_matrix(std::mt19937_64& rng, std::uint64_t r, std::uint64_t c, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  IntMatrix m(r, c);
  for (auto& v : m.data) v = d(rng);
  return m;
}

struct DeviceRig {
  MemorySystem memory;
  DevicePath path;
  Engine engine;

  explicit DeviceRig(const char* preset = "hbm2")
      : memory(cfg(preset), {AddressRegion{"host", 0, 1ull << 32}}, {AddressRegion{"dev", 0, 1ull << 32}}),
        path(memory, 20.0) {}

  static MemsysConfig cfg(const char* preset) {
    MemsysConfig c;
    c.device = memory_preset(preset, Placement::Device);
    c.mode = AccessMode::DevMem;
    return c;
  }
};

SimReport run_gemm(std::uint64_t n, std::initializer_list<std::pair<const char*, const char*>> sets) {
  RunConfig cfg;
  cfg.set("workload.kind", "gemm");
  cfg.set("workload.n", std::to_string(n));
  for (const auto& [k, v] : sets) cfg.set(k, v);
  return simulate(cfg);
}

}  // namespace

TEST_CASE("identity and a hand-computed product") {
  IntMatrix eye(3, 3);
  for (int i = 0; i < 3; ++i) eye.at(i, i) = 1;
  std::mt19937_64 rng(1);
  const IntMatrix x = random_matrix(rng, 3, 3, -9, 9);
  CHECK(gemm_functional(eye, x) == x);
  CHECK(gemm_functional(x, eye) == x);

  IntMatrix a(2, 2), b(2, 2), want(2, 2);
  a.data = {1, 2, 3, 4};
  b.data = {5, 6, 7, 8};
  want.data = {19, 22, 43, 50};
  CHECK(gemm_functional(a, b) == want);
}

TEST_CASE("random products match the triple loop") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::uint64_t> dim(1, 128);
  SystolicConfig small;
  small.buffer_bytes = 64 * 1024;  // forces several k chunks and blocks
  small.block = 32;
  for (int t = 0; t < 30; ++t) {
    const auto m = dim(rng), n = dim(rng), k = dim(rng);
    const IntMatrix a = random_matrix(rng, m, k, -1000, 1000);
    const IntMatrix b = random_matrix(rng, k, n, -1000, 1000);
    CHECK(gemm_functional(a, b) == naive(a, b));
    CHECK(gemm_functional(a, b, small) == naive(a, b));
  }
}

TEST_CASE("wraparound arithmetic is exact") {
  IntMatrix a(1, 2), b(2, 1);
  a.data = {2147483647, 2147483647};
  b.data = {2, 3};
  CHECK(gemm_functional(a, b) == naive(a, b));
}

TEST_CASE("inner dimension mismatch is rejected") {
  CHECK_THROWS_AS(gemm_functional(IntMatrix(2, 3), IntMatrix(2, 3)), ConfigError);
}

TEST_CASE("compute time examples") {
  SystolicConfig cfg;
  CHECK(gemm_tiles({16, 16, 16}, cfg) == 1);
  CHECK(gemm_compute_ns({16, 16, 16}, cfg) == doctest::Approx(48.0));
  CHECK(gemm_compute_ns({1024, 1024, 1024}, cfg) == doctest::Approx(4325376.0));
  CHECK(gemm_tiles({17, 16, 5}, cfg) == 2);
  CHECK(gemm_compute_time({16, 16, 16}, cfg).ns() == 48);
}

TEST_CASE("compute time is linear in the scale") {
  for (std::uint64_t n : {16u, 100u, 512u}) {
    SystolicConfig a, b;
    a.compute_scale = 0.75;
    b.compute_scale = 1.5;
    CHECK(gemm_compute_ns({n, n, n}, b) == doctest::Approx(2.0 * gemm_compute_ns({n, n, n}, a)));
  }
}

TEST_CASE("plans respect the buffer") {
  SystolicConfig cfg;
  for (std::uint64_t n : {16u, 64u, 333u, 1024u, 2048u}) {
    const GemmPlan p = plan_gemm({n, n, n}, cfg);
    CHECK(p.buffer_bytes_needed <= cfg.buffer_bytes);
    CHECK(p.bm % cfg.rows == 0);
    CHECK(p.bn % cfg.cols == 0);
    CHECK(p.kc >= 1);
  }
  SystolicConfig tiny;
  tiny.buffer_bytes = 1024;
  CHECK_THROWS_AS(plan_gemm({64, 64, 64}, tiny), ConfigError);
}

TEST_CASE("event-driven run never exceeds the buffer and moves every operand") {
  for (std::uint64_t n : {16u, 200u, 512u}) {
    DeviceRig rig;
    SystolicConfig cfg;
    GemmAccelerator acc(rig.engine, cfg, rig.path);
    const GemmOp op{n, n, n};
    const GemmTiming t = acc.run(op, GemmLayout::at(0, op));
    CHECK(t.peak_buffer_bytes <= cfg.buffer_bytes);
    CHECK(t.bytes_out == 4 * n * n);
    CHECK(t.bytes_in >= 8 * n * n);
    CHECK(t.end_ns >= t.compute_ns);
    CHECK(rig.engine.pending() == 0);
  }
}

TEST_CASE("sandwich bound: max(compute, transfer) <= GEMM time <= compute + transfer") {
  for (std::uint64_t n : {64u, 256u, 1024u}) {
    for (std::string scale : {"0.1", "1", "4"}) {
      for (std::string rate : {"2", "8", "32"}) {
        const SimReport r = run_gemm(n, {{"accel.compute_scale", scale.c_str()}, {"pcie.lane_rate_gbps", rate.c_str()}});
        CAPTURE(n);
        CAPTURE(scale);
        CAPTURE(rate);
        CHECK(r.gemm_ns >= std::max(r.compute_bound_ns, r.transfer_bound_ns));
        CHECK(r.gemm_ns <= r.compute_bound_ns + r.transfer_bound_ns);
      }
    }
  }
}

TEST_CASE("very long compute makes total track compute") {
  const SimReport r = run_gemm(512, {{"accel.compute_scale", "200"}});
  CHECK(r.gemm_ns / r.compute_bound_ns == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("device memory path is faster than a 2 GB/s link") {
  const SimReport host = run_gemm(512, {});
  const SimReport dev = run_gemm(512, {{"mode", "devmem"}, {"mem.placement", "device"}, {"mem.preset", "hbm2"}});
  CHECK(dev.total_ns < host.total_ns);
  CHECK(dev.bytes_d2h == 4u * 512 * 512);
}
