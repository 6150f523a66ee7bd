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
#include <optional>
#include <vector>

#include "linksim/des.hpp"
#include "linksim/memsys.hpp"
#include "linksim/pcie.hpp"
#include "linksim/smmu.hpp"

namespace linksim {

struct SystolicConfig {
  std::uint32_t rows = 16;
  std::uint32_t cols = 16;
  double clock_ghz = 1.0;
  std::uint32_t fill_cycles = 32;
  double compute_scale = 1.0;
  std::uint64_t buffer_bytes = 3u << 20;
  /// Largest output block edge kept resident (rounded to the array size).
  std::uint32_t block = 352;

  void validate() const;
};

struct GemmOp {
  std::uint64_t m = 1;
  std::uint64_t n = 1;
  std::uint64_t k = 1;
};

/// Row-major 32-bit integer matrix.
struct IntMatrix {
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::vector<std::int32_t> data;

  IntMatrix() = default;
  IntMatrix(std::uint64_t r, std::uint64_t c) : rows(r), cols(c), data(r * c, 0) {}
  std::int32_t& at(std::uint64_t r, std::uint64_t c) { return data[r * cols + c]; }
  std::int32_t at(std::uint64_t r, std::uint64_t c) const { return data[r * cols + c]; }
  bool operator==(const IntMatrix&) const = default;
};

/// Output-stationary blocking: bm x bn output blocks, k consumed in chunks of kc.
struct GemmPlan {
  std::uint64_t bm = 0;
  std::uint64_t bn = 0;
  std::uint64_t kc = 0;
  std::uint64_t buffer_bytes_needed = 0;
};

/// Throws ConfigError when the buffer cannot hold even one array-sized tile.
GemmPlan plan_gemm(const GemmOp& op, const SystolicConfig& cfg);

/// C = A * B with wraparound 32-bit arithmetic, accumulated in the plan's
/// block and chunk order. Throws ConfigError on an inner dimension mismatch.
IntMatrix gemm_functional(const IntMatrix& a, const IntMatrix& b, const SystolicConfig& cfg = {});

std::uint64_t gemm_tiles(const GemmOp& op, const SystolicConfig& cfg);
double gemm_compute_ns(const GemmOp& op, const SystolicConfig& cfg);
SimTime gemm_compute_time(const GemmOp& op, const SystolicConfig& cfg);

/// A contiguous virtual range moved by one DMA descriptor.
struct Segment {
  std::uint64_t vaddr = 0;
  std::uint64_t bytes = 0;
};

/// Where operands live and how the DMA reaches them. Paths keep their own
/// link/queue state; calls must be made in issue order.
class DataPath {
 public:
  virtual ~DataPath() = default;
  /// Reads `segs` into the local buffer; returns completion time (ns).
  virtual double fetch(const std::vector<Segment>& segs, double start_ns) = 0;
  /// Writes `segs` out of the local buffer; returns completion time (ns).
  virtual double store(const std::vector<Segment>& segs, double start_ns) = 0;
  /// Time to move `bytes` in one direction on an idle path: the unloaded
  /// latency of the first access (cold translation and memory) plus streaming
  /// time. No queueing or reuse effects.
  virtual double pure_transfer_ns(std::uint64_t bytes, bool write) const = 0;
  virtual std::uint64_t bytes_in() const = 0;
  virtual std::uint64_t bytes_out() const = 0;
};

/// Host-resident operands reached through the PCIe hierarchy. Requests are
/// paced at one packet per request interval; each packet is translated by the
/// SMMU at the root complex (if present), serviced by the memory system and
/// returned through the switch.
class HostPath final : public DataPath {
 public:
  HostPath(PcieConfig pcie, MemorySystem& memory, AccessMode mode, Smmu* smmu);

  double fetch(const std::vector<Segment>& segs, double start_ns) override;
  double store(const std::vector<Segment>& segs, double start_ns) override;
  double pure_transfer_ns(std::uint64_t bytes, bool write) const override;
  std::uint64_t bytes_in() const override { return bytes_in_; }
  std::uint64_t bytes_out() const override { return bytes_out_; }

 private:
  struct Lane {
    double next_issue_ns = 0.0;
    double last_done_ns = 0.0;
  };
  double translate(std::uint64_t vaddr, double at_ns, std::uint64_t& paddr);

  PcieConfig pcie_;
  MemorySystem* memory_;
  AccessMode mode_;
  Smmu* smmu_;
  double tp_;
  double up_ns_;
  double down_ns_;
  double smmu_free_ns_ = 0.0;
  Lane lane_;
  std::uint64_t bytes_in_ = 0;
  std::uint64_t bytes_out_ = 0;
};

/// Device-side DRAM behind the accelerator's memory controller; no PCIe.
class DevicePath final : public DataPath {
 public:
  DevicePath(MemorySystem& memory, double controller_ns);

  double fetch(const std::vector<Segment>& segs, double start_ns) override;
  double store(const std::vector<Segment>& segs, double start_ns) override;
  double pure_transfer_ns(std::uint64_t bytes, bool write) const override;
  std::uint64_t bytes_in() const override { return bytes_in_; }
  std::uint64_t bytes_out() const override { return bytes_out_; }

 private:
  double move(const std::vector<Segment>& segs, double start_ns, bool write);

  MemorySystem* memory_;
  double controller_ns_;
  std::uint64_t bytes_in_ = 0;
  std::uint64_t bytes_out_ = 0;
};

/// Virtual layout of one GEMM's operands: A row-major, B column-major
/// (k-contiguous), C row-major, each page aligned.
struct GemmLayout {
  std::uint64_t a_base = 0;
  std::uint64_t b_base = 0;
  std::uint64_t c_base = 0;
  std::uint64_t end = 0;

  static GemmLayout at(std::uint64_t base, const GemmOp& op);
};

struct GemmTiming {
  double start_ns = 0.0;
  double end_ns = 0.0;
  double compute_ns = 0.0;
  double transfer_ns = 0.0;
  std::uint64_t bytes_in = 0;
  std::uint64_t bytes_out = 0;
  std::uint64_t steps = 0;
  std::uint64_t peak_buffer_bytes = 0;
};

/// Event-driven controller, DMA engine and array for one GEMM. Chunk fetches
/// are double buffered: the fetch of step s+1 overlaps compute of step s.
/// Output blocks are double buffered too: block b may compute while block b-1
/// writes back, but waits for the write-back of block b-2.
class GemmAccelerator {
 public:
  GemmAccelerator(Engine& engine, SystolicConfig cfg, DataPath& path);

  /// Runs `op` starting at engine.now(); returns the timing once the engine
  /// has drained the GEMM's events.
  GemmTiming run(const GemmOp& op, const GemmLayout& layout);

 private:
  struct Step {
    std::uint64_t block = 0;
    std::uint64_t i0 = 0, j0 = 0, rows = 0, cols = 0;
    std::uint64_t k0 = 0, kc = 0;
    bool first = false;
    bool last = false;
  };

  void try_fetch();
  void try_compute();
  void on_fetched(std::size_t s);
  void on_computed(std::size_t s);
  void on_stored(std::uint64_t block);
  void occupy(std::int64_t delta);
  std::vector<Segment> operand_segments(const Step& st) const;
  std::vector<Segment> result_segments(const Step& st) const;

  Engine* engine_;
  SystolicConfig cfg_;
  DataPath* path_;
  ComponentId dma_id_;
  ComponentId array_id_;

  GemmOp op_;
  GemmLayout layout_;
  GemmPlan plan_;
  std::vector<Step> steps_;
  std::size_t next_fetch_ = 0;
  std::size_t next_compute_ = 0;
  std::vector<bool> fetched_;
  bool computing_ = false;
  std::uint64_t slots_in_use_ = 0;
  std::optional<std::uint64_t> pending_store_block_;
  std::uint64_t stored_blocks_ = 0;
  std::uint64_t occupancy_ = 0;
  GemmTiming timing_;
};

}  // namespace linksim
