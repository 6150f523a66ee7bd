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

#include "linksim/accel.hpp"

#include <algorithm>
#include <string>

#include "linksim/errors.hpp"

namespace linksim {

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

std::uint64_t plan_bytes(std::uint64_t bm, std::uint64_t bn, std::uint64_t kc) {
  return 2 * 4 * bm * bn + 2 * 4 * (bm + bn) * kc;
}

// Splits [vaddr, vaddr + bytes) at page boundaries.
void push_paged(std::vector<Segment>& out, std::uint64_t vaddr, std::uint64_t bytes) {
  while (bytes > 0) {
    const std::uint64_t room = kPageBytes - vaddr % kPageBytes;
    const std::uint64_t take = std::min(room, bytes);
    out.push_back(Segment{vaddr, take});
    vaddr += take;
    bytes -= take;
  }
}

}  // namespace

void SystolicConfig::validate() const {
  if (rows == 0 || cols == 0) throw ConfigError("accel.rows and accel.cols must be >= 1");
  if (!(clock_ghz > 0.0)) throw ConfigError("accel clock must be > 0");
  if (!(compute_scale > 0.0)) throw ConfigError("accel.compute_scale must be > 0");
  if (block < std::max(rows, cols)) throw ConfigError("accel.block must be at least the array size");
  if (buffer_bytes == 0) throw ConfigError("accel.buffer_bytes must be > 0");
}

GemmPlan plan_gemm(const GemmOp& op, const SystolicConfig& cfg) {
  cfg.validate();
  if (op.m == 0 || op.n == 0 || op.k == 0) throw ConfigError("GEMM dimensions must be >= 1");
  std::uint64_t bm = std::min<std::uint64_t>(cfg.block / cfg.rows * cfg.rows, ceil_div(op.m, cfg.rows) * cfg.rows);
  std::uint64_t bn = std::min<std::uint64_t>(cfg.block / cfg.cols * cfg.cols, ceil_div(op.n, cfg.cols) * cfg.cols);
  while (true) {
    const std::uint64_t c_bytes = 2 * 4 * bm * bn;
    if (cfg.buffer_bytes > c_bytes) {
      std::uint64_t kc = (cfg.buffer_bytes - c_bytes) / (8 * (bm + bn));
      if (kc >= 16) kc = kc / 16 * 16;
      kc = std::min(kc, op.k);
      if (kc >= 1) {
        // Equal chunks keep the prefetch pipeline free of short tail steps.
        const std::uint64_t chunks = ceil_div(op.k, kc);
        kc = ceil_div(op.k, chunks);
        return GemmPlan{bm, bn, kc, plan_bytes(bm, bn, kc)};
      }
    }
    if (bm <= cfg.rows && bn <= cfg.cols) break;
    if (bm >= bn && bm > cfg.rows) {
      bm -= cfg.rows;
    } else {
      bn -= cfg.cols;
    }
  }
  throw ConfigError("accel.buffer_bytes = " + std::to_string(cfg.buffer_bytes) +
                    " cannot hold one output tile plus two operand slices (needs " +
                    std::to_string(plan_bytes(cfg.rows, cfg.cols, 1)) + ")");
}

IntMatrix gemm_functional(const IntMatrix& a, const IntMatrix& b, const SystolicConfig& cfg) {
  if (a.cols != b.rows) {
    throw ConfigError("GEMM inner dimensions differ: " + std::to_string(a.cols) + " vs " + std::to_string(b.rows));
  }
  const GemmOp op{a.rows, b.cols, a.cols};
  const GemmPlan plan = plan_gemm(op, cfg);
  IntMatrix c(op.m, op.n);
  std::vector<std::uint32_t> acc(op.m * op.n, 0);
  for (std::uint64_t i0 = 0; i0 < op.m; i0 += plan.bm) {
    for (std::uint64_t j0 = 0; j0 < op.n; j0 += plan.bn) {
      const std::uint64_t i1 = std::min(op.m, i0 + plan.bm);
      const std::uint64_t j1 = std::min(op.n, j0 + plan.bn);
      for (std::uint64_t k0 = 0; k0 < op.k; k0 += plan.kc) {
        const std::uint64_t k1 = std::min(op.k, k0 + plan.kc);
        for (std::uint64_t i = i0; i < i1; ++i) {
          for (std::uint64_t kk = k0; kk < k1; ++kk) {
            const auto av = static_cast<std::uint32_t>(a.at(i, kk));
            for (std::uint64_t j = j0; j < j1; ++j) acc[i * op.n + j] += av * static_cast<std::uint32_t>(b.at(kk, j));
          }
        }
      }
    }
  }
  for (std::size_t x = 0; x < acc.size(); ++x) c.data[x] = static_cast<std::int32_t>(acc[x]);
  return c;
}

std::uint64_t gemm_tiles(const GemmOp& op, const SystolicConfig& cfg) {
  return ceil_div(op.m, cfg.rows) * ceil_div(op.n, cfg.cols);
}

double gemm_compute_ns(const GemmOp& op, const SystolicConfig& cfg) {
  return static_cast<double>(gemm_tiles(op, cfg)) * cfg.compute_scale *
         static_cast<double>(op.k + cfg.fill_cycles) / cfg.clock_ghz;
}

SimTime gemm_compute_time(const GemmOp& op, const SystolicConfig& cfg) {
  return SimTime::ceil_ns(gemm_compute_ns(op, cfg));
}

HostPath::HostPath(PcieConfig pcie, MemorySystem& memory, AccessMode mode, Smmu* smmu)
    : pcie_(pcie), memory_(&memory), mode_(mode), smmu_(smmu) {
  pcie_.validate();
  if (mode_ == AccessMode::DevMem) throw ConfigError("host path cannot use mode=devmem");
  tp_ = steady_throughput(pcie_);
  up_ns_ = pcie_.turnaround_ns;
  down_ns_ = round_trip_ns(pcie_) - up_ns_;
}

double HostPath::translate(std::uint64_t vaddr, double at_ns, std::uint64_t& paddr) {
  if (smmu_ == nullptr) {
    paddr = vaddr;
    return at_ns;
  }
  const double start = std::max(at_ns, smmu_free_ns_);
  const Translation t = smmu_->translate(vaddr, SimTime::ceil_ns(start));
  paddr = t.paddr;
  smmu_free_ns_ = start + static_cast<double>(t.stall.ns());
  return smmu_free_ns_;
}

double HostPath::fetch(const std::vector<Segment>& segs, double start_ns) {
  // One lane: read completions and write data share the link in FIFO order.
  Lane& lane = lane_;
  double t = std::max(start_ns, lane.next_issue_ns);
  double done = start_ns;
  const std::uint64_t p = pcie_.packet_payload_bytes;
  for (const Segment& seg : segs) {
    for (std::uint64_t off = 0; off < seg.bytes; off += p) {
      const std::uint64_t bytes = std::min(p, seg.bytes - off);
      std::uint64_t paddr = 0;
      const double ready = translate(seg.vaddr + off, t + up_ns_, paddr);
      const double mem = memory_->access(MemRequest{paddr, bytes, false}, SimTime::ceil_ns(ready), mode_).as_double();
      const double arrive = std::max(mem + down_ns_, lane.last_done_ns + static_cast<double>(bytes) / tp_);
      lane.last_done_ns = arrive;
      done = std::max(done, arrive);
      t += static_cast<double>(bytes) / tp_;
    }
    bytes_in_ += seg.bytes;
  }
  lane.next_issue_ns = t;
  return done;
}

double HostPath::store(const std::vector<Segment>& segs, double start_ns) {
  Lane& lane = lane_;
  double t = std::max(start_ns, lane.next_issue_ns);
  double done = start_ns;
  const std::uint64_t p = pcie_.packet_payload_bytes;
  for (const Segment& seg : segs) {
    for (std::uint64_t off = 0; off < seg.bytes; off += p) {
      const std::uint64_t bytes = std::min(p, seg.bytes - off);
      std::uint64_t paddr = 0;
      const double ready = translate(seg.vaddr + off, t + down_ns_, paddr);
      const double mem = memory_->access(MemRequest{paddr, bytes, true}, SimTime::ceil_ns(ready), mode_).as_double();
      const double acked = std::max(mem + up_ns_, lane.last_done_ns + static_cast<double>(bytes) / tp_);
      lane.last_done_ns = acked;
      done = std::max(done, acked);
      t += static_cast<double>(bytes) / tp_;
    }
    bytes_out_ += seg.bytes;
  }
  lane.next_issue_ns = t;
  return done;
}

double HostPath::pure_transfer_ns(std::uint64_t bytes, bool write) const {
  if (bytes == 0) return 0.0;
  const MemsysConfig& m = memory_->config();
  const double dram = m.host.fixed_latency_ns + 64.0 / m.host.channel_bandwidth();
  const double miss = m.membus_latency_ns + m.snoop_latency_ns + dram;
  double first = 0.0;
  if (smmu_ != nullptr) first += smmu_->config().hit_latency_ns + smmu_->config().levels * miss;
  if (mode_ == AccessMode::DM) {
    first += m.membus_latency_ns + dram;
  } else {
    first += write ? m.membus_latency_ns + m.llc.hit_latency_ns : miss;
  }
  return first + transfer_time_ns(bytes, pcie_);
}

DevicePath::DevicePath(MemorySystem& memory, double controller_ns) : memory_(&memory), controller_ns_(controller_ns) {
  if (memory_->device() == nullptr) throw ConfigError("mode=devmem requires device-side memory (mem.placement=device)");
}

double DevicePath::move(const std::vector<Segment>& segs, double start_ns, bool write) {
  const SimTime at = SimTime::ceil_ns(start_ns + controller_ns_);
  double done = start_ns;
  for (const Segment& seg : segs) {
    done = std::max(done, memory_->service(MemRequest{seg.vaddr, seg.bytes, write}, at, Placement::Device).as_double());
  }
  return done + controller_ns_;
}

double DevicePath::fetch(const std::vector<Segment>& segs, double start_ns) {
  for (const Segment& s : segs) bytes_in_ += s.bytes;
  return move(segs, start_ns, false);
}

double DevicePath::store(const std::vector<Segment>& segs, double start_ns) {
  for (const Segment& s : segs) bytes_out_ += s.bytes;
  return move(segs, start_ns, true);
}

double DevicePath::pure_transfer_ns(std::uint64_t bytes, bool /*write*/) const {
  if (bytes == 0) return 0.0;
  const auto& spec = memory_->device()->spec();
  return 2 * controller_ns_ + spec.fixed_latency_ns + static_cast<double>(bytes) / spec.bandwidth_gbps;
}

GemmLayout GemmLayout::at(std::uint64_t base, const GemmOp& op) {
  auto page_up = [](std::uint64_t x) { return ceil_div(x, kPageBytes) * kPageBytes; };
  GemmLayout l;
  l.a_base = page_up(base);
  l.b_base = page_up(l.a_base + op.m * op.k * 4);
  l.c_base = page_up(l.b_base + op.k * op.n * 4);
  l.end = page_up(l.c_base + op.m * op.n * 4);
  return l;
}

GemmAccelerator::GemmAccelerator(Engine& engine, SystolicConfig cfg, DataPath& path)
    : engine_(&engine), cfg_(cfg), path_(&path) {
  cfg_.validate();
  dma_id_ = engine.register_component("accel.dma");
  array_id_ = engine.register_component("accel.array");
}

std::vector<Segment> GemmAccelerator::operand_segments(const Step& st) const {
  std::vector<Segment> segs;
  for (std::uint64_t r = st.i0; r < st.i0 + st.rows; ++r) push_paged(segs, layout_.a_base + (r * op_.k + st.k0) * 4, st.kc * 4);
  for (std::uint64_t c = st.j0; c < st.j0 + st.cols; ++c) push_paged(segs, layout_.b_base + (c * op_.k + st.k0) * 4, st.kc * 4);
  return segs;
}

std::vector<Segment> GemmAccelerator::result_segments(const Step& st) const {
  std::vector<Segment> segs;
  for (std::uint64_t r = st.i0; r < st.i0 + st.rows; ++r) push_paged(segs, layout_.c_base + (r * op_.n + st.j0) * 4, st.cols * 4);
  return segs;
}

void GemmAccelerator::occupy(std::int64_t delta) {
  occupancy_ = static_cast<std::uint64_t>(static_cast<std::int64_t>(occupancy_) + delta);
  if (occupancy_ > cfg_.buffer_bytes) {
    throw SimulationFault("local buffer overflow: " + std::to_string(occupancy_) + " > " +
                          std::to_string(cfg_.buffer_bytes) + " bytes");
  }
  timing_.peak_buffer_bytes = std::max(timing_.peak_buffer_bytes, occupancy_);
}

GemmTiming GemmAccelerator::run(const GemmOp& op, const GemmLayout& layout) {
  op_ = op;
  layout_ = layout;
  plan_ = plan_gemm(op, cfg_);
  steps_.clear();
  std::uint64_t block = 0;
  for (std::uint64_t i0 = 0; i0 < op.m; i0 += plan_.bm) {
    for (std::uint64_t j0 = 0; j0 < op.n; j0 += plan_.bn, ++block) {
      for (std::uint64_t k0 = 0; k0 < op.k; k0 += plan_.kc) {
        Step st;
        st.block = block;
        st.i0 = i0;
        st.j0 = j0;
        st.rows = std::min(plan_.bm, op.m - i0);
        st.cols = std::min(plan_.bn, op.n - j0);
        st.k0 = k0;
        st.kc = std::min(plan_.kc, op.k - k0);
        st.first = k0 == 0;
        st.last = k0 + st.kc == op.k;
        steps_.push_back(st);
      }
    }
  }
  fetched_.assign(steps_.size(), false);
  next_fetch_ = next_compute_ = 0;
  computing_ = false;
  slots_in_use_ = 0;
  stored_blocks_ = 0;
  occupancy_ = 0;
  const std::uint64_t in0 = path_->bytes_in();
  const std::uint64_t out0 = path_->bytes_out();
  timing_ = GemmTiming{};
  timing_.start_ns = engine_->now().as_double();
  timing_.end_ns = timing_.start_ns;
  timing_.steps = steps_.size();
  timing_.compute_ns = gemm_compute_ns(op, cfg_);

  try_fetch();
  engine_->run();
  if (stored_blocks_ != block) throw SimulationFault("GEMM drained with unfinished blocks");

  timing_.bytes_in = path_->bytes_in() - in0;
  timing_.bytes_out = path_->bytes_out() - out0;
  timing_.transfer_ns = path_->pure_transfer_ns(timing_.bytes_in, false) + path_->pure_transfer_ns(timing_.bytes_out, true);
  return timing_;
}

void GemmAccelerator::try_fetch() {
  while (next_fetch_ < steps_.size() && slots_in_use_ < 2) {
    const std::size_t s = next_fetch_++;
    const Step& st = steps_[s];
    ++slots_in_use_;
    occupy(static_cast<std::int64_t>(4 * (st.rows + st.cols) * st.kc));
    const double done = path_->fetch(operand_segments(st), engine_->now().as_double());
    engine_->schedule(SimTime::ceil_ns(done), dma_id_, [this, s] { on_fetched(s); });
  }
}

void GemmAccelerator::try_compute() {
  if (computing_ || next_compute_ >= steps_.size()) return;
  const std::size_t s = next_compute_;
  const Step& st = steps_[s];
  if (!fetched_[s]) return;
  if (st.first && stored_blocks_ + 1 < st.block) return;
  computing_ = true;
  if (st.first) occupy(static_cast<std::int64_t>(4 * st.rows * st.cols));
  const double tiles = static_cast<double>(ceil_div(st.rows, cfg_.rows) * ceil_div(st.cols, cfg_.cols));
  const double cycles = static_cast<double>(st.kc + (st.last ? cfg_.fill_cycles : 0));
  const double dur = tiles * cfg_.compute_scale * cycles / cfg_.clock_ghz;
  engine_->schedule(SimTime::ceil_ns(engine_->now().as_double() + dur), array_id_, [this, s] { on_computed(s); });
}

void GemmAccelerator::on_fetched(std::size_t s) {
  fetched_[s] = true;
  try_compute();
}

void GemmAccelerator::on_computed(std::size_t s) {
  const Step& st = steps_[s];
  computing_ = false;
  --slots_in_use_;
  occupy(-static_cast<std::int64_t>(4 * (st.rows + st.cols) * st.kc));
  ++next_compute_;
  if (st.last) {
    const double done = path_->store(result_segments(st), engine_->now().as_double());
    const std::uint64_t block = st.block;
    engine_->schedule(SimTime::ceil_ns(done), dma_id_, [this, block, rows = st.rows, cols = st.cols] {
      occupy(-static_cast<std::int64_t>(4 * rows * cols));
      on_stored(block);
    });
  }
  try_fetch();
  try_compute();
}

void GemmAccelerator::on_stored(std::uint64_t) {
  ++stored_blocks_;
  timing_.end_ns = std::max(timing_.end_ns, engine_->now().as_double());
  try_compute();
}

}  // namespace linksim
