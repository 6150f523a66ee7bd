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

#include <cmath>
#include <random>
#include <set>

#include "linksim/errors.hpp"
#include "linksim/smmu.hpp"

using namespace linksim;

namespace {

struct Rig {
  PageTable table{3};
  MemorySystem memory{MemsysConfig{}, {AddressRegion{"data", 0, PageTable::kTableBase}, PageTable::table_region()}};
  Smmu smmu;

  explicit Rig(AccessMode walk_mode = AccessMode::DC, std::uint32_t entries = 32)
      : smmu(SmmuConfig{true, entries, 3, 1.0}, table, memory, walk_mode) {}
};

}  // namespace

TEST_CASE("footprint matches the published page counts") {
  const std::pair<std::uint64_t, std::uint64_t> rows[] = {{64, 12},    {128, 48},   {256, 192},
                                                          {512, 768}, {1024, 3072}, {2048, 12288}};
  for (const auto& [n, pages] : rows) CHECK(footprint_pages(n) == pages);
  CHECK(footprint_pages(1) == 1);
}

TEST_CASE("first access walks, second access hits") {
  Rig rig(AccessMode::DM);
  rig.table.map(0, 3 * kPageBytes);
  // Oracle: each level is an idle DM read: membus + DRAM latency + 64 B serialization.
  const auto& host = rig.memory.config().host;
  const double level = 10.0 + host.fixed_latency_ns + 64.0 / host.bandwidth_gbps;
  const std::uint64_t per_level = static_cast<std::uint64_t>(std::ceil(level));
  const Translation first = rig.smmu.translate(0x1234, SimTime{1000});
  CHECK(first.stall.ns() == 3 * per_level + 1);
  const Translation second = rig.smmu.translate(0x1238, SimTime{2000});
  CHECK(second.stall.ns() == 1);
  CHECK(first.paddr % kPageBytes == 0x234);
  const auto s = rig.smmu.report(1000.0);
  CHECK(s.ptw_count == 1);
  CHECK(s.utlb_misses == 1);
  CHECK(s.utlb_lookups == 2);
  CHECK(s.overhead_percent == doctest::Approx((3.0 * per_level + 2.0) / 10.0));
}

TEST_CASE("unmapped address faults with diagnostics") {
  Rig rig;
  rig.table.map(0, kPageBytes);
  CHECK_THROWS_AS(rig.smmu.translate(5 * kPageBytes, SimTime{0}), TranslationFault);
  try {
    rig.smmu.translate(5 * kPageBytes, SimTime{0});
  } catch (const TranslationFault& e) {
    CHECK(std::string(e.what()).find("not mapped") != std::string::npos);
  }
}

TEST_CASE("translation preserves offsets and is a bijection") {
  PageTable table;
  table.map(0, 4096 * kPageBytes);
  std::set<std::uint64_t> frames;
  std::mt19937_64 rng(7);
  for (std::uint64_t vpn = 0; vpn < 4096; ++vpn) {
    const std::uint64_t off = rng() % kPageBytes;
    const std::uint64_t pa = table.physical(vpn * kPageBytes + off);
    CHECK(pa % kPageBytes == off);
    frames.insert(pa / kPageBytes);
  }
  CHECK(frames.size() == 4096);
}

TEST_CASE("compulsory misses and LRU capacity") {
  Rig rig(AccessMode::DC, 4);
  rig.table.map(0, 8 * kPageBytes);
  SimTime t{0};
  for (int round = 0; round < 3; ++round) {
    for (std::uint64_t p = 0; p < 4; ++p) t = t + rig.smmu.translate(p * kPageBytes, t).stall;
  }
  CHECK(rig.smmu.report(1.0).utlb_misses == 4);
  for (std::uint64_t p = 0; p < 5; ++p) t = t + rig.smmu.translate(p * kPageBytes, t).stall;
  // Cycling five pages through four entries misses every time under LRU.
  for (std::uint64_t p = 0; p < 5; ++p) t = t + rig.smmu.translate(p * kPageBytes, t).stall;
  const auto s = rig.smmu.report(1.0);
  CHECK(s.utlb_misses == 4 + 1 + 5);
  CHECK(s.utlb_misses <= s.utlb_lookups);
  CHECK(s.ptw_count <= s.utlb_misses);
}

TEST_CASE("concurrent misses to one page share a walk") {
  Rig rig;
  rig.table.map(0, kPageBytes);
  const Translation a = rig.smmu.translate(0, SimTime{0});
  const Translation b = rig.smmu.translate(64, SimTime{5});
  const auto s = rig.smmu.report(1.0);
  CHECK(s.ptw_count == 1);
  CHECK(s.utlb_misses == 2);
  CHECK(b.stall == a.stall - SimTime{5});
}

TEST_CASE("stat column names") { CHECK(translation_stat_names().size() == 8); }
