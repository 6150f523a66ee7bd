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

#include "linksim/errors.hpp"
#include "linksim/memsys.hpp"

using namespace linksim;

namespace {

std::vector<AddressRegion> dram_map() { return {AddressRegion{"dram", 0, 1ull << 32}}; }

MemsysConfig base_cfg() {
  MemsysConfig cfg;
  cfg.host = memory_preset("ddr4");
  return cfg;
}

}  // namespace

TEST_CASE("presets match the published device table") {
  struct Row {
    const char* name;
    std::uint32_t ch, bits;
    double bw, mts;
  };
  const Row rows[] = {{"ddr3", 1, 64, 12.8, 1600}, {"ddr4", 1, 64, 19.2, 2400}, {"ddr5", 2, 32, 25.6, 3200},
                      {"hbm2", 2, 128, 64.0, 2000}, {"gddr6", 2, 64, 32.0, 2000}};
  for (const auto& r : rows) {
    const auto s = memory_preset(r.name);
    CHECK(s.channels == r.ch);
    CHECK(s.data_width_bits == r.bits);
    CHECK(s.bandwidth_gbps == r.bw);
    CHECK(s.data_rate_mts == r.mts);
  }
  CHECK(memory_preset("ddr4").fixed_latency_ns == 14.0);
  CHECK(memory_preset("hbm2").fixed_latency_ns == 12.0);
  CHECK_THROWS_AS(memory_preset("lpddr5"), ConfigError);
  CHECK(memory_preset_names().size() == 5);
}

TEST_CASE("cache presets and geometry validation") {
  CHECK(CacheSpec::last_level().capacity_bytes == 2u << 20);
  CHECK(CacheSpec::io_cache().capacity_bytes == 32u << 10);
  CacheSpec bad{"bad", 1000, 64, 4, 1.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("idle 64 B DDR4 read costs latency plus serialization") {
  MemoryDevice dev(memory_preset("ddr4"), dram_map());
  const double oracle = 14.0 + 64.0 / 19.2;
  const SimTime done = dev.service(MemRequest{0, 64, false}, SimTime{0});
  CHECK(done.as_double() >= oracle);
  CHECK(done.as_double() < oracle + 1.0);
}

TEST_CASE("same-channel requests serialize, distinct channels overlap") {
  MemoryDevice one(memory_preset("ddr4"), dram_map());
  one.service(MemRequest{0, 64, false}, SimTime{0});
  const SimTime second = one.service(MemRequest{64, 64, false}, SimTime{0});
  CHECK(second.as_double() >= 14.0 + 2 * 64.0 / 19.2);

  MemoryDevice two(memory_preset("hbm2"), dram_map());
  const double per_line = 64.0 / 32.0;
  two.service(MemRequest{0, 64, false}, SimTime{0});
  const SimTime other = two.service(MemRequest{64, 64, false}, SimTime{0});
  CHECK(other.as_double() < 12.0 + 2 * per_line);
  const SimTime same = two.service(MemRequest{128, 64, false}, SimTime{0});
  CHECK(same.as_double() >= 12.0 + 2 * per_line);
}

TEST_CASE("degenerate and unmapped requests fault") {
  MemoryDevice dev(memory_preset("ddr4"), {AddressRegion{"data", 0x1000, 0x1000}});
  CHECK_THROWS_AS(dev.service(MemRequest{0x1000, 0, false}, SimTime{0}), SimulationFault);
  try {
    dev.service(MemRequest{0x4000, 64, false}, SimTime{0});
    FAIL("expected fault");
  } catch (const SimulationFault& e) {
    CHECK(std::string(e.what()).find("data 0x1000-0x2000") != std::string::npos);
  }
}

TEST_CASE("channel conservation: delivered bytes never exceed bandwidth") {
  for (const auto& name : memory_preset_names()) {
    const auto spec = memory_preset(name);
    MemoryDevice dev(spec, dram_map());
    SimTime last{0};
    for (std::uint64_t i = 0; i < 1000; ++i) last = max(last, dev.service(MemRequest{i * 64, 64, false}, SimTime{0}));
    CHECK(dev.bytes_served() == 64000);
    CHECK(64000.0 / dev.drain_time_ns() <= spec.bandwidth_gbps + 1e-9);
    CHECK(dev.drain_time_ns() == doctest::Approx(64000.0 / spec.bandwidth_gbps));
  }
}

TEST_CASE("access modes") {
  MemorySystem sys(base_cfg(), dram_map());
  const auto& cfg = sys.config();

  SUBCASE("DM equals raw service plus the memory bus delay") {
    MemoryDevice ref(cfg.host, dram_map());
    const SimTime want = ref.service(MemRequest{4096, 256, false}, SimTime{100 + 10});
    CHECK(sys.access(MemRequest{4096, 256, false}, SimTime{100}, AccessMode::DM) == want);
    CHECK(sys.llc().hits() + sys.llc().misses() == 0);
    CHECK_FALSE(sys.iocache().contains(4096));
  }
  SUBCASE("DC miss then hit") {
    const SimTime miss = sys.access(MemRequest{0, 64, false}, SimTime{0}, AccessMode::DC);
    CHECK(miss.as_double() >= cfg.membus_latency_ns + cfg.snoop_latency_ns + 14.0);
    const SimTime hit = sys.access(MemRequest{0, 64, false}, SimTime{1000}, AccessMode::DC);
    CHECK(hit == SimTime{1000} + SimTime::ceil_ns(cfg.iocache.hit_latency_ns));
  }
  SUBCASE("DC read after DC write hits") {
    sys.access(MemRequest{8192, 64, true}, SimTime{0}, AccessMode::DC);
    const SimTime hit = sys.access(MemRequest{8192, 64, false}, SimTime{500}, AccessMode::DC);
    CHECK(hit == SimTime{500} + SimTime::ceil_ns(cfg.iocache.hit_latency_ns));
  }
  SUBCASE("DevMem without device memory is a configuration error") {
    CHECK_THROWS_AS(sys.access(MemRequest{0, 64, false}, SimTime{0}, AccessMode::DevMem), ConfigError);
    MemsysConfig bad = base_cfg();
    bad.mode = AccessMode::DevMem;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }
}

TEST_CASE("DevMem uses device DRAM only") {
  MemsysConfig cfg = base_cfg();
  cfg.device = memory_preset("hbm2", Placement::Device);
  cfg.mode = AccessMode::DevMem;
  MemorySystem sys(cfg, dram_map(), dram_map());
  const SimTime t = sys.access(MemRequest{0, 64, false}, SimTime{0});
  CHECK(t == SimTime::ceil_ns(12.0 + 2.0));
  CHECK(sys.host().bytes_served() == 0);
  CHECK(sys.device()->bytes_served() == 64);
}

TEST_CASE("dirty LLC victims are written back to DRAM") {
  MemsysConfig cfg = base_cfg();
  cfg.llc = CacheSpec{"llc", 64 * 2, 64, 2, 20.0};
  cfg.iocache = CacheSpec{"iocache", 64, 64, 1, 10.0};
  MemorySystem sys(cfg, dram_map());
  for (std::uint64_t a = 0; a < 3; ++a) sys.access(MemRequest{a * 64, 64, true}, SimTime{0}, AccessMode::DC);
  CHECK(sys.host().bytes_served() == 64);
}

TEST_CASE("access mode parsing") {
  CHECK(parse_access_mode("dc") == AccessMode::DC);
  CHECK(parse_access_mode("devmem") == AccessMode::DevMem);
  CHECK(std::string(to_string(AccessMode::DM)) == "dm");
  CHECK_THROWS_AS(parse_access_mode("x"), ConfigError);
}

namespace {

// Timestamp LRU reference model.
struct NaiveLru {
  struct Way {
    std::uint64_t tag = 0, used = 0;
    bool valid = false, dirty = false;
  };
  std::vector<std::vector<Way>> sets;
  std::uint64_t clock = 0, line;
  NaiveLru(std::uint64_t nsets, std::uint32_t ways, std::uint64_t line_bytes)
      : sets(nsets, std::vector<Way>(ways)), line(line_bytes) {}
  Cache::Outcome access(std::uint64_t addr, bool write) {
    const std::uint64_t l = addr / line;
    auto& set = sets[l % sets.size()];
    ++clock;
    for (auto& w : set) {
      if (w.valid && w.tag == l) {
        w.used = clock;
        w.dirty = w.dirty || write;
        return {true, false, 0};
      }
    }
    Way* victim = &set[0];
    for (auto& w : set) {
      if (!w.valid) {
        victim = &w;
        break;
      }
      if (w.used < victim->used) victim = &w;
    }
    Cache::Outcome out;
    if (victim->valid && victim->dirty) out = {false, true, victim->tag * line};
    *victim = Way{l, clock, true, write};
    return out;
  }
};

}  // namespace

TEST_CASE("cache agrees with a timestamp LRU reference") {
  std::mt19937_64 rng(11);
  for (std::uint32_t ways : {1u, 2u, 8u, 16u}) {
    CacheSpec spec{"c", 64ull * ways * 8, 64, ways, 1.0};
    Cache cache(spec);
    NaiveLru ref(8, ways, 64);
    for (int i = 0; i < 20000; ++i) {
      const std::uint64_t addr = (rng() % 512) * 64 + rng() % 64;
      const bool write = rng() % 3 == 0;
      const auto a = cache.access(addr, write);
      const auto b = ref.access(addr, write);
      REQUIRE(a.hit == b.hit);
      REQUIRE(a.dirty_eviction == b.dirty_eviction);
      if (a.dirty_eviction) REQUIRE(a.victim_address == b.victim_address);
    }
  }
}
