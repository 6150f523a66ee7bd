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
#include <string>
#include <string_view>
#include <vector>

#include "linksim/des.hpp"

namespace linksim {

enum class Placement { Host, Device };

/// Parametric DRAM device: fixed first-word latency plus a bandwidth pipe
/// split evenly over channels. Lines are interleaved round-robin over
/// channels by line index.
struct MemoryDeviceSpec {
  std::string name;
  std::uint32_t channels = 1;
  std::uint32_t data_width_bits = 64;
  double bandwidth_gbps = 12.8;
  double data_rate_mts = 1600;
  double fixed_latency_ns = 14.0;
  Placement placement = Placement::Host;

  void validate() const;
  double channel_bandwidth() const { return bandwidth_gbps / channels; }
};

/// Names of the built-in device presets: ddr3, ddr4, ddr5, hbm2, gddr6.
const std::vector<std::string>& memory_preset_names();

/// Throws ConfigError for unknown names.
MemoryDeviceSpec memory_preset(std::string_view name, Placement placement = Placement::Host);

struct CacheSpec {
  std::string name;
  std::uint64_t capacity_bytes = 0;
  std::uint32_t line_bytes = 64;
  std::uint32_t associativity = 8;
  double hit_latency_ns = 10.0;

  void validate() const;
  std::uint64_t sets() const { return capacity_bytes / (static_cast<std::uint64_t>(line_bytes) * associativity); }

  static CacheSpec last_level(std::uint64_t capacity = 2u << 20);
  static CacheSpec io_cache(std::uint64_t capacity = 32u << 10);
};

/// Set-associative LRU cache over line addresses. Tracks tags and dirty bits
/// only; data lives in the functional model.
class Cache {
 public:
  explicit Cache(CacheSpec spec);

  struct Outcome {
    bool hit = false;
    bool dirty_eviction = false;
    std::uint64_t victim_address = 0;
  };

  Outcome access(std::uint64_t address, bool write);
  bool contains(std::uint64_t address) const;

  const CacheSpec& spec() const { return spec_; }
  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }

 private:
  // Per set, ways are kept in MRU-first order; tag 0 marks an empty way.
  CacheSpec spec_;
  std::uint64_t sets_;
  std::vector<std::uint64_t> tags_;
  std::vector<std::uint8_t> dirty_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

struct AddressRegion {
  std::string name;
  std::uint64_t base = 0;
  std::uint64_t size = 0;

  bool contains(std::uint64_t address, std::uint64_t bytes) const {
    return address >= base && bytes <= size && address - base <= size - bytes;
  }
};

struct MemRequest {
  std::uint64_t address = 0;
  std::uint64_t bytes = 0;
  bool write = false;
};

/// One DRAM device with per-channel occupancy.
class MemoryDevice {
 public:
  MemoryDevice(MemoryDeviceSpec spec, std::vector<AddressRegion> regions, std::uint32_t line_bytes = 64);

  /// Completion = arrival + fixed latency + serialization on the request's
  /// channels. Lines on distinct channels overlap; one channel serializes.
  /// Throws SimulationFault for zero bytes or an address outside the region
  /// map (the message lists the map).
  SimTime service(const MemRequest& request, SimTime arrival);

  /// Time at which the data path of every channel is free.
  double drain_time_ns() const;

  const MemoryDeviceSpec& spec() const { return spec_; }
  const std::vector<AddressRegion>& regions() const { return regions_; }
  std::uint64_t bytes_served() const { return bytes_served_; }
  std::string describe_regions() const;

 private:
  void check_mapped(const MemRequest& request) const;

  MemoryDeviceSpec spec_;
  std::vector<AddressRegion> regions_;
  std::uint32_t line_bytes_;
  std::vector<double> channel_free_ns_;
  std::uint64_t bytes_served_ = 0;
};

/// DC: through IOCache and LLC, misses go over the MemBus to host DRAM with a
/// fixed coherence snoop. DM: straight to host DRAM over the MemBus.
/// DEVMEM: device-side DRAM, no PCIe.
enum class AccessMode { DC, DM, DevMem };

const char* to_string(AccessMode mode);
AccessMode parse_access_mode(std::string_view text);

struct MemsysConfig {
  MemoryDeviceSpec host = memory_preset("ddr3");
  std::optional<MemoryDeviceSpec> device;
  CacheSpec llc = CacheSpec::last_level();
  CacheSpec iocache = CacheSpec::io_cache();
  AccessMode mode = AccessMode::DC;
  double membus_latency_ns = 10.0;
  double snoop_latency_ns = 20.0;

  void validate() const;
};

class MemorySystem {
 public:
  MemorySystem(MemsysConfig cfg, std::vector<AddressRegion> host_regions,
               std::vector<AddressRegion> device_regions = {});

  /// Completion time of a (possibly multi-line) request in `mode`.
  SimTime access(const MemRequest& request, SimTime arrival, AccessMode mode);
  SimTime access(const MemRequest& request, SimTime arrival) { return access(request, arrival, cfg_.mode); }

  /// DRAM-only timing for `spec`, without caches or bus (the raw device model).
  SimTime service(const MemRequest& request, SimTime arrival, Placement where);

  const MemsysConfig& config() const { return cfg_; }
  MemoryDevice& host() { return host_; }
  MemoryDevice* device() { return device_ ? &*device_ : nullptr; }
  const Cache& llc() const { return llc_; }
  const Cache& iocache() const { return iocache_; }

 private:
  SimTime access_line_dc(std::uint64_t line, std::uint32_t bytes, bool write, SimTime arrival);

  MemsysConfig cfg_;
  MemoryDevice host_;
  std::optional<MemoryDevice> device_;
  Cache llc_;
  Cache iocache_;
};

}  // namespace linksim
