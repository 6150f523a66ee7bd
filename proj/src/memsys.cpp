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

#include "linksim/memsys.hpp"

#include <algorithm>
#include <sstream>

#include "linksim/errors.hpp"

namespace linksim {

namespace {

struct PresetRow {
  const char* name;
  std::uint32_t channels;
  std::uint32_t width_bits;
  double bandwidth_gbps;
  double rate_mts;
  double latency_ns;
};

// Device parameters per technology; latencies are calibration defaults.
constexpr PresetRow kPresets[] = {
    {"ddr3", 1, 64, 12.8, 1600, 14.0},  {"ddr4", 1, 64, 19.2, 2400, 14.0},
    {"ddr5", 2, 32, 25.6, 3200, 14.0},  {"hbm2", 2, 128, 64.0, 2000, 12.0},
    {"gddr6", 2, 64, 32.0, 2000, 12.0},
};

}  // namespace

void MemoryDeviceSpec::validate() const {
  if (!(bandwidth_gbps > 0.0)) throw ConfigError("mem.bandwidth_gbps must be > 0 (device '" + name + "')");
  if (channels < 1) throw ConfigError("memory device '" + name + "' needs at least one channel");
  if (!(fixed_latency_ns >= 0.0)) throw ConfigError("mem.latency_ns must be >= 0 (device '" + name + "')");
}

const std::vector<std::string>& memory_preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& row : kPresets) v.emplace_back(row.name);
    return v;
  }();
  return names;
}

MemoryDeviceSpec memory_preset(std::string_view name, Placement placement) {
  for (const auto& row : kPresets) {
    if (name == row.name) {
      return MemoryDeviceSpec{row.name,        row.channels,  row.width_bits, row.bandwidth_gbps,
                              row.rate_mts,    row.latency_ns, placement};
    }
  }
  throw ConfigError("unknown memory preset '" + std::string(name) + "' (valid: ddr3, ddr4, ddr5, hbm2, gddr6, custom)");
}

void CacheSpec::validate() const {
  if (line_bytes == 0 || associativity == 0) throw ConfigError("cache '" + name + "': line and associativity must be > 0");
  const std::uint64_t way_bytes = static_cast<std::uint64_t>(line_bytes) * associativity;
  if (capacity_bytes == 0 || capacity_bytes % way_bytes != 0) {
    throw ConfigError("cache '" + name + "': capacity " + std::to_string(capacity_bytes) +
                      " is not divisible by line x associativity (" + std::to_string(way_bytes) + ")");
  }
}

CacheSpec CacheSpec::last_level(std::uint64_t capacity) { return CacheSpec{"llc", capacity, 64, 16, 20.0}; }
CacheSpec CacheSpec::io_cache(std::uint64_t capacity) { return CacheSpec{"iocache", capacity, 64, 8, 10.0}; }

Cache::Cache(CacheSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  sets_ = spec_.sets();
  tags_.assign(sets_ * spec_.associativity, 0);
  dirty_.assign(sets_ * spec_.associativity, 0);
}

Cache::Outcome Cache::access(std::uint64_t address, bool write) {
  const std::uint64_t line = address / spec_.line_bytes;
  const std::uint64_t key = line + 1;
  const std::size_t ways = spec_.associativity;
  std::uint64_t* tags = &tags_[(line % sets_) * ways];
  std::uint8_t* dirty = &dirty_[(line % sets_) * ways];
  std::size_t pos = 0;
  while (pos < ways && tags[pos] != key) ++pos;
  Outcome out;
  std::uint8_t d = write ? 1 : 0;
  if (pos < ways) {
    ++hits_;
    out.hit = true;
    d |= dirty[pos];
  } else {
    ++misses_;
    pos = ways - 1;
    if (tags[pos] != 0 && dirty[pos]) {
      out.dirty_eviction = true;
      out.victim_address = (tags[pos] - 1) * spec_.line_bytes;
    }
  }
  for (std::size_t w = pos; w > 0; --w) {
    tags[w] = tags[w - 1];
    dirty[w] = dirty[w - 1];
  }
  tags[0] = key;
  dirty[0] = d;
  return out;
}

bool Cache::contains(std::uint64_t address) const {
  const std::uint64_t line = address / spec_.line_bytes;
  const std::size_t ways = spec_.associativity;
  const std::uint64_t* tags = &tags_[(line % sets_) * ways];
  for (std::size_t w = 0; w < ways; ++w) {
    if (tags[w] == line + 1) return true;
  }
  return false;
}

MemoryDevice::MemoryDevice(MemoryDeviceSpec spec, std::vector<AddressRegion> regions, std::uint32_t line_bytes)
    : spec_(std::move(spec)), regions_(std::move(regions)), line_bytes_(line_bytes) {
  spec_.validate();
  channel_free_ns_.assign(spec_.channels, 0.0);
}

std::string MemoryDevice::describe_regions() const {
  std::ostringstream os;
  os << spec_.name << " region map:";
  for (const auto& r : regions_) {
    os << " [" << r.name << " 0x" << std::hex << r.base << "-0x" << (r.base + r.size) << std::dec << ")";
  }
  return os.str();
}

void MemoryDevice::check_mapped(const MemRequest& request) const {
  for (const auto& r : regions_) {
    if (r.contains(request.address, request.bytes)) return;
  }
  std::ostringstream os;
  os << "memory fault: " << request.bytes << " B at 0x" << std::hex << request.address << std::dec
     << " is outside the configured regions; " << describe_regions();
  throw SimulationFault(os.str());
}

SimTime MemoryDevice::service(const MemRequest& request, SimTime arrival) {
  if (request.bytes == 0) throw SimulationFault("memory request of zero bytes");
  check_mapped(request);
  const double chan_bw = spec_.channel_bandwidth();
  const double t0 = arrival.as_double();
  double done = t0;
  std::uint64_t addr = request.address;
  const std::uint64_t end = request.address + request.bytes;
  while (addr < end) {
    const std::uint64_t line = addr / line_bytes_;
    const std::uint64_t line_end = std::min(end, (line + 1) * line_bytes_);
    double& free = channel_free_ns_[line % spec_.channels];
    const double start = std::max(t0, free);
    free = start + static_cast<double>(line_end - addr) / chan_bw;
    done = std::max(done, free);
    addr = line_end;
  }
  bytes_served_ += request.bytes;
  return SimTime::ceil_ns(done + spec_.fixed_latency_ns);
}

double MemoryDevice::drain_time_ns() const {
  return *std::max_element(channel_free_ns_.begin(), channel_free_ns_.end());
}

const char* to_string(AccessMode mode) {
  switch (mode) {
    case AccessMode::DC: return "dc";
    case AccessMode::DM: return "dm";
    case AccessMode::DevMem: return "devmem";
  }
  return "?";
}

AccessMode parse_access_mode(std::string_view text) {
  if (text == "dc") return AccessMode::DC;
  if (text == "dm") return AccessMode::DM;
  if (text == "devmem") return AccessMode::DevMem;
  throw ConfigError("mode must be one of dc, dm, devmem (got '" + std::string(text) + "')");
}

void MemsysConfig::validate() const {
  host.validate();
  if (device) device->validate();
  llc.validate();
  iocache.validate();
  if (mode == AccessMode::DevMem && !device) {
    throw ConfigError("mode=devmem requires device-side memory (set mem.placement=device)");
  }
}

MemorySystem::MemorySystem(MemsysConfig cfg, std::vector<AddressRegion> host_regions,
                           std::vector<AddressRegion> device_regions)
    : cfg_(std::move(cfg)),
      host_(cfg_.host, std::move(host_regions), cfg_.llc.line_bytes),
      llc_(cfg_.llc),
      iocache_(cfg_.iocache) {
  cfg_.validate();
  if (cfg_.device) device_.emplace(*cfg_.device, std::move(device_regions), cfg_.llc.line_bytes);
}

SimTime MemorySystem::service(const MemRequest& request, SimTime arrival, Placement where) {
  if (where == Placement::Device) {
    if (!device_) throw ConfigError("no device-side memory configured (mem.placement)");
    return device_->service(request, arrival);
  }
  return host_.service(request, arrival);
}

SimTime MemorySystem::access_line_dc(std::uint64_t line_addr, std::uint32_t bytes, bool write, SimTime arrival) {
  const Cache::Outcome io = iocache_.access(line_addr, write);
  if (io.hit && !write) return arrival + SimTime::ceil_ns(cfg_.iocache.hit_latency_ns);
  const SimTime at_llc = arrival + SimTime::ceil_ns(cfg_.membus_latency_ns);
  const Cache::Outcome l2 = llc_.access(line_addr, write);
  if (l2.dirty_eviction) host_.service(MemRequest{l2.victim_address, cfg_.llc.line_bytes, true}, at_llc);
  // Writes allocate without fetching (full-line DMA writes).
  if (l2.hit || write) return at_llc + SimTime::ceil_ns(cfg_.llc.hit_latency_ns);
  return host_.service(MemRequest{line_addr, bytes, false}, at_llc + SimTime::ceil_ns(cfg_.snoop_latency_ns));
}

SimTime MemorySystem::access(const MemRequest& request, SimTime arrival, AccessMode mode) {
  if (request.bytes == 0) throw SimulationFault("memory request of zero bytes");
  switch (mode) {
    case AccessMode::DevMem:
      if (!device_) throw ConfigError("mode=devmem requires device-side memory (set mem.placement=device)");
      return device_->service(request, arrival);
    case AccessMode::DM:
      return host_.service(request, arrival + SimTime::ceil_ns(cfg_.membus_latency_ns));
    case AccessMode::DC: {
      const std::uint32_t line = cfg_.llc.line_bytes;
      SimTime done = arrival;
      std::uint64_t addr = request.address;
      const std::uint64_t end = request.address + request.bytes;
      while (addr < end) {
        const std::uint64_t base = addr / line * line;
        const std::uint64_t stop = std::min(end, base + line);
        done = max(done, access_line_dc(base, static_cast<std::uint32_t>(stop - base), request.write, arrival));
        addr = stop;
      }
      return done;
    }
  }
  return arrival;
}

}  // namespace linksim
