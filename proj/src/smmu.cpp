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

#include "linksim/smmu.hpp"

#include <sstream>

#include "linksim/errors.hpp"

namespace linksim {

std::uint64_t footprint_pages(std::uint64_t matrix_n) {
  const std::uint64_t bytes = 3 * matrix_n * matrix_n * 4;
  return (bytes + kPageBytes - 1) / kPageBytes;
}

PageTable::PageTable(std::uint32_t levels) : levels_(levels) {
  if (levels < 1 || levels > 4) throw ConfigError("smmu.levels must be in [1, 4]");
}

std::uint64_t PageTable::scramble(std::uint64_t vpn) {
  // Odd multiplier modulo a power of two is a bijection.
  return (vpn * 0x9E3B5ull + 0x2F1Dull) & (kDataPages - 1);
}

void PageTable::map(std::uint64_t vaddr, std::uint64_t bytes) {
  if (bytes == 0) return;
  const std::uint64_t first = vaddr / kPageBytes;
  const std::uint64_t last = (vaddr + bytes - 1) / kPageBytes;
  if (last >= kDataPages) throw ConfigError("buffer exceeds the 4 GiB translated address space");
  for (std::uint64_t vpn = first; vpn <= last; ++vpn) mapped_.emplace(vpn, scramble(vpn));
}

bool PageTable::mapped(std::uint64_t vaddr) const { return mapped_.count(vaddr / kPageBytes) != 0; }

std::uint64_t PageTable::physical(std::uint64_t vaddr) const {
  const auto it = mapped_.find(vaddr / kPageBytes);
  if (it == mapped_.end()) {
    std::ostringstream os;
    os << "translation fault: virtual address 0x" << std::hex << vaddr << std::dec << " (page "
       << vaddr / kPageBytes << ") is not mapped; " << mapped_.size() << " pages mapped";
    throw TranslationFault(os.str());
  }
  return it->second * kPageBytes + vaddr % kPageBytes;
}

std::uint64_t PageTable::entry_address(std::uint32_t level, std::uint64_t vpn) const {
  // Each level gets its own zone; entries are 8 bytes, indexed by the vpn prefix.
  const std::uint32_t shift = 9 * (levels_ - 1 - level);
  const std::uint64_t zone = kTableBytes / 4 * level;
  return kTableBase + zone + (vpn >> shift) * 8;
}

const std::vector<std::string>& translation_stat_names() {
  static const std::vector<std::string> names = {
      "Memory Footprint (Pages)", "Translation Times", "Trans Mean Time",   "PTW Times",
      "PTW Mean Time",            "uTLB Lookup times", "uTLB Misses times", "Trans Overhead"};
  return names;
}

void SmmuConfig::validate() const {
  if (utlb_entries == 0) throw ConfigError("smmu.utlb_entries must be >= 1");
  if (levels < 1 || levels > 4) throw ConfigError("smmu.levels must be in [1, 4]");
}

Smmu::Smmu(SmmuConfig cfg, PageTable& table, MemorySystem& memory, AccessMode walk_mode)
    : cfg_(cfg), table_(&table), memory_(&memory), walk_mode_(walk_mode) {
  cfg_.validate();
  entries_.resize(cfg_.utlb_entries);
}

SimTime Smmu::walk(std::uint64_t vpn, SimTime start) {
  SimTime t = start;
  for (std::uint32_t level = 0; level < table_->levels(); ++level) {
    const std::uint64_t line = table_->entry_address(level, vpn) / 64 * 64;
    t = memory_->access(MemRequest{line, 64, false}, t, walk_mode_);
  }
  ++walks_;
  walk_ns_ += static_cast<double>((t - start).ns());
  return t;
}

Translation Smmu::translate(std::uint64_t vaddr, SimTime arrival) {
  const std::uint64_t paddr = table_->physical(vaddr);
  const std::uint64_t vpn = vaddr / kPageBytes;
  const SimTime hit = SimTime::ceil_ns(cfg_.hit_latency_ns);
  ++lookups_;
  ++clock_;
  Entry* victim = &entries_[0];
  for (Entry& e : entries_) {
    if (e.valid && e.vpn == vpn) {
      e.last_use = clock_;
      SimTime stall = hit;
      if (e.ready > arrival) {
        // Walk still in flight: coalesced miss.
        ++misses_;
        stall = (e.ready - arrival) + hit;
      }
      stall_ns_ += static_cast<double>(stall.ns());
      return Translation{paddr, stall};
    }
    if (!e.valid) {
      if (victim->valid) victim = &e;
    } else if (victim->valid && e.last_use < victim->last_use) {
      victim = &e;
    }
  }
  ++misses_;
  const SimTime done = walk(vpn, arrival);
  *victim = Entry{vpn, paddr / kPageBytes, clock_, done, true};
  const SimTime stall = (done - arrival) + hit;
  stall_ns_ += static_cast<double>(stall.ns());
  return Translation{paddr, stall};
}

TranslationStats Smmu::report(double total_ns) const {
  TranslationStats s;
  s.footprint_pages = table_->mapped_pages();
  s.translation_count = lookups_;
  s.translation_mean_cycles = lookups_ ? stall_ns_ / static_cast<double>(lookups_) : 0.0;
  s.ptw_count = walks_;
  s.ptw_mean_cycles = walks_ ? walk_ns_ / static_cast<double>(walks_) : 0.0;
  s.utlb_lookups = lookups_;
  s.utlb_misses = misses_;
  s.total_stall_ns = stall_ns_;
  s.overhead_percent = total_ns > 0.0 ? stall_ns_ / total_ns * 100.0 : 0.0;
  return s;
}

}  // namespace linksim
