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
#include <unordered_map>
#include <vector>

#include "linksim/des.hpp"
#include "linksim/memsys.hpp"

namespace linksim {

inline constexpr std::uint64_t kPageBytes = 4096;

/// Pages needed for the three n x n 4-byte operand matrices.
std::uint64_t footprint_pages(std::uint64_t matrix_n);

/// Virtual to physical page mapping plus a radix table layout for walks.
/// Physical pages are a fixed bijective scramble of virtual pages inside the
/// data region; page-table entries live in their own region starting at
/// table_base.
class PageTable {
 public:
  static constexpr std::uint64_t kDataPages = 1ull << 20;  // 4 GiB of data space
  static constexpr std::uint64_t kTableBase = kDataPages * kPageBytes;
  static constexpr std::uint64_t kTableBytes = 64ull << 20;

  explicit PageTable(std::uint32_t levels = 3);

  /// Maps every page overlapping [vaddr, vaddr + bytes).
  void map(std::uint64_t vaddr, std::uint64_t bytes);
  bool mapped(std::uint64_t vaddr) const;
  std::uint64_t mapped_pages() const { return mapped_.size(); }

  /// Throws TranslationFault if the page is unmapped.
  std::uint64_t physical(std::uint64_t vaddr) const;

  /// Physical address of the level-`level` entry for `vpn` (level 0 is the root).
  std::uint64_t entry_address(std::uint32_t level, std::uint64_t vpn) const;
  std::uint32_t levels() const { return levels_; }

  static std::uint64_t scramble(std::uint64_t vpn);
  static AddressRegion table_region() { return AddressRegion{"page-table", kTableBase, kTableBytes}; }

 private:
  std::uint32_t levels_;
  std::unordered_map<std::uint64_t, std::uint64_t> mapped_;
};

/// Address translation counters, reported in the table5 recipe.
struct TranslationStats {
  std::uint64_t footprint_pages = 0;
  std::uint64_t translation_count = 0;
  double translation_mean_cycles = 0.0;
  std::uint64_t ptw_count = 0;
  double ptw_mean_cycles = 0.0;
  std::uint64_t utlb_lookups = 0;
  std::uint64_t utlb_misses = 0;
  double overhead_percent = 0.0;
  /// Sum of every translation stall (ns).
  double total_stall_ns = 0.0;
};

/// Column names for the eight statistics, in report order.
const std::vector<std::string>& translation_stat_names();

struct SmmuConfig {
  bool enabled = true;
  std::uint32_t utlb_entries = 32;
  std::uint32_t levels = 3;
  double hit_latency_ns = 1.0;

  void validate() const;
};

struct Translation {
  std::uint64_t paddr = 0;
  SimTime stall;
};

/// Fully associative LRU micro-TLB in front of a page-table walker whose
/// reads go through the memory system. Concurrent misses to one page share a
/// single walk.
class Smmu {
 public:
  Smmu(SmmuConfig cfg, PageTable& table, MemorySystem& memory, AccessMode walk_mode = AccessMode::DC);

  /// Translates `vaddr` for a request arriving at `arrival`.
  Translation translate(std::uint64_t vaddr, SimTime arrival);

  /// Snapshot with overhead relative to `total_ns` of execution.
  TranslationStats report(double total_ns) const;

  const SmmuConfig& config() const { return cfg_; }

 private:
  struct Entry {
    std::uint64_t vpn = 0;
    std::uint64_t ppn = 0;
    std::uint64_t last_use = 0;
    SimTime ready;
    bool valid = false;
  };

  SimTime walk(std::uint64_t vpn, SimTime start);

  SmmuConfig cfg_;
  PageTable* table_;
  MemorySystem* memory_;
  AccessMode walk_mode_;
  std::vector<Entry> entries_;
  std::uint64_t clock_ = 0;
  std::uint64_t lookups_ = 0;
  std::uint64_t misses_ = 0;
  std::uint64_t walks_ = 0;
  double walk_ns_ = 0.0;
  double stall_ns_ = 0.0;
};

}  // namespace linksim
