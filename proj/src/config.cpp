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

#include "linksim/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "linksim/errors.hpp"

namespace linksim {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool is_number(const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  return ec == std::errc{} && ptr == v.data() + v.size();
}

bool is_bool(const std::string& v) {
  return v == "true" || v == "false" || v == "1" || v == "0" || v == "on" || v == "off";
}

const std::string& default_value(const std::string& key);

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k = {
        {"accel.block", "352", "largest resident output block edge"},
        {"accel.buffer_bytes", "3145728", "local buffer capacity"},
        {"accel.cols", "16", "systolic array columns"},
        {"accel.compute_scale", "1.25", "multiplier on per-tile compute time"},
        {"accel.devmem_ctrl_ns", "20", "device memory controller latency"},
        {"accel.fill_cycles", "32", "array fill and drain cycles per tile"},
        {"accel.rows", "16", "systolic array rows"},
        {"cache.iocache_bytes", "32768", "IOCache capacity"},
        {"cache.llc_bytes", "2097152", "last level cache capacity"},
        {"cpu.gelu_ns", "0.4", "Non-GEMM cost per GELU element"},
        {"cpu.host_bw_gbps", "25.6", "CPU streaming bandwidth to memory"},
        {"cpu.layernorm_ns", "0.6", "Non-GEMM cost per layernorm element"},
        {"cpu.numa_line_ns", "11", "exposed latency per line of device-resident data"},
        {"cpu.residual_ns", "0.2", "Non-GEMM cost per residual-add element"},
        {"cpu.softmax_ns", "0.8", "Non-GEMM cost per softmax element"},
        {"mem.bandwidth_gbps", "preset", "override of the preset bandwidth"},
        {"mem.latency_ns", "preset", "override of the preset first-word latency"},
        {"mem.placement", "host", "host or device"},
        {"mem.preset", "ddr3", "ddr3, ddr4, ddr5, hbm2, gddr6 or custom"},
        {"mode", "dc", "dc, dm or devmem"},
        {"pcie.header_bytes", "12", "per-packet header and framing bytes"},
        {"pcie.lane_rate_gbps", "4", "effective per-lane rate"},
        {"pcie.lanes", "4", "lane count"},
        {"pcie.packet_bytes", "256", "maximum payload per packet"},
        {"pcie.rc_latency_ns", "150", "root complex latency"},
        {"pcie.switch_latency_ns", "50", "switch latency"},
        {"pcie.turnaround_ns", "2450", "completer turnaround"},
        {"pcie.window_bytes", "20480", "in-flight payload window"},
        {"smmu.enabled", "true", "translate accelerator requests"},
        {"smmu.levels", "3", "page-table levels"},
        {"smmu.utlb_entries", "32", "micro-TLB entries"},
        {"sys.launch_ns", "2000", "host launch overhead per accelerator operation"},
        {"workload.kind", "gemm", "gemm or vit"},
        {"workload.n", "1024", "GEMM dimension"},
        {"workload.seq_len", "197", "ViT tokens"},
        {"workload.vit", "base", "base, large or huge"},
    };
    std::sort(k.begin(), k.end(), [](const ConfigKey& a, const ConfigKey& b) { return a.name < b.name; });
    return k;
  }();
  return keys;
}

namespace {

const std::string& default_value(const std::string& key) {
  static const std::map<std::string, std::string> defaults = [] {
    std::map<std::string, std::string> m;
    for (const auto& k : config_keys()) m[k.name] = k.default_value;
    return m;
  }();
  return defaults.at(key);
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& k : config_keys()) values_[k.name] = k.default_value;
}

RunConfig RunConfig::parse(std::string_view text, std::string_view source) {
  RunConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = std::string(source) + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key=value, got '" + body + "'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    try {
      cfg.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  if (value.empty()) throw ConfigError("empty value for key '" + key + "'");
  // Numeric and boolean keys are recognized by the form of their default.
  const std::string& def = default_value(key);
  if (is_number(def) && !is_number(value)) throw ConfigError("key '" + key + "': '" + value + "' is not a number");
  if ((def == "true" || def == "false") && !is_bool(value)) {
    throw ConfigError("key '" + key + "': '" + value + "' is not a boolean");
  }
  it->second = value;
}

bool RunConfig::has(const std::string& key) const { return values_.count(key) != 0; }

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const std::string& v = get(key);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("key '" + key + "': '" + v + "' is not a non-negative integer");
  }
  return out;
}

double RunConfig::get_double(const std::string& key) const {
  const std::string& v = get(key);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw ConfigError("key '" + key + "': '" + v + "' is not a number");
  return out;
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

std::string RunConfig::echo() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

}  // namespace linksim
