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
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace linksim {

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
};

/// Every recognized key with its default, sorted by name.
const std::vector<ConfigKey>& config_keys();

/// Flat key=value configuration. Unknown keys are rejected; unset keys take
/// their documented defaults.
class RunConfig {
 public:
  RunConfig();

  /// Parses `text` ('#' comments, blank lines ignored). Errors name the source,
  /// line and key.
  static RunConfig parse(std::string_view text, std::string_view source = "<config>");
  static RunConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  bool has(const std::string& key) const;

  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  /// Canonical text form; parse(echo()) == *this.
  std::string echo() const;
  const std::map<std::string, std::string>& values() const { return values_; }

  bool operator==(const RunConfig&) const = default;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace linksim
