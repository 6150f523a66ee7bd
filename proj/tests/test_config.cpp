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

#include <algorithm>

#include "linksim/config.hpp"
#include "linksim/errors.hpp"
#include "linksim/system.hpp"

using namespace linksim;

TEST_CASE("keys are sorted and unique with documented defaults") {
  const auto& keys = config_keys();
  REQUIRE(!keys.empty());
  for (std::size_t i = 1; i < keys.size(); ++i) CHECK(keys[i - 1].name < keys[i].name);
  for (const auto& k : keys) {
    CHECK(!k.default_value.empty());
    CHECK(!k.help.empty());
  }
  const RunConfig cfg;
  CHECK(cfg.get("pcie.lanes") == "4");
  CHECK(cfg.get("pcie.lane_rate_gbps") == "4");
  CHECK(cfg.get("pcie.packet_bytes") == "256");
  CHECK(cfg.get("mem.preset") == "ddr3");
  CHECK(cfg.get("smmu.utlb_entries") == "32");
  CHECK(cfg.get("accel.rows") == "16");
  CHECK(cfg.get("accel.buffer_bytes") == "3145728");
}

TEST_CASE("echo round-trips") {
  RunConfig cfg;
  cfg.set("pcie.lanes", "16");
  cfg.set("workload.kind", "vit");
  cfg.set("mem.preset", "hbm2");
  CHECK(RunConfig::parse(cfg.echo()) == cfg);
  CHECK(RunConfig::parse(RunConfig{}.echo()) == RunConfig{});
}

TEST_CASE("parse accepts comments, blanks and spacing") {
  const RunConfig cfg = RunConfig::parse("# header\n\n  pcie.lanes = 8   # trailing\nmode=dm\n");
  CHECK(cfg.get_u64("pcie.lanes") == 8);
  CHECK(cfg.get("mode") == "dm");
}

TEST_CASE("parse diagnostics name the source, line and key") {
  CHECK_THROWS_WITH_AS(RunConfig::parse("pcie.lanes=4\nbogus.key=1\n", "my.cfg"),
                       doctest::Contains("my.cfg:2"), ConfigError);
  CHECK_THROWS_WITH_AS(RunConfig::parse("bogus.key=1\n"), doctest::Contains("bogus.key"), ConfigError);
  CHECK_THROWS_WITH_AS(RunConfig::parse("\n\njust text\n", "x"), doctest::Contains("x:3"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("pcie.lanes=\n"), ConfigError);
}

TEST_CASE("malformed values are rejected when set") {
  RunConfig cfg;
  CHECK_THROWS_WITH_AS(cfg.set("pcie.lanes", "four"), doctest::Contains("pcie.lanes"), ConfigError);
  CHECK(cfg.get("pcie.lanes") == "4");
  CHECK_THROWS_AS(cfg.set("smmu.enabled", "maybe"), ConfigError);
  cfg.set("smmu.enabled", "off");
  CHECK_FALSE(cfg.get_bool("smmu.enabled"));
  // Integer keys accept any number syntactically; the typed getter is strict.
  cfg.set("pcie.lanes", "2.5");
  CHECK_THROWS_WITH_AS(cfg.get_u64("pcie.lanes"), doctest::Contains("pcie.lanes"), ConfigError);
  CHECK_THROWS_AS(resolve(cfg), ConfigError);
  cfg.set("mem.latency_ns", "12");
  cfg.set("mem.latency_ns", "preset");
  CHECK_THROWS_AS(cfg.get("nope"), ConfigError);
  CHECK_THROWS_AS(cfg.set("nope", "1"), ConfigError);
  CHECK_THROWS_WITH_AS(RunConfig::parse("pcie.lanes = 8\npcie.lane_rate_gbps = fast\n", "my.cfg"),
                       doctest::Contains("my.cfg:2"), ConfigError);
}

TEST_CASE("load reports missing files") {
  CHECK_THROWS_WITH_AS(RunConfig::load("/nonexistent/linksim.cfg"), doctest::Contains("/nonexistent/linksim.cfg"),
                       ConfigError);
}
