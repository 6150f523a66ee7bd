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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Tmp {
  fs::path dir = fs::temp_directory_path() / ("linksim_cli_" + std::to_string(::getpid()));
  Tmp() { fs::create_directories(dir); }
  ~Tmp() { fs::remove_all(dir); }
};

int cli(const std::string& args, const fs::path& out = "/dev/null", const fs::path& err = "/dev/null") {
  const std::string cmd = std::string(LINKSIM_CLI) + " " + args + " > " + out.string() + " 2> " + err.string();
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("run appends rows and writes the header once") {
  Tmp t;
  const fs::path csv = t.dir / "runs.csv";
  REQUIRE(cli("run --set workload.n=64 --out " + csv.string()) == 0);
  REQUIRE(cli("run --set workload.n=64 --out " + csv.string()) == 0);
  const std::string text = slurp(csv);
  REQUIRE(lines(text) == 3);
  std::istringstream in(text);
  std::string header, a, b;
  std::getline(in, header);
  std::getline(in, a);
  std::getline(in, b);
  CHECK(header.rfind("run_id,", 0) == 0);
  // Rows differ only in run_id.
  CHECK(a.substr(a.find(',')) == b.substr(b.find(',')));
}

TEST_CASE("user errors exit 1 with a diagnostic") {
  Tmp t;
  const fs::path err = t.dir / "err.txt";
  CHECK(cli("run --set bogus.key=1", "/dev/null", err) == 1);
  CHECK(slurp(err).find("bogus.key") != std::string::npos);
  CHECK(cli("run --set mode=devmem", "/dev/null", err) == 1);
  CHECK(slurp(err).find("mem.placement") != std::string::npos);
  CHECK(cli("figure nope --out " + t.dir.string(), "/dev/null", err) == 1);
  CHECK(slurp(err).find("fig3") != std::string::npos);
  CHECK(cli("sweep --axis pcie.lanes=2,x --out " + (t.dir / "s.csv").string(), "/dev/null", err) == 1);
  CHECK(slurp(err).find("'x'") != std::string::npos);
  CHECK(cli("--no-such-flag") == 1);

  std::ofstream(t.dir / "bad.cfg") << "pcie.lanes = 8\npcie.lane_rate_gbps = fast\n";
  CHECK(cli("run --config " + (t.dir / "bad.cfg").string(), "/dev/null", err) == 1);
  CHECK(slurp(err).find("bad.cfg:2") != std::string::npos);
}

TEST_CASE("sweep and figure outputs") {
  Tmp t;
  const fs::path csv = t.dir / "s.csv";
  REQUIRE(cli("sweep --set workload.n=64 --axis pcie.lanes=2,4,8 --out " + csv.string()) == 0);
  CHECK(lines(slurp(csv)) == 4);
  REQUIRE(cli("figure table5 --quick --out " + t.dir.string()) == 0);
  CHECK(fs::exists(t.dir / "table5.csv"));
  CHECK(lines(slurp(t.dir / "table5.csv")) == 4);
}
