/**
 * Copyright (c) 2026 The negfmini developers.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "negfmini/csv.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(NEGFMINI_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path fresh(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("negfmini_cli_" + name);
  fs::remove_all(p);
  return p;
}

json manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  return json::parse(in);
}

}  // namespace

TEST_CASE("ballistic simulation writes reports and a manifest") {
  const fs::path out = fresh("ballistic");
  REQUIRE(run("simulate --max-iter 1 --out " + out.string()) == 0);
  for (const char* f : {"scf_trace.csv", "current_profile.csv", "spectral_current.csv", "energy_currents.csv"}) {
    REQUIRE(fs::exists(out / f));
    CHECK(negfmini::read_csv((out / f).string()).size() > 1);
  }
  const json m = manifest(out);
  CHECK(m["subcommand"] == "simulate");
  CHECK(m["exit_code"] == 0);
  CHECK(m["result"]["status"] == "ballistic");
  CHECK(m["threads"].get<int>() >= 1);
  fs::remove_all(out);
}

TEST_CASE("argument errors exit with 1") {
  const fs::path out = fresh("bad");
  CHECK(run("simulate --nkz 3 --nqz 5 --out " + out.string()) == 1);
  CHECK(run("simulate --cache sometimes --out " + out.string()) == 1);
  CHECK(run("simulate --no-such-flag") == 1);
  CHECK(run("generate --bnum 3 --out " + out.string()) == 1);
  fs::remove_all(out);
}

TEST_CASE("iteration cap exits with 2") {
  const fs::path out = fresh("maxiter");
  CHECK(run("simulate --ep 0.5 --max-iter 5 --out " + out.string()) == 2);
  const json m = manifest(out);
  CHECK(m["exit_code"] == 2);
  CHECK(m["result"]["status"] == "max_iter");
  fs::remove_all(out);
}

TEST_CASE("generated devices can be simulated") {
  const fs::path gen = fresh("gen"), sim = fresh("sim");
  REQUIRE(run("generate --na 8 --bnum 2 --out " + gen.string()) == 0);
  REQUIRE(fs::exists(gen / "device.ngd"));
  CHECK(run("simulate --max-iter 1 --device " + (gen / "device.ngd").string() + " --out " + sim.string()) == 0);
  CHECK(run("simulate --device " + (gen / "device.ngd").string() + " --na 16 --out " + sim.string()) == 1);
  fs::remove_all(gen);
  fs::remove_all(sim);
}

TEST_CASE("cost model tables") {
  const fs::path out = fresh("cost");
  REQUIRE(run("cost-model --structure small --procs 768 --out " + out.string()) == 0);
  const auto rows = negfmini::read_csv((out / "cost_tables.csv").string());
  bool omen = false;
  for (const auto& r : rows)
    for (const auto& f : r) omen = omen || f == "sse_omen";
  CHECK(omen);
  CHECK(fs::exists(out / "cost_summary.txt"));
  const json m = manifest(out);
  CHECK(m.contains("plan"));
  fs::remove_all(out);
}

TEST_CASE("empty benchmark selection") {
  const fs::path out = fresh("bench");
  REQUIRE(run("bench --groups \"\" --out " + out.string()) == 0);
  CHECK(negfmini::read_csv((out / "bench.csv").string()).size() == 1);
  fs::remove_all(out);
}
