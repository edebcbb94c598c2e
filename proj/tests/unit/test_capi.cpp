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

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "negfmini/negfmini.h"

namespace fs = std::filesystem;

namespace {

negfmini_device* make_chain() {
  negfmini_device_params p;
  negfmini_device_params_default(&p);
  negfmini_device* d = nullptr;
  REQUIRE(negfmini_device_generate(&p, &d) == NEGFMINI_OK);
  REQUIRE(d != nullptr);
  return d;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(negfmini_version()) > 0);
  CHECK(std::string(negfmini_status_name(NEGFMINI_OK)) == "ok");
  CHECK(std::string(negfmini_status_name(NEGFMINI_ERR_PARTITION)) == "partition");
  CHECK(std::string(negfmini_status_name(static_cast<negfmini_status>(99))) == "unknown");
}

TEST_CASE("null arguments are rejected with a message") {
  negfmini_device* d = nullptr;
  CHECK(negfmini_device_generate(nullptr, &d) == NEGFMINI_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(negfmini_last_error()) > 0);
  CHECK(negfmini_device_get_info(nullptr, nullptr) == NEGFMINI_ERR_INVALID_ARGUMENT);
  CHECK(negfmini_simulate(nullptr, nullptr, nullptr) == NEGFMINI_ERR_INVALID_ARGUMENT);
  negfmini_device_free(nullptr);
  negfmini_result_free(nullptr);
}

TEST_CASE("generation errors map to status codes") {
  negfmini_device_params p;
  negfmini_device_params_default(&p);
  p.bnum = 3;  // 8 atoms do not split into 3 blocks
  negfmini_device* d = nullptr;
  CHECK(negfmini_device_generate(&p, &d) == NEGFMINI_ERR_PARTITION);
  CHECK(d == nullptr);
  negfmini_device_params_default(&p);
  p.lattice = "hexagon";
  CHECK(negfmini_device_generate(&p, &d) == NEGFMINI_ERR_INVALID_ARGUMENT);
  CHECK(negfmini_device_load("/nonexistent/device", &d) == NEGFMINI_ERR_IO);
}

TEST_CASE("device info, save and load") {
  negfmini_device* d = make_chain();
  negfmini_device_info info;
  REQUIRE(negfmini_device_get_info(d, &info) == NEGFMINI_OK);
  CHECK(std::string(info.lattice) == "chain");
  CHECK(info.na == 8);
  CHECK(info.nb == 2);
  CHECK(info.bnum == 4);
  const fs::path dir = fs::temp_directory_path() / "negfmini_capi_device";
  fs::remove_all(dir);
  REQUIRE(negfmini_device_save(d, dir.string().c_str()) == NEGFMINI_OK);
  negfmini_device* e = nullptr;
  REQUIRE(negfmini_device_load(dir.string().c_str(), &e) == NEGFMINI_OK);
  negfmini_device_info info2;
  REQUIRE(negfmini_device_get_info(e, &info2) == NEGFMINI_OK);
  CHECK(info2.na == info.na);
  CHECK(info2.seed == info.seed);
  CHECK(info2.vds == info.vds);
  negfmini_device_free(e);
  negfmini_device_free(d);
  fs::remove_all(dir);
}

TEST_CASE("ballistic simulation through the C interface") {
  negfmini_device* d = make_chain();
  negfmini_sim_config c;
  negfmini_sim_config_default(&c);
  c.max_iter = 1;
  negfmini_result* r = nullptr;
  REQUIRE(negfmini_simulate(d, &c, &r) == NEGFMINI_OK);
  negfmini_result_summary s;
  REQUIRE(negfmini_result_get_summary(r, &s) == NEGFMINI_OK);
  CHECK(std::string(s.status) == "ballistic");
  CHECK(s.converged == 1);
  CHECK(s.iterations == 1);
  CHECK(s.current > 0.0);
  CHECK(s.current_variation <= 1e-8);
  size_t n = 0;
  REQUIRE(negfmini_result_current_profile(r, nullptr, 0, &n) == NEGFMINI_OK);
  CHECK(n == 5);
  std::vector<double> prof(n);
  REQUIRE(negfmini_result_current_profile(r, prof.data(), prof.size(), &n) == NEGFMINI_OK);
  CHECK(prof.back() == s.current);
  const fs::path dir = fs::temp_directory_path() / "negfmini_capi_out";
  fs::remove_all(dir);
  REQUIRE(negfmini_result_write(r, dir.string().c_str()) == NEGFMINI_OK);
  for (const char* f : {"scf_trace.csv", "current_profile.csv", "spectral_current.csv", "energy_currents.csv"})
    CHECK(fs::exists(dir / f));
  negfmini_result_free(r);
  negfmini_device_free(d);
  fs::remove_all(dir);
}

TEST_CASE("invalid configurations are rejected") {
  negfmini_device* d = make_chain();
  negfmini_sim_config c;
  negfmini_sim_config_default(&c);
  negfmini_result* r = nullptr;
  c.cache_mode = "sometimes";
  CHECK(negfmini_simulate(d, &c, &r) == NEGFMINI_ERR_INVALID_ARGUMENT);
  CHECK(std::string(negfmini_last_error()).find("cache") != std::string::npos);
  negfmini_sim_config_default(&c);
  c.nkz = 3;
  c.nqz = 5;
  CHECK(negfmini_simulate(d, &c, &r) == NEGFMINI_ERR_INVALID_ARGUMENT);
  CHECK(std::string(negfmini_last_error()).rfind("nqz", 0) == 0);
  CHECK(r == nullptr);
  negfmini_device_free(d);
}

TEST_CASE("cost model through the C interface") {
  negfmini_model_params p;
  REQUIRE(negfmini_model_preset("small", 3, 0, &p) == NEGFMINI_OK);
  CHECK(p.na == 4864);
  double f = 0;
  REQUIRE(negfmini_flop_model(&p, "sse_omen", &f) == NEGFMINI_OK);
  CHECK(std::fabs(f - 24.41e15) / 24.41e15 <= 1e-3);
  CHECK(negfmini_flop_model(&p, "nonsense", &f) == NEGFMINI_ERR_INVALID_ARGUMENT);
  CHECK(negfmini_model_preset("medium", 3, 0, &p) == NEGFMINI_ERR_INVALID_ARGUMENT);
  REQUIRE(negfmini_model_preset("small", 3, 0, &p) == NEGFMINI_OK);
  negfmini_plan plan{768, 0, 0, 23e9, 6, 0};
  negfmini_cost_summary s;
  REQUIRE(negfmini_cost_model(&p, &plan, &s) == NEGFMINI_OK);
  CHECK(s.ta == 256);
  CHECK(s.te == 3);
  CHECK(s.reduction_ratio > 1.0);
  CHECK(s.electron_procs + s.phonon_procs == 768);
  CHECK(s.bound_g > 0.0);
  plan.ta = 5000;
  plan.te = 1;
  plan.procs = 5000;
  CHECK(negfmini_cost_model(&p, &plan, &s) == NEGFMINI_ERR_INVALID_ARGUMENT);
}

TEST_CASE("empty benchmark report") {
  negfmini_device* d = make_chain();
  const fs::path path = fs::temp_directory_path() / "negfmini_capi_bench.csv";
  size_t entries = 7;
  REQUIRE(negfmini_bench(d, nullptr, 0, 1, path.string().c_str(), &entries) == NEGFMINI_OK);
  CHECK(entries == 0);
  CHECK(fs::exists(path));
  const char* bad[] = {"nope"};
  CHECK(negfmini_bench(d, bad, 1, 1, path.string().c_str(), &entries) == NEGFMINI_ERR_INVALID_ARGUMENT);
  negfmini_device_free(d);
  fs::remove(path);
}
