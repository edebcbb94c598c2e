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
#include <filesystem>
#include <limits>

#include "negfmini/csv.hpp"
#include "negfmini/scf.hpp"

using namespace negfmini;
namespace fs = std::filesystem;

namespace {

Device chain8(double vds = 0.1) {
  DeviceParams p;
  p.na = 8;
  p.bnum = 4;
  p.vds = vds;
  return generate_device(p);
}

std::string config_error(ScfConfig c) {
  try {
    validate_scf_config(c);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("configuration validation names the field") {
  ScfConfig c;
  CHECK(config_error(c).empty());
  c.max_iter = 0;
  CHECK(config_error(c).rfind("max_iter", 0) == 0);
  c = {};
  c.tol = 0.0;
  CHECK(config_error(c).rfind("tol", 0) == 0);
  c = {};
  c.mixing = 1.5;
  CHECK(config_error(c).rfind("mixing", 0) == 0);
  c = {};
  c.threads = -1;
  CHECK(config_error(c).rfind("threads", 0) == 0);
}

TEST_CASE("one iteration is the ballistic solution") {
  const Device d = chain8();
  const SpectralGrid g = SpectralGrid::build(d.grid);
  ScfConfig c;
  c.max_iter = 1;
  const ScfResult r = run_scf(d, g, c);
  CHECK(r.status == ScfStatus::Ballistic);
  CHECK(r.converged());
  CHECK(r.iterations() == 1);
  GfPhaseCache cache;
  const auto gf = gf_phase(d, g, nullptr, CacheMode::BCSpec, cache);
  CHECK(r.gf.Gl.data == gf.Gl.data);
  CHECK(r.gf.Dg.data == gf.Dg.data);
  CHECK(r.obs.current_variation() <= 1e-8);
}

TEST_CASE("full mixing with an infinite tolerance stops after one iteration") {
  const Device d = chain8();
  ScfConfig c;
  c.mixing = 1.0;
  c.tol = std::numeric_limits<double>::infinity();
  const ScfResult r = run_scf(d, SpectralGrid::build(d.grid), c);
  CHECK(r.trace.size() == 1);
  CHECK(r.status == ScfStatus::Converged);
}

TEST_CASE("dissipative run converges, conserves energy and is deterministic") {
  const Device d = chain8();
  const SpectralGrid g = SpectralGrid::build(d.grid);
  ScfConfig c;
  c.max_iter = 100;
  c.threads = 1;
  const ScfResult a = run_scf(d, g, c);
  REQUIRE(a.status == ScfStatus::Converged);
  CHECK(a.iterations() <= 100);
  CHECK(a.obs.energy_residual() <= 1e-3);
  CHECK(std::fabs(a.trace.back().rel_change) < c.tol);
  // scattering lowers the current below its ballistic value
  CHECK(a.current() < a.trace.front().current);
  // relative change shrinks by at least 10x from iteration 5 to the end
  REQUIRE(a.iterations() > 5);
  CHECK(a.trace.back().rel_change * 10.0 <= a.trace[4].rel_change);
  c.threads = 3;
  const ScfResult b = run_scf(d, g, c);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) CHECK(a.trace[i].current == b.trace[i].current);
  CHECK(a.gf.Gl.data == b.gf.Gl.data);
  CHECK(a.sse.sigma_greater.data == b.sse.sigma_greater.data);
  for (const auto& it : a.trace) {
    CHECK(it.gf_seconds >= 0.0);
    CHECK(it.flops_gf > 0.0);
  }
  // the SSE phase follows every GF phase except the converged one
  CHECK(a.trace.front().flops_sse > 0.0);
  CHECK(a.trace.back().flops_sse == 0.0);
}

TEST_CASE("equilibrium run converges on the absolute floor") {
  const Device d = chain8(0.0);
  ScfConfig c;
  c.max_iter = 100;
  const ScfResult r = run_scf(d, SpectralGrid::build(d.grid), c);
  CHECK(r.status == ScfStatus::Converged);
  for (double i : r.obs.current) CHECK(std::fabs(i) <= 1e-10);
}

TEST_CASE("iteration cap is reported") {
  const Device d = chain8();
  ScfConfig c;
  c.max_iter = 3;
  const ScfResult r = run_scf(d, SpectralGrid::build(d.grid), c);
  CHECK(r.status == ScfStatus::MaxIter);
  CHECK_FALSE(r.converged());
  CHECK(r.iterations() == 3);
}

TEST_CASE("divergence detector") {
  CHECK_NOTHROW(check_divergence({1.0, 1.1, 1.2, 1.3, 1.4, 9.0}));
  CHECK_NOTHROW(check_divergence({0.0, 0.0, 0.0, 0.0, 0.0, 0.0}));
  CHECK_THROWS_AS(check_divergence({1.0, 2.0, 4.0, 8.0, 9.0, 10.5}), Error);
  CHECK_THROWS_AS(check_divergence({1.0, std::nan("")}), Error);
  try {
    check_divergence({1.0, std::numeric_limits<double>::infinity()});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Divergence);
  }
}

TEST_CASE("precision comparison") {
  const Device d = chain8();
  ScfConfig c;
  c.max_iter = 100;
  const PrecisionReport r = compare_precision(d, SpectralGrid::build(d.grid), c);
  CHECK(r.same_rate);
  CHECK(std::abs(r.iter_mixed - r.iter_double) <= 2);
  CHECK(r.rel_diff_mixed <= 1e-4);
  CHECK(r.rel_diff_unscaled >= r.rel_diff_mixed);
  CHECK(r.current_double.size() == static_cast<std::size_t>(r.iter_double));
  for (const auto* h : {&r.hist_double, &r.hist_mixed, &r.hist_unscaled}) {
    CHECK(h->edges.size() == h->counts.size() + 1);
    std::uint64_t total = h->zeros;
    for (auto n : h->counts) total += n;
    CHECK(total > 0);
  }
}

TEST_CASE("reports parse back with their schemas") {
  const Device d = chain8();
  const SpectralGrid g = SpectralGrid::build(d.grid);
  ScfConfig c;
  c.max_iter = 4;
  const ScfResult r = run_scf(d, g, c);
  const fs::path dir = fs::temp_directory_path() / "negfmini_test_reports";
  fs::create_directories(dir);
  write_scf_trace(r, (dir / "t.csv").string());
  write_current_profile(r, d, (dir / "c.csv").string());
  write_energy_currents(r, d, (dir / "e.csv").string());
  write_spectral_current(r, d, g, (dir / "s.csv").string());
  auto t = read_csv((dir / "t.csv").string());
  CHECK(t[0] == std::vector<std::string>{"iter", "current", "rel_change", "gf_seconds", "sse_seconds", "flops_gf",
                                         "flops_sse", "econs_residual"});
  CHECK(t.size() == 5);
  CHECK(std::stod(t[4][1]) == r.current());
  auto cp = read_csv((dir / "c.csv").string());
  CHECK(cp[0] == std::vector<std::string>{"cut", "x_nm", "current"});
  CHECK(cp.size() == static_cast<std::size_t>(d.structure.bnum) + 2);
  auto ec = read_csv((dir / "e.csv").string());
  CHECK(ec[0] == std::vector<std::string>{"cut", "x_nm", "electron", "phonon", "total"});
  for (std::size_t i = 1; i < ec.size(); ++i)
    CHECK(std::stod(ec[i][4]) == doctest::Approx(std::stod(ec[i][2]) + std::stod(ec[i][3])));
  auto sc = read_csv((dir / "s.csv").string());
  CHECK(sc[0] == std::vector<std::string>{"cut", "x_nm", "energy_eV", "spectral_current"});
  CHECK(sc.size() == 1 + static_cast<std::size_t>(d.structure.bnum + 1) * g.ne());
  fs::remove_all(dir);
}
