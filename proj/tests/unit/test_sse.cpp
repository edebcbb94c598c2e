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
#include <random>

#include "oracles.hpp"
#include "negfmini/rgf.hpp"
#include "negfmini/sse.hpp"

using namespace negfmini;

namespace {

struct Case {
  Device dev;
  SpectralGrid grid;
};

Case make_case(std::mt19937_64& rng, int na, int nk, int ne, int nw, bool random_dh = true) {
  DeviceParams p;
  p.na = na;
  p.bnum = na / 2;
  p.seed = rng();
  p.grid.nkz = p.grid.nqz = nk;
  p.grid.ne = ne;
  p.grid.nomega = nw;
  Case c{generate_device(p), {}};
  if (random_dh) oracle::fill_random(c.dev.ops.dH, rng);
  c.grid = SpectralGrid::build(c.dev.grid);
  return c;
}

bool all_zero(const std::vector<cplx>& v) {
  for (const auto& x : v)
    if (x != cplx(0.0)) return false;
  return true;
}

// Σ-product multiply-adds the naive kernel must perform: 2 products of n³ for each
// (a, bond, i, kz, qz, ω, E, lesser/greater, emission/absorption) whose source energy is on the grid.
struct NaiveCount {
  std::uint64_t bonds = 0, expected = 0, untruncated = 0;
};

NaiveCount naive_count(const Case& c) {
  const auto& st = c.dev.structure;
  const std::uint64_t n3 = static_cast<std::uint64_t>(st.norb) * st.norb * st.norb;
  NaiveCount r;
  for (int a = 0; a < st.na; ++a)
    for (int s = 0; s < st.nb; ++s) r.bonds += st.neighbor(a, s) >= 0;
  std::uint64_t valid = 0;  // (ω, E, emission/absorption) with the source energy on the grid
  for (int w = 0; w < c.grid.nomega(); ++w) valid += 2ull * (c.grid.ne() - c.grid.shift(w));
  const std::uint64_t base = r.bonds * kN3D * c.grid.nkz() * c.grid.nqz() * 2 * 2 * n3;
  r.expected = base * valid;
  r.untruncated = base * 2 * c.grid.ne() * c.grid.nomega();
  return r;
}

}  // namespace

TEST_CASE("zero phonon functions give zero Σ, zero electron functions give zero Π") {
  std::mt19937_64 rng(1);
  const Case c = make_case(rng, 4, 1, 8, 2);
  auto g = oracle::random_gf(c.dev, c.grid, rng);
  for (auto v : {SseVariant::Naive, SseVariant::Regrouped, SseVariant::Mixed}) {
    auto gd = g;
    gd.dl.set_zero();
    gd.dg.set_zero();
    const auto s = sse_compute(c.dev, c.grid, gd.view(), {v, 1, false});
    CHECK(all_zero(s.sigma_lesser.data));
    CHECK(all_zero(s.sigma_greater.data));
    auto ge = g;
    ge.gl.set_zero();
    ge.gg.set_zero();
    const auto p = sse_compute(c.dev, c.grid, ge.view(), {v, 1, false});
    CHECK(all_zero(p.pi_lesser.data));
    CHECK(all_zero(p.pi_greater.data));
    CHECK(all_zero(p.sigma_lesser.data));
  }
}

TEST_CASE("naive kernel equals the scalar loop oracle") {
  std::mt19937_64 rng(2);
  const Case c = make_case(rng, 4, 1, 8, 2);
  const auto g = oracle::random_gf(c.dev, c.grid, rng);
  const auto ref = oracle::scalar_sse(c.dev, c.grid, g.view());
  CHECK(oracle::sse_rel_diff(sse_naive(c.dev, c.grid, g.view()), ref) <= 1e-12);
  CHECK(oracle::sse_rel_diff(sse_regrouped(c.dev, c.grid, g.view()), ref) <= 1e-12);
}

TEST_CASE("regrouped equals naive on random instances, including the minimum energy grid") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 4; ++rep) {
    const int nw = 1 + rep;
    const Case c = make_case(rng, 4 + 2 * (rep % 2), 1 + 2 * (rep % 2), 2 * nw, nw);
    const auto g = oracle::random_gf(c.dev, c.grid, rng);
    CHECK(oracle::sse_rel_diff(sse_naive(c.dev, c.grid, g.view()), sse_regrouped(c.dev, c.grid, g.view())) <= 1e-12);
  }
}

TEST_CASE("thread count does not change the result") {
  std::mt19937_64 rng(4);
  const Case c = make_case(rng, 6, 3, 12, 3);
  const auto g = oracle::random_gf(c.dev, c.grid, rng);
  for (auto v : {SseVariant::Naive, SseVariant::Regrouped, SseVariant::Mixed}) {
    FlopLedger l1, l3;
    const auto a = sse_compute(c.dev, c.grid, g.view(), {v, 1, false}, &l1);
    const auto b = sse_compute(c.dev, c.grid, g.view(), {v, 3, false}, &l3);
    CHECK(a.sigma_lesser.data == b.sigma_lesser.data);
    CHECK(a.pi_greater.data == b.pi_greater.data);
    CHECK(l1.sigma_madds == l3.sigma_madds);
    CHECK(l1.pi_madds == l3.pi_madds);
  }
}

TEST_CASE("naive ledger is exact and bounded by the dense model") {
  std::mt19937_64 rng(5);
  const Case c = make_case(rng, 6, 3, 10, 3);
  const auto g = oracle::random_gf(c.dev, c.grid, rng);
  FlopLedger led;
  sse_naive(c.dev, c.grid, g.view(), &led);
  const NaiveCount nc = naive_count(c);
  CHECK(led.sigma_madds == nc.expected);
  const auto& st = c.dev.structure;
  const double model = sse_model_flops(st.na, st.nb, c.grid.nkz(), c.grid.nqz(), c.grid.ne(), c.grid.nomega(), st.norb);
  CHECK(led.sigma_flops() <= model);
  // without lead bonds and grid-edge truncation the count reaches the model exactly
  const double all_bonds = static_cast<double>(st.na) * st.nb;
  CHECK(8.0 * static_cast<double>(nc.untruncated) * all_bonds / static_cast<double>(nc.bonds) ==
        doctest::Approx(model).epsilon(1e-12));
}

TEST_CASE("regrouped ledger ratio follows 2K/(K+1)") {
  CHECK(sse_regroup_ratio(1, 1) == 1.0);
  CHECK(sse_regroup_ratio(3, 70) == doctest::Approx(420.0 / 211.0));
  std::mt19937_64 rng(6);
  const Case c = make_case(rng, 4, 1, 16, 1);
  const auto g = oracle::random_gf(c.dev, c.grid, rng);
  FlopLedger ln, lr;
  sse_naive(c.dev, c.grid, g.view(), &ln);
  sse_regrouped(c.dev, c.grid, g.view(), &lr);
  CHECK(ln.sigma_madds == lr.sigma_madds);
  CHECK(lr.batches > 0);
  CHECK(lr.padded_madds >= lr.sigma_madds);
}

TEST_CASE("mixed precision stays close to double precision") {
  std::mt19937_64 rng(7);
  const Case c = make_case(rng, 4, 3, 16, 4);
  const auto g = oracle::random_gf(c.dev, c.grid, rng);
  const auto r = sse_regrouped(c.dev, c.grid, g.view());
  const auto m = sse_mixed(c.dev, c.grid, g.view());
  for (const auto* t : {&r.sigma_lesser, &r.sigma_greater}) {
    const auto& mt = t == &r.sigma_lesser ? m.sigma_lesser : m.sigma_greater;
    CHECK(oracle::rel_diff(t->data, mt.data) <= 1e-2);
    const double big = 1e-2 * oracle::max_abs(t->data);
    double worst = 0;
    for (std::size_t i = 0; i < t->data.size(); ++i)
      if (std::abs(t->data[i]) >= big)
        worst = std::max(worst, std::abs(t->data[i] - mt.data[i]) / std::abs(t->data[i]));
    CHECK(worst <= 1e-2);
  }
  // Π is accumulated in double precision in every variant
  CHECK(oracle::rel_diff(r.pi_lesser.data, m.pi_lesser.data) <= 1e-12);
}

TEST_CASE("scaling protects small inputs from underflow") {
  std::mt19937_64 rng(8);
  const Case c = make_case(rng, 4, 3, 16, 4);
  auto g = oracle::random_gf(c.dev, c.grid, rng);
  for (auto* t : {&g.gl.data, &g.gg.data})
    for (auto& x : *t) x *= 1e-5;
  const auto r = sse_regrouped(c.dev, c.grid, g.view());
  const auto scaled = sse_mixed(c.dev, c.grid, g.view(), nullptr, 1, false);
  const auto unscaled = sse_mixed(c.dev, c.grid, g.view(), nullptr, 1, true);
  const double es = oracle::rel_diff(r.sigma_lesser.data, scaled.sigma_lesser.data);
  const double eu = oracle::rel_diff(r.sigma_lesser.data, unscaled.sigma_lesser.data);
  CHECK(es <= 1e-2);
  CHECK(eu > es);
}

TEST_CASE("zero inputs give zero mixed output") {
  std::mt19937_64 rng(9);
  const Case c = make_case(rng, 4, 1, 8, 2);
  auto g = oracle::random_gf(c.dev, c.grid, rng);
  g.gl.set_zero();
  g.gg.set_zero();
  g.dl.set_zero();
  g.dg.set_zero();
  const auto m = sse_mixed(c.dev, c.grid, g.view());
  CHECK(all_zero(m.sigma_lesser.data));
  CHECK(all_zero(m.pi_greater.data));
}

TEST_CASE("input validation") {
  std::mt19937_64 rng(10);
  Case c = make_case(rng, 4, 1, 8, 2);
  auto g = oracle::random_gf(c.dev, c.grid, rng);
  GfTensors missing = g.view();
  missing.Dl = nullptr;
  CHECK_THROWS_AS(sse_regrouped(c.dev, c.grid, missing), Error);
  ElectronTensor wrong(1, 7, 4, 2);
  GfTensors bad = g.view();
  bad.Gl = &wrong;
  try {
    sse_regrouped(c.dev, c.grid, bad);
    FAIL("expected a dimension error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Dimension);
  }
  SpectralGrid off = c.grid;
  off.omegas[0] += 0.3 * off.dE;
  try {
    sse_regrouped(c.dev, off, g.view());
    FAIL("expected an off-grid frequency error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
    CHECK(std::string(e.what()).find("frequency") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_sse_variant("fast"), Error);
}

TEST_CASE("Σ and Π exchange the same energy on physical Green's functions") {
  DeviceParams p;
  p.na = 8;
  p.bnum = 4;
  const Device d = generate_device(p);
  const SpectralGrid grid = SpectralGrid::build(d.grid);
  GfPhaseCache cache;
  const auto gf = gf_phase(d, grid, nullptr, CacheMode::BCSpec, cache);
  const GfTensors t{&gf.Gl, &gf.Gg, &gf.Dl, &gf.Dg};
  const auto s = sse_regrouped(d, grid, t);
  const auto& st = d.structure;
  const int n = st.norb;
  // electron side: Σ_{k,E,a} dE/(2πNk)·E·Tr[Σ^<G^> - Σ^>G^<]
  double e_power = 0, particles = 0;
  for (int k = 0; k < grid.nkz(); ++k)
    for (int e = 0; e < grid.ne(); ++e)
      for (int a = 0; a < st.na; ++a) {
        const cplx *sl = s.sigma_lesser.block(k, e, a), *sg = s.sigma_greater.block(k, e, a);
        const cplx *gl = gf.Gl.block(k, e, a), *gg = gf.Gg.block(k, e, a);
        cplx tr = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) tr += sl[i * n + j] * gg[j * n + i] - sg[i * n + j] * gl[j * n + i];
        const double w = grid.dE / (2 * kPi * grid.nkz());
        e_power += w * grid.energies[e] * tr.real();
        particles += w * tr.real();
      }
  // phonon side: Σ_{q,ω} dω/(2πNq)·ω·Tr[Π^<D^> - Π^>D^<] over all stored (a, l) blocks
  double ph = 0;
  for (int q = 0; q < grid.nqz(); ++q)
    for (int w = 0; w < grid.nomega(); ++w)
      for (int a = 0; a < st.na; ++a)
        for (int slot = -1; slot < st.nb; ++slot) {
          int l = a, ps = 0, ds = 0;
          if (slot >= 0) {
            l = st.neighbor(a, slot);
            if (l < 0) continue;
            ps = slot + 1;
            ds = st.reverse_slot(a, slot) + 1;
          }
          const cplx *pl = s.pi_lesser.block(q, w, a, ps), *pg = s.pi_greater.block(q, w, a, ps);
          const cplx *dl = gf.Dl.block(q, w, l, ds), *dg = gf.Dg.block(q, w, l, ds);
          cplx tr = 0.0;
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) tr += pl[i * 3 + j] * dg[j * 3 + i] - pg[i * 3 + j] * dl[j * 3 + i];
          ph += grid.domega / (2 * kPi * grid.nqz()) * grid.omegas[w] * tr.real();
        }
  CHECK(std::abs(e_power) > 0.0);
  CHECK(std::abs(e_power - ph) <= 1e-10 * std::abs(e_power));
  CHECK(std::abs(particles) <= 1e-12 * std::abs(e_power / grid.dE));
}
