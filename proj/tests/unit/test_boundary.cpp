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
#include "negfmini/boundary.hpp"
#include "negfmini/device.hpp"

using namespace negfmini;

namespace {

CMatrix scalar(cplx v) {
  CMatrix m(1, 1);
  m(0, 0) = v;
  return m;
}

Device toy(LatticeKind lat, int na, int bnum, double vds) {
  DeviceParams p;
  p.lattice = lat;
  p.na = na;
  p.bnum = bnum;
  p.vds = vds;
  return generate_device(p);
}

}  // namespace

TEST_CASE("decoupled lead returns the local inverse") {
  std::mt19937_64 rng(1);
  const CMatrix h = oracle::random_hermitian(rng, 4);
  const CMatrix zero(4, 4);
  const cplx z(0.3, 1e-6);
  const SurfaceGF s = surface_gf(h, zero, CMatrix::identity(4), zero, z);
  CMatrix w = CMatrix::identity(4);
  w *= z;
  w -= h;
  CHECK(max_abs_diff(s.g, inverse(w)) <= 1e-12 * max_abs(s.g));
  CHECK(s.iterations <= 1);
}

TEST_CASE("one-orbital chain satisfies the scalar fixed point") {
  const double t = 1.0;
  for (double e : {-2.5, -1.0, 0.0, 0.7, 1.9, 3.0}) {
    const cplx z(e, kLeadEta);
    const SurfaceGF s = surface_gf(scalar(0.0), scalar(t), scalar(1.0), scalar(0.0), z);
    const cplx g = s.g(0, 0);
    CHECK(std::abs(g - 1.0 / (z - t * t * g)) <= 1e-10 * std::max(1.0, std::abs(g)));
    CHECK(g.imag() <= 0.0);
  }
}

TEST_CASE("decimation iterations grow logarithmically with the tolerance") {
  const cplx z(2.5, kLeadEta);
  int prev = 0;
  std::vector<int> its;
  for (double tol : {1e-4, 1e-8, 1e-12}) {
    const SurfaceGF s = surface_gf(scalar(0.0), scalar(1.0), scalar(1.0), scalar(0.0), z, tol);
    CHECK(s.iterations >= prev);
    prev = s.iterations;
    its.push_back(s.iterations);
  }
  // each squaring of the tolerance adds a bounded number of doublings
  CHECK(its[2] - its[0] <= 8);
}

TEST_CASE("random Hermitian lead is causal") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 5; ++rep) {
    const CMatrix h00 = oracle::random_hermitian(rng, 8, 0.5);
    const CMatrix h01 = oracle::random_matrix(rng, 8, 8, 0.3);
    const SurfaceGF s = surface_gf(h00, h01, CMatrix::identity(8), CMatrix(8, 8), cplx(0.2 * rep - 0.4, kLeadEta));
    CHECK(min_broadening_eigenvalue(s.g) >= -1e-10 * std::max(1.0, max_abs(s.g)));
  }
}

TEST_CASE("lesser and greater boundary terms") {
  std::mt19937_64 rng(3);
  CMatrix sr = oracle::random_matrix(rng, 4, 4);
  for (Carrier c : {Carrier::Electron, Carrier::Phonon}) {
    const CMatrix l = boundary_lesser(sr, 0.3, c), g = boundary_greater(sr, 0.3, c);
    CHECK(max_abs_diff(g - l, sr - sr.adjoint()) <= 1e-14);
    CHECK(max_abs_diff(l, cplx(-1.0) * l.adjoint()) <= 1e-14);
  }
}

TEST_CASE("broadening is positive semidefinite on the whole grid") {
  for (const Device& d : {toy(LatticeKind::Chain, 8, 4, 0.1), toy(LatticeKind::Ribbon, 16, 2, 0.1)}) {
    const SpectralGrid g = SpectralGrid::build(d.grid);
    for (Carrier c : {Carrier::Electron, Carrier::Phonon}) {
      const BoundaryTable t = boundary_selfenergies(d, g, c);
      CHECK(t.points.size() == static_cast<std::size_t>(t.nk) * t.ne);
      double worst = 0;
      for (const auto& p : t.points)
        worst = std::min({worst, min_broadening_eigenvalue(p.sigma_left), min_broadening_eigenvalue(p.sigma_right)});
      CHECK(worst >= -1e-10);
    }
  }
}

TEST_CASE("evanescent regime has no broadening") {
  Device d = toy(LatticeKind::Chain, 8, 4, 0.1);
  GridParams gp = d.grid;
  gp.emin = -40.0;
  gp.emax = -39.0;
  const SpectralGrid g = SpectralGrid::build(gp);
  const BoundaryPoint p = boundary_point(d, g, Carrier::Electron, 0, 0, nullptr, nullptr);
  double im = 0;
  const CMatrix gam = p.sigma_left - p.sigma_left.adjoint();
  im = max_abs(gam);
  CHECK(im <= 1e-8);
}

TEST_CASE("equilibrium leads share occupations") {
  const Device d = toy(LatticeKind::Chain, 8, 4, 0.0);
  const SpectralGrid g = SpectralGrid::build(d.grid);
  const BoundaryTable t = boundary_selfenergies(d, g, Carrier::Electron);
  for (const auto& p : t.points) CHECK(p.occ_left == p.occ_right);
  const Device b = toy(LatticeKind::Chain, 8, 4, 0.1);
  const BoundaryTable tb = boundary_selfenergies(b, SpectralGrid::build(b.grid), Carrier::Electron);
  bool differs = false;
  for (const auto& p : tb.points) differs = differs || p.occ_left != p.occ_right;
  CHECK(differs);
}

TEST_CASE("boundary table is independent of the thread count") {
  const Device d = toy(LatticeKind::Chain, 8, 4, 0.1);
  const SpectralGrid g = SpectralGrid::build(d.grid);
  const BoundaryTable a = boundary_selfenergies(d, g, Carrier::Electron, 1);
  const BoundaryTable b = boundary_selfenergies(d, g, Carrier::Electron, 3);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].sigma_left == b.points[i].sigma_left);
    CHECK(a.points[i].sigma_right == b.points[i].sigma_right);
  }
  CHECK(a.surface_solves == b.surface_solves);
}
