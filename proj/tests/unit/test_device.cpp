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
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "negfmini/device.hpp"
#include "negfmini/grid.hpp"

using namespace negfmini;
namespace fs = std::filesystem;

namespace {

DeviceParams chain8() {
  DeviceParams p;
  p.lattice = LatticeKind::Chain;
  p.na = 8;
  p.nb = 2;
  p.norb = 2;
  p.bnum = 4;
  p.seed = 1;
  return p;
}

DeviceParams ribbon48() {
  DeviceParams p;
  p.lattice = LatticeKind::Ribbon;
  p.na = 48;
  p.nb = 4;
  p.norb = 2;
  p.bnum = 6;
  p.seed = 7;
  return p;
}

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("negfmini_test_" + name);
  fs::remove_all(d);
  return d;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("chain device shape and Hermiticity") {
  const Device d = generate_device(chain8());
  const BlockTriMatrix h = d.ops.H(0.0);
  CHECK(h.bnum == 4);
  CHECK(h.blockdim == 4);
  CHECK(h.dim() == 16);
  const CMatrix dense = h.to_dense();
  CHECK(hermiticity_defect(dense) == 0.0);
  SUBCASE("exact Hermiticity at every grid momentum") {
    const SpectralGrid g = SpectralGrid::build(d.grid);
    for (double kz : g.kz) {
      CHECK(hermiticity_defect(d.ops.H(kz).to_dense()) == 0.0);
      CHECK(hermiticity_defect(d.ops.S(kz).to_dense()) == 0.0);
    }
    for (double qz : g.qz) CHECK(hermiticity_defect(d.ops.Phi(qz).to_dense()) == 0.0);
  }
}

TEST_CASE("zero bias gives identical blocks") {
  DeviceParams p = chain8();
  p.vds = 0.0;
  const Device d = generate_device(p);
  const BlockTriMatrix h = d.ops.H(0.3);
  for (int b = 1; b < h.bnum; ++b) CHECK(h.diag[b] == h.diag[0]);
  for (int b = 1; b + 1 < h.bnum; ++b) CHECK(h.upper[b] == h.upper[0]);
}

TEST_CASE("bias shifts onsite energies monotonically") {
  const Device d = generate_device(chain8());
  const BlockTriMatrix h = d.ops.H(0.0);
  for (int b = 0; b + 1 < h.bnum; ++b) CHECK(h.diag[b + 1](0, 0).real() < h.diag[b](0, 0).real());
}

TEST_CASE("gradient antisymmetry and acoustic sum rule") {
  const Device d = generate_device(ribbon48());
  const auto& st = d.structure;
  const int n = st.norb;
  double worst = 0;
  for (int a = 0; a < st.na; ++a)
    for (int s = 0; s < st.nb; ++s) {
      const int b = st.neighbor(a, s);
      if (b < 0) continue;
      const int r = st.reverse_slot(a, s);
      REQUIRE(r >= 0);
      CHECK(st.neighbor(b, r) == a);
      for (int dir = 0; dir < 3; ++dir)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            worst = std::max(worst, std::abs(d.ops.dh(b, r, dir)[i * n + j] + std::conj(d.ops.dh(a, s, dir)[j * n + i])));
    }
  CHECK(worst == 0.0);
  // acoustic sum rule on the infinite crystal at q = 0; the leads repeat the end cells
  const BlockTriMatrix phi = d.ops.Phi(0.0);
  const int bd = phi.blockdim;
  double resid = 0;
  // explicit spring model check: Σ over the row of the infinite-crystal dynamical matrix
  for (int blk = 0; blk < phi.bnum; ++blk)
    for (int row = 0; row < bd; ++row)
      for (int c3 = 0; c3 < 3; ++c3) {
        cplx sum = 0.0;
        for (int col = c3; col < bd; col += 3) {
          sum += phi.diag[blk](row, col);
          sum += (blk + 1 < phi.bnum ? phi.upper[blk] : d.ops.Phi_cell01)(row, col);
          sum += (blk > 0 ? phi.lower[blk - 1] : d.ops.Phi_cell01.adjoint())(row, col);
        }
        resid = std::max(resid, std::abs(sum));
      }
  CHECK(resid <= 1e-12);
}

TEST_CASE("off-block couplings beyond the tridiagonal band are zero") {
  const Device d = generate_device(ribbon48());
  const CMatrix m = d.ops.H(0.7).to_dense();
  const int bd = d.ops.H0.blockdim;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (std::abs(i / bd - j / bd) >= 2) CHECK(m(i, j) == cplx(0.0));
}

TEST_CASE("generation is pure") {
  CHECK(generate_device(ribbon48()) == generate_device(ribbon48()));
  DeviceParams p = ribbon48();
  p.seed = 8;
  CHECK_FALSE(generate_device(p) == generate_device(ribbon48()));
}

TEST_CASE("generation errors") {
  DeviceParams p = chain8();
  p.bnum = 3;
  CHECK(kind_of([&] { generate_device(p); }) == ErrorKind::Partition);
  p = chain8();
  p.nb = 4;
  CHECK(kind_of([&] { generate_device(p); }) == ErrorKind::InvalidArgument);
  p = ribbon48();
  p.ribbon_width = 2;
  CHECK(kind_of([&] { generate_device(p); }) == ErrorKind::InvalidArgument);
  CHECK_THROWS_AS(parse_lattice("hex"), Error);
}

TEST_CASE("save and load round trip") {
  const fs::path dir = temp_dir("roundtrip");
  const Device d = generate_device(chain8());
  save_device(d, dir.string());
  const Device back = load_device(dir.string());
  CHECK(back == d);
  CHECK(back.structure == d.structure);
  fs::remove_all(dir);
}

TEST_CASE("load rejects bad partitions, non-Hermitian blocks and truncation") {
  const Device d = generate_device(chain8());
  SUBCASE("partition") {
    const fs::path dir = temp_dir("partition");
    save_device(d, dir.string());
    std::ifstream in(dir / "header.txt");
    std::stringstream ss;
    ss << in.rdbuf();
    in.close();
    std::string h = ss.str();
    const auto at = h.find("bnum 4");
    REQUIRE(at != std::string::npos);
    h.replace(at, 6, "bnum 3");
    std::ofstream(dir / "header.txt") << h;
    CHECK(kind_of([&] { load_device(dir.string()); }) == ErrorKind::Partition);
    fs::remove_all(dir);
  }
  SUBCASE("hermiticity") {
    const fs::path dir = temp_dir("herm");
    save_device(d, dir.string());
    // offset of the first H0.lower element: positions, neighbors, H0.diag, H0.upper records precede it
    const auto& st = d.structure;
    const std::size_t bd = static_cast<std::size_t>(d.ops.H0.blockdim);
    const std::size_t off = 16 + st.na * 16 + 16 + st.na * st.nb * 4 + 16 + st.bnum * bd * bd * 16 + 16 +
                            (st.bnum - 1) * bd * bd * 16 + 16;
    std::fstream f(dir / "data.bin", std::ios::in | std::ios::out | std::ios::binary);
    double v = 0;
    f.seekg(static_cast<std::streamoff>(off));
    f.read(reinterpret_cast<char*>(&v), sizeof v);
    v += 1e-3;
    f.seekp(static_cast<std::streamoff>(off));
    f.write(reinterpret_cast<const char*>(&v), sizeof v);
    f.close();
    try {
      load_device(dir.string());
      FAIL("expected a Hermiticity error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Hermiticity);
      CHECK(std::string(e.what()).find("H0") != std::string::npos);
      CHECK(std::string(e.what()).find("block") != std::string::npos);
    }
    fs::remove_all(dir);
  }
  SUBCASE("truncated data") {
    const fs::path dir = temp_dir("trunc");
    save_device(d, dir.string());
    fs::resize_file(dir / "data.bin", fs::file_size(dir / "data.bin") - 40);
    CHECK(kind_of([&] { load_device(dir.string()); }) == ErrorKind::Format);
    fs::remove_all(dir);
  }
  SUBCASE("missing") { CHECK(kind_of([&] { load_device("/nonexistent/negfmini"); }) == ErrorKind::Io); }
}

TEST_CASE("grid construction and validation") {
  GridParams p;
  const SpectralGrid g = SpectralGrid::build(p);
  CHECK(g.nkz() == 3);
  CHECK(g.ne() == 64);
  CHECK(g.dE == doctest::Approx((p.emax - p.emin) / (p.ne - 1)));
  for (int w = 0; w < g.nomega(); ++w) CHECK(g.omegas[w] == doctest::Approx(g.shift(w) * g.dE));
  // momentum arithmetic wraps around the Brillouin zone
  for (int k = 0; k < 3; ++k)
    for (int q = 0; q < 3; ++q) {
      const double diff = g.kz[k] - g.qz[q] - g.kz[g.k_minus_q(k, q)];
      CHECK(std::abs(std::remainder(diff, 2 * kPi)) < 1e-12);
      CHECK(g.k_plus_q(g.k_minus_q(k, q), q) == k);
    }
  auto msg = [](GridParams q) -> std::string {
    try {
      validate_grid_params(q);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidArgument);
      return e.what();
    }
    return "";
  };
  GridParams bad = p;
  bad.nqz = 5;
  CHECK(msg(bad).rfind("nqz", 0) == 0);
  bad = p;
  bad.omega_step = 0;
  CHECK(msg(bad).rfind("omega_step", 0) == 0);
  bad = p;
  bad.nomega = 70;
  CHECK_FALSE(msg(bad).empty());
  bad = p;
  bad.emax = bad.emin;
  CHECK(msg(bad).rfind("emax", 0) == 0);
}

TEST_CASE("occupation functions") {
  CHECK(fermi(0.0, 0.0, 0.025) == doctest::Approx(0.5));
  CHECK(fermi(1.0, 0.0, 0.025) < 1e-15);
  CHECK(bose(0.1, 0.025) == doctest::Approx(1.0 / std::expm1(4.0)));
}
