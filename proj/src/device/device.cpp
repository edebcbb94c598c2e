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

#include "negfmini/device.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace negfmini {

const char* to_string(LatticeKind k) { return k == LatticeKind::Chain ? "chain" : "ribbon"; }

LatticeKind parse_lattice(const std::string& s) {
  if (s == "chain") return LatticeKind::Chain;
  if (s == "ribbon") return LatticeKind::Ribbon;
  throw Error(ErrorKind::InvalidArgument, "lattice: unknown kind '" + s + "' (expected chain or ribbon)");
}

int DeviceStructure::reverse_slot(int a, int slot) const {
  const int b = neighbor(a, slot);
  if (b < 0) return -1;
  for (int s = 0; s < nb; ++s)
    if (neighbor(b, s) == a) return s;
  return -1;
}

bool DeviceStructure::operator==(const DeviceStructure& o) const {
  return lattice == o.lattice && na == o.na && nb == o.nb && norb == o.norb && n3d == o.n3d && bnum == o.bnum &&
         vds == o.vds && vgs == o.vgs && seed == o.seed && positions == o.positions && neighbors == o.neighbors;
}

static bool same_bt(const BlockTriMatrix& a, const BlockTriMatrix& b) {
  return a.bnum == b.bnum && a.blockdim == b.blockdim && a.diag == b.diag && a.upper == b.upper && a.lower == b.lower;
}

bool MaterialOperators::operator==(const MaterialOperators& o) const {
  return na == o.na && nb == o.nb && norb == o.norb && same_bt(H0, o.H0) && H1 == o.H1 && same_bt(S0, o.S0) &&
         same_bt(Phi0, o.Phi0) && Phi1 == o.Phi1 && dH == o.dH && H_cell01 == o.H_cell01 &&
         S_cell01 == o.S_cell01 && Phi_cell01 == o.Phi_cell01;
}

bool Device::operator==(const Device& o) const {
  return structure == o.structure && ops == o.ops && grid.nkz == o.grid.nkz && grid.nqz == o.grid.nqz &&
         grid.ne == o.grid.ne && grid.nomega == o.grid.nomega && grid.omega_step == o.grid.omega_step &&
         grid.emin == o.grid.emin && grid.emax == o.grid.emax && grid.temperature == o.grid.temperature;
}

static BlockTriMatrix with_z(const BlockTriMatrix& base, const std::vector<CMatrix>& z, double k) {
  BlockTriMatrix m = base;
  const cplx ph = std::polar(1.0, k);
  for (int i = 0; i < m.bnum; ++i) {
    CMatrix& d = m.diag[i];
    const CMatrix& c = z[i];
    for (int r = 0; r < d.rows(); ++r)
      for (int s = 0; s < d.cols(); ++s) d(r, s) += c(r, s) * ph + std::conj(c(s, r)) * std::conj(ph);
  }
  return m;
}

BlockTriMatrix MaterialOperators::H(double kz) const { return with_z(H0, H1, kz); }
BlockTriMatrix MaterialOperators::S(double) const { return S0; }
BlockTriMatrix MaterialOperators::Phi(double qz) const { return with_z(Phi0, Phi1, qz); }

GridParams default_grid_for_bias(double vds, const GridParams& base) {
  GridParams g = base;
  const double mu_l = 0.0, mu_r = -vds;
  g.emin = std::min(mu_l, mu_r) - 0.2;
  g.emax = std::max(mu_l, mu_r) + 0.2;
  return g;
}

namespace {

struct Lattice {
  int width = 1;         // rows
  int cols = 0;          // columns along transport
  int cols_per_block = 0;
  // neighbor slots and unit vectors per slot (same for every atom)
  std::vector<std::array<int, 2>> slot_offsets;  // (dcol, drow)
  std::vector<std::array<double, 3>> slot_dirs;
  std::vector<int> slot_class;  // bond class (0: along x, 1: along y)
};

Lattice make_lattice(const DeviceParams& p) {
  Lattice L;
  if (p.lattice == LatticeKind::Chain) {
    L.width = 1;
    L.slot_offsets = {{-1, 0}, {1, 0}};
    L.slot_dirs = {{{-1, 0, 0}}, {{1, 0, 0}}};
    L.slot_class = {0, 0};
  } else {
    L.width = p.ribbon_width;
    if (L.width < 3) {
      std::ostringstream os;
      os << "neighbor count unsatisfiable: ribbon width " << L.width << " gives fewer than 4 distinct neighbors";
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
    L.slot_offsets = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    L.slot_dirs = {{{-1, 0, 0}}, {{1, 0, 0}}, {{0, -1, 0}}, {{0, 1, 0}}};
    L.slot_class = {0, 0, 1, 1};
  }
  const int coordination = static_cast<int>(L.slot_offsets.size());
  if (p.nb != 0 && p.nb != coordination) {
    std::ostringstream os;
    os << "neighbor count unsatisfiable: " << to_string(p.lattice) << " lattice has coordination " << coordination
       << ", requested nb=" << p.nb;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  if (p.na % L.width != 0) {
    std::ostringstream os;
    os << "invalid partition: na=" << p.na << " is not a multiple of the ribbon width " << L.width;
    throw Error(ErrorKind::Partition, os.str());
  }
  L.cols = p.na / L.width;
  if (L.cols % p.bnum != 0) {
    std::ostringstream os;
    os << "invalid partition: " << L.cols << " lattice columns cannot be split into bnum=" << p.bnum << " blocks";
    throw Error(ErrorKind::Partition, os.str());
  }
  L.cols_per_block = L.cols / p.bnum;
  return L;
}

CMatrix random_real(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = u(rng);
  return m;
}

// Spring tensor for a bond along unit vector e: longitudinal k, transverse k/4.
std::array<double, 9> spring(double k, const std::array<double, 3>& e) {
  std::array<double, 9> t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i * 3 + j] = k * (0.75 * e[i] * e[j] + 0.25 * (i == j ? 1.0 : 0.0));
  return t;
}

void add_block(BlockTriMatrix& m, int dim, int apb, int a, int b, const CMatrix& blk) {
  const int ba = a / apb, bb = b / apb;
  const int ra = (a % apb) * dim, rb = (b % apb) * dim;
  CMatrix* target = nullptr;
  if (ba == bb) target = &m.diag[ba];
  else if (bb == ba + 1) target = &m.upper[ba];
  else if (bb == ba - 1) target = &m.lower[bb];
  else throw Error(ErrorKind::Dimension, "neighbor outside block-tridiagonal band");
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) (*target)(ra + i, rb + j) += blk(i, j);
}

}  // namespace

Device generate_device(const DeviceParams& p) {
  if (p.na <= 0 || p.bnum <= 0 || p.norb <= 0) throw Error(ErrorKind::InvalidArgument, "na, bnum, norb must be positive");
  if (p.na % p.bnum != 0) {
    std::ostringstream os;
    os << "invalid partition: na=" << p.na << " is not divisible by bnum=" << p.bnum;
    throw Error(ErrorKind::Partition, os.str());
  }
  const Lattice L = make_lattice(p);
  const int na = p.na, nb = static_cast<int>(L.slot_offsets.size()), norb = p.norb, bnum = p.bnum;
  const int apb = na / bnum;
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Device dev;
  DeviceStructure& st = dev.structure;
  st.lattice = p.lattice;
  st.na = na;
  st.nb = nb;
  st.norb = norb;
  st.bnum = bnum;
  st.vds = p.vds;
  st.vgs = p.vgs;
  st.seed = p.seed;
  constexpr double kSpacing = 0.25;  // nm
  st.positions.resize(na);
  st.neighbors.assign(static_cast<std::size_t>(na) * nb, kLeadNeighbor);
  auto index = [&](int col, int row) { return col * L.width + row; };
  for (int col = 0; col < L.cols; ++col) {
    for (int row = 0; row < L.width; ++row) {
      const int a = index(col, row);
      st.positions[a] = {kSpacing * col, kSpacing * row};
      for (int s = 0; s < nb; ++s) {
        const int c2 = col + L.slot_offsets[s][0];
        const int r2 = ((row + L.slot_offsets[s][1]) % L.width + L.width) % L.width;
        if (c2 >= 0 && c2 < L.cols) st.neighbors[static_cast<std::size_t>(a) * nb + s] = index(c2, r2);
      }
    }
  }

  // material parameters: one draw per bond class and orbital structure, shared by all cells
  const int nclass = p.lattice == LatticeKind::Chain ? 1 : 2;
  std::vector<double> hop(nclass), overlap(nclass), kspring(nclass);
  for (int c = 0; c < nclass; ++c) hop[c] = 0.5 + 1.5 * unit(rng);
  for (int c = 0; c < nclass; ++c) overlap[c] = 0.01 + 0.02 * unit(rng);
  const double k0 = p.phonon_energy * p.phonon_energy / 6.0;
  for (int c = 0; c < nclass; ++c) kspring[c] = k0 * (0.6 + 0.4 * unit(rng));
  const double kz_spring = k0 * (0.6 + 0.4 * unit(rng));
  const double tz = 0.05 + 0.1 * unit(rng);

  CMatrix orb_sym = random_real(rng, norb, -0.2, 0.2);
  CMatrix orb_anti = random_real(rng, norb, -0.1, 0.1);
  CMatrix orb(norb, norb);
  for (int i = 0; i < norb; ++i) {
    for (int j = 0; j < norb; ++j) {
      const double s = i == j ? 0.8 + 0.2 * std::abs(orb_sym(i, i).real()) / 0.2 : 0.5 * (orb_sym(i, j) + orb_sym(j, i)).real();
      const double a = i == j ? 0.0 : 0.5 * (orb_anti(i, j) - orb_anti(j, i)).real();
      orb(i, j) = s + a;
    }
  }
  CMatrix onsite(norb, norb);
  {
    CMatrix mix = random_real(rng, norb, -0.05, 0.05);
    CMatrix mixi = random_real(rng, norb, -0.05, 0.05);
    for (int i = 0; i < norb; ++i) {
      onsite(i, i) = -0.2 + 0.4 * unit(rng);
      for (int j = i + 1; j < norb; ++j) {
        onsite(i, j) = cplx(mix(i, j).real(), mixi(i, j).real());
        onsite(j, i) = std::conj(onsite(i, j));
      }
    }
  }
  CMatrix zhop(norb, norb);
  for (int i = 0; i < norb; ++i) zhop(i, i) = -tz * (0.8 + 0.4 * unit(rng));

  // bond blocks H_ab for b = neighbor(a, s); a "forward" slot carries the orbital matrix, its
  // partner the adjoint, so H is Hermitian by construction
  auto hop_block = [&](int s) {
    const int c = L.slot_class[s];
    const bool forward = L.slot_offsets[s][0] + L.slot_offsets[s][1] > 0;
    CMatrix h = orb;
    h *= -hop[c];
    return forward ? h : h.adjoint();
  };
  auto overlap_block = [&](int s) {
    const int c = L.slot_class[s];
    CMatrix o(norb, norb);
    for (int i = 0; i < norb; ++i) o(i, i) = overlap[c];
    return o;
  };

  std::vector<double> potential(bnum, 0.0);
  for (int n = 0; n < bnum; ++n) {
    potential[n] = bnum > 1 ? -p.vds * n / (bnum - 1) : 0.0;
    if (n > 0 && n + 1 < bnum) potential[n] -= 0.1 * p.vgs;
  }

  const int bd_e = apb * norb, bd_p = apb * kN3D;
  MaterialOperators& ops = dev.ops;
  ops.na = na;
  ops.nb = nb;
  ops.norb = norb;
  ops.H0 = BlockTriMatrix(bnum, bd_e);
  ops.S0 = BlockTriMatrix(bnum, bd_e);
  ops.Phi0 = BlockTriMatrix(bnum, bd_p);
  ops.H1.assign(bnum, CMatrix(bd_e, bd_e));
  ops.Phi1.assign(bnum, CMatrix(bd_p, bd_p));
  ops.dH.assign(static_cast<std::size_t>(na) * nb * kN3D * norb * norb, cplx(0.0));
  ops.H_cell01 = CMatrix(bd_e, bd_e);
  ops.S_cell01 = CMatrix(bd_e, bd_e);
  ops.Phi_cell01 = CMatrix(bd_p, bd_p);

  const std::array<double, 3> ez{0.0, 0.0, 1.0};
  const auto kz_t = spring(kz_spring, ez);
  for (int a = 0; a < na; ++a) {
    const int blk = a / apb;
    const int la = a % apb;
    CMatrix on = onsite;
    for (int i = 0; i < norb; ++i) on(i, i) += potential[blk];
    add_block(ops.H0, norb, apb, a, a, on);
    CMatrix s_on = CMatrix::identity(norb);
    add_block(ops.S0, norb, apb, a, a, s_on);
    for (int i = 0; i < norb; ++i)
      for (int j = 0; j < norb; ++j) ops.H1[blk](la * norb + i, la * norb + j) = zhop(i, j);

    CMatrix phi_self(kN3D, kN3D);
    for (int s = 0; s < nb; ++s) {
      const auto t = spring(kspring[L.slot_class[s]], L.slot_dirs[s]);
      for (int i = 0; i < 9; ++i) phi_self(i / 3, i % 3) += t[i];  // lead bonds included: sum rule of the infinite crystal
      const int b = st.neighbor(a, s);
      CMatrix kblk(kN3D, kN3D);
      for (int i = 0; i < 9; ++i) kblk(i / 3, i % 3) = -t[i];
      if (b >= 0) {
        add_block(ops.H0, norb, apb, a, b, hop_block(s));
        add_block(ops.S0, norb, apb, a, b, overlap_block(s));
        add_block(ops.Phi0, kN3D, apb, a, b, kblk);
        if (st.block_of(b) == blk) {
          const CMatrix h = hop_block(s);
          for (int d = 0; d < kN3D; ++d) {
            cplx* m = ops.dh(a, s, d);
            for (int i = 0; i < norb; ++i)
              for (int j = 0; j < norb; ++j) m[i * norb + j] = -p.ep_coupling * L.slot_dirs[s][d] * h(i, j);
          }
        }
      }
      // cell-to-next-cell coupling, read off from the bonds of block 0 leaving to the right
      if (blk == 0 && L.slot_offsets[s][0] > 0) {
        const int col = a / L.width, row = a % L.width;
        const int c2 = col + L.slot_offsets[s][0];
        const int r2 = ((row + L.slot_offsets[s][1]) % L.width + L.width) % L.width;
        if (c2 / L.cols_per_block == 1) {
          const int lb = (c2 - L.cols_per_block) * L.width + r2;
          const CMatrix h = hop_block(s), o = overlap_block(s);
          for (int i = 0; i < norb; ++i)
            for (int j = 0; j < norb; ++j) {
              ops.H_cell01(la * norb + i, lb * norb + j) += h(i, j);
              ops.S_cell01(la * norb + i, lb * norb + j) += o(i, j);
            }
          for (int i = 0; i < kN3D; ++i)
            for (int j = 0; j < kN3D; ++j) ops.Phi_cell01(la * kN3D + i, lb * kN3D + j) += kblk(i, j);
        }
      }
    }
    for (int i = 0; i < 9; ++i) phi_self(i / 3, i % 3) += 2.0 * kz_t[i];
    add_block(ops.Phi0, kN3D, apb, a, a, phi_self);
    for (int i = 0; i < kN3D; ++i)
      for (int j = 0; j < kN3D; ++j) ops.Phi1[blk](la * kN3D + i, la * kN3D + j) = -kz_t[i * 3 + j];
  }
  ops.H0.build_sparse();
  ops.S0.build_sparse();

  dev.grid = default_grid_for_bias(p.vds, p.grid);
  dev.grid.nkz = p.grid.nkz;
  dev.grid.nqz = p.grid.nqz;
  dev.grid.ne = p.grid.ne;
  dev.grid.nomega = p.grid.nomega;
  dev.grid.omega_step = p.grid.omega_step;
  dev.grid.temperature = p.grid.temperature;
  validate_device(dev);
  return dev;
}

static void check_hermitian(const BlockTriMatrix& m, const char* name) {
  auto tol = [](const CMatrix& x) { return 1e-12 * std::max(1.0, max_abs(x)); };
  for (int i = 0; i < m.bnum; ++i) {
    if (hermiticity_defect(m.diag[i]) > tol(m.diag[i])) {
      std::ostringstream os;
      os << "non-Hermitian operator: " << name << " diagonal block " << i;
      throw Error(ErrorKind::Hermiticity, os.str());
    }
  }
  for (int i = 0; i + 1 < m.bnum; ++i) {
    if (max_abs_diff(m.lower[i], m.upper[i].adjoint()) > tol(m.upper[i])) {
      std::ostringstream os;
      os << "non-Hermitian operator: " << name << " off-diagonal block (" << i + 1 << "," << i
         << ") differs from the adjoint of (" << i << "," << i + 1 << ")";
      throw Error(ErrorKind::Hermiticity, os.str());
    }
  }
}

void validate_device(const Device& d) {
  const DeviceStructure& s = d.structure;
  if (s.na <= 0 || s.bnum <= 0 || s.nb <= 0 || s.norb <= 0)
    throw Error(ErrorKind::Dimension, "inconsistent dimensions: na, nb, norb, bnum must be positive");
  if (s.na % s.bnum != 0) {
    std::ostringstream os;
    os << "invalid partition: na=" << s.na << " is not divisible by bnum=" << s.bnum;
    throw Error(ErrorKind::Partition, os.str());
  }
  if (s.n3d != kN3D) throw Error(ErrorKind::Dimension, "inconsistent dimensions: n3d must be 3");
  if (static_cast<int>(s.positions.size()) != s.na || static_cast<int>(s.neighbors.size()) != s.na * s.nb)
    throw Error(ErrorKind::Dimension, "inconsistent dimensions: positions/neighbors do not match na, nb");
  for (int a = 0; a < s.na; ++a) {
    for (int k = 0; k < s.nb; ++k) {
      const int b = s.neighbor(a, k);
      if (b == kLeadNeighbor) continue;
      if (b < 0 || b >= s.na || b == a) {
        std::ostringstream os;
        os << "inconsistent dimensions: atom " << a << " has invalid neighbor index " << b;
        throw Error(ErrorKind::Dimension, os.str());
      }
      if (s.reverse_slot(a, k) < 0) {
        std::ostringstream os;
        os << "neighbor relation not symmetric: " << b << " is a neighbor of " << a << " but not vice versa";
        throw Error(ErrorKind::Format, os.str());
      }
      if (std::abs(s.block_of(a) - s.block_of(b)) > 1) {
        std::ostringstream os;
        os << "neighbor of atom " << a << " lies outside the block-tridiagonal band";
        throw Error(ErrorKind::Format, os.str());
      }
    }
  }
  const MaterialOperators& o = d.ops;
  const int bde = s.atoms_per_block() * s.norb, bdp = s.atoms_per_block() * kN3D;
  auto check_bt = [&](const BlockTriMatrix& m, int bd, const char* name) {
    bool ok = m.bnum == s.bnum && m.blockdim == bd && static_cast<int>(m.diag.size()) == s.bnum &&
              static_cast<int>(m.upper.size()) == s.bnum - 1 && static_cast<int>(m.lower.size()) == s.bnum - 1;
    for (const auto* v : {&m.diag, &m.upper, &m.lower})
      for (const auto& b : *v) ok = ok && b.rows() == bd && b.cols() == bd;
    if (!ok) throw Error(ErrorKind::Dimension, std::string("inconsistent dimensions: operator ") + name);
  };
  check_bt(o.H0, bde, "H0");
  check_bt(o.S0, bde, "S0");
  check_bt(o.Phi0, bdp, "Phi0");
  if (static_cast<int>(o.H1.size()) != s.bnum || static_cast<int>(o.Phi1.size()) != s.bnum)
    throw Error(ErrorKind::Dimension, "inconsistent dimensions: z-coupling blocks");
  if (o.dH.size() != static_cast<std::size_t>(s.na) * s.nb * kN3D * s.norb * s.norb)
    throw Error(ErrorKind::Dimension, "inconsistent dimensions: dH");
  if (o.H_cell01.rows() != bde || o.S_cell01.rows() != bde || o.Phi_cell01.rows() != bdp)
    throw Error(ErrorKind::Dimension, "inconsistent dimensions: lead cell coupling");
  check_hermitian(o.H0, "H0");
  check_hermitian(o.S0, "S0");
  check_hermitian(o.Phi0, "Phi0");
  // ∇H_ba = -(∇H_ab)†
  const int n = s.norb;
  for (int a = 0; a < s.na; ++a) {
    for (int k = 0; k < s.nb; ++k) {
      const int b = s.neighbor(a, k);
      if (b < 0) continue;
      const int r = s.reverse_slot(a, k);
      for (int dir = 0; dir < kN3D; ++dir) {
        const cplx* m = o.dh(a, k, dir);
        const cplx* mt = o.dh(b, r, dir);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            if (std::abs(mt[j * n + i] + std::conj(m[i * n + j])) > 1e-12 * std::max(1.0, std::abs(m[i * n + j]))) {
              std::ostringstream os;
              os << "non-Hermitian operator: dH pair (" << a << "," << b << ") direction " << dir;
              throw Error(ErrorKind::Hermiticity, os.str());
            }
      }
    }
  }
}

}  // namespace negfmini
