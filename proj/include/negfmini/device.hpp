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

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "negfmini/block_tri.hpp"
#include "negfmini/grid.hpp"

namespace negfmini {

enum class LatticeKind { Chain, Ribbon };

const char* to_string(LatticeKind k);
LatticeKind parse_lattice(const std::string& s);

inline constexpr int kN3D = 3;
/// Neighbor slot value for a bond that leaves the device into a lead.
inline constexpr int kLeadNeighbor = -1;

struct DeviceParams {
  LatticeKind lattice = LatticeKind::Chain;
  int na = 8;
  int nb = 0;  // neighbors per atom; 0 takes the lattice coordination
  int norb = 2;
  int bnum = 4;
  std::uint64_t seed = 1;
  double vds = 0.1;
  double vgs = 0.0;
  int ribbon_width = 4;
  double ep_coupling = 0.1;     // scale of ∇H relative to the hopping (1/nm)
  double phonon_energy = 0.1;   // approximate top of the phonon band (eV)
  GridParams grid;              // default grid stored with the device
};

struct DeviceStructure {
  LatticeKind lattice = LatticeKind::Chain;
  int na = 0;
  int nb = 0;
  int norb = 0;
  int n3d = kN3D;
  int bnum = 0;
  double vds = 0.0;
  double vgs = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::array<double, 2>> positions;  // nm
  std::vector<int> neighbors;                    // na·nb, kLeadNeighbor for lead bonds

  int atoms_per_block() const { return na / bnum; }
  int block_of(int a) const { return a / atoms_per_block(); }
  int neighbor(int a, int slot) const { return neighbors[static_cast<std::size_t>(a) * nb + slot]; }
  /// Slot of a in the neighbor list of neighbor(a, slot); -1 for lead bonds.
  int reverse_slot(int a, int slot) const;

  double mu_left() const { return 0.0; }
  double mu_right() const { return -vds; }

  bool operator==(const DeviceStructure& o) const;
};

/// Operator storage. H(kz) = H0 + H1·e^{ikz} + H1†·e^{-ikz}; H1 acts within each block.
struct MaterialOperators {
  BlockTriMatrix H0;
  std::vector<CMatrix> H1;
  BlockTriMatrix S0;
  BlockTriMatrix Phi0;
  std::vector<CMatrix> Phi1;
  std::vector<cplx> dH;  // [na][nb][3][norb][norb], ∇_i H_ab for b = neighbor(a, slot)
  // coupling of one translation cell to the next; the leads repeat the end blocks with it
  CMatrix H_cell01;
  CMatrix S_cell01;
  CMatrix Phi_cell01;
  int na = 0, nb = 0, norb = 0;

  BlockTriMatrix H(double kz) const;
  BlockTriMatrix S(double kz) const;
  BlockTriMatrix Phi(double qz) const;

  const cplx* dh(int a, int slot, int dir) const {
    return dH.data() + ((static_cast<std::size_t>(a) * nb + slot) * kN3D + dir) * norb * norb;
  }
  cplx* dh(int a, int slot, int dir) {
    return dH.data() + ((static_cast<std::size_t>(a) * nb + slot) * kN3D + dir) * norb * norb;
  }

  bool operator==(const MaterialOperators& o) const;
};

struct Device {
  DeviceStructure structure;
  MaterialOperators ops;
  GridParams grid;

  bool operator==(const Device& o) const;
};

/// Deterministic toy crystal: every block is one translation cell of the same lattice,
/// so the leads are its semi-infinite continuation.
Device generate_device(const DeviceParams& p);

/// Grid defaults derived from the bias window (emin/emax around the chemical potentials).
GridParams default_grid_for_bias(double vds, const GridParams& base);

void validate_device(const Device& d);

void save_device(const Device& d, const std::string& path);
Device load_device(const std::string& path);

}  // namespace negfmini
