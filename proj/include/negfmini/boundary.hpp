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

#include <vector>

#include "negfmini/device.hpp"
#include "negfmini/grid.hpp"

namespace negfmini {

enum class Carrier { Electron, Phonon };

inline constexpr double kLeadEta = 1e-6;
inline constexpr double kDecimationTol = 1e-10;
inline constexpr int kDecimationMaxIter = 200;
/// Relative fixed-point residual above which the surface solution is Newton-refined.
inline constexpr double kPolishTol = 1e-12;

struct SurfaceGF {
  CMatrix g;
  int iterations = 0;
  double residual = 0.0;
  OpCount ops;
};

/// Surface Green's function of the semi-infinite chain cell 0, 1, 2, ... where H01 and
/// S01 couple cell n to n+1. Sancho-Rubio decimation on W = z·S - H.
SurfaceGF surface_gf(const CMatrix& h00, const CMatrix& h01, const CMatrix& s00, const CMatrix& s01, cplx z,
                     double tol = kDecimationTol, int max_iter = kDecimationMaxIter);

/// Smallest eigenvalue of i(X - X†); non-negative when X is a causal advanced-like block,
/// i.e. X = Σ^R or g^R with Im ≤ 0.
double min_broadening_eigenvalue(const CMatrix& x);

struct BoundaryPoint {
  CMatrix sigma_left;   // retarded, acts on block 0
  CMatrix sigma_right;  // retarded, acts on block bnum-1
  double occ_left = 0.0;
  double occ_right = 0.0;
};

/// Lesser/greater boundary terms from the retarded ones and lead occupation.
CMatrix boundary_lesser(const CMatrix& sigma_r, double occ, Carrier c);
CMatrix boundary_greater(const CMatrix& sigma_r, double occ, Carrier c);

struct BoundaryTable {
  Carrier carrier = Carrier::Electron;
  int nk = 0;
  int ne = 0;  // energies (electrons) or frequencies (phonons)
  std::vector<BoundaryPoint> points;
  std::uint64_t surface_solves = 0;
  OpCount ops;

  const BoundaryPoint& at(int ik, int ie) const { return points[static_cast<std::size_t>(ik) * ne + ie]; }
};

/// One (E,kz) or (ω,qz) point. Adds to `ops`, increments `solves` by the number of
/// decimations performed.
BoundaryPoint boundary_point(const Device& dev, const SpectralGrid& grid, Carrier c, int ik, int ie, OpCount* ops,
                             std::uint64_t* solves);

BoundaryTable boundary_selfenergies(const Device& dev, const SpectralGrid& grid, Carrier c, int threads = 1);

}  // namespace negfmini
