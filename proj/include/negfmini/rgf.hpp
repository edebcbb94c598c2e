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

#include <optional>
#include <vector>

#include "negfmini/block_tri.hpp"
#include "negfmini/boundary.hpp"
#include "negfmini/device.hpp"
#include "negfmini/tensors.hpp"

namespace negfmini {

struct RgfResult {
  std::vector<CMatrix> GR;        // diagonal blocks
  std::vector<CMatrix> Gl, Gg;    // diagonal blocks
  std::vector<CMatrix> Gl_lower;  // (n+1, n) blocks
  std::vector<CMatrix> Gg_lower;
};

/// Selected blocks of G^R = A^{-1} and G^≷ = G^R Σ^≷ G^A for block-tridiagonal A and
/// block-diagonal Σ^≷ (boundary terms already folded into the first/last blocks).
RgfResult rgf_point(const BlockTriMatrix& a, const std::vector<CMatrix>& sigma_lesser,
                    const std::vector<CMatrix>& sigma_greater, OpCount* ops = nullptr);

/// Dense-operation model of one point: 8·(26·bnum - 25)·blockdim³ flops.
double rgf_model_flops(int bnum, int blockdim);

enum class CacheMode { None, BC, BCSpec };
const char* to_string(CacheMode m);
CacheMode parse_cache_mode(const std::string& s);

/// Point-specialized system with boundary folded in: A0 = E·S - H - Σ_B^R, plus boundary Σ^≷.
struct SpecializedPoint {
  BlockTriMatrix a0;
  CMatrix bl_left, bg_left, bl_right, bg_right;  // boundary lesser/greater
};

/// State that outlives one GF phase; contents depend on the cache mode.
struct GfPhaseCache {
  std::optional<BoundaryTable> bc_electron, bc_phonon;
  std::vector<SpecializedPoint> spec_electron, spec_phonon;
  std::uint64_t boundary_solves = 0;   // surface Green's functions computed
  std::uint64_t boundary_points = 0;   // boundary points evaluated
  std::uint64_t specializations = 0;   // per-point system matrices assembled
};

struct GfPhaseOutput {
  ElectronTensor GR, Gl, Gg;
  PhononTensor DR, Dl, Dg;
  BondTensor Gl_bond, Dl_bond;
  // per point: lead inflow terms Tr[Σ^<_B G^> - Σ^>_B G^<] for left and right leads
  std::vector<double> lead_e;   // [nk][ne][2]
  std::vector<double> lead_ph;  // [nq][nw][2]
  OpCount ops_electron, ops_phonon, ops_boundary;
};

/// Solves every (E,kz) and (ω,qz) point. `sse` may be null (no scattering).
GfPhaseOutput gf_phase(const Device& dev, const SpectralGrid& grid, const SelfEnergyTensors* sse, CacheMode mode,
                       GfPhaseCache& cache, int threads = 1);

}  // namespace negfmini
