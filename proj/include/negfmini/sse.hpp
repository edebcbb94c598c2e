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

#include <cstdint>
#include <string>

#include "negfmini/device.hpp"
#include "negfmini/grid.hpp"
#include "negfmini/tensors.hpp"

namespace negfmini {

enum class SseVariant { Naive, Regrouped, Mixed };
const char* to_string(SseVariant v);
SseVariant parse_sse_variant(const std::string& s);

/// Work counters of one SSE evaluation. Σ and Π are kept apart so the Σ term can be
/// compared against the dense-product model.
struct FlopLedger {
  std::uint64_t sigma_madds = 0;   // complex multiply-adds in Σ products
  std::uint64_t pi_madds = 0;      // complex multiply-adds in Π products and traces
  std::uint64_t other_madds = 0;   // operand preparation (weighted ∇H sums)
  std::uint64_t padded_madds = 0;  // padded-tile equivalent of the batched products
  std::uint64_t bytes_moved = 0;   // operand traffic model, 16 bytes per complex element
  std::uint64_t batches = 0;       // batched calls issued
  std::uint64_t products = 0;      // small matrix products

  double sigma_flops() const { return 8.0 * static_cast<double>(sigma_madds); }
  double flops() const { return 8.0 * static_cast<double>(sigma_madds + pi_madds + other_madds); }
  FlopLedger& operator+=(const FlopLedger& o);
};

struct GfTensors {
  const ElectronTensor* Gl = nullptr;
  const ElectronTensor* Gg = nullptr;
  const PhononTensor* Dl = nullptr;
  const PhononTensor* Dg = nullptr;
};

struct SseOptions {
  SseVariant variant = SseVariant::Regrouped;
  int threads = 1;
  bool force_unit_scale = false;  // mixed variant only: skip the scale normalization
};

/// Dense-product model of the Σ kernel: 64·Na·Nb·N3D·Nkz·Nqz·NE·Nω·Norb³ flops.
double sse_model_flops(int na, int nb, int nkz, int nqz, int ne, int nomega, int norb);
/// Expected naive/regrouped multiply ratio without grid-edge truncation.
double sse_regroup_ratio(int nqz, int nomega);

/// Rejects tensors whose shape disagrees with the device/grid and frequency grids that are
/// not whole multiples of the energy step.
void validate_sse_inputs(const Device& dev, const SpectralGrid& grid, const GfTensors& g);

SelfEnergyTensors sse_compute(const Device& dev, const SpectralGrid& grid, const GfTensors& g,
                              const SseOptions& opt, FlopLedger* ledger = nullptr);

inline SelfEnergyTensors sse_naive(const Device& dev, const SpectralGrid& grid, const GfTensors& g,
                                   FlopLedger* ledger = nullptr, int threads = 1) {
  return sse_compute(dev, grid, g, {SseVariant::Naive, threads, false}, ledger);
}
inline SelfEnergyTensors sse_regrouped(const Device& dev, const SpectralGrid& grid, const GfTensors& g,
                                       FlopLedger* ledger = nullptr, int threads = 1) {
  return sse_compute(dev, grid, g, {SseVariant::Regrouped, threads, false}, ledger);
}
inline SelfEnergyTensors sse_mixed(const Device& dev, const SpectralGrid& grid, const GfTensors& g,
                                   FlopLedger* ledger = nullptr, int threads = 1, bool force_unit_scale = false) {
  return sse_compute(dev, grid, g, {SseVariant::Mixed, threads, force_unit_scale}, ledger);
}

}  // namespace negfmini
