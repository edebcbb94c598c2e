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

#include "negfmini/rgf.hpp"

namespace negfmini {

/// Currents through the bnum+1 cuts: left lead | block 0 | ... | block bnum-1 | right lead.
/// Units: e = ħ = 1, energies in eV; positive values flow left to right.
struct Observables {
  int ncut = 0;
  int ne = 0;
  std::vector<double> current;            // electrical (particle) current
  std::vector<double> energy_electron;
  std::vector<double> energy_phonon;
  std::vector<double> energy_total;
  std::vector<double> spectral;           // [cut][E], summed over kz with the 1/Nkz weight

  double drain_current() const { return current.empty() ? 0.0 : current.back(); }
  /// max over cuts of |I(x) - mean| / |mean|
  double current_variation() const;
  /// max over cuts of |J_total(x) - mean| / |mean|
  double energy_residual() const;
};

/// x coordinate (nm) of each cut: block boundaries, with the lead cuts half a cell outside.
std::vector<double> cut_positions(const Device& dev);

Observables observables(const GfPhaseOutput& gf, const Device& dev, const SpectralGrid& grid);

}  // namespace negfmini
