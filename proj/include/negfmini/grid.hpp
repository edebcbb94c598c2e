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

#include "negfmini/common.hpp"

namespace negfmini {

struct GridParams {
  int nkz = 3;
  int nqz = 3;
  int ne = 64;
  int nomega = 8;
  int omega_step = 1;  // ħω_w = (w+1)·omega_step·dE
  double emin = -0.3;
  double emax = 0.2;
  double temperature = 300.0;
};

/// Uniform momentum/energy/frequency grids. Momenta k_m = 2π(m - floor(N/2))/N.
struct SpectralGrid {
  GridParams params;
  std::vector<double> kz;
  std::vector<double> qz;
  std::vector<double> energies;
  std::vector<double> omegas;
  double dE = 0.0;
  double domega = 0.0;

  static SpectralGrid build(const GridParams& p);

  int nkz() const { return static_cast<int>(kz.size()); }
  int nqz() const { return static_cast<int>(qz.size()); }
  int ne() const { return static_cast<int>(energies.size()); }
  int nomega() const { return static_cast<int>(omegas.size()); }
  double kT() const { return kBoltzmannEV * params.temperature; }

  /// Energy-index offset of frequency index w.
  int shift(int w) const { return (w + 1) * params.omega_step; }
  int k_minus_q(int ik, int iq) const;
  int k_plus_q(int ik, int iq) const;
};

/// Throws InvalidArgument naming the offending field.
void validate_grid_params(const GridParams& p);

double fermi(double e, double mu, double kT);
double bose(double w, double kT);

}  // namespace negfmini
