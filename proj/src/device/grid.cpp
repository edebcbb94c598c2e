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

#include "negfmini/grid.hpp"

#include <cmath>
#include <sstream>

namespace negfmini {

static void fail(const char* field, const std::string& why) {
  throw Error(ErrorKind::InvalidArgument, std::string(field) + ": " + why);
}

void validate_grid_params(const GridParams& p) {
  if (p.nkz < 1) fail("nkz", "must be at least 1");
  if (p.nqz < 1) fail("nqz", "must be at least 1");
  if (p.nqz != p.nkz) {
    std::ostringstream os;
    os << "must equal nkz for commensurate momentum grids (nkz=" << p.nkz << ", nqz=" << p.nqz << ")";
    fail("nqz", os.str());
  }
  if (p.nomega < 1) fail("nomega", "must be at least 1");
  if (p.ne < 2) fail("ne", "must be at least 2");
  if (p.ne < 2 * p.nomega) fail("ne", "must be at least 2*nomega");
  if (p.omega_step < 1) fail("omega_step", "must be a positive integer (frequencies are multiples of dE)");
  if (p.nomega * p.omega_step >= p.ne) fail("omega_step", "largest frequency shift exceeds the energy grid");
  if (!(p.emax > p.emin)) fail("emax", "must exceed emin");
  if (!(p.temperature > 0.0)) fail("temperature", "must be positive");
}

SpectralGrid SpectralGrid::build(const GridParams& p) {
  validate_grid_params(p);
  SpectralGrid g;
  g.params = p;
  auto momenta = [](int n) {
    std::vector<double> k(n);
    for (int m = 0; m < n; ++m) k[m] = 2.0 * kPi * (m - n / 2) / n;
    return k;
  };
  g.kz = momenta(p.nkz);
  g.qz = momenta(p.nqz);
  g.dE = (p.emax - p.emin) / (p.ne - 1);
  g.energies.resize(p.ne);
  for (int e = 0; e < p.ne; ++e) g.energies[e] = p.emin + e * g.dE;
  g.domega = p.omega_step * g.dE;
  g.omegas.resize(p.nomega);
  for (int w = 0; w < p.nomega; ++w) g.omegas[w] = (w + 1) * g.domega;
  return g;
}

int SpectralGrid::k_minus_q(int ik, int iq) const {
  const int n = nkz();
  return ((ik - iq + n / 2) % n + n) % n;
}

int SpectralGrid::k_plus_q(int ik, int iq) const {
  const int n = nkz();
  return ((ik + iq - n / 2) % n + n) % n;
}

double fermi(double e, double mu, double kT) {
  const double x = (e - mu) / kT;
  if (x > 0) {
    const double t = std::exp(-x);
    return t / (1.0 + t);
  }
  return 1.0 / (1.0 + std::exp(x));
}

double bose(double w, double kT) { return 1.0 / std::expm1(w / kT); }

}  // namespace negfmini
