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

#include "negfmini/observables.hpp"

#include <cmath>

namespace negfmini {

static double relative_spread(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double worst = 0.0;
  for (double x : v) worst = std::max(worst, std::fabs(x - mean));
  return worst / std::max(std::fabs(mean), 1e-300);
}

double Observables::current_variation() const { return relative_spread(current); }
double Observables::energy_residual() const { return relative_spread(energy_total); }

static double bond_trace(const CMatrix& tau, const cplx* x_lower, int bd) {
  // 2 Re Tr[τ_{n,n+1} X_{n+1,n}]
  cplx t = 0.0;
  for (int i = 0; i < bd; ++i)
    for (int k = 0; k < bd; ++k) t += tau(i, k) * x_lower[k * bd + i];
  return 2.0 * t.real();
}

std::vector<double> cut_positions(const Device& dev) {
  const DeviceStructure& st = dev.structure;
  const int apb = st.atoms_per_block();
  std::vector<double> mean(st.bnum, 0.0);
  for (int a = 0; a < st.na; ++a) mean[a / apb] += st.positions[a][0] / apb;
  const double period = st.bnum > 1 ? (mean[st.bnum - 1] - mean[0]) / (st.bnum - 1) : 1.0;
  std::vector<double> x(st.bnum + 1);
  for (int c = 0; c <= st.bnum; ++c) x[c] = mean[0] + (c - 0.5) * period;
  return x;
}

Observables observables(const GfPhaseOutput& gf, const Device& dev, const SpectralGrid& grid) {
  const int bnum = dev.structure.bnum;
  const int nk = grid.nkz(), ne = grid.ne(), nq = grid.nqz(), nw = grid.nomega();
  const int ncut = bnum + 1;
  if (gf.Gl_bond.nint != bnum - 1 || gf.Gl_bond.nk != nk || gf.Gl_bond.ne != ne ||
      gf.Dl_bond.nint != bnum - 1 || gf.Dl_bond.nk != nq || gf.Dl_bond.ne != nw ||
      gf.lead_e.size() != static_cast<std::size_t>(nk) * ne * 2 ||
      gf.lead_ph.size() != static_cast<std::size_t>(nq) * nw * 2)
    throw Error(ErrorKind::Dimension, "observables: missing bond blocks or lead terms for this device/grid");

  Observables ob;
  ob.ncut = ncut;
  ob.ne = ne;
  ob.current.assign(ncut, 0.0);
  ob.energy_electron.assign(ncut, 0.0);
  ob.energy_phonon.assign(ncut, 0.0);
  ob.energy_total.assign(ncut, 0.0);
  ob.spectral.assign(static_cast<std::size_t>(ncut) * ne, 0.0);

  const MaterialOperators& o = dev.ops;
  const int bde = gf.Gl_bond.bd, bdp = gf.Dl_bond.bd;
  const double we = grid.dE / (2.0 * kPi) / nk;
  for (int ie = 0; ie < ne; ++ie) {
    const double e = grid.energies[ie];
    std::vector<CMatrix> tau(bnum > 1 ? bnum - 1 : 0);
    for (int n = 0; n + 1 < bnum; ++n) tau[n] = o.H0.upper[n] - e * o.S0.upper[n];
    for (int ik = 0; ik < nk; ++ik) {
      const std::size_t p = static_cast<std::size_t>(ik) * ne + ie;
      for (int c = 0; c < ncut; ++c) {
        double i_ek;
        if (c == 0) i_ek = gf.lead_e[2 * p];
        else if (c == bnum) i_ek = -gf.lead_e[2 * p + 1];
        else i_ek = bond_trace(tau[c - 1], gf.Gl_bond.block(ik, ie, c - 1), bde);
        ob.spectral[static_cast<std::size_t>(c) * ne + ie] += i_ek / nk;
        ob.current[c] += we * i_ek;
        ob.energy_electron[c] += we * e * i_ek;
      }
    }
  }
  const double wp = grid.domega / (2.0 * kPi) / nq;
  for (int iw = 0; iw < nw; ++iw) {
    const double w = grid.omegas[iw];
    for (int iq = 0; iq < nq; ++iq) {
      const std::size_t p = static_cast<std::size_t>(iq) * nw + iw;
      for (int c = 0; c < ncut; ++c) {
        double i_wq;
        if (c == 0) i_wq = gf.lead_ph[2 * p];
        else if (c == bnum) i_wq = -gf.lead_ph[2 * p + 1];
        else i_wq = bond_trace(o.Phi0.upper[c - 1], gf.Dl_bond.block(iq, iw, c - 1), bdp);
        // bosonic lesser functions carry the opposite sign: D^< = N(D^R - D^A)
        ob.energy_phonon[c] -= wp * w * i_wq;
      }
    }
  }
  for (int c = 0; c < ncut; ++c) ob.energy_total[c] = ob.energy_electron[c] + ob.energy_phonon[c];
  return ob;
}

}  // namespace negfmini
