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

#include <sstream>

#include "negfmini/parallel.hpp"
#include "negfmini/rgf.hpp"

namespace negfmini {

namespace {

SpecializedPoint specialize(const Device& dev, const SpectralGrid& grid, Carrier c, int ik, int ie,
                            const BoundaryPoint& bp) {
  const MaterialOperators& o = dev.ops;
  SpecializedPoint sp;
  if (c == Carrier::Electron) {
    const double e = grid.energies[ie];
    sp.a0 = combine(e, o.S(grid.kz[ik]), -1.0, o.H(grid.kz[ik]));
  } else {
    const double w = grid.omegas[ie];
    const BlockTriMatrix phi = o.Phi(grid.qz[ik]);
    BlockTriMatrix eye(phi.bnum, phi.blockdim);
    for (auto& d : eye.diag) d = CMatrix::identity(phi.blockdim);
    sp.a0 = combine(w * w, eye, -1.0, phi);
  }
  const int last = sp.a0.bnum - 1;
  sp.a0.diag[0] -= bp.sigma_left;
  sp.a0.diag[last] -= bp.sigma_right;
  sp.bl_left = boundary_lesser(bp.sigma_left, bp.occ_left, c);
  sp.bg_left = boundary_greater(bp.sigma_left, bp.occ_left, c);
  sp.bl_right = boundary_lesser(bp.sigma_right, bp.occ_right, c);
  sp.bg_right = boundary_greater(bp.sigma_right, bp.occ_right, c);
  return sp;
}

void copy_sub(const CMatrix& src, int r0, int c0, int n, cplx* dst) {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) dst[i * n + j] = src(r0 + i, c0 + j);
}

double lead_inflow(const CMatrix& bl, const CMatrix& bg, const CMatrix& gl, const CMatrix& gg) {
  return (trace_product(bl, gg) - trace_product(bg, gl)).real();
}

}  // namespace

GfPhaseOutput gf_phase(const Device& dev, const SpectralGrid& grid, const SelfEnergyTensors* sse, CacheMode mode,
                       GfPhaseCache& cache, int threads) {
  const DeviceStructure& st = dev.structure;
  const int apb = st.atoms_per_block();
  const int norb = st.norb, bnum = st.bnum, nslot = st.nb + 1;
  const int nk = grid.nkz(), ne = grid.ne(), nq = grid.nqz(), nw = grid.nomega();
  if (sse) {
    const ElectronTensor shape_e(nk, ne, st.na, norb);
    const PhononTensor shape_p(nq, nw, st.na, nslot, kN3D);
    if (!sse->sigma_lesser.same_shape(shape_e) || !sse->sigma_greater.same_shape(shape_e) ||
        !sse->pi_lesser.same_shape(shape_p) || !sse->pi_greater.same_shape(shape_p))
      throw Error(ErrorKind::Dimension, "gf_phase: self-energy tensors do not match the device/grid");
  }

  GfPhaseOutput out;
  // boundary tables
  BoundaryTable fresh_e, fresh_p;
  const BoundaryTable* bc_e = nullptr;
  const BoundaryTable* bc_p = nullptr;
  const bool need_spec_e = mode != CacheMode::BCSpec || cache.spec_electron.empty();
  const bool need_spec_p = mode != CacheMode::BCSpec || cache.spec_phonon.empty();
  auto table = [&](Carrier c, std::optional<BoundaryTable>& slot, BoundaryTable& fresh) -> const BoundaryTable* {
    if (mode == CacheMode::None) {
      fresh = boundary_selfenergies(dev, grid, c, threads);
      cache.boundary_solves += fresh.surface_solves;
      cache.boundary_points += fresh.points.size();
      out.ops_boundary += fresh.ops;
      return &fresh;
    }
    if (!slot) {
      slot = boundary_selfenergies(dev, grid, c, threads);
      cache.boundary_solves += slot->surface_solves;
      cache.boundary_points += slot->points.size();
      out.ops_boundary += slot->ops;
    }
    return &*slot;
  };
  if (need_spec_e) bc_e = table(Carrier::Electron, cache.bc_electron, fresh_e);
  if (need_spec_p) bc_p = table(Carrier::Phonon, cache.bc_phonon, fresh_p);

  // electrons
  const int bde = apb * norb;
  out.GR = ElectronTensor(nk, ne, st.na, norb);
  out.Gl = ElectronTensor(nk, ne, st.na, norb);
  out.Gg = ElectronTensor(nk, ne, st.na, norb);
  out.Gl_bond = BondTensor(nk, ne, bnum - 1, bde);
  out.lead_e.assign(static_cast<std::size_t>(nk) * ne * 2, 0.0);
  std::vector<SpecializedPoint> spec_e;
  if (need_spec_e) spec_e.resize(static_cast<std::size_t>(nk) * ne);
  std::vector<OpCount> ops_e(static_cast<std::size_t>(nk) * ne);
  parallel_for(nk * ne, threads, [&](int idx) {
    const int ik = idx / ne, ie = idx % ne;
    if (need_spec_e) spec_e[idx] = specialize(dev, grid, Carrier::Electron, ik, ie, bc_e->at(ik, ie));
    const SpecializedPoint& sp = need_spec_e ? spec_e[idx] : cache.spec_electron[idx];
    BlockTriMatrix a = sp.a0;
    std::vector<CMatrix> sl(bnum, CMatrix(bde, bde)), sg(bnum, CMatrix(bde, bde));
    if (sse) {
      for (int at = 0; at < st.na; ++at) {
        const int blk = at / apb, r0 = (at % apb) * norb;
        const cplx* pl = sse->sigma_lesser.block(ik, ie, at);
        const cplx* pg = sse->sigma_greater.block(ik, ie, at);
        for (int i = 0; i < norb; ++i)
          for (int j = 0; j < norb; ++j) {
            const cplx l = pl[i * norb + j], g = pg[i * norb + j];
            a.diag[blk](r0 + i, r0 + j) -= 0.5 * (g - l);
            sl[blk](r0 + i, r0 + j) += l;
            sg[blk](r0 + i, r0 + j) += g;
          }
      }
    }
    sl[0] += sp.bl_left;
    sg[0] += sp.bg_left;
    sl[bnum - 1] += sp.bl_right;
    sg[bnum - 1] += sp.bg_right;
    RgfResult r;
    try {
      r = rgf_point(a, sl, sg, &ops_e[idx]);
    } catch (const Error& e) {
      std::ostringstream os;
      os << e.what() << " at electron point (kz index " << ik << ", E index " << ie << ")";
      throw Error(e.kind(), os.str());
    }
    for (int at = 0; at < st.na; ++at) {
      const int blk = at / apb, r0 = (at % apb) * norb;
      copy_sub(r.GR[blk], r0, r0, norb, out.GR.block(ik, ie, at));
      copy_sub(r.Gl[blk], r0, r0, norb, out.Gl.block(ik, ie, at));
      copy_sub(r.Gg[blk], r0, r0, norb, out.Gg.block(ik, ie, at));
    }
    for (int n = 0; n + 1 < bnum; ++n) std::copy(r.Gl_lower[n].data(), r.Gl_lower[n].data() + r.Gl_lower[n].size(), out.Gl_bond.block(ik, ie, n));
    out.lead_e[2 * idx] = lead_inflow(sp.bl_left, sp.bg_left, r.Gl[0], r.Gg[0]);
    out.lead_e[2 * idx + 1] = lead_inflow(sp.bl_right, sp.bg_right, r.Gl[bnum - 1], r.Gg[bnum - 1]);
  });
  for (const auto& o : ops_e) out.ops_electron += o;

  // phonons
  const int bdp = apb * kN3D;
  out.DR = PhononTensor(nq, nw, st.na, nslot, kN3D);
  out.Dl = PhononTensor(nq, nw, st.na, nslot, kN3D);
  out.Dg = PhononTensor(nq, nw, st.na, nslot, kN3D);
  out.Dl_bond = BondTensor(nq, nw, bnum - 1, bdp);
  out.lead_ph.assign(static_cast<std::size_t>(nq) * nw * 2, 0.0);
  std::vector<SpecializedPoint> spec_p;
  if (need_spec_p) spec_p.resize(static_cast<std::size_t>(nq) * nw);
  std::vector<OpCount> ops_p(static_cast<std::size_t>(nq) * nw);
  parallel_for(nq * nw, threads, [&](int idx) {
    const int iq = idx / nw, iw = idx % nw;
    if (need_spec_p) spec_p[idx] = specialize(dev, grid, Carrier::Phonon, iq, iw, bc_p->at(iq, iw));
    const SpecializedPoint& sp = need_spec_p ? spec_p[idx] : cache.spec_phonon[idx];
    BlockTriMatrix a = sp.a0;
    std::vector<CMatrix> sl(bnum, CMatrix(bdp, bdp)), sg(bnum, CMatrix(bdp, bdp));
    if (sse) {
      for (int at = 0; at < st.na; ++at) {
        const int blk = at / apb, r0 = (at % apb) * kN3D;
        for (int slot = 0; slot < nslot; ++slot) {
          const int b = slot == 0 ? at : st.neighbor(at, slot - 1);
          if (b < 0 || b / apb != blk) continue;  // scattering acts within blocks
          const int c0 = (b % apb) * kN3D;
          const cplx* pl = sse->pi_lesser.block(iq, iw, at, slot);
          const cplx* pg = sse->pi_greater.block(iq, iw, at, slot);
          for (int i = 0; i < kN3D; ++i)
            for (int j = 0; j < kN3D; ++j) {
              const cplx l = pl[i * kN3D + j], g = pg[i * kN3D + j];
              a.diag[blk](r0 + i, c0 + j) -= 0.5 * (g - l);
              sl[blk](r0 + i, c0 + j) += l;
              sg[blk](r0 + i, c0 + j) += g;
            }
        }
      }
    }
    sl[0] += sp.bl_left;
    sg[0] += sp.bg_left;
    sl[bnum - 1] += sp.bl_right;
    sg[bnum - 1] += sp.bg_right;
    RgfResult r;
    try {
      r = rgf_point(a, sl, sg, &ops_p[idx]);
    } catch (const Error& e) {
      std::ostringstream os;
      os << e.what() << " at phonon point (qz index " << iq << ", w index " << iw << ")";
      throw Error(e.kind(), os.str());
    }
    for (int at = 0; at < st.na; ++at) {
      const int blk = at / apb, r0 = (at % apb) * kN3D;
      copy_sub(r.GR[blk], r0, r0, kN3D, out.DR.block(iq, iw, at, 0));
      for (int slot = 0; slot < nslot; ++slot) {
        const int b = slot == 0 ? at : st.neighbor(at, slot - 1);
        if (b < 0) continue;
        const int bb = b / apb, c0 = (b % apb) * kN3D;
        cplx* dl = out.Dl.block(iq, iw, at, slot);
        cplx* dg = out.Dg.block(iq, iw, at, slot);
        if (bb == blk) {
          copy_sub(r.Gl[blk], r0, c0, kN3D, dl);
          copy_sub(r.Gg[blk], r0, c0, kN3D, dg);
        } else if (bb == blk - 1) {
          copy_sub(r.Gl_lower[blk - 1], r0, c0, kN3D, dl);
          copy_sub(r.Gg_lower[blk - 1], r0, c0, kN3D, dg);
        } else {
          // (n, n+1) block = -((n+1, n) block)†
          const CMatrix& xl = r.Gl_lower[blk];
          const CMatrix& xg = r.Gg_lower[blk];
          for (int i = 0; i < kN3D; ++i)
            for (int j = 0; j < kN3D; ++j) {
              dl[i * kN3D + j] = -std::conj(xl(c0 + j, r0 + i));
              dg[i * kN3D + j] = -std::conj(xg(c0 + j, r0 + i));
            }
        }
      }
    }
    for (int n = 0; n + 1 < bnum; ++n) std::copy(r.Gl_lower[n].data(), r.Gl_lower[n].data() + r.Gl_lower[n].size(), out.Dl_bond.block(iq, iw, n));
    out.lead_ph[2 * idx] = lead_inflow(sp.bl_left, sp.bg_left, r.Gl[0], r.Gg[0]);
    out.lead_ph[2 * idx + 1] = lead_inflow(sp.bl_right, sp.bg_right, r.Gl[bnum - 1], r.Gg[bnum - 1]);
  });
  for (const auto& o : ops_p) out.ops_phonon += o;

  if (need_spec_e) cache.specializations += spec_e.size();
  if (need_spec_p) cache.specializations += spec_p.size();
  if (mode == CacheMode::BCSpec) {
    if (need_spec_e) cache.spec_electron = std::move(spec_e);
    if (need_spec_p) cache.spec_phonon = std::move(spec_p);
  }
  return out;
}

}  // namespace negfmini
