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

#include "negfmini/sse.hpp"

#include <cmath>
#include <sstream>

#include "negfmini/batch.hpp"
#include "negfmini/dense.hpp"
#include "negfmini/half.hpp"
#include "negfmini/parallel.hpp"

namespace negfmini {

const char* to_string(SseVariant v) {
  switch (v) {
    case SseVariant::Naive: return "naive";
    case SseVariant::Regrouped: return "regrouped";
    case SseVariant::Mixed: return "mixed";
  }
  return "?";
}

SseVariant parse_sse_variant(const std::string& s) {
  if (s == "naive") return SseVariant::Naive;
  if (s == "regrouped") return SseVariant::Regrouped;
  if (s == "mixed") return SseVariant::Mixed;
  throw Error(ErrorKind::InvalidArgument, "variant: unknown SSE variant '" + s + "' (naive|regrouped|mixed)");
}

FlopLedger& FlopLedger::operator+=(const FlopLedger& o) {
  sigma_madds += o.sigma_madds;
  pi_madds += o.pi_madds;
  other_madds += o.other_madds;
  padded_madds += o.padded_madds;
  bytes_moved += o.bytes_moved;
  batches += o.batches;
  products += o.products;
  return *this;
}

double sse_model_flops(int na, int nb, int nkz, int nqz, int ne, int nomega, int norb) {
  return 64.0 * na * nb * kN3D * static_cast<double>(nkz) * nqz * ne * nomega * norb * norb * norb;
}

double sse_regroup_ratio(int nqz, int nomega) {
  const double k = static_cast<double>(nqz) * nomega;
  return 2.0 * k / (k + 1.0);
}

void validate_sse_inputs(const Device& dev, const SpectralGrid& grid, const GfTensors& g) {
  const DeviceStructure& st = dev.structure;
  if (!g.Gl || !g.Gg || !g.Dl || !g.Dg) throw Error(ErrorKind::InvalidArgument, "sse: missing input tensor");
  if (grid.nqz() != grid.nkz()) throw Error(ErrorKind::InvalidArgument, "sse: nqz must equal nkz");
  const ElectronTensor e(grid.nkz(), grid.ne(), st.na, st.norb);
  const PhononTensor p(grid.nqz(), grid.nomega(), st.na, st.nb + 1, kN3D);
  if (!g.Gl->same_shape(e) || !g.Gg->same_shape(e))
    throw Error(ErrorKind::Dimension, "sse: electron tensors do not match [Nkz, NE, Na, Norb, Norb]");
  if (!g.Dl->same_shape(p) || !g.Dg->same_shape(p))
    throw Error(ErrorKind::Dimension, "sse: phonon tensors do not match [Nqz, Nw, Na, Nb+1, N3D, N3D]");
  for (int w = 0; w < grid.nomega(); ++w) {
    const double target = grid.shift(w) * grid.dE;
    if (grid.shift(w) >= grid.ne() || std::fabs(grid.omegas[w] - target) > 1e-9 * grid.dE) {
      std::ostringstream os;
      os << "sse: frequency index " << w << " (" << grid.omegas[w] << " eV) is not on the energy grid";
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
  }
}

namespace {

constexpr int kLesser = 0, kGreater = 1;
constexpr int kEmission = 0, kAbsorption = 1;

struct Shape {
  int na, nb, n, nk, nq, ne, nw;
  std::ptrdiff_t es;  // energy stride of the electron tensors
  std::size_t nn() const { return static_cast<std::size_t>(n) * n; }
};

const ElectronTensor& gsel(const GfTensors& g, int which) { return which == kLesser ? *g.Gl : *g.Gg; }
const PhononTensor& dsel(const GfTensors& g, int which) { return which == kLesser ? *g.Dl : *g.Dg; }

// W_i = pref·Σ_j c_ij ∇_jH_ba, the ω-dependent right factor of the Σ products.
// Emission uses c_ij = C^≷_ij, absorption c_ij = C^≶_ji, where
// C_ab = D_ba - D_bb - D_aa + D_ab.
class WeightTable {
 public:
  WeightTable(const Device& dev, const SpectralGrid& grid, const GfTensors& g, const Shape& s, FlopLedger& led)
      : s_(s), data_(static_cast<std::size_t>(4) * s.nq * s.nw * s.na * s.nb * kN3D * s.nn()) {
    const DeviceStructure& st = dev.structure;
    const cplx pref(0.0, grid.domega / (2.0 * kPi * s.nq));
    for (int which = 0; which < 2; ++which)
      for (int dir = 0; dir < 2; ++dir) {
        const PhononTensor& d = dsel(g, dir == kEmission ? which : 1 - which);
        for (int iq = 0; iq < s.nq; ++iq)
          for (int iw = 0; iw < s.nw; ++iw)
            for (int a = 0; a < s.na; ++a)
              for (int slot = 0; slot < s.nb; ++slot) {
                const int b = st.neighbor(a, slot);
                if (b < 0) continue;
                const int rev = st.reverse_slot(a, slot);
                const cplx* dba = d.block(iq, iw, b, rev + 1);
                const cplx* dbb = d.block(iq, iw, b, 0);
                const cplx* daa = d.block(iq, iw, a, 0);
                const cplx* dab = d.block(iq, iw, a, slot + 1);
                cplx c[kN3D][kN3D];
                for (int i = 0; i < kN3D; ++i)
                  for (int j = 0; j < kN3D; ++j) {
                    const int t = dir == kEmission ? i * kN3D + j : j * kN3D + i;
                    c[i][j] = dba[t] - dbb[t] - daa[t] + dab[t];
                  }
                for (int i = 0; i < kN3D; ++i) {
                  cplx* w = at(which, dir, iq, iw, a, slot, i);
                  for (int j = 0; j < kN3D; ++j) {
                    const cplx f = pref * c[i][j];
                    const cplx* m = dev.ops.dh(b, rev, j);
                    for (std::size_t t = 0; t < s.nn(); ++t) w[t] += f * m[t];
                  }
                  led.other_madds += kN3D * s.nn();
                }
              }
      }
  }

  cplx* at(int which, int dir, int iq, int iw, int a, int slot, int i) {
    return data_.data() + index(which, dir, iq, iw, a, slot, i);
  }
  const cplx* at(int which, int dir, int iq, int iw, int a, int slot, int i) const {
    return data_.data() + index(which, dir, iq, iw, a, slot, i);
  }

 private:
  std::size_t index(int which, int dir, int iq, int iw, int a, int slot, int i) const {
    return ((((((static_cast<std::size_t>(which) * 2 + dir) * s_.nq + iq) * s_.nw + iw) * s_.na + a) * s_.nb + slot) *
                kN3D +
            i) *
           s_.nn();
  }
  Shape s_;
  std::vector<cplx> data_;
};

void add_ops(FlopLedger& led, const OpCount& ops, bool sigma) {
  (sigma ? led.sigma_madds : led.pi_madds) += ops.matmul_madds;
  led.padded_madds += ops.padded_madds;
  led.products += ops.matmuls;
}

// Σ of one atom, naive order: two products per stencil point.
void sigma_naive_atom(const Device& dev, const SpectralGrid& grid, const GfTensors& g, const Shape& s,
                      const WeightTable& wt, int a, ElectronTensor* sigma[2], FlopLedger& led) {
  const DeviceStructure& st = dev.structure;
  const int n = s.n;
  std::vector<cplx> x(s.nn());
  for (int ik = 0; ik < s.nk; ++ik)
    for (int ie = 0; ie < s.ne; ++ie)
      for (int slot = 0; slot < s.nb; ++slot) {
        const int b = st.neighbor(a, slot);
        if (b < 0) continue;
        for (int iq = 0; iq < s.nq; ++iq)
          for (int iw = 0; iw < s.nw; ++iw) {
            const int sh = grid.shift(iw);
            for (int i = 0; i < kN3D; ++i) {
              const cplx* m = dev.ops.dh(a, slot, i);
              for (int which = 0; which < 2; ++which)
                for (int dir = 0; dir < 2; ++dir) {
                  const int ie2 = dir == kEmission ? ie - sh : ie + sh;
                  if (ie2 < 0 || ie2 >= s.ne) continue;
                  const int k2 = dir == kEmission ? grid.k_minus_q(ik, iq) : grid.k_plus_q(ik, iq);
                  small_matmul(n, m, gsel(g, which).block(k2, ie2, b), x.data(), false);
                  small_matmul(n, x.data(), wt.at(which, dir, iq, iw, a, slot, i), sigma[which]->block(ik, ie, a),
                               true);
                  led.sigma_madds += 2ull * n * n * n;
                  led.products += 2;
                  led.bytes_moved += 2ull * 3 * s.nn() * 16;
                }
            }
          }
      }
}

// Σ of one atom with the ∇H_ab factor hoisted out of the (qz, ω) stencil:
// T(E) = Σ_{q,ω} G(E∓ω)·W(ω,q) as energy-batched products, then Σ(E) += ∇H_ab·T(E).
void sigma_regrouped_atom(const Device& dev, const SpectralGrid& grid, const GfTensors& g, const Shape& s,
                          const WeightTable& wt, int a, bool mixed, bool unit_scale, ElectronTensor* sigma[2],
                          FlopLedger& led) {
  const DeviceStructure& st = dev.structure;
  const int n = s.n, ne = s.ne;
  const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(s.nn());
  std::vector<cplx> t(static_cast<std::size_t>(ne) * nn);
  // half-precision copies of the G energy columns of the neighbors, one scale per column
  std::vector<HalfComplexBatch> cols;
  if (mixed) {
    cols.resize(static_cast<std::size_t>(2) * s.nk * s.nb);
    for (int which = 0; which < 2; ++which)
      for (int k = 0; k < s.nk; ++k)
        for (int slot = 0; slot < s.nb; ++slot) {
          const int b = st.neighbor(a, slot);
          if (b < 0) continue;
          const SmallMatBatch col{ne, n, s.es, const_cast<cplx*>(gsel(g, which).block(k, 0, b))};
          cols[(static_cast<std::size_t>(which) * s.nk + k) * s.nb + slot] =
              HalfComplexBatch::from(col, unit_scale ? 1.0 : compute_scale(col));
        }
  }
  const int s0 = grid.shift(0);
  for (int ik = 0; ik < s.nk; ++ik)
    for (int slot = 0; slot < s.nb; ++slot) {
      const int b = st.neighbor(a, slot);
      if (b < 0) continue;
      for (int i = 0; i < kN3D; ++i)
        for (int which = 0; which < 2; ++which)
          for (int dir = 0; dir < 2; ++dir) {
            OpCount ops;
            std::fill(t.begin(), t.end(), cplx(0.0));
            for (int iq = 0; iq < s.nq; ++iq) {
              const int k2 = dir == kEmission ? grid.k_minus_q(ik, iq) : grid.k_plus_q(ik, iq);
              for (int iw = 0; iw < s.nw; ++iw) {
                const int sh = grid.shift(iw);
                const int count = ne - sh;
                const int first_src = dir == kEmission ? 0 : sh;
                const int first_dst = dir == kEmission ? sh : 0;
                cplx* w = const_cast<cplx*>(wt.at(which, dir, iq, iw, a, slot, i));
                const SmallMatBatch c{count, n, nn, t.data() + first_dst * nn};
                if (mixed) {
                  const SmallMatBatch wb{1, n, nn, w};
                  const HalfComplexBatch hw = HalfComplexBatch::from(wb, unit_scale ? 1.0 : compute_scale(wb));
                  const HalfComplexBatch& col = cols[(static_cast<std::size_t>(which) * s.nk + k2) * s.nb + slot];
                  sbsmm_half(col, hw, c, &ops, first_src);
                } else {
                  const SmallMatBatch am{count, n, s.es,
                                         const_cast<cplx*>(gsel(g, which).block(k2, first_src, b))};
                  sbsmm(am, SmallMatBatch{count, n, 0, w}, c, true, &ops);
                }
                led.batches += 1;
                led.bytes_moved += (2ull * count + 1) * nn * 16;
              }
            }
            const int lo = dir == kEmission ? s0 : 0;
            const int cnt = ne - s0;
            const SmallMatBatch mb{cnt, n, 0, const_cast<cplx*>(dev.ops.dh(a, slot, i))};
            const SmallMatBatch tb{cnt, n, nn, t.data() + lo * nn};
            const SmallMatBatch out{cnt, n, s.es, sigma[which]->block(ik, lo, a)};
            sbsmm(mb, tb, out, true, &ops);
            led.batches += 1;
            led.bytes_moved += (3ull * cnt) * nn * 16;
            add_ops(led, ops, true);
          }
    }
}

// Π building block T^≷_al(ω,q)_ij = pref·Σ_{k,E} tr{∇_iH_la G^≷_aa(E+ω,k+q) ∇_jH_al G^≶_ll(E,k)}
// stored per (which, q, ω, a, slot) as a 3×3 block.
class PairTable {
 public:
  explicit PairTable(const Shape& s) : s_(s), data_(static_cast<std::size_t>(2) * s.nq * s.nw * s.na * s.nb * 9) {}
  cplx* at(int which, int iq, int iw, int a, int slot) {
    return data_.data() +
           ((((static_cast<std::size_t>(which) * s_.nq + iq) * s_.nw + iw) * s_.na + a) * s_.nb + slot) * 9;
  }

 private:
  Shape s_;
  std::vector<cplx> data_;
};

void pair_naive_atom(const Device& dev, const SpectralGrid& grid, const GfTensors& g, const Shape& s, int a,
                     PairTable& pt, FlopLedger& led) {
  const DeviceStructure& st = dev.structure;
  const int n = s.n;
  const cplx pref(0.0, -grid.dE / (2.0 * kPi * s.nk));
  std::vector<cplx> x(s.nn()), z(s.nn());
  for (int iq = 0; iq < s.nq; ++iq)
    for (int iw = 0; iw < s.nw; ++iw) {
      const int sh = grid.shift(iw);
      for (int slot = 0; slot < s.nb; ++slot) {
        const int l = st.neighbor(a, slot);
        if (l < 0) continue;
        const int rev = st.reverse_slot(a, slot);
        for (int which = 0; which < 2; ++which) {
          cplx* tout = pt.at(which, iq, iw, a, slot);
          for (int ik = 0; ik < s.nk; ++ik) {
            const int kq = grid.k_plus_q(ik, iq);
            for (int ie = 0; ie + sh < s.ne; ++ie) {
              const cplx* ga = gsel(g, which).block(kq, ie + sh, a);
              const cplx* gl = gsel(g, 1 - which).block(ik, ie, l);
              for (int i = 0; i < kN3D; ++i)
                for (int j = 0; j < kN3D; ++j) {
                  small_matmul(n, dev.ops.dh(l, rev, i), ga, x.data(), false);
                  small_matmul(n, x.data(), dev.ops.dh(a, slot, j), z.data(), false);
                  cplx tr = 0.0;
                  for (int p = 0; p < n; ++p)
                    for (int q = 0; q < n; ++q) tr += z[p * n + q] * gl[q * n + p];
                  tout[i * kN3D + j] += pref * tr;
                  led.pi_madds += 2ull * n * n * n + static_cast<std::uint64_t>(n) * n;
                  led.products += 2;
                }
            }
          }
        }
      }
    }
}

// Same sum with ∇_jH_al·G_ll(E) hoisted out of the (qz, ω) stencil.
void pair_regrouped_atom(const Device& dev, const SpectralGrid& grid, const GfTensors& g, const Shape& s, int a,
                         PairTable& pt, FlopLedger& led) {
  const DeviceStructure& st = dev.structure;
  const int n = s.n;
  const std::size_t nn = s.nn();
  const cplx pref(0.0, -grid.dE / (2.0 * kPi * s.nk));
  std::vector<cplx> p(kN3D * nn), x(kN3D * nn);
  for (int slot = 0; slot < s.nb; ++slot) {
    const int l = st.neighbor(a, slot);
    if (l < 0) continue;
    const int rev = st.reverse_slot(a, slot);
    for (int which = 0; which < 2; ++which)
      for (int ik = 0; ik < s.nk; ++ik)
        for (int ie = 0; ie < s.ne; ++ie) {
          const cplx* gl = gsel(g, 1 - which).block(ik, ie, l);
          for (int j = 0; j < kN3D; ++j) small_matmul(n, dev.ops.dh(a, slot, j), gl, &p[j * nn], false);
          led.pi_madds += static_cast<std::uint64_t>(kN3D) * n * n * n;
          led.products += kN3D;
          for (int iq = 0; iq < s.nq; ++iq) {
            const int kq = grid.k_plus_q(ik, iq);
            for (int iw = 0; iw < s.nw; ++iw) {
              const int sh = grid.shift(iw);
              if (ie + sh >= s.ne) break;
              const cplx* ga = gsel(g, which).block(kq, ie + sh, a);
              for (int i = 0; i < kN3D; ++i) small_matmul(n, dev.ops.dh(l, rev, i), ga, &x[i * nn], false);
              cplx* tout = pt.at(which, iq, iw, a, slot);
              for (int i = 0; i < kN3D; ++i)
                for (int j = 0; j < kN3D; ++j) {
                  cplx tr = 0.0;
                  const cplx* xi = &x[i * nn];
                  const cplx* pj = &p[j * nn];
                  for (int r = 0; r < n; ++r)
                    for (int c = 0; c < n; ++c) tr += xi[r * n + c] * pj[c * n + r];
                  tout[i * kN3D + j] += pref * tr;
                }
              led.pi_madds += static_cast<std::uint64_t>(kN3D) * n * n * n + 9ull * n * n;
              led.products += kN3D;
            }
          }
        }
  }
}

}  // namespace

SelfEnergyTensors sse_compute(const Device& dev, const SpectralGrid& grid, const GfTensors& g, const SseOptions& opt,
                              FlopLedger* ledger) {
  validate_sse_inputs(dev, grid, g);
  const DeviceStructure& st = dev.structure;
  Shape s{st.na, st.nb, st.norb, grid.nkz(), grid.nqz(), grid.ne(), grid.nomega(), 0};
  s.es = static_cast<std::ptrdiff_t>(s.na) * s.n * s.n;

  SelfEnergyTensors out;
  out.sigma_lesser = ElectronTensor(s.nk, s.ne, s.na, s.n);
  out.sigma_greater = ElectronTensor(s.nk, s.ne, s.na, s.n);
  out.pi_lesser = PhononTensor(s.nq, s.nw, s.na, s.nb + 1, kN3D);
  out.pi_greater = PhononTensor(s.nq, s.nw, s.na, s.nb + 1, kN3D);
  ElectronTensor* sigma[2] = {&out.sigma_lesser, &out.sigma_greater};

  FlopLedger setup;
  const WeightTable wt(dev, grid, g, s, setup);
  PairTable pt(s);
  std::vector<FlopLedger> per_atom(s.na);
  parallel_for(s.na, opt.threads, [&](int a) {
    FlopLedger& led = per_atom[a];
    if (opt.variant == SseVariant::Naive) {
      sigma_naive_atom(dev, grid, g, s, wt, a, sigma, led);
      pair_naive_atom(dev, grid, g, s, a, pt, led);
    } else {
      sigma_regrouped_atom(dev, grid, g, s, wt, a, opt.variant == SseVariant::Mixed, opt.force_unit_scale, sigma,
                           led);
      pair_regrouped_atom(dev, grid, g, s, a, pt, led);
    }
  });

  // Π_al = T_al + T_la, Π_aa = -Σ_l Π_al
  PhononTensor* pi[2] = {&out.pi_lesser, &out.pi_greater};
  for (int which = 0; which < 2; ++which)
    for (int iq = 0; iq < s.nq; ++iq)
      for (int iw = 0; iw < s.nw; ++iw)
        for (int a = 0; a < s.na; ++a) {
          cplx* self = pi[which]->block(iq, iw, a, 0);
          for (int slot = 0; slot < s.nb; ++slot) {
            const int l = st.neighbor(a, slot);
            if (l < 0) continue;
            const cplx* tal = pt.at(which, iq, iw, a, slot);
            const cplx* tla = pt.at(which, iq, iw, l, st.reverse_slot(a, slot));
            cplx* dst = pi[which]->block(iq, iw, a, slot + 1);
            for (int t = 0; t < 9; ++t) {
              dst[t] = tal[t] + tla[t];
              self[t] -= dst[t];
            }
          }
        }

  if (ledger) {
    *ledger += setup;
    for (const auto& l : per_atom) *ledger += l;
  }
  return out;
}

}  // namespace negfmini
