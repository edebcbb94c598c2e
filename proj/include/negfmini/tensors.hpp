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

#include <algorithm>
#include <cstddef>
#include <vector>

#include "negfmini/common.hpp"

namespace negfmini {

/// [Nkz, NE, Na, Norb, Norb]
struct ElectronTensor {
  int nk = 0, ne = 0, na = 0, norb = 0;
  std::vector<cplx> data;

  ElectronTensor() = default;
  ElectronTensor(int nk_, int ne_, int na_, int norb_)
      : nk(nk_), ne(ne_), na(na_), norb(norb_), data(static_cast<std::size_t>(nk_) * ne_ * na_ * norb_ * norb_) {}

  std::size_t block_size() const { return static_cast<std::size_t>(norb) * norb; }
  std::size_t offset(int ik, int ie, int a) const {
    return ((static_cast<std::size_t>(ik) * ne + ie) * na + a) * block_size();
  }
  cplx* block(int ik, int ie, int a) { return data.data() + offset(ik, ie, a); }
  const cplx* block(int ik, int ie, int a) const { return data.data() + offset(ik, ie, a); }
  /// Elements between the same atom block at consecutive energies.
  std::ptrdiff_t energy_stride() const { return static_cast<std::ptrdiff_t>(na) * block_size(); }
  void set_zero() { std::fill(data.begin(), data.end(), cplx(0.0)); }
  bool same_shape(const ElectronTensor& o) const { return nk == o.nk && ne == o.ne && na == o.na && norb == o.norb; }
};

/// [Nqz, Nω, Na, Nb+1, N3D, N3D]; slot 0 is the self block, slot s+1 the s-th neighbor.
struct PhononTensor {
  int nq = 0, nw = 0, na = 0, nslot = 0, n3d = 0;
  std::vector<cplx> data;

  PhononTensor() = default;
  PhononTensor(int nq_, int nw_, int na_, int nslot_, int n3d_)
      : nq(nq_), nw(nw_), na(na_), nslot(nslot_), n3d(n3d_),
        data(static_cast<std::size_t>(nq_) * nw_ * na_ * nslot_ * n3d_ * n3d_) {}

  std::size_t block_size() const { return static_cast<std::size_t>(n3d) * n3d; }
  std::size_t offset(int iq, int iw, int a, int slot) const {
    return (((static_cast<std::size_t>(iq) * nw + iw) * na + a) * nslot + slot) * block_size();
  }
  cplx* block(int iq, int iw, int a, int slot) { return data.data() + offset(iq, iw, a, slot); }
  const cplx* block(int iq, int iw, int a, int slot) const { return data.data() + offset(iq, iw, a, slot); }
  void set_zero() { std::fill(data.begin(), data.end(), cplx(0.0)); }
  bool same_shape(const PhononTensor& o) const {
    return nq == o.nq && nw == o.nw && na == o.na && nslot == o.nslot && n3d == o.n3d;
  }
};

/// Lesser off-diagonal blocks (n+1, n) of every point: [Nk, NE, bnum-1, bd, bd].
struct BondTensor {
  int nk = 0, ne = 0, nint = 0, bd = 0;
  std::vector<cplx> data;

  BondTensor() = default;
  BondTensor(int nk_, int ne_, int nint_, int bd_)
      : nk(nk_), ne(ne_), nint(nint_), bd(bd_), data(static_cast<std::size_t>(nk_) * ne_ * nint_ * bd_ * bd_) {}
  bool empty() const { return data.empty() && nint != 0; }
  cplx* block(int ik, int ie, int n) {
    return data.data() + ((static_cast<std::size_t>(ik) * ne + ie) * nint + n) * bd * bd;
  }
  const cplx* block(int ik, int ie, int n) const {
    return data.data() + ((static_cast<std::size_t>(ik) * ne + ie) * nint + n) * bd * bd;
  }
};

struct SelfEnergyTensors {
  ElectronTensor sigma_lesser, sigma_greater;
  PhononTensor pi_lesser, pi_greater;
};

}  // namespace negfmini
