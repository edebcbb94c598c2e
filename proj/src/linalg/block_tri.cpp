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

#include "negfmini/block_tri.hpp"

#include <algorithm>
#include <sstream>

namespace negfmini {

BlockTriMatrix::BlockTriMatrix(int nb, int bd) : bnum(nb), blockdim(bd) {
  if (nb <= 0 || bd <= 0) throw Error(ErrorKind::Dimension, "BlockTriMatrix: bnum and blockdim must be positive");
  diag.assign(nb, CMatrix(bd, bd));
  upper.assign(nb - 1, CMatrix(bd, bd));
  lower.assign(nb - 1, CMatrix(bd, bd));
}

CMatrix BlockTriMatrix::to_dense() const {
  CMatrix m(dim(), dim());
  auto put = [&](const CMatrix& b, int bi, int bj) {
    for (int i = 0; i < blockdim; ++i)
      for (int j = 0; j < blockdim; ++j) m(bi * blockdim + i, bj * blockdim + j) = b(i, j);
  };
  for (int i = 0; i < bnum; ++i) put(diag[i], i, i);
  for (int i = 0; i + 1 < bnum; ++i) {
    put(upper[i], i, i + 1);
    put(lower[i], i + 1, i);
  }
  return m;
}

BlockTriMatrix BlockTriMatrix::from_dense(const CMatrix& m, int nb) {
  if (m.rows() != m.cols() || nb <= 0 || m.rows() % nb != 0)
    throw Error(ErrorKind::Partition, "BlockTriMatrix::from_dense: matrix not divisible into blocks");
  BlockTriMatrix t(nb, m.rows() / nb);
  const int bd = t.blockdim;
  auto get = [&](int bi, int bj) {
    CMatrix b(bd, bd);
    for (int i = 0; i < bd; ++i)
      for (int j = 0; j < bd; ++j) b(i, j) = m(bi * bd + i, bj * bd + j);
    return b;
  };
  for (int i = 0; i < nb; ++i) t.diag[i] = get(i, i);
  for (int i = 0; i + 1 < nb; ++i) {
    t.upper[i] = get(i, i + 1);
    t.lower[i] = get(i + 1, i);
  }
  return t;
}

void BlockTriMatrix::build_sparse() {
  upper_sparse.clear();
  lower_sparse.clear();
  for (const auto& b : upper) upper_sparse.push_back(SparseBlock::with_encodings(b));
  for (const auto& b : lower) lower_sparse.push_back(SparseBlock::with_encodings(b));
}

double BlockTriMatrix::hermiticity_defect() const {
  double d = 0.0;
  for (const auto& b : diag) d = std::max(d, negfmini::hermiticity_defect(b));
  for (std::size_t i = 0; i < upper.size(); ++i) d = std::max(d, max_abs_diff(lower[i], upper[i].adjoint()));
  return d;
}

static void check_shape(const BlockTriMatrix& a, const BlockTriMatrix& b) {
  if (a.bnum != b.bnum || a.blockdim != b.blockdim) {
    std::ostringstream os;
    os << "BlockTriMatrix: shapes differ (" << a.bnum << "x" << a.blockdim << " vs " << b.bnum << "x" << b.blockdim
       << ")";
    throw Error(ErrorKind::Dimension, os.str());
  }
}

BlockTriMatrix& BlockTriMatrix::operator+=(const BlockTriMatrix& o) {
  check_shape(*this, o);
  for (int i = 0; i < bnum; ++i) diag[i] += o.diag[i];
  for (int i = 0; i + 1 < bnum; ++i) {
    upper[i] += o.upper[i];
    lower[i] += o.lower[i];
  }
  upper_sparse.clear();
  lower_sparse.clear();
  return *this;
}

BlockTriMatrix& BlockTriMatrix::operator*=(cplx s) {
  for (auto& b : diag) b *= s;
  for (auto& b : upper) b *= s;
  for (auto& b : lower) b *= s;
  upper_sparse.clear();
  lower_sparse.clear();
  return *this;
}

BlockTriMatrix combine(cplx a, const BlockTriMatrix& x, cplx b, const BlockTriMatrix& y) {
  check_shape(x, y);
  BlockTriMatrix r(x.bnum, x.blockdim);
  auto mix = [&](const CMatrix& p, const CMatrix& q, CMatrix& out) {
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = a * p.data()[i] + b * q.data()[i];
  };
  for (int i = 0; i < x.bnum; ++i) mix(x.diag[i], y.diag[i], r.diag[i]);
  for (int i = 0; i + 1 < x.bnum; ++i) {
    mix(x.upper[i], y.upper[i], r.upper[i]);
    mix(x.lower[i], y.lower[i], r.lower[i]);
  }
  return r;
}

}  // namespace negfmini
