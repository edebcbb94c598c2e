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

#include "negfmini/dense.hpp"
#include "negfmini/sparse.hpp"

namespace negfmini {

/// Block-tridiagonal operator with bnum square blocks of size blockdim.
/// upper[i] couples block i to i+1, lower[i] couples i+1 to i.
struct BlockTriMatrix {
  int bnum = 0;
  int blockdim = 0;
  std::vector<CMatrix> diag;
  std::vector<CMatrix> upper;
  std::vector<CMatrix> lower;
  // optional compressed copies of the off-diagonal blocks
  std::vector<SparseBlock> upper_sparse;
  std::vector<SparseBlock> lower_sparse;

  BlockTriMatrix() = default;
  BlockTriMatrix(int bnum, int blockdim);

  int dim() const { return bnum * blockdim; }
  CMatrix to_dense() const;
  static BlockTriMatrix from_dense(const CMatrix& m, int bnum);

  void build_sparse();
  bool has_sparse() const { return !upper_sparse.empty() || bnum == 1; }

  /// max |A - A†| over all stored blocks.
  double hermiticity_defect() const;

  BlockTriMatrix& operator+=(const BlockTriMatrix& o);
  BlockTriMatrix& operator*=(cplx s);
};

/// a·X + b·Y, blockwise.
BlockTriMatrix combine(cplx a, const BlockTriMatrix& x, cplx b, const BlockTriMatrix& y);

}  // namespace negfmini
