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

#include <optional>
#include <string>
#include <vector>

#include "negfmini/dense.hpp"

namespace negfmini {

struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<cplx> values;
  std::vector<int> col_idx;
  std::vector<int> row_ptr;

  static CsrMatrix from_dense(const CMatrix& m);
  CMatrix to_dense() const;
  std::size_t nnz() const { return values.size(); }
};

struct CscMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<cplx> values;
  std::vector<int> row_idx;
  std::vector<int> col_ptr;

  static CscMatrix from_dense(const CMatrix& m);
  CMatrix to_dense() const;
  std::size_t nnz() const { return values.size(); }
};

/// Dense block with optional row- and column-compressed copies kept side by side.
struct SparseBlock {
  CMatrix dense;
  std::optional<CsrMatrix> csr;
  std::optional<CscMatrix> csc;

  static SparseBlock dense_only(CMatrix m);
  static SparseBlock with_encodings(CMatrix m);
  bool has_sparse() const { return csr.has_value() && csc.has_value(); }
  double density() const;
};

enum class TripleStrategy { DenseDense, SparseLeftThenRight, SparseBothSides };

const char* to_string(TripleStrategy s);
TripleStrategy parse_triple_strategy(const std::string& s);

/// CSR · dense. Counts nnz(A)·cols(B) multiply-adds.
CMatrix csr_times_dense(const CsrMatrix& a, const CMatrix& b, OpCount* ops = nullptr);
/// dense · CSC. Counts rows(A)·nnz(B) multiply-adds.
CMatrix dense_times_csc(const CMatrix& a, const CscMatrix& b, OpCount* ops = nullptr);

/// R = F·gR·E under the requested evaluation strategy.
///  dense_dense:            (F·gR)·E, both dense
///  sparse_left_then_right: (F_csr·gR) then dense ·E
///  sparse_both_sides:      (F_csr·gR) then ·E_csc
CMatrix triple_product(const SparseBlock& f, const CMatrix& g, const SparseBlock& e, TripleStrategy strategy,
                       OpCount* ops = nullptr);

}  // namespace negfmini
