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

#include <cstddef>
#include <vector>

#include "negfmini/common.hpp"

namespace negfmini {

/// Row-major dense complex matrix.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {}

  static CMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  std::size_t size() const { return data_.size(); }

  cplx& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const cplx& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }

  void set_zero();
  CMatrix adjoint() const;
  CMatrix transpose() const;

  CMatrix& operator+=(const CMatrix& o);
  CMatrix& operator-=(const CMatrix& o);
  CMatrix& operator*=(cplx s);

  bool operator==(const CMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<cplx> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(cplx s, CMatrix a);

/// C = A·B. Counts m·k·n multiply-adds.
CMatrix matmul(const CMatrix& a, const CMatrix& b, OpCount* ops = nullptr);

/// C += alpha·A·B.
void matmul_acc(CMatrix& c, const CMatrix& a, const CMatrix& b, cplx alpha = 1.0, OpCount* ops = nullptr);

/// Raw kernel on contiguous row-major n×n operands: c (+)= a·b.
void small_matmul(int n, const cplx* a, const cplx* b, cplx* c, bool accumulate);

/// Dense inverse by LU with partial pivoting. Counts n³ multiply-adds.
/// Throws SingularBlock when a pivot underflows relative to the matrix scale.
CMatrix inverse(const CMatrix& a, OpCount* ops = nullptr);

double max_abs(const CMatrix& a);
double max_abs_diff(const CMatrix& a, const CMatrix& b);
double frobenius(const CMatrix& a);
double hermiticity_defect(const CMatrix& a);
cplx trace(const CMatrix& a);
/// tr(A·B) without forming the product.
cplx trace_product(const CMatrix& a, const CMatrix& b);

}  // namespace negfmini
