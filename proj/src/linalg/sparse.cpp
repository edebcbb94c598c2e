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

#include "negfmini/sparse.hpp"

#include <sstream>

namespace negfmini {

CsrMatrix CsrMatrix::from_dense(const CMatrix& m) {
  CsrMatrix s;
  s.rows = m.rows();
  s.cols = m.cols();
  s.row_ptr.reserve(s.rows + 1);
  s.row_ptr.push_back(0);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (m(i, j) != cplx(0.0)) {
        s.values.push_back(m(i, j));
        s.col_idx.push_back(j);
      }
    }
    s.row_ptr.push_back(static_cast<int>(s.values.size()));
  }
  return s;
}

CMatrix CsrMatrix::to_dense() const {
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) m(i, col_idx[p]) = values[p];
  return m;
}

CscMatrix CscMatrix::from_dense(const CMatrix& m) {
  CscMatrix s;
  s.rows = m.rows();
  s.cols = m.cols();
  s.col_ptr.reserve(s.cols + 1);
  s.col_ptr.push_back(0);
  for (int j = 0; j < m.cols(); ++j) {
    for (int i = 0; i < m.rows(); ++i) {
      if (m(i, j) != cplx(0.0)) {
        s.values.push_back(m(i, j));
        s.row_idx.push_back(i);
      }
    }
    s.col_ptr.push_back(static_cast<int>(s.values.size()));
  }
  return s;
}

CMatrix CscMatrix::to_dense() const {
  CMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int p = col_ptr[j]; p < col_ptr[j + 1]; ++p) m(row_idx[p], j) = values[p];
  return m;
}

SparseBlock SparseBlock::dense_only(CMatrix m) {
  SparseBlock b;
  b.dense = std::move(m);
  return b;
}

SparseBlock SparseBlock::with_encodings(CMatrix m) {
  SparseBlock b;
  b.csr = CsrMatrix::from_dense(m);
  b.csc = CscMatrix::from_dense(m);
  b.dense = std::move(m);
  return b;
}

double SparseBlock::density() const {
  if (dense.size() == 0) return 0.0;
  std::size_t nnz = 0;
  if (csr) {
    nnz = csr->nnz();
  } else {
    for (std::size_t i = 0; i < dense.size(); ++i) nnz += dense.data()[i] != cplx(0.0);
  }
  return static_cast<double>(nnz) / static_cast<double>(dense.size());
}

const char* to_string(TripleStrategy s) {
  switch (s) {
    case TripleStrategy::DenseDense: return "dense_dense";
    case TripleStrategy::SparseLeftThenRight: return "sparse_left_then_right";
    case TripleStrategy::SparseBothSides: return "sparse_both_sides";
  }
  return "?";
}

TripleStrategy parse_triple_strategy(const std::string& s) {
  if (s == "dense_dense") return TripleStrategy::DenseDense;
  if (s == "sparse_left_then_right") return TripleStrategy::SparseLeftThenRight;
  if (s == "sparse_both_sides") return TripleStrategy::SparseBothSides;
  throw Error(ErrorKind::InvalidArgument, "unknown triple-product strategy '" + s + "'");
}

CMatrix csr_times_dense(const CsrMatrix& a, const CMatrix& b, OpCount* ops) {
  if (a.cols != b.rows()) throw Error(ErrorKind::Dimension, "csr_times_dense: shape mismatch");
  const int n = b.cols();
  CMatrix c(a.rows, n);
  for (int i = 0; i < a.rows; ++i) {
    cplx* ci = c.data() + static_cast<std::size_t>(i) * n;
    for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
      const cplx v = a.values[p];
      const cplx* bk = b.data() + static_cast<std::size_t>(a.col_idx[p]) * n;
      for (int j = 0; j < n; ++j) ci[j] += v * bk[j];
    }
  }
  if (ops) {
    ops->matmul_madds += static_cast<std::uint64_t>(a.nnz()) * n;
    ops->matmuls += 1;
  }
  return c;
}

CMatrix dense_times_csc(const CMatrix& a, const CscMatrix& b, OpCount* ops) {
  if (a.cols() != b.rows) throw Error(ErrorKind::Dimension, "dense_times_csc: shape mismatch");
  const int m = a.rows();
  CMatrix c(m, b.cols);
  for (int j = 0; j < b.cols; ++j) {
    for (int p = b.col_ptr[j]; p < b.col_ptr[j + 1]; ++p) {
      const cplx v = b.values[p];
      const int k = b.row_idx[p];
      for (int i = 0; i < m; ++i) c(i, j) += a(i, k) * v;
    }
  }
  if (ops) {
    ops->matmul_madds += static_cast<std::uint64_t>(m) * b.nnz();
    ops->matmuls += 1;
  }
  return c;
}

CMatrix triple_product(const SparseBlock& f, const CMatrix& g, const SparseBlock& e, TripleStrategy strategy,
                       OpCount* ops) {
  if (f.dense.cols() != g.rows() || g.cols() != e.dense.rows()) {
    std::ostringstream os;
    os << "triple_product: cannot chain " << f.dense.rows() << "x" << f.dense.cols() << " · " << g.rows() << "x"
       << g.cols() << " · " << e.dense.rows() << "x" << e.dense.cols();
    throw Error(ErrorKind::Dimension, os.str());
  }
  switch (strategy) {
    case TripleStrategy::DenseDense:
      return matmul(matmul(f.dense, g, ops), e.dense, ops);
    case TripleStrategy::SparseLeftThenRight:
      if (!f.csr) throw Error(ErrorKind::InvalidArgument, "triple_product: sparse_left_then_right needs a CSR encoding of F");
      return matmul(csr_times_dense(*f.csr, g, ops), e.dense, ops);
    case TripleStrategy::SparseBothSides:
      if (!f.csr || !e.csc)
        throw Error(ErrorKind::InvalidArgument, "triple_product: sparse_both_sides needs sparse encodings of F and E");
      return dense_times_csc(csr_times_dense(*f.csr, g, ops), *e.csc, ops);
  }
  throw Error(ErrorKind::InvalidArgument, "triple_product: bad strategy");
}

}  // namespace negfmini
