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

#include "negfmini/dense.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace negfmini {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Partition: return "partition error";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Dimension: return "dimension error";
    case ErrorKind::Hermiticity: return "hermiticity error";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::SingularBlock: return "singular block";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Io: return "io error";
  }
  return "unknown";
}

CMatrix CMatrix::identity(int n) {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void CMatrix::set_zero() { std::fill(data_.begin(), data_.end(), cplx(0.0)); }

CMatrix CMatrix::adjoint() const {
  CMatrix r(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

CMatrix CMatrix::transpose() const {
  CMatrix r(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

static void check_same(const CMatrix& a, const CMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << op << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x" << b.cols();
    throw Error(ErrorKind::Dimension, os.str());
  }
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
  check_same(*this, o, "add");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
  check_same(*this, o, "sub");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

void matmul_acc(CMatrix& c, const CMatrix& a, const CMatrix& b, cplx alpha, OpCount* ops) {
  if (a.cols() != b.rows() || c.rows() != a.rows() || c.cols() != b.cols()) {
    std::ostringstream os;
    os << "matmul: cannot multiply " << a.rows() << "x" << a.cols() << " by " << b.rows() << "x" << b.cols();
    throw Error(ErrorKind::Dimension, os.str());
  }
  const int m = a.rows(), k = a.cols(), n = b.cols();
  const cplx* pa = a.data();
  const cplx* pb = b.data();
  cplx* pc = c.data();
  // i-k-j order keeps the innermost loop contiguous in B and C
  constexpr int kTile = 64;
  for (int k0 = 0; k0 < k; k0 += kTile) {
    const int k1 = std::min(k, k0 + kTile);
    for (int i = 0; i < m; ++i) {
      cplx* ci = pc + static_cast<std::size_t>(i) * n;
      for (int kk = k0; kk < k1; ++kk) {
        const cplx aik = alpha * pa[static_cast<std::size_t>(i) * k + kk];
        if (aik == cplx(0.0)) continue;
        const cplx* bk = pb + static_cast<std::size_t>(kk) * n;
        for (int j = 0; j < n; ++j) ci[j] += aik * bk[j];
      }
    }
  }
  if (ops) {
    ops->matmul_madds += static_cast<std::uint64_t>(m) * k * n;
    ops->matmuls += 1;
  }
}

CMatrix matmul(const CMatrix& a, const CMatrix& b, OpCount* ops) {
  CMatrix c(a.rows(), b.cols());
  matmul_acc(c, a, b, 1.0, ops);
  return c;
}

void small_matmul(int n, const cplx* a, const cplx* b, cplx* c, bool accumulate) {
  if (!accumulate) std::fill(c, c + static_cast<std::size_t>(n) * n, cplx(0.0));
  for (int i = 0; i < n; ++i) {
    cplx* ci = c + static_cast<std::size_t>(i) * n;
    for (int kk = 0; kk < n; ++kk) {
      const cplx aik = a[static_cast<std::size_t>(i) * n + kk];
      const cplx* bk = b + static_cast<std::size_t>(kk) * n;
      for (int j = 0; j < n; ++j) ci[j] += aik * bk[j];
    }
  }
}

CMatrix inverse(const CMatrix& a, OpCount* ops) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::Dimension, "inverse: matrix is not square");
  const int n = a.rows();
  CMatrix lu = a;
  CMatrix inv = CMatrix::identity(n);
  const double scale = std::max(max_abs(a), 1e-300);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(lu(col, col));
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(lu(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best <= 1e-14 * scale) {
      std::ostringstream os;
      os << "inverse: pivot " << col << " is numerically zero (|p|=" << best << ")";
      throw Error(ErrorKind::SingularBlock, os.str());
    }
    if (piv != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(lu(col, j), lu(piv, j));
        std::swap(inv(col, j), inv(piv, j));
      }
    }
    const cplx d = 1.0 / lu(col, col);
    for (int j = 0; j < n; ++j) {
      lu(col, j) *= d;
      inv(col, j) *= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const cplx f = lu(r, col);
      if (f == cplx(0.0)) continue;
      for (int j = col; j < n; ++j) lu(r, j) -= f * lu(col, j);
      for (int j = 0; j < n; ++j) inv(r, j) -= f * inv(col, j);
    }
  }
  if (ops) {
    ops->inverse_madds += static_cast<std::uint64_t>(n) * n * n;
    ops->inverses += 1;
  }
  return inv;
}

double max_abs(const CMatrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i]));
  return m;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  check_same(a, b, "diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double frobenius(const CMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a.data()[i]);
  return std::sqrt(s);
}

double hermiticity_defect(const CMatrix& a) {
  if (a.rows() != a.cols()) return INFINITY;
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
  return m;
}

cplx trace(const CMatrix& a) {
  cplx t = 0.0;
  for (int i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
  return t;
}

cplx trace_product(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) throw Error(ErrorKind::Dimension, "trace_product: shape mismatch");
  cplx t = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) t += a(i, k) * b(k, i);
  return t;
}

}  // namespace negfmini
