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

#include "negfmini/batch.hpp"

#include <sstream>

#include "negfmini/dense.hpp"

namespace negfmini {

int padded_dim(int n, int multiple) { return multiple * ((n + multiple - 1) / multiple); }

double padded_useful_ratio(int n, int multiple) {
  const double r = static_cast<double>(n) / padded_dim(n, multiple);
  return r * r * r;
}

void validate_input_batch(const SmallMatBatch& b, const char* name) {
  const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(b.n) * b.n;
  if (b.count < 0 || b.n <= 0 || (b.count > 0 && b.data == nullptr) || (b.stride != 0 && b.stride < nn)) {
    std::ostringstream os;
    os << "sbsmm: batch " << name << " has invalid layout (count=" << b.count << ", n=" << b.n
       << ", stride=" << b.stride << ")";
    throw Error(ErrorKind::Dimension, os.str());
  }
}

void validate_output_batch(const SmallMatBatch& b, const char* name) {
  validate_input_batch(b, name);
  if (b.count > 1 && b.stride < static_cast<std::ptrdiff_t>(b.n) * b.n) {
    std::ostringstream os;
    os << "sbsmm: output batch " << name << " must not alias (stride=" << b.stride << ")";
    throw Error(ErrorKind::Dimension, os.str());
  }
}

static void check_pair(const SmallMatBatch& a, const SmallMatBatch& b) {
  if (a.count != b.count || a.n != b.n) {
    std::ostringstream os;
    os << "sbsmm: batch shapes differ (" << a.count << "x" << a.n << " vs " << b.count << "x" << b.n << ")";
    throw Error(ErrorKind::Dimension, os.str());
  }
}

static void count_ops(OpCount* ops, int count, int n) {
  if (!ops) return;
  const std::uint64_t n3 = static_cast<std::uint64_t>(n) * n * n;
  const std::uint64_t p = static_cast<std::uint64_t>(padded_dim(n));
  ops->matmul_madds += n3 * count;
  ops->padded_madds += p * p * p * count;
  ops->matmuls += count;
}

void sbsmm(const SmallMatBatch& a, const SmallMatBatch& b, const SmallMatBatch& c, bool accumulate, OpCount* ops) {
  validate_input_batch(a, "A");
  validate_input_batch(b, "B");
  validate_output_batch(c, "C");
  check_pair(a, b);
  check_pair(a, c);
  for (int k = 0; k < a.count; ++k) small_matmul(a.n, a.matrix(k), b.matrix(k), c.matrix(k), accumulate);
  count_ops(ops, a.count, a.n);
}

void sbsmm_reduce(const SmallMatBatch& a, const SmallMatBatch& b, cplx* c, OpCount* ops) {
  validate_input_batch(a, "A");
  validate_input_batch(b, "B");
  check_pair(a, b);
  for (int k = 0; k < a.count; ++k) small_matmul(a.n, a.matrix(k), b.matrix(k), c, true);
  count_ops(ops, a.count, a.n);
}

}  // namespace negfmini
