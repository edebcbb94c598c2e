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

/// Non-owning view of `count` row-major n×n matrices spaced `stride` elements apart.
/// An input operand may use stride 0 to broadcast one matrix over the batch.
struct SmallMatBatch {
  int count = 0;
  int n = 0;
  std::ptrdiff_t stride = 0;
  cplx* data = nullptr;

  cplx* matrix(int k) const { return data + static_cast<std::ptrdiff_t>(k) * stride; }
};

/// Owning contiguous batch (stride n²).
class BatchBuffer {
 public:
  BatchBuffer() = default;
  BatchBuffer(int count, int n) : count_(count), n_(n), storage_(static_cast<std::size_t>(count) * n * n) {}
  SmallMatBatch view() { return {count_, n_, static_cast<std::ptrdiff_t>(n_) * n_, storage_.data()}; }
  std::vector<cplx>& storage() { return storage_; }
  const std::vector<cplx>& storage() const { return storage_; }

 private:
  int count_ = 0;
  int n_ = 0;
  std::vector<cplx> storage_;
};

/// C[k] (+)= A[k]·B[k] for k < count. Counts count·n³ useful multiply-adds and
/// the padded-execution equivalent count·npad³.
void sbsmm(const SmallMatBatch& a, const SmallMatBatch& b, const SmallMatBatch& c, bool accumulate,
           OpCount* ops = nullptr);

/// Same contract, but C has stride 0 semantics replaced by a single reduction target:
/// C += Σ_k A[k]·B[k].
void sbsmm_reduce(const SmallMatBatch& a, const SmallMatBatch& b, cplx* c, OpCount* ops = nullptr);

int padded_dim(int n, int multiple = 16);
/// Fraction of useful work in a padded execution: (n/npad)³.
double padded_useful_ratio(int n, int multiple = 16);

void validate_input_batch(const SmallMatBatch& b, const char* name);
void validate_output_batch(const SmallMatBatch& b, const char* name);

}  // namespace negfmini
