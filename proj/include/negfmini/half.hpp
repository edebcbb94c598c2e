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

#include <cstdint>
#include <vector>

#include "negfmini/batch.hpp"

namespace negfmini {

inline constexpr double kHalfMax = 65504.0;
inline constexpr double kScaleHeadroom = 1024.0;

/// IEEE binary16 encode with round-half-to-even; out-of-range magnitudes clamp to ±65504.
std::uint16_t to_half(double x);
double from_half(std::uint16_t h);
/// from_half(to_half(x)) without the bit packing.
double round_to_half(double x);

/// Split-complex half batch: all real parts of all matrices, then all imaginary parts.
/// Each matrix occupies an npad×npad tile (zero padded).
struct HalfComplexBatch {
  int count = 0;
  int n = 0;
  int npad = 0;
  double scale = 1.0;
  std::vector<std::uint16_t> re;
  std::vector<std::uint16_t> im;

  std::size_t tile() const { return static_cast<std::size_t>(npad) * npad; }
  /// Builds from a full-precision batch; every entry is multiplied by `scale` before rounding.
  static HalfComplexBatch from(const SmallMatBatch& src, double scale);
};

/// Largest power of two s with s·max|entry| ≤ 1024; 1 for an all-zero batch.
double compute_scale(const SmallMatBatch& batch);
double compute_scale_of_max(double max_abs_entry);

/// Cacc[k] += (A[k]·B[k]) / (scaleA·scaleB). Inputs are half values, products
/// and accumulation are carried in double. A batch with count 1 broadcasts.
/// The batch length is cacc.count; A is read from matrix a_first onwards.
void sbsmm_half(const HalfComplexBatch& a, const HalfComplexBatch& b, const SmallMatBatch& cacc,
                OpCount* ops = nullptr, int a_first = 0);

}  // namespace negfmini
