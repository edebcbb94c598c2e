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

#include "negfmini/half.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace negfmini {

namespace {
constexpr double kMinNormal = 6.103515625e-05;     // 2^-14
constexpr double kSubnormalStep = 5.9604644775390625e-08;  // 2^-24
}  // namespace

double round_to_half(double x) {
  if (std::isnan(x)) return x;
  const double a = std::fabs(x);
  if (a == 0.0) return x;
  double r;
  if (a >= kHalfMax) {
    r = kHalfMax;
  } else if (a < kMinNormal) {
    r = std::nearbyint(a / kSubnormalStep) * kSubnormalStep;
  } else {
    int e;
    std::frexp(a, &e);  // a = m·2^e, m in [0.5, 1)
    const double q = std::ldexp(1.0, e - 11);
    r = std::nearbyint(a / q) * q;
    if (r > kHalfMax) r = kHalfMax;
  }
  return std::copysign(r, x);
}

std::uint16_t to_half(double x) {
  if (std::isnan(x)) return 0x7e00;
  const double r = round_to_half(x);
  const std::uint16_t sign = std::signbit(r) ? 0x8000 : 0;
  const double a = std::fabs(r);
  if (a == 0.0) return sign;
  if (a < kMinNormal) return static_cast<std::uint16_t>(sign | static_cast<std::uint16_t>(a / kSubnormalStep));
  int e;
  const double m = std::frexp(a, &e);  // a = (2m)·2^(e-1)
  const int biased = e - 1 + 15;
  const auto mant = static_cast<std::uint16_t>(std::lround((2.0 * m - 1.0) * 1024.0));
  return static_cast<std::uint16_t>(sign | (biased << 10) | mant);
}

double from_half(std::uint16_t h) {
  const bool neg = (h & 0x8000) != 0;
  const int exp = (h >> 10) & 0x1f;
  const int mant = h & 0x3ff;
  double v;
  if (exp == 0) {
    v = mant * kSubnormalStep;
  } else if (exp == 31) {
    v = mant ? NAN : INFINITY;
  } else {
    v = std::ldexp(1.0 + mant / 1024.0, exp - 15);
  }
  return neg ? -v : v;
}

HalfComplexBatch HalfComplexBatch::from(const SmallMatBatch& src, double scale) {
  validate_input_batch(src, "half source");
  HalfComplexBatch h;
  h.count = src.count;
  h.n = src.n;
  h.npad = padded_dim(src.n);
  h.scale = scale;
  const std::size_t tile = h.tile();
  h.re.assign(tile * src.count, 0);
  h.im.assign(tile * src.count, 0);
  for (int k = 0; k < src.count; ++k) {
    const cplx* m = src.matrix(k);
    for (int i = 0; i < src.n; ++i) {
      for (int j = 0; j < src.n; ++j) {
        const cplx v = m[static_cast<std::size_t>(i) * src.n + j] * scale;
        const std::size_t at = tile * k + static_cast<std::size_t>(i) * h.npad + j;
        h.re[at] = to_half(v.real());
        h.im[at] = to_half(v.imag());
      }
    }
  }
  return h;
}

double compute_scale_of_max(double max_abs_entry) {
  if (!(max_abs_entry > 0.0) || !std::isfinite(max_abs_entry)) return 1.0;
  // largest p with 2^p·max ≤ headroom
  int p = static_cast<int>(std::floor(std::log2(kScaleHeadroom / max_abs_entry)));
  while (std::ldexp(max_abs_entry, p + 1) <= kScaleHeadroom) ++p;
  while (std::ldexp(max_abs_entry, p) > kScaleHeadroom) --p;
  return std::ldexp(1.0, p);
}

double compute_scale(const SmallMatBatch& batch) {
  validate_input_batch(batch, "scale source");
  double m = 0.0;
  const int count = batch.stride == 0 ? std::min(batch.count, 1) : batch.count;
  const std::size_t nn = static_cast<std::size_t>(batch.n) * batch.n;
  for (int k = 0; k < count; ++k) {
    const cplx* p = batch.matrix(k);
    for (std::size_t i = 0; i < nn; ++i) m = std::max({m, std::fabs(p[i].real()), std::fabs(p[i].imag())});
  }
  return compute_scale_of_max(m);
}

static void decode_tile(const HalfComplexBatch& h, int k, std::vector<double>& re, std::vector<double>& im) {
  const std::size_t tile = h.tile();
  re.resize(static_cast<std::size_t>(h.n) * h.n);
  im.resize(re.size());
  for (int i = 0; i < h.n; ++i) {
    for (int j = 0; j < h.n; ++j) {
      const std::size_t at = tile * k + static_cast<std::size_t>(i) * h.npad + j;
      re[static_cast<std::size_t>(i) * h.n + j] = from_half(h.re[at]);
      im[static_cast<std::size_t>(i) * h.n + j] = from_half(h.im[at]);
    }
  }
}

void sbsmm_half(const HalfComplexBatch& a, const HalfComplexBatch& b, const SmallMatBatch& cacc, OpCount* ops,
                int a_first) {
  validate_output_batch(cacc, "Cacc");
  const int count = cacc.count;
  const bool a_ok = a.count == 1 ? a_first == 0 : (a_first >= 0 && a_first + count <= a.count);
  const bool b_ok = b.count == 1 || b.count == count;
  if (a.n != b.n || a.n != cacc.n || !a_ok || !b_ok) {
    std::ostringstream os;
    os << "sbsmm_half: batch shapes differ (A " << a.count << "x" << a.n << ", B " << b.count << "x" << b.n
       << ", C " << cacc.count << "x" << cacc.n << ")";
    throw Error(ErrorKind::Dimension, os.str());
  }
  const int n = a.n;
  const double inv = 1.0 / (a.scale * b.scale);
  std::vector<double> ar, ai, br, bi, cr(static_cast<std::size_t>(n) * n), ci(cr.size());
  int loaded_a = -1, loaded_b = -1;
  for (int k = 0; k < count; ++k) {
    const int ka = a.count == 1 ? 0 : a_first + k;
    const int kb = b.count == 1 ? 0 : k;
    if (ka != loaded_a) decode_tile(a, ka, ar, ai), loaded_a = ka;
    if (kb != loaded_b) decode_tile(b, kb, br, bi), loaded_b = kb;
    std::fill(cr.begin(), cr.end(), 0.0);
    std::fill(ci.begin(), ci.end(), 0.0);
    // four real sub-products per complex product
    for (int i = 0; i < n; ++i) {
      for (int l = 0; l < n; ++l) {
        const double xr = ar[static_cast<std::size_t>(i) * n + l];
        const double xi = ai[static_cast<std::size_t>(i) * n + l];
        const double* yr = &br[static_cast<std::size_t>(l) * n];
        const double* yi = &bi[static_cast<std::size_t>(l) * n];
        double* zr = &cr[static_cast<std::size_t>(i) * n];
        double* zi = &ci[static_cast<std::size_t>(i) * n];
        for (int j = 0; j < n; ++j) {
          zr[j] += xr * yr[j] - xi * yi[j];
          zi[j] += xr * yi[j] + xi * yr[j];
        }
      }
    }
    cplx* c = cacc.matrix(k);
    for (std::size_t t = 0; t < cr.size(); ++t) c[t] += cplx(cr[t] * inv, ci[t] * inv);
  }
  if (ops) {
    const std::uint64_t n3 = static_cast<std::uint64_t>(n) * n * n;
    const std::uint64_t p = static_cast<std::uint64_t>(a.npad);
    ops->matmul_madds += n3 * count;
    ops->padded_madds += p * p * p * count;
    ops->matmuls += count;
  }
}

}  // namespace negfmini
