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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "negfmini/batch.hpp"
#include "negfmini/block_tri.hpp"
#include "negfmini/dense.hpp"
#include "negfmini/half.hpp"
#include "negfmini/sparse.hpp"

using namespace negfmini;

namespace {

CMatrix sparse_random(std::mt19937_64& rng, int n, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> nd;
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (u(rng) < density) m(i, j) = cplx(nd(rng), nd(rng));
  return m;
}

std::vector<cplx> loop_products(const std::vector<cplx>& a, const std::vector<cplx>& b, int count, int n) {
  std::vector<cplx> c(static_cast<std::size_t>(count) * n * n);
  for (int k = 0; k < count; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cplx s = 0.0;
        for (int p = 0; p < n; ++p) s += a[k * n * n + i * n + p] * b[k * n * n + p * n + j];
        c[k * n * n + i * n + j] = s;
      }
  return c;
}

}  // namespace

TEST_CASE("dense matmul and inverse agree with Eigen") {
  std::mt19937_64 rng(1);
  const CMatrix a = oracle::random_matrix(rng, 7, 5), b = oracle::random_matrix(rng, 5, 6);
  OpCount ops;
  const CMatrix c = matmul(a, b, &ops);
  CHECK(ops.matmul_madds == 7u * 5 * 6);
  const oracle::EMat ref = oracle::to_eigen(a) * oracle::to_eigen(b);
  CHECK(oracle::max_abs_diff_block(ref, 0, 0, c) < 1e-13);
  const CMatrix s = oracle::random_matrix(rng, 9, 9);
  const CMatrix inv = inverse(s);
  CHECK(oracle::max_abs_diff_block(oracle::to_eigen(s).inverse(), 0, 0, inv) < 1e-10);
  CHECK(max_abs_diff(matmul(s, inv), CMatrix::identity(9)) < 1e-10);
}

TEST_CASE("inverse of a singular block is rejected") {
  CMatrix z(3, 3);
  CHECK_THROWS_AS(inverse(z), Error);
  try {
    inverse(z);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularBlock);
  }
}

TEST_CASE("trace helpers") {
  std::mt19937_64 rng(2);
  const CMatrix a = oracle::random_matrix(rng, 4, 4), b = oracle::random_matrix(rng, 4, 4);
  CHECK(std::abs(trace_product(a, b) - trace(matmul(a, b))) < 1e-12);
  const CMatrix h = oracle::random_hermitian(rng, 5);
  CHECK(hermiticity_defect(h) == 0.0);
}

TEST_CASE("CSR and CSC round trips") {
  std::mt19937_64 rng(3);
  const CMatrix m = sparse_random(rng, 20, 0.2);
  CHECK(CsrMatrix::from_dense(m).to_dense() == m);
  CHECK(CscMatrix::from_dense(m).to_dense() == m);
}

TEST_CASE("triple product with identity operators returns g exactly") {
  std::mt19937_64 rng(4);
  const CMatrix g = oracle::random_matrix(rng, 6, 6);
  const auto f = SparseBlock::with_encodings(CMatrix::identity(6));
  for (auto s : {TripleStrategy::DenseDense, TripleStrategy::SparseLeftThenRight, TripleStrategy::SparseBothSides})
    CHECK(triple_product(f, g, f, s) == g);
}

TEST_CASE("triple product strategies agree and count exactly") {
  std::mt19937_64 rng(5);
  const int n = 64;
  const auto f = SparseBlock::with_encodings(sparse_random(rng, n, 0.1));
  const auto e = SparseBlock::with_encodings(sparse_random(rng, n, 0.1));
  const CMatrix g = oracle::random_matrix(rng, n, n);
  OpCount dd, sl, sb;
  const CMatrix r0 = triple_product(f, g, e, TripleStrategy::DenseDense, &dd);
  const CMatrix r1 = triple_product(f, g, e, TripleStrategy::SparseLeftThenRight, &sl);
  const CMatrix r2 = triple_product(f, g, e, TripleStrategy::SparseBothSides, &sb);
  const double scale = max_abs(r0);
  CHECK(max_abs_diff(r0, r1) <= 1e-12 * scale);
  CHECK(max_abs_diff(r0, r2) <= 1e-12 * scale);
  const std::uint64_t nnz_f = f.csr->nnz(), nnz_e = e.csc->nnz(), n2 = n;
  CHECK(dd.matmul_madds == 2 * n2 * n2 * n2);
  CHECK(sl.matmul_madds == nnz_f * n2 + n2 * n2 * n2);
  CHECK(sb.matmul_madds == nnz_f * n2 + n2 * nnz_e);
  const double density = 0.5 * (f.density() + e.density());
  CHECK(static_cast<double>(sb.matmul_madds) <= 2.0 * density * static_cast<double>(dd.matmul_madds));
}

TEST_CASE("triple product rejects mismatched shapes and missing encodings") {
  const auto f = SparseBlock::dense_only(CMatrix::identity(3));
  CHECK_THROWS_AS(triple_product(f, CMatrix(4, 4), f, TripleStrategy::DenseDense), Error);
  CHECK_THROWS_AS(triple_product(f, CMatrix(3, 3), f, TripleStrategy::SparseBothSides), Error);
}

TEST_CASE("sbsmm identity and loop oracle") {
  {
    BatchBuffer a(1, 12), b(1, 12), c(1, 12);
    for (int i = 0; i < 12; ++i) a.storage()[i * 12 + i] = b.storage()[i * 12 + i] = 1.0;
    sbsmm(a.view(), b.view(), c.view(), false);
    CHECK(c.storage() == a.storage());
  }
  std::mt19937_64 rng(6);
  const int count = 210, n = 12;
  BatchBuffer a(count, n), b(count, n), c(count, n);
  oracle::fill_random(a.storage(), rng);
  oracle::fill_random(b.storage(), rng);
  OpCount ops;
  sbsmm(a.view(), b.view(), c.view(), false, &ops);
  const auto ref = loop_products(a.storage(), b.storage(), count, n);
  double err = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) err = std::max(err, std::abs(ref[i] - c.storage()[i]));
  CHECK(err <= 1e-13 * oracle::max_abs(ref));
  CHECK(ops.matmul_madds == static_cast<std::uint64_t>(count) * n * n * n);
  CHECK(ops.padded_madds == static_cast<std::uint64_t>(count) * 16 * 16 * 16);
  CHECK(static_cast<double>(ops.matmul_madds) / static_cast<double>(ops.padded_madds) ==
        doctest::Approx(0.421875));
  CHECK(padded_useful_ratio(12) == doctest::Approx(0.421875));
}

TEST_CASE("sbsmm stride-0 broadcast and split accumulation") {
  std::mt19937_64 rng(7);
  const int count = 30, n = 5;
  BatchBuffer a(count, n), c1(count, n), c2(count, n);
  oracle::fill_random(a.storage(), rng);
  std::vector<cplx> w(n * n);
  oracle::fill_random(w, rng);
  const SmallMatBatch wb{count, n, 0, w.data()};
  sbsmm(a.view(), wb, c1.view(), true);
  // same product in two accumulating halves
  const std::ptrdiff_t nn = n * n;
  for (int half = 0; half < 2; ++half) {
    const int first = half * 13, cnt = half == 0 ? 13 : count - 13;
    sbsmm(SmallMatBatch{cnt, n, nn, a.storage().data() + first * nn}, SmallMatBatch{cnt, n, 0, w.data()},
          SmallMatBatch{cnt, n, nn, c2.storage().data() + first * nn}, true);
  }
  CHECK(c1.storage() == c2.storage());
  // accumulate twice equals 2×
  sbsmm(a.view(), wb, c1.view(), true);
  for (std::size_t i = 0; i < c1.storage().size(); ++i)
    CHECK(std::abs(c1.storage()[i] - 2.0 * c2.storage()[i]) <= 1e-12 * (1.0 + std::abs(c1.storage()[i])));
}

TEST_CASE("sbsmm_reduce sums the batch") {
  std::mt19937_64 rng(8);
  const int count = 9, n = 4;
  BatchBuffer a(count, n), b(count, n), c(count, n);
  oracle::fill_random(a.storage(), rng);
  oracle::fill_random(b.storage(), rng);
  sbsmm(a.view(), b.view(), c.view(), false);
  std::vector<cplx> sum(n * n), red(n * n);
  for (int k = 0; k < count; ++k)
    for (int i = 0; i < n * n; ++i) sum[i] += c.storage()[k * n * n + i];
  sbsmm_reduce(a.view(), b.view(), red.data());
  for (int i = 0; i < n * n; ++i) CHECK(std::abs(sum[i] - red[i]) < 1e-12);
}

TEST_CASE("sbsmm rejects inconsistent batches") {
  BatchBuffer a(2, 3), b(3, 3), c(2, 3), d(2, 4);
  CHECK_THROWS_AS(sbsmm(a.view(), b.view(), c.view(), false), Error);
  CHECK_THROWS_AS(sbsmm(a.view(), a.view(), d.view(), false), Error);
  CHECK_THROWS_AS(sbsmm(a.view(), a.view(), SmallMatBatch{2, 3, 0, c.storage().data()}, false), Error);
}

TEST_CASE("half conversion") {
  CHECK(to_half(1.0) == 0x3C00);
  CHECK(to_half(-2.0) == 0xC000);
  CHECK(to_half(65504.0) == 0x7BFF);
  CHECK(from_half(0x7BFF) == 65504.0);
  CHECK(from_half(0x0001) == std::ldexp(1.0, -24));
  CHECK(from_half(to_half(1e-9)) == 0.0);
  // ties round to even: 1 + 2^-11 lies halfway between 1 and 1 + 2^-10
  CHECK(round_to_half(1.0 + std::ldexp(1.0, -11)) == 1.0);
  CHECK(round_to_half(1.0 + 3 * std::ldexp(1.0, -11)) == 1.0 + std::ldexp(1.0, -9));
  // out-of-range values clamp to the largest finite half
  CHECK(round_to_half(1e6) == 65504.0);
  CHECK(round_to_half(-1e6) == -65504.0);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd(0.0, 100.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = nd(rng) * std::pow(10.0, static_cast<int>(i % 9) - 6);
    const double h = round_to_half(x);
    CHECK(round_to_half(h) == h);
  }
}

TEST_CASE("compute_scale picks powers of two") {
  CHECK(compute_scale_of_max(1.0) == 1024.0);
  CHECK(compute_scale_of_max(65536.0) == std::ldexp(1.0, -6));
  CHECK(compute_scale_of_max(0.0) == 1.0);
  std::vector<cplx> z(16);
  CHECK(compute_scale(SmallMatBatch{1, 4, 16, z.data()}) == 1.0);
}

TEST_CASE("sbsmm_half") {
  const int n = 12;
  {
    BatchBuffer a(1, n), c(1, n);
    for (int i = 0; i < n; ++i) a.storage()[i * n + i] = 1.0;
    const auto h = HalfComplexBatch::from(a.view(), 1.0);
    sbsmm_half(h, h, c.view());
    CHECK(c.storage() == a.storage());
  }
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int count = 20;
  BatchBuffer a(count, n), b(count, n), ref(count, n), got(count, n);
  for (auto& x : a.storage()) x = cplx(u(rng), u(rng));
  for (auto& x : b.storage()) x = cplx(u(rng), u(rng));
  sbsmm(a.view(), b.view(), ref.view(), false);
  const auto ha = HalfComplexBatch::from(a.view(), compute_scale(a.view()));
  const auto hb = HalfComplexBatch::from(b.view(), compute_scale(b.view()));
  sbsmm_half(ha, hb, got.view());
  double worst = 0;
  for (std::size_t i = 0; i < ref.storage().size(); ++i)
    worst = std::max(worst, std::abs(got.storage()[i] - ref.storage()[i]) / std::max(1.0, std::abs(ref.storage()[i])));
  CHECK(worst <= 5e-3);

  // a compensating scale stores the same half values; denormalization restores the 2^40 product exactly
  BatchBuffer a2(count, n), b2(count, n), got2(count, n), got1(count, n);
  for (std::size_t i = 0; i < a.storage().size(); ++i) {
    a2.storage()[i] = a.storage()[i] * std::ldexp(1.0, 20);
    b2.storage()[i] = b.storage()[i] * std::ldexp(1.0, 20);
  }
  sbsmm_half(HalfComplexBatch::from(a.view(), 1.0), HalfComplexBatch::from(b.view(), 1.0), got1.view());
  sbsmm_half(HalfComplexBatch::from(a2.view(), std::ldexp(1.0, -20)),
             HalfComplexBatch::from(b2.view(), std::ldexp(1.0, -20)), got2.view());
  for (std::size_t i = 0; i < got1.storage().size(); ++i)
    CHECK(got2.storage()[i] == got1.storage()[i] * std::ldexp(1.0, 40));
}

TEST_CASE("block-tridiagonal dense round trip and sparsity") {
  std::mt19937_64 rng(11);
  const auto inst = oracle::random_rgf_instance(rng, 4, 3);
  const CMatrix d = inst.a.to_dense();
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j)
      if (std::abs(i / 3 - j / 3) >= 2) CHECK(d(i, j) == cplx(0.0));
  const auto back = BlockTriMatrix::from_dense(d, 4);
  CHECK(back.to_dense() == d);
  CHECK_THROWS_AS(BlockTriMatrix::from_dense(d, 5), Error);
}
