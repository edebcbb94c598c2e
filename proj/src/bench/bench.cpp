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

#include "negfmini/bench.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <random>

#include "negfmini/batch.hpp"
#include "negfmini/csv.hpp"
#include "negfmini/rgf.hpp"
#include "negfmini/sparse.hpp"
#include "negfmini/sse.hpp"

namespace negfmini {

namespace {

BenchEntry time_it(const std::string& group, const std::string& variant, int repeats,
                   const std::function<void()>& f) {
  std::vector<double> t;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(t.begin(), t.end());
  BenchEntry e;
  e.group = group;
  e.variant = variant;
  e.repeats = repeats;
  e.median_s = t[t.size() / 2];
  e.min_s = t.front();
  e.max_s = t.back();
  return e;
}

void fill_random(std::vector<cplx>& v, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& x : v) x = cplx(u(rng), u(rng));
}

CMatrix random_sparse(int n, double density, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (u(rng) < density) m(i, j) = cplx(u(rng) - 0.5, u(rng) - 0.5);
  return m;
}

void bench_sbsmm(BenchReport& rep, int repeats) {
  const int count = 210, n = 12;
  std::mt19937_64 rng(7);
  BatchBuffer a(count, n), b(count, n), c(count, n);
  fill_random(a.storage(), rng);
  fill_random(b.storage(), rng);
  std::vector<CMatrix> am(count, CMatrix(n, n)), bm(count, CMatrix(n, n)), cm(count);
  for (int k = 0; k < count; ++k) {
    std::copy_n(a.storage().data() + k * n * n, n * n, am[k].data());
    std::copy_n(b.storage().data() + k * n * n, n * n, bm[k].data());
  }
  const int inner = 50;
  auto loop = time_it("sbsmm", "per_matrix_loop", repeats, [&] {
    for (int r = 0; r < inner; ++r)
      for (int k = 0; k < count; ++k) cm[k] = matmul(am[k], bm[k]);
  });
  auto batched = time_it("sbsmm", "sbsmm", repeats, [&] {
    for (int r = 0; r < inner; ++r) sbsmm(a.view(), b.view(), c.view(), false);
  });
  batched.speedup = loop.median_s / batched.median_s;
  rep.entries.push_back(loop);
  rep.entries.push_back(batched);
}

void bench_triple(BenchReport& rep, int repeats) {
  const int n = 256;
  std::mt19937_64 rng(11);
  const SparseBlock f = SparseBlock::with_encodings(random_sparse(n, 0.1, rng));
  const SparseBlock e = SparseBlock::with_encodings(random_sparse(n, 0.1, rng));
  CMatrix g(n, n);
  std::vector<cplx> gv(static_cast<std::size_t>(n) * n);
  fill_random(gv, rng);
  std::copy(gv.begin(), gv.end(), g.data());
  double base = 0.0;
  for (TripleStrategy s :
       {TripleStrategy::DenseDense, TripleStrategy::SparseLeftThenRight, TripleStrategy::SparseBothSides}) {
    auto entry = time_it("triple", to_string(s), repeats, [&] { (void)triple_product(f, g, e, s); });
    if (s == TripleStrategy::DenseDense) base = entry.median_s;
    entry.speedup = base / entry.median_s;
    rep.entries.push_back(entry);
  }
}

void bench_sse(BenchReport& rep, const Device& dev, int repeats) {
  const SpectralGrid grid = SpectralGrid::build(dev.grid);
  GfPhaseCache cache;
  const GfPhaseOutput gf = gf_phase(dev, grid, nullptr, CacheMode::BCSpec, cache, 1);
  const GfTensors g{&gf.Gl, &gf.Gg, &gf.Dl, &gf.Dg};
  double base = 0.0;
  for (SseVariant v : {SseVariant::Naive, SseVariant::Regrouped, SseVariant::Mixed}) {
    auto entry = time_it("sse", to_string(v), repeats, [&] { (void)sse_compute(dev, grid, g, {v, 1, false}); });
    if (v == SseVariant::Naive) base = entry.median_s;
    entry.speedup = base / entry.median_s;
    rep.entries.push_back(entry);
  }
}

}  // namespace

BenchReport run_bench(const std::vector<std::string>& groups, const Device& dev, int repeats) {
  if (repeats < 1) throw Error(ErrorKind::InvalidArgument, "repeats: must be at least 1");
  for (const auto& g : groups)
    if (g != "sbsmm" && g != "triple" && g != "sse")
      throw Error(ErrorKind::InvalidArgument, "bench: unknown benchmark '" + g + "' (sbsmm|triple|sse)");
  BenchReport rep;
  for (const auto& g : groups) {
    if (g == "sbsmm") bench_sbsmm(rep, repeats);
    else if (g == "triple") bench_triple(rep, repeats);
    else bench_sse(rep, dev, repeats);
  }
  return rep;
}

void write_bench(const BenchReport& r, const std::string& path) {
  CsvWriter w(path, {"group", "variant", "repeats", "median_s", "min_s", "max_s", "speedup"});
  for (const auto& e : r.entries)
    w.row({e.group, e.variant, csv_number(static_cast<long long>(e.repeats)), csv_number(e.median_s),
           csv_number(e.min_s), csv_number(e.max_s), csv_number(e.speedup)});
  w.close();
}

}  // namespace negfmini
