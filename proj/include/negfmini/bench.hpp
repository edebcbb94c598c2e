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

#include <string>
#include <vector>

#include "negfmini/device.hpp"

namespace negfmini {

struct BenchEntry {
  std::string group;    // sbsmm, triple, sse
  std::string variant;
  int repeats = 0;
  double median_s = 0.0;
  double min_s = 0.0;
  double max_s = 0.0;
  double speedup = 1.0;  // group baseline median / this median
};

struct BenchReport {
  std::vector<BenchEntry> entries;
};

inline constexpr int kBenchRepeats = 5;

/// Micro-benchmarks by group name: "sbsmm" (count 210, n 12, batched vs per-matrix
/// loop), "triple" (F·g·E at 10% density under the three strategies) and "sse" (the
/// three kernel variants on `dev`). Unknown names are rejected; an empty list gives an
/// empty report.
BenchReport run_bench(const std::vector<std::string>& groups, const Device& dev, int repeats = kBenchRepeats);

void write_bench(const BenchReport& r, const std::string& path);

}  // namespace negfmini
