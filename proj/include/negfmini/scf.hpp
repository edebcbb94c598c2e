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

#include "negfmini/observables.hpp"
#include "negfmini/rgf.hpp"
#include "negfmini/sse.hpp"

namespace negfmini {

struct ScfConfig {
  int max_iter = 60;
  double tol = 1e-6;     // relative change of the drain current
  double mixing = 0.5;   // Σ_new = α·Σ_computed + (1-α)·Σ_old
  CacheMode cache_mode = CacheMode::BCSpec;
  SseVariant sse_variant = SseVariant::Regrouped;
  bool force_unit_scale = false;  // mixed variant without scale normalization
  int threads = 0;                // 0: NEGFMINI_THREADS or hardware concurrency
};

/// Changes below this absolute current (e²/h·eV units) count as converged; keeps
/// equilibrium runs, where I is pure round-off, from chasing noise.
inline constexpr double kCurrentFloor = 1e-14;

void validate_scf_config(const ScfConfig& c);

struct ScfIteration {
  int iter = 0;
  double current = 0.0;
  double rel_change = 0.0;
  double gf_seconds = 0.0;
  double sse_seconds = 0.0;
  double flops_gf = 0.0;
  double flops_sse = 0.0;
  double econs_residual = 0.0;
  FlopLedger ledger;
};

enum class ScfStatus { Converged, MaxIter, Ballistic };
const char* to_string(ScfStatus s);

struct ScfResult {
  ScfStatus status = ScfStatus::MaxIter;
  std::vector<ScfIteration> trace;
  GfPhaseOutput gf;           // last GF phase
  Observables obs;            // observables of the last GF phase
  SelfEnergyTensors sse;      // self-energies fed into the last GF phase
  SelfEnergyTensors sse_raw;  // last unmixed SSE output (empty if no SSE phase ran)
  std::uint64_t boundary_solves = 0;
  std::uint64_t boundary_points = 0;
  std::uint64_t specializations = 0;

  bool converged() const { return status != ScfStatus::MaxIter; }
  int iterations() const { return static_cast<int>(trace.size()); }
  double current() const { return trace.empty() ? 0.0 : trace.back().current; }
};

/// Throws Divergence when the last current is non-finite or |I_n| > 10·|I_{n-5}|.
void check_divergence(const std::vector<double>& currents);

/// Self-consistent GF <-> SSE loop starting from Σ = Π = 0. A run with max_iter = 1
/// returns the ballistic solution. Throws Divergence when |I| grows more than 10× over
/// 5 iterations or becomes non-finite.
ScfResult run_scf(const Device& dev, const SpectralGrid& grid, const ScfConfig& cfg);

struct Histogram {
  std::vector<double> edges;               // log10 bin edges
  std::vector<std::uint64_t> counts;       // one per bin
  std::uint64_t zeros = 0;                 // exact zeros (not binned)
};
/// Histogram of log10|x| over all real and imaginary parts of Σ^< and Σ^>.
Histogram sigma_histogram(const SelfEnergyTensors& s, double lo = -20.0, double hi = 4.0, int bins = 24);

struct PrecisionReport {
  std::vector<double> current_double, current_mixed, current_unscaled;
  int iter_double = 0, iter_mixed = 0, iter_unscaled = 0;
  double rel_diff_mixed = 0.0;     // |I_mixed - I_double| / |I_double|
  double rel_diff_unscaled = 0.0;
  bool same_rate = false;          // iteration counts within ±2
  bool unscaled_worse = false;     // unscaled error strictly larger than scaled
  Histogram hist_double, hist_mixed, hist_unscaled;
};

/// Runs the SCF with the regrouped kernel, the scaled mixed kernel and the unscaled
/// mixed kernel on the same inputs.
PrecisionReport compare_precision(const Device& dev, const SpectralGrid& grid, const ScfConfig& cfg);

// CSV reports
void write_scf_trace(const ScfResult& r, const std::string& path);
void write_current_profile(const ScfResult& r, const Device& dev, const std::string& path);
void write_energy_currents(const ScfResult& r, const Device& dev, const std::string& path);
void write_spectral_current(const ScfResult& r, const Device& dev, const SpectralGrid& grid,
                            const std::string& path);
void write_precision_report(const PrecisionReport& r, const std::string& trace_path,
                            const std::string& hist_path);

}  // namespace negfmini
