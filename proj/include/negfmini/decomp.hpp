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

namespace negfmini {

struct ModelParams {
  double na = 0, nb = 0, norb = 0, n3d = 3;
  double nkz = 0, nqz = 0, ne = 0, nomega = 0;
  double bnum = 1;
};

/// "Small" structure (Na=4864, Nb=34, Norb=12, NE=706, Nω=70) with the given Nkz = Nqz.
/// bnum = 38 gives 128-atom blocks.
ModelParams small_structure(int nkz);
/// "Large" structure (Na=10240, Nb=34, Norb=12, Nkz=Nqz=21, Nω=70) at the given NE.
ModelParams large_structure(double ne = 1000);

enum class Kernel { BoundaryConditions, Rgf, SseOmen, SseDace, BoundaryPhonon, RgfPhonon };
const char* to_string(Kernel k);

/// Decimation steps assumed by the boundary-condition flop model.
inline constexpr int kModelDecimationSteps = 10;

/// Closed-form single-iteration flop counts (real flops, 8 per complex multiply-add).
double flop_model(const ModelParams& p, Kernel k);

enum class Scheme { MomentumEnergy, AtomEnergy };
const char* to_string(Scheme s);

struct DecompositionPlan {
  Scheme scheme = Scheme::AtomEnergy;
  int P = 1;
  int Ta = 1, TE = 1;              // atom_energy tiling, P = Ta·TE
  bool allow_fractional_atoms = false;  // accept Ta > Na (fewer than one owned atom per process)
  double ghost_atoms(const ModelParams& p) const { return p.nb; }
  double ghost_energies(const ModelParams& p) const { return 2.0 * p.nomega; }
};

/// Default atom_energy tiling: TE = Nkz when it divides P, Ta = P/TE; otherwise the
/// factorization minimizing the per-process volume.
DecompositionPlan default_plan(const ModelParams& p, int P);
/// Factorization of P minimizing the per-process atom_energy volume.
DecompositionPlan min_volume_plan(const ModelParams& p, int P);
void validate_plan(const ModelParams& p, const DecompositionPlan& plan);

struct Collective {
  std::string tensor;             // G, Sigma, D, Pi
  std::vector<double> send;       // bytes sent per process
  std::vector<double> recv;       // bytes received per process
  double messages = 0;
  double total_send() const;
  double total_recv() const;
};

struct CostReport {
  DecompositionPlan plan;
  std::vector<Collective> collectives;
  // per-tensor totals and per-process maxima (bytes, 16-byte complex elements)
  double g_total = 0, sigma_total = 0, d_total = 0, pi_total = 0;
  double g_per_process = 0, sigma_per_process = 0, d_per_process = 0, pi_per_process = 0;
  double messages = 0;
  double flops_sse = 0;  // computation is independent of the plan
  double total_bytes() const { return g_total + sigma_total + d_total + pi_total; }
};

CostReport comm_model(const ModelParams& p, const DecompositionPlan& plan);
/// momentum_energy volume divided by atom_energy volume.
double reduction_ratio(const CostReport& momentum_energy, const CostReport& atom_energy);

/// Seconds per collective: max over nodes of aggregated send bytes / bandwidth.
/// Processes are packed onto nodes in rank order.
std::vector<double> time_lower_bound(const CostReport& r, double injection_bw, int procs_per_node);

struct ProcessSplit {
  int electron = 1, phonon = 1;
  double electron_load = 0, phonon_load = 0;
  double imbalance = 1.0;  // max/min per-process load
};
ProcessSplit balance_loads(double electron_load, double phonon_load, int P);
ProcessSplit balance_processes(const ModelParams& p, int P);

/// G^≷ total bytes of both schemes become equal at this process count (Ta = P, TE = 1).
double crossover_processes(const ModelParams& p);

/// Flop, volume and large-run tables as CSV (model next to reference values) plus a text summary.
void write_cost_tables(const std::string& csv_path, const std::string& summary_path);

}  // namespace negfmini
