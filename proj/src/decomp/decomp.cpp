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

#include "negfmini/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "negfmini/common.hpp"
#include "negfmini/csv.hpp"

namespace negfmini {

ModelParams small_structure(int nkz) {
  ModelParams p;
  p.na = 4864;
  p.nb = 34;
  p.norb = 12;
  p.n3d = 3;
  p.nkz = p.nqz = nkz;
  p.ne = 706;
  p.nomega = 70;
  p.bnum = 38;
  return p;
}

ModelParams large_structure(double ne) {
  ModelParams p;
  p.na = 10240;
  p.nb = 34;
  p.norb = 12;
  p.n3d = 3;
  p.nkz = p.nqz = 21;
  p.ne = ne;
  p.nomega = 70;
  p.bnum = 80;
  return p;
}

const char* to_string(Kernel k) {
  switch (k) {
    case Kernel::BoundaryConditions: return "boundary_conditions";
    case Kernel::Rgf: return "rgf";
    case Kernel::SseOmen: return "sse_omen";
    case Kernel::SseDace: return "sse_dace";
    case Kernel::BoundaryPhonon: return "boundary_phonon";
    case Kernel::RgfPhonon: return "rgf_phonon";
  }
  return "?";
}

const char* to_string(Scheme s) { return s == Scheme::MomentumEnergy ? "momentum_energy" : "atom_energy"; }

namespace {

// per point: two leads, each 7 dense units per decimation step plus the final inverse
// and the two products folding the surface function into the device.
double boundary_units() { return 2.0 * (7.0 * kModelDecimationSteps + 3.0); }

double cube(double x) { return x * x * x; }

}  // namespace

double flop_model(const ModelParams& p, Kernel k) {
  const double bde = p.na * p.norb / p.bnum;
  const double bdp = p.na * p.n3d / p.bnum;
  switch (k) {
    case Kernel::BoundaryConditions: return p.nkz * p.ne * boundary_units() * 8.0 * cube(bde);
    case Kernel::Rgf: return p.nkz * p.ne * 8.0 * (26.0 * p.bnum - 25.0) * cube(bde);
    case Kernel::BoundaryPhonon: return p.nqz * p.nomega * boundary_units() * 8.0 * cube(bdp);
    case Kernel::RgfPhonon: return p.nqz * p.nomega * 8.0 * (26.0 * p.bnum - 25.0) * cube(bdp);
    case Kernel::SseOmen:
      return 64.0 * p.na * p.nb * p.n3d * p.nkz * p.nqz * p.ne * p.nomega * cube(p.norb);
    case Kernel::SseDace: {
      const double kq = p.nqz * p.nomega;
      return flop_model(p, Kernel::SseOmen) / (2.0 * kq / (kq + 1.0));
    }
  }
  return 0.0;
}

// per-process atom_energy volumes: the two bullet formulas split evenly between their tensors
static double ae_g_bytes(const ModelParams& p, double ta, double te) {
  return 32.0 * p.nkz * (p.ne / te + 2.0 * p.nomega) * (p.na / ta + p.nb) * p.norb * p.norb;
}
static double ae_d_bytes(const ModelParams& p, double ta) {
  return 32.0 * p.nqz * p.nomega * (p.na / ta + p.nb) * (p.nb + 1.0) * p.n3d * p.n3d;
}

void validate_plan(const ModelParams& p, const DecompositionPlan& plan) {
  if (plan.P < 1) throw Error(ErrorKind::InvalidArgument, "procs: must be at least 1");
  if (plan.scheme == Scheme::MomentumEnergy) return;
  if (plan.Ta < 1 || plan.TE < 1 || static_cast<long long>(plan.Ta) * plan.TE != plan.P) {
    std::ostringstream os;
    os << "ta/te: plan " << plan.Ta << "x" << plan.TE << " does not tile P=" << plan.P;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  if (plan.Ta > p.na && !plan.allow_fractional_atoms)
    throw Error(ErrorKind::InvalidArgument, "ta: exceeds the atom count (infeasible plan)");
  if (plan.TE > p.ne) throw Error(ErrorKind::InvalidArgument, "te: exceeds the energy count (infeasible plan)");
}

DecompositionPlan min_volume_plan(const ModelParams& p, int P) {
  DecompositionPlan best;
  best.P = P;
  double best_v = std::numeric_limits<double>::infinity();
  for (int te = 1; te <= P; ++te) {
    if (P % te) continue;
    const int ta = P / te;
    if (ta > p.na || te > p.ne) continue;
    const double v = 2.0 * ae_g_bytes(p, ta, te) + 2.0 * ae_d_bytes(p, ta);
    if (v < best_v) {
      best_v = v;
      best.Ta = ta;
      best.TE = te;
    }
  }
  if (!std::isfinite(best_v)) throw Error(ErrorKind::InvalidArgument, "procs: no feasible Ta x TE tiling");
  return best;
}

DecompositionPlan default_plan(const ModelParams& p, int P) {
  const int te = static_cast<int>(p.nkz);
  if (te >= 1 && P % te == 0 && P / te <= p.na && te <= p.ne) {
    DecompositionPlan plan;
    plan.P = P;
    plan.TE = te;
    plan.Ta = P / te;
    return plan;
  }
  return min_volume_plan(p, P);
}

double Collective::total_send() const {
  double s = 0;
  for (double x : send) s += x;
  return s;
}
double Collective::total_recv() const {
  double s = 0;
  for (double x : recv) s += x;
  return s;
}

CostReport comm_model(const ModelParams& p, const DecompositionPlan& plan) {
  validate_plan(p, plan);
  CostReport r;
  r.plan = plan;
  const int P = plan.P;
  const double dP = P;
  auto uniform = [&](const std::string& name, double per_process, double messages) {
    Collective c;
    c.tensor = name;
    c.send.assign(P, per_process);
    c.recv.assign(P, per_process);
    c.messages = messages;
    return c;
  };
  if (plan.scheme == Scheme::MomentumEnergy) {
    const double rounds = p.nqz * p.nomega;
    // every G^≷ is replicated 2·Nqz·Nω times point to point
    const double g_total = 2.0 * rounds * p.nkz * p.ne * p.na * p.norb * p.norb * 32.0;
    // D^≷ broadcast to, and Π^≷ reduced from, all other processes in every round (flat tree)
    const double d_total = (dP - 1.0) * rounds * p.na * (p.nb + 1.0) * p.n3d * p.n3d * 32.0;
    r.collectives.push_back(uniform("G", g_total / dP, 2.0 * rounds * dP));
    r.collectives.push_back(uniform("D", d_total / dP, rounds * (dP - 1.0)));
    r.collectives.push_back(uniform("Pi", d_total / dP, rounds * (dP - 1.0)));
    r.g_total = g_total;
    r.d_total = r.pi_total = d_total;
    r.g_per_process = g_total / dP;
    r.d_per_process = r.pi_per_process = d_total / dP;
  } else {
    const double g = ae_g_bytes(p, plan.Ta, plan.TE);
    const double d = ae_d_bytes(p, plan.Ta);
    const double msgs = dP * (dP - 1.0);
    r.collectives.push_back(uniform("G", g, msgs));
    r.collectives.push_back(uniform("Sigma", g, msgs));
    r.collectives.push_back(uniform("D", d, msgs));
    r.collectives.push_back(uniform("Pi", d, msgs));
    r.g_per_process = r.sigma_per_process = g;
    r.d_per_process = r.pi_per_process = d;
    r.g_total = r.sigma_total = g * dP;
    r.d_total = r.pi_total = d * dP;
  }
  for (const auto& c : r.collectives) r.messages += c.messages;
  r.flops_sse = flop_model(p, Kernel::SseDace);
  return r;
}

double reduction_ratio(const CostReport& momentum_energy, const CostReport& atom_energy) {
  return momentum_energy.total_bytes() / atom_energy.total_bytes();
}

std::vector<double> time_lower_bound(const CostReport& r, double injection_bw, int procs_per_node) {
  if (!(injection_bw > 0.0)) throw Error(ErrorKind::InvalidArgument, "injection-bw: must be positive");
  if (procs_per_node < 1) throw Error(ErrorKind::InvalidArgument, "procs-per-node: must be at least 1");
  std::vector<double> t;
  for (const auto& c : r.collectives) {
    double worst = 0.0;
    for (std::size_t first = 0; first < c.send.size(); first += procs_per_node) {
      double node = 0.0;
      for (std::size_t i = first; i < std::min(c.send.size(), first + procs_per_node); ++i) node += c.send[i];
      worst = std::max(worst, node);
    }
    t.push_back(worst / injection_bw);
  }
  return t;
}

ProcessSplit balance_loads(double electron_load, double phonon_load, int P) {
  if (P < 2) throw Error(ErrorKind::InvalidArgument, "procs: balancing needs at least 2 processes");
  ProcessSplit s;
  s.electron_load = electron_load;
  s.phonon_load = phonon_load;
  const double total = electron_load + phonon_load;
  int pe = total > 0 ? static_cast<int>(std::lround(P * electron_load / total)) : P / 2;
  pe = std::clamp(pe, 1, P - 1);
  s.electron = pe;
  s.phonon = P - pe;
  const double le = electron_load / s.electron, lp = phonon_load / s.phonon;
  const double lo = std::min(le, lp), hi = std::max(le, lp);
  s.imbalance = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
  return s;
}

ProcessSplit balance_processes(const ModelParams& p, int P) {
  // SSE work is shared: half is attributed to each side
  const double sse = flop_model(p, Kernel::SseDace);
  const double e = flop_model(p, Kernel::BoundaryConditions) + flop_model(p, Kernel::Rgf) + 0.5 * sse;
  const double ph = flop_model(p, Kernel::BoundaryPhonon) + flop_model(p, Kernel::RgfPhonon) + 0.5 * sse;
  return balance_loads(e, ph, P);
}

double crossover_processes(const ModelParams& p) {
  // momentum_energy G^≷ and Σ^≷ traffic against the per-process G/Σ formula with Ta = P, TE = 1
  const double omen = 2.0 * p.nqz * p.nomega * p.nkz * p.ne * p.na * p.norb * p.norb * 32.0;
  const double per_atom = 64.0 * p.nkz * (p.ne + 2.0 * p.nomega) * p.norb * p.norb;
  return (omen / per_atom - p.na) / p.nb;
}

namespace {

constexpr double kPflop = 1e15;
constexpr double kTiB = 1099511627776.0;
constexpr double kGiB = 1073741824.0;
constexpr double kMiB = 1048576.0;

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

}  // namespace

void write_cost_tables(const std::string& csv_path, const std::string& summary_path) {
  CsvWriter w(csv_path, {"table", "row", "column", "model", "reference", "unit"});
  std::ostringstream s;
  const int nkzs[5] = {3, 5, 7, 9, 11};
  const double t2[4][5] = {{8.45, 14.12, 19.77, 25.42, 31.06},
                           {52.95, 88.25, 123.55, 158.85, 194.15},
                           {24.41, 67.80, 132.89, 219.67, 328.15},
                           {12.38, 34.19, 66.85, 110.36, 164.71}};
  const Kernel kernels[4] = {Kernel::BoundaryConditions, Kernel::Rgf, Kernel::SseOmen, Kernel::SseDace};
  s << "Single iteration computational load, Small structure (Pflop), bnum = 38\n";
  for (int k = 0; k < 4; ++k) {
    s << "  " << to_string(kernels[k]) << ":";
    for (int c = 0; c < 5; ++c) {
      const double v = flop_model(small_structure(nkzs[c]), kernels[k]) / kPflop;
      w.row({"flops", to_string(kernels[k]), "Nkz=" + std::to_string(nkzs[c]), csv_number(v), csv_number(t2[k][c]),
             "Pflop"});
      s << " " << fmt("%.2f", v);
    }
    s << "\n";
  }

  auto volume_rows = [&](const char* table, int nkz, int P, double ref_omen, double ref_dace) {
    const ModelParams p = small_structure(nkz);
    DecompositionPlan me;
    me.scheme = Scheme::MomentumEnergy;
    me.P = P;
    const CostReport ro = comm_model(p, me);
    const CostReport ra = comm_model(p, default_plan(p, P));
    const std::string col = "Nkz=" + std::to_string(nkz) + " P=" + std::to_string(P);
    const double ratio = reduction_ratio(ro, ra);
    w.row({table, "momentum_energy", col, csv_number(ro.total_bytes() / kTiB), csv_number(ref_omen), "TiB"});
    w.row({table, "atom_energy", col, csv_number(ra.total_bytes() / kTiB), csv_number(ref_dace), "TiB"});
    w.row({table, "reduction", col, csv_number(ratio), csv_number(ref_omen / ref_dace), "x"});
    s << "  " << col << " (Ta=" << ra.plan.Ta << ", TE=" << ra.plan.TE << "): " << fmt("%.2f", ro.total_bytes() / kTiB)
      << " vs " << fmt("%.2f", ra.total_bytes() / kTiB) << " TiB [" << fmt("%.0f", ratio) << "x]\n";
  };
  s << "SSE communication volume, weak scaling (Small structure)\n";
  const double t3o[5] = {32.11, 89.18, 174.80, 288.95, 431.65}, t3d[5] = {0.54, 1.22, 2.17, 3.38, 4.86};
  for (int c = 0; c < 5; ++c) volume_rows("weak_scaling", nkzs[c], 256 * nkzs[c], t3o[c], t3d[c]);
  s << "SSE communication volume, strong scaling (Small structure, Nkz = 7)\n";
  const int procs[5] = {224, 448, 896, 1792, 2688};
  const double t4o[5] = {108.24, 117.75, 136.76, 174.80, 212.84}, t4d[5] = {0.95, 1.13, 1.48, 2.17, 2.87};
  for (int c = 0; c < 5; ++c) volume_rows("strong_scaling", 7, procs[c], t4o[c], t4d[c]);

  const ModelParams large = large_structure(1000);
  const double cross = crossover_processes(large);
  w.row({"crossover", "processes", "Large NE=1000", csv_number(cross), csv_number(440000.0), "processes"});
  DecompositionPlan lp;
  lp.P = lp.Ta = 27360;
  lp.TE = 1;
  lp.allow_fractional_atoms = true;
  const CostReport lr = comm_model(large, lp);
  w.row({"large_run", "g_sigma_per_process", "Ta=P=27360", csv_number((lr.g_per_process + lr.sigma_per_process) / kGiB),
         csv_number(6.13), "GiB"});
  w.row({"large_run", "d_pi_per_process", "Ta=P=27360", csv_number((lr.d_per_process + lr.pi_per_process) / kMiB),
         csv_number(28.26), "MiB"});
  const auto t = time_lower_bound(lr, 23e9, 6);
  for (std::size_t i = 0; i < t.size(); ++i)
    w.row({"large_run", "bound_" + lr.collectives[i].tensor, "23 GB/s, 6 per node", csv_number(t[i]),
           lr.collectives[i].tensor == "D" || lr.collectives[i].tensor == "Pi" ? csv_number(1.85) : "", "s"});
  s << "Large structure (NE = 1000): G crossover at " << fmt("%.0f", cross) << " processes; Ta = P = 27360 gives "
    << fmt("%.2f", (lr.g_per_process + lr.sigma_per_process) / kGiB) << " GiB (G/Sigma) and "
    << fmt("%.2f", (lr.d_per_process + lr.pi_per_process) / kMiB) << " MiB (D/Pi) per process\n";
  s << "Injection bound at 23 GB/s, 6 processes per node:";
  for (std::size_t i = 0; i < t.size(); ++i) s << " " << lr.collectives[i].tensor << " " << fmt("%.3f", t[i]) << " s";
  s << "\n";
  w.close();
  std::ofstream out(summary_path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + summary_path + " for writing");
  out << s.str();
}

}  // namespace negfmini
