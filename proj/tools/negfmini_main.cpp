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

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "negfmini/negfmini.h"

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Thrown for any failed library call; carries the process exit code.
struct Failure {
  int code;
  std::string message;
};

int exit_code_for(negfmini_status s) {
  return (s == NEGFMINI_ERR_INVALID_ARGUMENT || s == NEGFMINI_ERR_PARTITION) ? 1 : 2;
}

void check(negfmini_status s) {
  if (s != NEGFMINI_OK)
    throw Failure{exit_code_for(s), std::string(negfmini_status_name(s)) + ": " + negfmini_last_error()};
}

struct Common {
  std::string out = "out";
  int threads = 0;
};

struct DeviceArgs {
  std::string device;
  std::string lattice = "chain";
  negfmini_device_params p{};
};

struct GridArgs {
  int nkz = 0, nqz = 0, ne = 0, nomega = 0, omega_step = 0;
};

struct ScfArgs {
  int max_iter = 0;
  double tol = 0, mixing = 0;
  std::string cache = "bc+spec", sse = "regrouped";
};

struct CostArgs {
  std::string structure = "small";
  int nkz = 3;
  double ne = 1000;
  int procs = 0, ta = 0, te = 0, procs_per_node = 6;
  double injection_bw = 23.0;
  bool fractional = false;
};

struct BenchArgs {
  std::string groups = "sbsmm,triple,sse";
  int repeats = 5;
};

int resolved_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NEGFMINI_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void add_device_flags(CLI::App* sc, DeviceArgs& d, bool generator_only) {
  if (!generator_only)
    sc->add_option("--device", d.device, "Device file; when omitted a device is generated from the flags below");
  sc->add_option("--lattice", d.lattice, "Lattice kind: chain or ribbon");
  sc->add_option("--na", d.p.na, "Atom count");
  sc->add_option("--nb", d.p.nb, "Neighbors per atom (0: lattice coordination)");
  sc->add_option("--norb", d.p.norb, "Orbitals per atom");
  sc->add_option("--bnum", d.p.bnum, "Number of RGF blocks");
  sc->add_option("--width", d.p.ribbon_width, "Ribbon width in atoms");
  sc->add_option("--seed", d.p.seed, "Generator seed");
  sc->add_option("--vds", d.p.vds, "Drain-source bias (V)");
  sc->add_option("--vgs", d.p.vgs, "Gate bias (V)");
  sc->add_option("--ep", d.p.ep_coupling, "Electron-phonon coupling (eV/nm)");
  sc->add_option("--phonon-energy", d.p.phonon_energy, "Phonon band centre (eV)");
  sc->add_option("--temperature", d.p.temperature, "Lead temperature (K)");
}

void add_grid_flags(CLI::App* sc, GridArgs& g) {
  sc->add_option("--nkz", g.nkz, "Electron momentum points");
  sc->add_option("--nqz", g.nqz, "Phonon momentum points (must equal nkz)");
  sc->add_option("--ne", g.ne, "Energy points");
  sc->add_option("--nomega", g.nomega, "Phonon frequency points");
  sc->add_option("--omega-step", g.omega_step, "Frequency spacing in energy-grid steps");
}

void add_scf_flags(CLI::App* sc, ScfArgs& s) {
  sc->add_option("--max-iter", s.max_iter, "Maximum SCF iterations");
  sc->add_option("--tol", s.tol, "Relative current tolerance");
  sc->add_option("--mixing", s.mixing, "Self-energy mixing factor");
  sc->add_option("--cache", s.cache, "Cache mode: none, bc or bc+spec");
  sc->add_option("--sse", s.sse, "SSE variant: naive, regrouped or mixed");
}

void add_common_flags(CLI::App* sc, Common& c) {
  sc->add_option("--out", c.out, "Output directory");
  sc->add_option("--threads", c.threads, "Worker threads (0: NEGFMINI_THREADS or all cores)");
}

json device_json(const negfmini_device* d) {
  negfmini_device_info i{};
  check(negfmini_device_get_info(d, &i));
  return json{{"lattice", i.lattice}, {"na", i.na}, {"nb", i.nb}, {"norb", i.norb}, {"n3d", i.n3d},
              {"bnum", i.bnum}, {"seed", i.seed}, {"vds", i.vds}, {"vgs", i.vgs},
              {"grid", {{"nkz", i.nkz}, {"nqz", i.nqz}, {"ne", i.ne}, {"nomega", i.nomega},
                        {"omega_step", i.omega_step}, {"emin", i.emin}, {"emax", i.emax},
                        {"temperature", i.temperature}}}};
}

// Applies grid flags to generator parameters so a generated device carries them.
void apply_grid(negfmini_device_params& p, const GridArgs& g) {
  if (g.nkz) p.nkz = g.nkz;
  if (g.nqz) p.nqz = g.nqz;
  if (g.ne) p.ne = g.ne;
  if (g.nomega) p.nomega = g.nomega;
  if (g.omega_step) p.omega_step = g.omega_step;
}

struct DeviceHandle {
  negfmini_device* d = nullptr;
  ~DeviceHandle() { negfmini_device_free(d); }
};

void obtain_device(DeviceArgs& a, const GridArgs& g, DeviceHandle& h, json& m) {
  if (!a.device.empty()) {
    check(negfmini_device_load(a.device.c_str(), &h.d));
    m["device_path"] = a.device;
  } else {
    a.p.lattice = a.lattice.c_str();
    apply_grid(a.p, g);
    check(negfmini_device_generate(&a.p, &h.d));
    m["device_path"] = nullptr;
  }
  m["device"] = device_json(h.d);
}

negfmini_sim_config sim_config(const ScfArgs& s, const GridArgs& g, int threads) {
  negfmini_sim_config c;
  negfmini_sim_config_default(&c);
  if (s.max_iter) c.max_iter = s.max_iter;
  if (s.tol) c.tol = s.tol;
  if (s.mixing) c.mixing = s.mixing;
  c.cache_mode = s.cache.c_str();
  c.sse_variant = s.sse.c_str();
  c.threads = threads;
  c.nkz = g.nkz;
  c.nqz = g.nqz;
  c.ne = g.ne;
  c.nomega = g.nomega;
  c.omega_step = g.omega_step;
  return c;
}

json config_json(const negfmini_sim_config& c) {
  return json{{"max_iter", c.max_iter}, {"tol", c.tol}, {"mixing", c.mixing}, {"cache", c.cache_mode},
              {"sse", c.sse_variant}, {"force_unit_scale", c.force_unit_scale != 0}, {"threads", c.threads}};
}

void reject_flags_with_device(const DeviceArgs& a, CLI::App* sc) {
  if (a.device.empty()) return;
  for (const char* f : {"--lattice", "--na", "--nb", "--norb", "--bnum", "--width", "--seed", "--vds", "--vgs", "--ep",
                        "--phonon-energy", "--temperature"})
    if (sc->count(f)) throw Failure{1, std::string(f + 2) + ": generator flag cannot be combined with --device"};
}

void cmd_generate(DeviceArgs& a, const GridArgs& g, const Common& c, json& m) {
  DeviceHandle h;
  obtain_device(a, g, h, m);
  fs::create_directories(c.out);
  const std::string path = (fs::path(c.out) / "device.ngd").string();
  check(negfmini_device_save(h.d, path.c_str()));
  m["artifacts"] = {"device.ngd"};
}

void cmd_simulate(DeviceArgs& a, const GridArgs& g, const ScfArgs& s, const Common& c, json& m, int& code) {
  const negfmini_sim_config cfg = sim_config(s, g, resolved_threads(c.threads));
  m["config"] = config_json(cfg);
  DeviceHandle h;
  obtain_device(a, g, h, m);
  negfmini_result* r = nullptr;
  check(negfmini_simulate(h.d, &cfg, &r));
  struct Guard {
    negfmini_result* r;
    ~Guard() { negfmini_result_free(r); }
  } guard{r};
  check(negfmini_result_write(r, c.out.c_str()));
  negfmini_result_summary sum{};
  check(negfmini_result_get_summary(r, &sum));
  m["artifacts"] = {"scf_trace.csv", "current_profile.csv", "spectral_current.csv", "energy_currents.csv"};
  m["result"] = {{"status", sum.status}, {"iterations", sum.iterations}, {"current", sum.current},
                 {"current_variation", sum.current_variation}, {"energy_residual", sum.energy_residual},
                 {"boundary_solves", sum.boundary_solves}, {"boundary_points", sum.boundary_points},
                 {"specializations", sum.specializations}};
  m["timings"]["gf_seconds"] = sum.gf_seconds;
  m["timings"]["sse_seconds"] = sum.sse_seconds;
  std::cout << "status " << sum.status << ", iterations " << sum.iterations << ", current " << sum.current
            << '\n';
  if (std::string(sum.status) == "max_iter") {
    std::cerr << "error: non_convergence: SCF did not reach tol " << cfg.tol << " within " << cfg.max_iter
              << " iterations\n";
    code = 2;
  }
}

void cmd_precision(DeviceArgs& a, const GridArgs& g, const ScfArgs& s, const Common& c, json& m) {
  const negfmini_sim_config cfg = sim_config(s, g, resolved_threads(c.threads));
  m["config"] = config_json(cfg);
  DeviceHandle h;
  obtain_device(a, g, h, m);
  fs::create_directories(c.out);
  negfmini_precision_summary p{};
  check(negfmini_compare_precision(h.d, &cfg, c.out.c_str(), &p));
  m["artifacts"] = {"precision_trace.csv", "precision_histogram.csv"};
  m["result"] = {{"iter_double", p.iter_double},
                 {"iter_mixed", p.iter_mixed},
                 {"iter_unscaled", p.iter_unscaled},
                 {"current_double", p.current_double},
                 {"current_mixed", p.current_mixed},
                 {"current_unscaled", p.current_unscaled},
                 {"rel_diff_mixed", p.rel_diff_mixed},
                 {"rel_diff_unscaled", p.rel_diff_unscaled},
                 {"same_rate", p.same_rate != 0},
                 {"unscaled_worse", p.unscaled_worse != 0}};
  std::cout << "mixed rel diff " << p.rel_diff_mixed << ", unscaled rel diff " << p.rel_diff_unscaled << '\n';
}

void cmd_cost(const CostArgs& a, const Common& c, json& m) {
  negfmini_model_params p{};
  check(negfmini_model_preset(a.structure.c_str(), a.nkz, a.ne, &p));
  fs::create_directories(c.out);
  const auto dir = fs::path(c.out);
  check(negfmini_write_cost_tables((dir / "cost_tables.csv").string().c_str(),
                                   (dir / "cost_summary.txt").string().c_str()));
  m["artifacts"] = {"cost_tables.csv", "cost_summary.txt"};
  m["model"] = {{"structure", a.structure}, {"na", p.na}, {"nb", p.nb}, {"norb", p.norb}, {"n3d", p.n3d},
                {"nkz", p.nkz}, {"nqz", p.nqz}, {"ne", p.ne}, {"nomega", p.nomega}, {"bnum", p.bnum}};
  json flops;
  for (const char* k : {"boundary_conditions", "rgf", "sse_omen", "sse_dace", "boundary_phonon", "rgf_phonon"}) {
    double f = 0;
    check(negfmini_flop_model(&p, k, &f));
    flops[k] = f;
  }
  m["flops"] = flops;
  if (a.procs == 0) return;
  negfmini_plan plan{a.procs, a.ta, a.te, a.injection_bw * 1e9, a.procs_per_node, a.fractional ? 1 : 0};
  negfmini_cost_summary s{};
  check(negfmini_cost_model(&p, &plan, &s));
  m["plan"] = {{"procs", a.procs}, {"ta", s.ta}, {"te", s.te}, {"injection_bw_gbs", a.injection_bw},
               {"procs_per_node", a.procs_per_node}, {"allow_fractional_atoms", a.fractional}};
  m["cost"] = {{"momentum_energy_bytes", s.momentum_energy_bytes},
               {"atom_energy_bytes", s.atom_energy_bytes},
               {"reduction_ratio", s.reduction_ratio},
               {"per_process_bytes", {{"G", s.g_per_process}, {"Sigma", s.sigma_per_process},
                                      {"D", s.d_per_process}, {"Pi", s.pi_per_process}}},
               {"bound_seconds", {{"G", s.bound_g}, {"Sigma", s.bound_sigma}, {"D", s.bound_d},
                                  {"Pi", s.bound_pi}}},
               {"electron_procs", s.electron_procs},
               {"phonon_procs", s.phonon_procs},
               {"imbalance", s.imbalance}};
  std::cout << "reduction ratio " << s.reduction_ratio << "x, D/Pi bound " << s.bound_d + s.bound_pi << " s\n";
}

void cmd_bench(DeviceArgs& a, const BenchArgs& b, const Common& c, json& m) {
  DeviceHandle h;
  obtain_device(a, GridArgs{}, h, m);
  std::vector<std::string> groups;
  std::stringstream ss(b.groups);
  for (std::string g; std::getline(ss, g, ',');)
    if (!g.empty()) groups.push_back(g);
  std::vector<const char*> ptrs;
  for (const auto& g : groups) ptrs.push_back(g.c_str());
  fs::create_directories(c.out);
  size_t n = 0;
  check(negfmini_bench(h.d, ptrs.data(), ptrs.size(), b.repeats,
                       (fs::path(c.out) / "bench.csv").string().c_str(), &n));
  m["artifacts"] = {"bench.csv"};
  m["bench"] = {{"groups", groups}, {"repeats", b.repeats}, {"entries", n}};
  std::cout << n << " benchmark entries\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"negfmini: desk-scale NEGF transport with electron-phonon scattering"};
  app.set_version_flag("--version", negfmini_version());
  app.require_subcommand(1);

  Common common;
  DeviceArgs dev;
  negfmini_device_params_default(&dev.p);
  GridArgs grid;
  ScfArgs scf;
  CostArgs cost;
  BenchArgs bench;

  auto* gen = app.add_subcommand("generate", "Generate a toy device and save it");
  add_device_flags(gen, dev, true);
  add_grid_flags(gen, grid);
  add_common_flags(gen, common);

  auto* sim = app.add_subcommand("simulate", "Run the self-consistent simulation");
  auto* prec = app.add_subcommand("compare-precision", "Compare double, scaled and unscaled mixed precision");
  for (auto* sc : {sim, prec}) {
    add_device_flags(sc, dev, false);
    add_grid_flags(sc, grid);
    add_scf_flags(sc, scf);
    add_common_flags(sc, common);
  }

  auto* cm = app.add_subcommand("cost-model", "Flop and communication model tables");
  cm->add_option("--structure", cost.structure, "Preset: small or large");
  cm->add_option("--nkz", cost.nkz, "Momentum points (small preset)");
  cm->add_option("--ne", cost.ne, "Energy points (large preset)");
  cm->add_option("--procs", cost.procs, "Process count for a single plan evaluation");
  cm->add_option("--ta", cost.ta, "Atom tiles (with --te; 0 picks the default policy)");
  cm->add_option("--te", cost.te, "Energy tiles");
  cm->add_option("--injection-bw", cost.injection_bw, "Node injection bandwidth (GB/s)");
  cm->add_option("--procs-per-node", cost.procs_per_node, "Processes per node");
  cm->add_flag("--allow-fractional-atoms", cost.fractional, "Permit Ta larger than the atom count");
  add_common_flags(cm, common);

  auto* bn = app.add_subcommand("bench", "Micro-benchmarks (median of repeats)");
  add_device_flags(bn, dev, false);
  bn->add_option("--groups", bench.groups, "Comma-separated groups: sbsmm, triple, sse (empty for none)");
  bn->add_option("--repeats", bench.repeats, "Repetitions per measurement");
  add_common_flags(bn, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  CLI::App* sc = app.get_subcommands().front();
  json m;
  m["tool"] = "negfmini";
  m["version"] = negfmini_version();
  m["subcommand"] = sc->get_name();
  m["argv"] = std::vector<std::string>(argv, argv + argc);
  m["threads"] = resolved_threads(common.threads);
  const auto t0 = std::chrono::steady_clock::now();
  int code = 0;
  try {
    if (common.threads < 0) throw Failure{1, "threads: must be non-negative"};
    if (sc == gen) {
      cmd_generate(dev, grid, common, m);
    } else if (sc == sim || sc == prec || sc == bn) {
      reject_flags_with_device(dev, sc);
      if (sc == sim) cmd_simulate(dev, grid, scf, common, m, code);
      else if (sc == prec) cmd_precision(dev, grid, scf, common, m);
      else cmd_bench(dev, bench, common, m);
    } else {
      cmd_cost(cost, common, m);
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  m["timings"]["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  m["exit_code"] = code;
  std::ofstream f(fs::path(common.out) / "manifest.json");
  f << m.dump(2) << '\n';
  if (!f) {
    std::cerr << "error: io: cannot write manifest.json\n";
    return 2;
  }
  return code;
}
