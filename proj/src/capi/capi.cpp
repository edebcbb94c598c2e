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

#include "negfmini/negfmini.h"

#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "negfmini/bench.hpp"
#include "negfmini/decomp.hpp"
#include "negfmini/device.hpp"
#include "negfmini/scf.hpp"

struct negfmini_device {
  negfmini::Device dev;
};

struct negfmini_result {
  negfmini::Device dev;
  negfmini::SpectralGrid grid;
  negfmini::ScfResult scf;
};

namespace {

thread_local std::string g_last_error;

negfmini_status status_of(negfmini::ErrorKind k) {
  using negfmini::ErrorKind;
  switch (k) {
    case ErrorKind::InvalidArgument: return NEGFMINI_ERR_INVALID_ARGUMENT;
    case ErrorKind::Partition: return NEGFMINI_ERR_PARTITION;
    case ErrorKind::Format: return NEGFMINI_ERR_FORMAT;
    case ErrorKind::Dimension: return NEGFMINI_ERR_DIMENSION;
    case ErrorKind::Hermiticity: return NEGFMINI_ERR_HERMITICITY;
    case ErrorKind::NonConvergence: return NEGFMINI_ERR_NONCONVERGENCE;
    case ErrorKind::SingularBlock: return NEGFMINI_ERR_SINGULAR_BLOCK;
    case ErrorKind::Divergence: return NEGFMINI_ERR_DIVERGENCE;
    case ErrorKind::Io: return NEGFMINI_ERR_IO;
  }
  return NEGFMINI_ERR_INTERNAL;
}

template <class F>
negfmini_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return NEGFMINI_OK;
  } catch (const negfmini::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return NEGFMINI_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NEGFMINI_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return NEGFMINI_ERR_INTERNAL;
  }
}

void require(const void* p, const char* name) {
  if (!p) throw negfmini::Error(negfmini::ErrorKind::InvalidArgument, std::string(name) + ": null pointer");
}

negfmini::GridParams grid_for(const negfmini::Device& d, const negfmini_sim_config& c) {
  negfmini::GridParams g = d.grid;
  if (c.nkz) g.nkz = c.nkz;
  if (c.nqz) g.nqz = c.nqz;
  if (c.ne) g.ne = c.ne;
  if (c.nomega) g.nomega = c.nomega;
  if (c.omega_step) g.omega_step = c.omega_step;
  return g;
}

negfmini::ScfConfig scf_config(const negfmini_sim_config& c) {
  negfmini::ScfConfig s;
  s.max_iter = c.max_iter;
  s.tol = c.tol;
  s.mixing = c.mixing;
  if (c.cache_mode) s.cache_mode = negfmini::parse_cache_mode(c.cache_mode);
  if (c.sse_variant) s.sse_variant = negfmini::parse_sse_variant(c.sse_variant);
  s.force_unit_scale = c.force_unit_scale != 0;
  s.threads = c.threads;
  negfmini::validate_scf_config(s);
  return s;
}

negfmini::ModelParams model_of(const negfmini_model_params& p) {
  negfmini::ModelParams m;
  m.na = p.na;
  m.nb = p.nb;
  m.norb = p.norb;
  m.n3d = p.n3d;
  m.nkz = p.nkz;
  m.nqz = p.nqz;
  m.ne = p.ne;
  m.nomega = p.nomega;
  m.bnum = p.bnum;
  const double* fields[] = {&m.na, &m.nb, &m.norb, &m.n3d, &m.nkz, &m.nqz, &m.ne, &m.nomega, &m.bnum};
  const char* names[] = {"na", "nb", "norb", "n3d", "nkz", "nqz", "ne", "nomega", "bnum"};
  for (int i = 0; i < 9; ++i)
    if (!(*fields[i] > 0))
      throw negfmini::Error(negfmini::ErrorKind::InvalidArgument, std::string(names[i]) + ": must be positive");
  return m;
}

void make_dir(const char* dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw negfmini::Error(negfmini::ErrorKind::Io, std::string("cannot create ") + dir + ": " + ec.message());
}

}  // namespace

extern "C" {

const char* negfmini_version(void) { return NEGFMINI_VERSION; }

const char* negfmini_last_error(void) { return g_last_error.c_str(); }

const char* negfmini_status_name(negfmini_status s) {
  switch (s) {
    case NEGFMINI_OK: return "ok";
    case NEGFMINI_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case NEGFMINI_ERR_PARTITION: return "partition";
    case NEGFMINI_ERR_FORMAT: return "format";
    case NEGFMINI_ERR_DIMENSION: return "dimension";
    case NEGFMINI_ERR_HERMITICITY: return "hermiticity";
    case NEGFMINI_ERR_NONCONVERGENCE: return "non_convergence";
    case NEGFMINI_ERR_SINGULAR_BLOCK: return "singular_block";
    case NEGFMINI_ERR_DIVERGENCE: return "divergence";
    case NEGFMINI_ERR_IO: return "io";
    case NEGFMINI_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void negfmini_device_params_default(negfmini_device_params* p) {
  if (!p) return;
  const negfmini::DeviceParams d;
  p->lattice = "chain";
  p->na = d.na;
  p->nb = d.nb;
  p->norb = d.norb;
  p->bnum = d.bnum;
  p->ribbon_width = d.ribbon_width;
  p->seed = d.seed;
  p->vds = d.vds;
  p->vgs = d.vgs;
  p->ep_coupling = d.ep_coupling;
  p->phonon_energy = d.phonon_energy;
  p->nkz = d.grid.nkz;
  p->nqz = d.grid.nqz;
  p->ne = d.grid.ne;
  p->nomega = d.grid.nomega;
  p->omega_step = d.grid.omega_step;
  p->temperature = d.grid.temperature;
}

negfmini_status negfmini_device_generate(const negfmini_device_params* p, negfmini_device** out) {
  return guarded([&] {
    require(p, "params");
    require(out, "out");
    *out = nullptr;
    negfmini::DeviceParams d;
    d.lattice = negfmini::parse_lattice(p->lattice ? p->lattice : "chain");
    d.na = p->na;
    d.nb = p->nb;
    d.norb = p->norb;
    d.bnum = p->bnum;
    d.ribbon_width = p->ribbon_width;
    d.seed = p->seed;
    d.vds = p->vds;
    d.vgs = p->vgs;
    d.ep_coupling = p->ep_coupling;
    d.phonon_energy = p->phonon_energy;
    d.grid.nkz = p->nkz;
    d.grid.nqz = p->nqz;
    d.grid.ne = p->ne;
    d.grid.nomega = p->nomega;
    d.grid.omega_step = p->omega_step;
    d.grid.temperature = p->temperature;
    *out = new negfmini_device{negfmini::generate_device(d)};
  });
}

negfmini_status negfmini_device_load(const char* path, negfmini_device** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new negfmini_device{negfmini::load_device(path)};
  });
}

negfmini_status negfmini_device_save(const negfmini_device* d, const char* path) {
  return guarded([&] {
    require(d, "device");
    require(path, "path");
    negfmini::save_device(d->dev, path);
  });
}

negfmini_status negfmini_device_get_info(const negfmini_device* d, negfmini_device_info* info) {
  return guarded([&] {
    require(d, "device");
    require(info, "info");
    const auto& s = d->dev.structure;
    const auto& g = d->dev.grid;
    std::memset(info, 0, sizeof *info);
    std::strncpy(info->lattice, negfmini::to_string(s.lattice), sizeof info->lattice - 1);
    info->na = s.na;
    info->nb = s.nb;
    info->norb = s.norb;
    info->n3d = s.n3d;
    info->bnum = s.bnum;
    info->nkz = g.nkz;
    info->nqz = g.nqz;
    info->ne = g.ne;
    info->nomega = g.nomega;
    info->omega_step = g.omega_step;
    info->emin = g.emin;
    info->emax = g.emax;
    info->temperature = g.temperature;
    info->vds = s.vds;
    info->vgs = s.vgs;
    info->seed = s.seed;
  });
}

void negfmini_device_free(negfmini_device* d) { delete d; }

void negfmini_sim_config_default(negfmini_sim_config* c) {
  if (!c) return;
  const negfmini::ScfConfig s;
  std::memset(c, 0, sizeof *c);
  c->max_iter = s.max_iter;
  c->tol = s.tol;
  c->mixing = s.mixing;
  c->cache_mode = negfmini::to_string(s.cache_mode);
  c->sse_variant = negfmini::to_string(s.sse_variant);
  c->force_unit_scale = 0;
  c->threads = 0;
}

negfmini_status negfmini_simulate(const negfmini_device* d, const negfmini_sim_config* c, negfmini_result** out) {
  return guarded([&] {
    require(d, "device");
    require(c, "config");
    require(out, "out");
    *out = nullptr;
    const negfmini::ScfConfig cfg = scf_config(*c);
    auto* r = new negfmini_result{d->dev, negfmini::SpectralGrid::build(grid_for(d->dev, *c)), {}};
    try {
      r->scf = negfmini::run_scf(r->dev, r->grid, cfg);
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

negfmini_status negfmini_result_get_summary(const negfmini_result* r, negfmini_result_summary* s) {
  return guarded([&] {
    require(r, "result");
    require(s, "summary");
    std::memset(s, 0, sizeof *s);
    s->status = negfmini::to_string(r->scf.status);
    s->converged = r->scf.converged() ? 1 : 0;
    s->iterations = r->scf.iterations();
    s->current = r->scf.current();
    s->current_variation = r->scf.obs.current_variation();
    s->energy_residual = r->scf.obs.energy_residual();
    s->boundary_solves = r->scf.boundary_solves;
    s->boundary_points = r->scf.boundary_points;
    s->specializations = r->scf.specializations;
    for (const auto& it : r->scf.trace) {
      s->gf_seconds += it.gf_seconds;
      s->sse_seconds += it.sse_seconds;
    }
  });
}

negfmini_status negfmini_result_current_profile(const negfmini_result* r, double* buf, size_t cap, size_t* n) {
  return guarded([&] {
    require(r, "result");
    require(n, "n");
    const auto& cur = r->scf.obs.current;
    *n = cur.size();
    if (cap) require(buf, "buf");
    for (size_t i = 0; i < cur.size() && i < cap; ++i) buf[i] = cur[i];
  });
}

negfmini_status negfmini_result_write(const negfmini_result* r, const char* out_dir) {
  return guarded([&] {
    require(r, "result");
    require(out_dir, "out_dir");
    make_dir(out_dir);
    const std::filesystem::path dir(out_dir);
    negfmini::write_scf_trace(r->scf, (dir / "scf_trace.csv").string());
    negfmini::write_current_profile(r->scf, r->dev, (dir / "current_profile.csv").string());
    negfmini::write_spectral_current(r->scf, r->dev, r->grid, (dir / "spectral_current.csv").string());
    negfmini::write_energy_currents(r->scf, r->dev, (dir / "energy_currents.csv").string());
  });
}

void negfmini_result_free(negfmini_result* r) { delete r; }

negfmini_status negfmini_compare_precision(const negfmini_device* d, const negfmini_sim_config* c,
                                           const char* out_dir, negfmini_precision_summary* s) {
  return guarded([&] {
    require(d, "device");
    require(c, "config");
    require(s, "summary");
    const negfmini::ScfConfig cfg = scf_config(*c);
    const negfmini::SpectralGrid grid = negfmini::SpectralGrid::build(grid_for(d->dev, *c));
    const negfmini::PrecisionReport rep = negfmini::compare_precision(d->dev, grid, cfg);
    std::memset(s, 0, sizeof *s);
    s->iter_double = rep.iter_double;
    s->iter_mixed = rep.iter_mixed;
    s->iter_unscaled = rep.iter_unscaled;
    s->current_double = rep.current_double.empty() ? 0.0 : rep.current_double.back();
    s->current_mixed = rep.current_mixed.empty() ? 0.0 : rep.current_mixed.back();
    s->current_unscaled = rep.current_unscaled.empty() ? 0.0 : rep.current_unscaled.back();
    s->rel_diff_mixed = rep.rel_diff_mixed;
    s->rel_diff_unscaled = rep.rel_diff_unscaled;
    s->same_rate = rep.same_rate ? 1 : 0;
    s->unscaled_worse = rep.unscaled_worse ? 1 : 0;
    if (out_dir) {
      make_dir(out_dir);
      const std::filesystem::path dir(out_dir);
      negfmini::write_precision_report(rep, (dir / "precision_trace.csv").string(),
                                       (dir / "precision_histogram.csv").string());
    }
  });
}

negfmini_status negfmini_model_preset(const char* name, int nkz, double ne, negfmini_model_params* p) {
  return guarded([&] {
    require(name, "name");
    require(p, "params");
    negfmini::ModelParams m;
    const std::string n(name);
    if (n == "small") m = negfmini::small_structure(nkz > 0 ? nkz : 3);
    else if (n == "large") m = negfmini::large_structure(ne > 0 ? ne : 1000);
    else throw negfmini::Error(negfmini::ErrorKind::InvalidArgument, "structure: unknown preset '" + n + "'");
    *p = {m.na, m.nb, m.norb, m.n3d, m.nkz, m.nqz, m.ne, m.nomega, m.bnum};
  });
}

negfmini_status negfmini_flop_model(const negfmini_model_params* p, const char* kernel, double* flops) {
  return guarded([&] {
    require(p, "params");
    require(kernel, "kernel");
    require(flops, "flops");
    const negfmini::ModelParams m = model_of(*p);
    for (auto k : {negfmini::Kernel::BoundaryConditions, negfmini::Kernel::Rgf, negfmini::Kernel::SseOmen,
                   negfmini::Kernel::SseDace, negfmini::Kernel::BoundaryPhonon, negfmini::Kernel::RgfPhonon})
      if (std::strcmp(kernel, negfmini::to_string(k)) == 0) {
        *flops = negfmini::flop_model(m, k);
        return;
      }
    throw negfmini::Error(negfmini::ErrorKind::InvalidArgument, std::string("kernel: unknown '") + kernel + "'");
  });
}

negfmini_status negfmini_cost_model(const negfmini_model_params* p, const negfmini_plan* plan,
                                    negfmini_cost_summary* s) {
  return guarded([&] {
    require(p, "params");
    require(plan, "plan");
    require(s, "summary");
    const negfmini::ModelParams m = model_of(*p);
    negfmini::DecompositionPlan ae;
    if (plan->ta == 0 && plan->te == 0) {
      ae = negfmini::default_plan(m, plan->procs);
    } else {
      ae.P = plan->procs;
      ae.Ta = plan->ta;
      ae.TE = plan->te;
    }
    ae.allow_fractional_atoms = plan->allow_fractional_atoms != 0;
    negfmini::DecompositionPlan me;
    me.scheme = negfmini::Scheme::MomentumEnergy;
    me.P = plan->procs;
    const auto ra = negfmini::comm_model(m, ae);
    const auto ro = negfmini::comm_model(m, me);
    const auto t = negfmini::time_lower_bound(ra, plan->injection_bw, plan->procs_per_node);
    std::memset(s, 0, sizeof *s);
    s->ta = ae.Ta;
    s->te = ae.TE;
    s->momentum_energy_bytes = ro.total_bytes();
    s->atom_energy_bytes = ra.total_bytes();
    s->reduction_ratio = negfmini::reduction_ratio(ro, ra);
    s->g_per_process = ra.g_per_process;
    s->sigma_per_process = ra.sigma_per_process;
    s->d_per_process = ra.d_per_process;
    s->pi_per_process = ra.pi_per_process;
    s->bound_g = t[0];
    s->bound_sigma = t[1];
    s->bound_d = t[2];
    s->bound_pi = t[3];
    if (plan->procs >= 2) {
      const auto split = negfmini::balance_processes(m, plan->procs);
      s->electron_procs = split.electron;
      s->phonon_procs = split.phonon;
      s->imbalance = split.imbalance;
    }
    s->flops_sse_omen = negfmini::flop_model(m, negfmini::Kernel::SseOmen);
    s->flops_sse_dace = negfmini::flop_model(m, negfmini::Kernel::SseDace);
    s->flops_rgf = negfmini::flop_model(m, negfmini::Kernel::Rgf);
    s->flops_bc = negfmini::flop_model(m, negfmini::Kernel::BoundaryConditions);
  });
}

negfmini_status negfmini_write_cost_tables(const char* csv_path, const char* summary_path) {
  return guarded([&] {
    require(csv_path, "csv_path");
    require(summary_path, "summary_path");
    negfmini::write_cost_tables(csv_path, summary_path);
  });
}

negfmini_status negfmini_bench(const negfmini_device* d, const char* const* groups, size_t ngroups, int repeats,
                               const char* csv_path, size_t* entries) {
  return guarded([&] {
    require(d, "device");
    require(csv_path, "csv_path");
    if (ngroups) require(groups, "groups");
    std::vector<std::string> g;
    for (size_t i = 0; i < ngroups; ++i) {
      require(groups[i], "groups[i]");
      g.emplace_back(groups[i]);
    }
    const auto rep = negfmini::run_bench(g, d->dev, repeats);
    negfmini::write_bench(rep, csv_path);
    if (entries) *entries = rep.entries.size();
  });
}

}  // extern "C"
