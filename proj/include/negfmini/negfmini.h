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

#ifndef NEGFMINI_H
#define NEGFMINI_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(NEGFMINI_BUILDING_LIBRARY)
#define NEGFMINI_API __attribute__((visibility("default")))
#else
#define NEGFMINI_API
#endif

typedef enum negfmini_status {
  NEGFMINI_OK = 0,
  NEGFMINI_ERR_INVALID_ARGUMENT = 1,
  NEGFMINI_ERR_PARTITION = 2,
  NEGFMINI_ERR_FORMAT = 3,
  NEGFMINI_ERR_DIMENSION = 4,
  NEGFMINI_ERR_HERMITICITY = 5,
  NEGFMINI_ERR_NONCONVERGENCE = 6,
  NEGFMINI_ERR_SINGULAR_BLOCK = 7,
  NEGFMINI_ERR_DIVERGENCE = 8,
  NEGFMINI_ERR_IO = 9,
  NEGFMINI_ERR_INTERNAL = 10
} negfmini_status;

/* Opaque handles. */
typedef struct negfmini_device negfmini_device;
typedef struct negfmini_result negfmini_result;

NEGFMINI_API const char* negfmini_version(void);
/* Message of the last failed call on the calling thread ("" if none). */
NEGFMINI_API const char* negfmini_last_error(void);
NEGFMINI_API const char* negfmini_status_name(negfmini_status s);

/* ---- devices ---- */

typedef struct negfmini_device_params {
  const char* lattice; /* "chain" or "ribbon" */
  int na, nb, norb, bnum, ribbon_width;
  uint64_t seed;
  double vds, vgs;
  double ep_coupling, phonon_energy;
  int nkz, nqz, ne, nomega, omega_step;
  double temperature;
} negfmini_device_params;

typedef struct negfmini_device_info {
  char lattice[16];
  int na, nb, norb, n3d, bnum;
  int nkz, nqz, ne, nomega, omega_step;
  double emin, emax, temperature, vds, vgs;
  uint64_t seed;
} negfmini_device_info;

NEGFMINI_API void negfmini_device_params_default(negfmini_device_params* p);
NEGFMINI_API negfmini_status negfmini_device_generate(const negfmini_device_params* p, negfmini_device** out);
NEGFMINI_API negfmini_status negfmini_device_load(const char* path, negfmini_device** out);
NEGFMINI_API negfmini_status negfmini_device_save(const negfmini_device* d, const char* path);
NEGFMINI_API negfmini_status negfmini_device_get_info(const negfmini_device* d, negfmini_device_info* info);
NEGFMINI_API void negfmini_device_free(negfmini_device* d);

/* ---- simulation ---- */

typedef struct negfmini_sim_config {
  int max_iter;
  double tol;
  double mixing;
  const char* cache_mode;  /* "none", "bc", "bc+spec" */
  const char* sse_variant; /* "naive", "regrouped", "mixed" */
  int force_unit_scale;    /* mixed variant without scale normalization */
  int threads;             /* 0: NEGFMINI_THREADS or hardware concurrency */
  /* grid overrides; 0 keeps the value stored with the device */
  int nkz, nqz, ne, nomega, omega_step;
} negfmini_sim_config;

typedef struct negfmini_result_summary {
  const char* status; /* "converged", "max_iter", "ballistic" (static storage) */
  int converged;
  int iterations;
  double current;
  double current_variation; /* max relative deviation of I(x) from its mean */
  double energy_residual;   /* same for the total energy current */
  uint64_t boundary_solves, boundary_points, specializations;
  double gf_seconds, sse_seconds;
} negfmini_result_summary;

NEGFMINI_API void negfmini_sim_config_default(negfmini_sim_config* c);
NEGFMINI_API negfmini_status negfmini_simulate(const negfmini_device* d, const negfmini_sim_config* c,
                                               negfmini_result** out);
NEGFMINI_API negfmini_status negfmini_result_get_summary(const negfmini_result* r, negfmini_result_summary* s);
/* Copies up to cap values of the per-cut current profile; *n receives the cut count. */
NEGFMINI_API negfmini_status negfmini_result_current_profile(const negfmini_result* r, double* buf, size_t cap,
                                                             size_t* n);
/* Writes scf_trace.csv, current_profile.csv, spectral_current.csv, energy_currents.csv. */
NEGFMINI_API negfmini_status negfmini_result_write(const negfmini_result* r, const char* out_dir);
NEGFMINI_API void negfmini_result_free(negfmini_result* r);

typedef struct negfmini_precision_summary {
  int iter_double, iter_mixed, iter_unscaled;
  double current_double, current_mixed, current_unscaled;
  double rel_diff_mixed, rel_diff_unscaled;
  int same_rate;      /* iteration counts within +-2 */
  int unscaled_worse; /* unscaled error strictly larger */
} negfmini_precision_summary;

/* Writes precision_trace.csv and precision_histogram.csv into out_dir when non-null. */
NEGFMINI_API negfmini_status negfmini_compare_precision(const negfmini_device* d, const negfmini_sim_config* c,
                                                        const char* out_dir, negfmini_precision_summary* s);

/* ---- cost model ---- */

typedef struct negfmini_model_params {
  double na, nb, norb, n3d, nkz, nqz, ne, nomega, bnum;
} negfmini_model_params;

typedef struct negfmini_plan {
  int procs;
  int ta, te;                /* 0, 0: default tiling policy */
  double injection_bw;       /* bytes per second per node */
  int procs_per_node;
  int allow_fractional_atoms;
} negfmini_plan;

typedef struct negfmini_cost_summary {
  int ta, te;
  double momentum_energy_bytes, atom_energy_bytes, reduction_ratio;
  double g_per_process, sigma_per_process, d_per_process, pi_per_process;
  double bound_g, bound_sigma, bound_d, bound_pi; /* seconds per collective */
  int electron_procs, phonon_procs;
  double imbalance;
  double flops_sse_omen, flops_sse_dace, flops_rgf, flops_bc;
} negfmini_cost_summary;

/* name: "small" or "large"; nkz applies to "small", ne to "large" (0 keeps the defaults). */
NEGFMINI_API negfmini_status negfmini_model_preset(const char* name, int nkz, double ne, negfmini_model_params* p);
/* kernel: boundary_conditions, rgf, sse_omen, sse_dace, boundary_phonon, rgf_phonon */
NEGFMINI_API negfmini_status negfmini_flop_model(const negfmini_model_params* p, const char* kernel, double* flops);
NEGFMINI_API negfmini_status negfmini_cost_model(const negfmini_model_params* p, const negfmini_plan* plan,
                                                 negfmini_cost_summary* s);
NEGFMINI_API negfmini_status negfmini_write_cost_tables(const char* csv_path, const char* summary_path);

/* ---- benchmarks ---- */

/* groups: any of "sbsmm", "triple", "sse"; ngroups = 0 writes an empty report. */
NEGFMINI_API negfmini_status negfmini_bench(const negfmini_device* d, const char* const* groups, size_t ngroups,
                                            int repeats, const char* csv_path, size_t* entries);

#ifdef __cplusplus
}
#endif

#endif /* NEGFMINI_H */
