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

#include "negfmini/scf.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "negfmini/parallel.hpp"

namespace negfmini {

const char* to_string(ScfStatus s) {
  switch (s) {
    case ScfStatus::Converged: return "converged";
    case ScfStatus::MaxIter: return "max_iter";
    case ScfStatus::Ballistic: return "ballistic";
  }
  return "?";
}

void validate_scf_config(const ScfConfig& c) {
  if (c.max_iter < 1) throw Error(ErrorKind::InvalidArgument, "max_iter: must be at least 1");
  if (!(c.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol: must be positive");
  if (!(c.mixing > 0.0 && c.mixing <= 1.0)) throw Error(ErrorKind::InvalidArgument, "mixing: must lie in (0, 1]");
  if (c.threads < 0) throw Error(ErrorKind::InvalidArgument, "threads: must be non-negative");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void mix_into(std::vector<cplx>& old, const std::vector<cplx>& fresh, double alpha) {
  if (old.size() != fresh.size()) {
    old.assign(fresh.size(), cplx(0.0));
  }
  for (std::size_t i = 0; i < old.size(); ++i) old[i] = alpha * fresh[i] + (1.0 - alpha) * old[i];
}

SelfEnergyTensors zero_like(const SelfEnergyTensors& s) {
  SelfEnergyTensors z;
  z.sigma_lesser = ElectronTensor(s.sigma_lesser.nk, s.sigma_lesser.ne, s.sigma_lesser.na, s.sigma_lesser.norb);
  z.sigma_greater = z.sigma_lesser;
  z.pi_lesser = PhononTensor(s.pi_lesser.nq, s.pi_lesser.nw, s.pi_lesser.na, s.pi_lesser.nslot, s.pi_lesser.n3d);
  z.pi_greater = z.pi_lesser;
  return z;
}

}  // namespace

void check_divergence(const std::vector<double>& currents) {
  const std::size_t n = currents.size();
  if (n == 0) return;
  const double now = currents.back();
  if (!std::isfinite(now)) {
    std::ostringstream os;
    os << "scf: current became non-finite at iteration " << n;
    throw Error(ErrorKind::Divergence, os.str());
  }
  if (n > 5) {
    const double before = std::fabs(currents[n - 6]);
    if (before > kCurrentFloor && std::fabs(now) > 10.0 * before) {
      std::ostringstream os;
      os << "scf: diverging, |I| grew from " << before << " to " << std::fabs(now) << " between iterations "
         << n - 5 << " and " << n << " (reduce the coupling or the mixing factor)";
      throw Error(ErrorKind::Divergence, os.str());
    }
  }
}

ScfResult run_scf(const Device& dev, const SpectralGrid& grid, const ScfConfig& cfg) {
  validate_scf_config(cfg);
  const int threads = resolve_threads(cfg.threads);
  ScfResult res;
  GfPhaseCache cache;
  bool have_sse = false;
  double prev = 0.0;
  std::vector<double> history;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    ScfIteration rec;
    rec.iter = it;
    auto t0 = Clock::now();
    res.gf = gf_phase(dev, grid, have_sse ? &res.sse : nullptr, cfg.cache_mode, cache, threads);
    rec.gf_seconds = seconds_since(t0);
    rec.flops_gf = res.gf.ops_electron.flops() + res.gf.ops_phonon.flops() + res.gf.ops_boundary.flops();
    res.obs = observables(res.gf, dev, grid);
    rec.current = res.obs.drain_current();
    rec.econs_residual = res.obs.energy_residual();
    const double diff = std::fabs(rec.current - prev);
    rec.rel_change = diff == 0.0 ? 0.0 : diff / std::max(std::fabs(rec.current), kCurrentFloor);
    history.push_back(rec.current);
    check_divergence(history);
    prev = rec.current;
    const bool converged = rec.rel_change < cfg.tol || diff <= kCurrentFloor;
    const bool last = converged || it == cfg.max_iter;
    if (!last) {
      t0 = Clock::now();
      const GfTensors g{&res.gf.Gl, &res.gf.Gg, &res.gf.Dl, &res.gf.Dg};
      SseOptions opt;
      opt.variant = cfg.sse_variant;
      opt.threads = threads;
      opt.force_unit_scale = cfg.force_unit_scale;
      res.sse_raw = sse_compute(dev, grid, g, opt, &rec.ledger);
      rec.sse_seconds = seconds_since(t0);
      rec.flops_sse = rec.ledger.flops();
      if (!have_sse) res.sse = zero_like(res.sse_raw);
      mix_into(res.sse.sigma_lesser.data, res.sse_raw.sigma_lesser.data, cfg.mixing);
      mix_into(res.sse.sigma_greater.data, res.sse_raw.sigma_greater.data, cfg.mixing);
      mix_into(res.sse.pi_lesser.data, res.sse_raw.pi_lesser.data, cfg.mixing);
      mix_into(res.sse.pi_greater.data, res.sse_raw.pi_greater.data, cfg.mixing);
      have_sse = true;
    }
    res.trace.push_back(rec);
    if (last) {
      if (cfg.max_iter == 1) res.status = ScfStatus::Ballistic;
      else res.status = converged ? ScfStatus::Converged : ScfStatus::MaxIter;
      break;
    }
  }
  res.boundary_solves = cache.boundary_solves;
  res.boundary_points = cache.boundary_points;
  res.specializations = cache.specializations;
  return res;
}

Histogram sigma_histogram(const SelfEnergyTensors& s, double lo, double hi, int bins) {
  Histogram h;
  h.edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * i / bins;
  h.counts.assign(bins, 0);
  auto add = [&](double v) {
    const double a = std::fabs(v);
    if (a == 0.0) {
      ++h.zeros;
      return;
    }
    const double l = std::log10(a);
    int b = static_cast<int>(std::floor((l - lo) / (hi - lo) * bins));
    b = std::clamp(b, 0, bins - 1);
    ++h.counts[b];
  };
  for (const auto* t : {&s.sigma_lesser, &s.sigma_greater})
    for (const cplx& z : t->data) {
      add(z.real());
      add(z.imag());
    }
  return h;
}

PrecisionReport compare_precision(const Device& dev, const SpectralGrid& grid, const ScfConfig& cfg) {
  PrecisionReport rep;
  ScfConfig c = cfg;
  c.sse_variant = SseVariant::Regrouped;
  c.force_unit_scale = false;
  const ScfResult rd = run_scf(dev, grid, c);
  c.sse_variant = SseVariant::Mixed;
  const ScfResult rm = run_scf(dev, grid, c);
  c.force_unit_scale = true;
  const ScfResult ru = run_scf(dev, grid, c);
  for (const auto& r : rd.trace) rep.current_double.push_back(r.current);
  for (const auto& r : rm.trace) rep.current_mixed.push_back(r.current);
  for (const auto& r : ru.trace) rep.current_unscaled.push_back(r.current);
  rep.iter_double = rd.iterations();
  rep.iter_mixed = rm.iterations();
  rep.iter_unscaled = ru.iterations();
  const double ref = std::max(std::fabs(rd.current()), kCurrentFloor);
  rep.rel_diff_mixed = std::fabs(rm.current() - rd.current()) / ref;
  rep.rel_diff_unscaled = std::fabs(ru.current() - rd.current()) / ref;
  rep.same_rate = std::abs(rep.iter_mixed - rep.iter_double) <= 2;
  rep.unscaled_worse = rep.rel_diff_unscaled > rep.rel_diff_mixed;
  rep.hist_double = sigma_histogram(rd.sse_raw);
  rep.hist_mixed = sigma_histogram(rm.sse_raw);
  rep.hist_unscaled = sigma_histogram(ru.sse_raw);
  return rep;
}

}  // namespace negfmini
