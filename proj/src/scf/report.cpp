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

#include <algorithm>

#include "negfmini/csv.hpp"
#include "negfmini/scf.hpp"

namespace negfmini {

void write_scf_trace(const ScfResult& r, const std::string& path) {
  CsvWriter w(path, {"iter", "current", "rel_change", "gf_seconds", "sse_seconds", "flops_gf", "flops_sse",
                     "econs_residual"});
  for (const auto& it : r.trace)
    w.row({csv_number(static_cast<long long>(it.iter)), csv_number(it.current), csv_number(it.rel_change),
           csv_number(it.gf_seconds), csv_number(it.sse_seconds), csv_number(it.flops_gf), csv_number(it.flops_sse),
           csv_number(it.econs_residual)});
  w.close();
}

void write_current_profile(const ScfResult& r, const Device& dev, const std::string& path) {
  const auto x = cut_positions(dev);
  CsvWriter w(path, {"cut", "x_nm", "current"});
  for (int c = 0; c < r.obs.ncut; ++c)
    w.row({csv_number(static_cast<long long>(c)), csv_number(x[c]), csv_number(r.obs.current[c])});
  w.close();
}

void write_energy_currents(const ScfResult& r, const Device& dev, const std::string& path) {
  const auto x = cut_positions(dev);
  CsvWriter w(path, {"cut", "x_nm", "electron", "phonon", "total"});
  for (int c = 0; c < r.obs.ncut; ++c)
    w.row({csv_number(static_cast<long long>(c)), csv_number(x[c]), csv_number(r.obs.energy_electron[c]),
           csv_number(r.obs.energy_phonon[c]), csv_number(r.obs.energy_total[c])});
  w.close();
}

void write_spectral_current(const ScfResult& r, const Device& dev, const SpectralGrid& grid,
                            const std::string& path) {
  const auto x = cut_positions(dev);
  CsvWriter w(path, {"cut", "x_nm", "energy_eV", "spectral_current"});
  for (int c = 0; c < r.obs.ncut; ++c)
    for (int e = 0; e < r.obs.ne; ++e)
      w.row({csv_number(static_cast<long long>(c)), csv_number(x[c]), csv_number(grid.energies[e]),
             csv_number(r.obs.spectral[static_cast<std::size_t>(c) * r.obs.ne + e])});
  w.close();
}

void write_precision_report(const PrecisionReport& r, const std::string& trace_path, const std::string& hist_path) {
  {
    CsvWriter w(trace_path, {"iter", "current_double", "current_mixed", "current_unscaled"});
    const std::size_t n =
        std::max({r.current_double.size(), r.current_mixed.size(), r.current_unscaled.size()});
    auto at = [](const std::vector<double>& v, std::size_t i) { return i < v.size() ? csv_number(v[i]) : ""; };
    for (std::size_t i = 0; i < n; ++i)
      w.row({csv_number(static_cast<long long>(i + 1)), at(r.current_double, i), at(r.current_mixed, i),
             at(r.current_unscaled, i)});
    w.close();
  }
  CsvWriter w(hist_path, {"log10_lo", "log10_hi", "count_double", "count_mixed", "count_unscaled"});
  for (std::size_t b = 0; b < r.hist_double.counts.size(); ++b)
    w.row({csv_number(r.hist_double.edges[b]), csv_number(r.hist_double.edges[b + 1]),
           csv_number(static_cast<long long>(r.hist_double.counts[b])),
           csv_number(static_cast<long long>(r.hist_mixed.counts[b])),
           csv_number(static_cast<long long>(r.hist_unscaled.counts[b]))});
  w.close();
}

}  // namespace negfmini
