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

#include "negfmini/rgf.hpp"

#include <sstream>

namespace negfmini {

double rgf_model_flops(int bnum, int blockdim) {
  const double m = blockdim;
  return 8.0 * (26.0 * bnum - 25.0) * m * m * m;
}

const char* to_string(CacheMode m) {
  switch (m) {
    case CacheMode::None: return "none";
    case CacheMode::BC: return "bc";
    case CacheMode::BCSpec: return "bc+spec";
  }
  return "?";
}

CacheMode parse_cache_mode(const std::string& s) {
  if (s == "none" || s == "no_cache") return CacheMode::None;
  if (s == "bc" || s == "cache_bc") return CacheMode::BC;
  if (s == "bc+spec" || s == "cache_bc_spec") return CacheMode::BCSpec;
  throw Error(ErrorKind::InvalidArgument, "cache: unknown mode '" + s + "' (expected none, bc or bc+spec)");
}

RgfResult rgf_point(const BlockTriMatrix& a, const std::vector<CMatrix>& sl, const std::vector<CMatrix>& sg,
                    OpCount* ops) {
  const int nb = a.bnum;
  if (static_cast<int>(sl.size()) != nb || static_cast<int>(sg.size()) != nb)
    throw Error(ErrorKind::Dimension, "rgf_point: self-energy block count differs from bnum");
  for (int i = 0; i < nb; ++i)
    if (sl[i].rows() != a.blockdim || sg[i].rows() != a.blockdim)
      throw Error(ErrorKind::Dimension, "rgf_point: self-energy block size differs from blockdim");

  std::vector<CMatrix> g(nb), gl(nb), gg(nb);
  auto invert = [&](const CMatrix& m, int block) {
    try {
      return inverse(m, ops);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "rgf_point: singular pivot in block " << block << " (" << e.what() << ")";
      throw Error(ErrorKind::SingularBlock, os.str());
    }
  };
  // left-connected sweep
  for (int n = 0; n < nb; ++n) {
    CMatrix d = a.diag[n];
    CMatrix inl = sl[n], ing = sg[n];
    if (n > 0) {
      const CMatrix& l = a.lower[n - 1];
      d -= matmul(matmul(l, g[n - 1], ops), a.upper[n - 1], ops);
      const CMatrix lh = l.adjoint();
      inl += matmul(matmul(l, gl[n - 1], ops), lh, ops);
      ing += matmul(matmul(l, gg[n - 1], ops), lh, ops);
    }
    g[n] = invert(d, n);
    const CMatrix gh = g[n].adjoint();
    gl[n] = matmul(matmul(g[n], inl, ops), gh, ops);
    gg[n] = matmul(matmul(g[n], ing, ops), gh, ops);
  }
  RgfResult r;
  r.GR.resize(nb);
  r.Gl.resize(nb);
  r.Gg.resize(nb);
  r.Gl_lower.resize(nb > 0 ? nb - 1 : 0);
  r.Gg_lower.resize(r.Gl_lower.size());
  r.GR[nb - 1] = g[nb - 1];
  r.Gl[nb - 1] = gl[nb - 1];
  r.Gg[nb - 1] = gg[nb - 1];
  // backward sweep
  for (int n = nb - 2; n >= 0; --n) {
    const CMatrix gu = matmul(g[n], a.upper[n], ops);
    const CMatrix gu_h = gu.adjoint();
    const CMatrix GL = matmul(r.GR[n + 1], a.lower[n], ops);  // G_{n+1,n+1} L_n
    const CMatrix q = matmul(gu, GL, ops);
    r.GR[n] = g[n] + matmul(q, g[n], ops);
    auto lesser_like = [&](const CMatrix& x, const CMatrix& xnext, CMatrix& diag, CMatrix& lower) {
      diag = x + matmul(matmul(gu, xnext, ops), gu_h, ops);
      diag += matmul(q, x, ops);
      diag += matmul(x, q.adjoint(), ops);
      lower = -1.0 * matmul(GL, x, ops);
      lower -= matmul(xnext, gu_h, ops);
    };
    lesser_like(gl[n], r.Gl[n + 1], r.Gl[n], r.Gl_lower[n]);
    lesser_like(gg[n], r.Gg[n + 1], r.Gg[n], r.Gg_lower[n]);
  }
  return r;
}

}  // namespace negfmini
