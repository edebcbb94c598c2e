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

#include "negfmini/boundary.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "negfmini/parallel.hpp"

namespace negfmini {

namespace {

constexpr int kPolishMaxOrder = 24;
constexpr int kPolishSteps = 4;

// Newton refinement of g = (W00 - W01 g W10)^-1. Decimation loses digits when W00 is
// nearly singular (band centre with tiny broadening); this restores the fixed point.
void polish_surface(const CMatrix& w00, const CMatrix& w01, const CMatrix& w10, CMatrix& g, double tol,
                    OpCount& ops) {
  const int n = g.rows();
  for (int step = 0; step <= kPolishSteps; ++step) {
    CMatrix m = w00;
    matmul_acc(m, matmul(w01, g, &ops), w10, -1.0, &ops);
    const CMatrix gn = inverse(m, &ops);
    const CMatrix r = gn - g;
    if (max_abs(r) <= tol * std::max(1.0, max_abs(g)) || n > kPolishMaxOrder || step == kPolishSteps) return;
    // (I - Y^T kron X) vec(dg) = vec(r) with X = G W01, Y = W10 G
    const CMatrix x = matmul(gn, w01, &ops), y = matmul(w10, gn, &ops);
    const int nn = n * n;
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Identity(nn, nn);
    Eigen::VectorXcd rhs(nn);
    for (int q = 0; q < n; ++q)
      for (int p = 0; p < n; ++p) {
        rhs(q * n + p) = r(p, q);
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) k(q * n + p, j * n + i) -= y(j, q) * x(p, i);
      }
    const Eigen::VectorXcd dg = k.partialPivLu().solve(rhs);
    ops.other_madds += static_cast<std::uint64_t>(nn) * nn * nn + static_cast<std::uint64_t>(nn) * nn;
    for (int q = 0; q < n; ++q)
      for (int p = 0; p < n; ++p) g(p, q) += dg(q * n + p);
  }
}

}  // namespace

SurfaceGF surface_gf(const CMatrix& h00, const CMatrix& h01, const CMatrix& s00, const CMatrix& s01, cplx z,
                     double tol, int max_iter) {
  if (!(z.imag() > 0.0)) throw Error(ErrorKind::InvalidArgument, "surface_gf: broadening must be positive (Im z > 0)");
  const int n = h00.rows();
  if (h00.cols() != n || h01.rows() != n || h01.cols() != n || s00.rows() != n || s01.rows() != n)
    throw Error(ErrorKind::Dimension, "surface_gf: lead blocks must be square and of equal size");
  SurfaceGF out;
  // W = z S - H, with W10 = z S01† - H01†
  CMatrix es = z * s00 - h00;
  CMatrix e = es;
  CMatrix a = z * s01 - h01;
  CMatrix b = z * s01.adjoint() - h01.adjoint();
  const double scale = std::max(max_abs(es), 1e-300);
  int it = 0;
  double update = 0.0;
  for (;;) {
    if (it >= max_iter) {
      std::ostringstream os;
      os << "surface_gf: decimation did not converge after " << max_iter << " iterations (residual " << update << ")";
      throw Error(ErrorKind::NonConvergence, os.str());
    }
    ++it;
    const CMatrix g = inverse(e, &out.ops);
    const CMatrix ag = matmul(a, g, &out.ops);
    const CMatrix bg = matmul(b, g, &out.ops);
    const CMatrix agb = matmul(ag, b, &out.ops);
    const CMatrix bga = matmul(bg, a, &out.ops);
    const CMatrix aga = matmul(ag, a, &out.ops);
    const CMatrix bgb = matmul(bg, b, &out.ops);
    es -= agb;
    e -= agb;
    e -= bga;
    a = -1.0 * aga;
    b = -1.0 * bgb;
    update = max_abs(agb);
    if (update <= tol * scale) break;
  }
  out.g = inverse(es, &out.ops);
  polish_surface(z * s00 - h00, z * s01 - h01, z * s01.adjoint() - h01.adjoint(), out.g, kPolishTol, out.ops);
  out.iterations = it;
  out.residual = update;
  const double lam = min_broadening_eigenvalue(out.g);
  if (lam < -1e-10 * std::max(1.0, max_abs(out.g))) {
    std::ostringstream os;
    os << "surface_gf: result is not retarded (broadening eigenvalue " << lam << ")";
    throw Error(ErrorKind::NonConvergence, os.str());
  }
  return out;
}

double min_broadening_eigenvalue(const CMatrix& x) {
  const int n = x.rows();
  Eigen::MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = cplx(0.0, 1.0) * (x(i, j) - std::conj(x(j, i)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

CMatrix boundary_lesser(const CMatrix& sr, double occ, Carrier c) {
  CMatrix d = sr - sr.adjoint();
  return (c == Carrier::Electron ? -occ : occ) * d;
}

CMatrix boundary_greater(const CMatrix& sr, double occ, Carrier c) {
  CMatrix d = sr - sr.adjoint();
  return (c == Carrier::Electron ? 1.0 - occ : occ + 1.0) * d;
}

static CMatrix diag_with_z(const BlockTriMatrix& base, const std::vector<CMatrix>& z, int i, double k) {
  CMatrix d = base.diag[i];
  const cplx ph = std::polar(1.0, k);
  const CMatrix& c = z[i];
  for (int r = 0; r < d.rows(); ++r)
    for (int s = 0; s < d.cols(); ++s) d(r, s) += c(r, s) * ph + std::conj(c(s, r)) * std::conj(ph);
  return d;
}

BoundaryPoint boundary_point(const Device& dev, const SpectralGrid& grid, Carrier c, int ik, int ie, OpCount* ops,
                             std::uint64_t* solves) {
  const MaterialOperators& o = dev.ops;
  const int last = dev.structure.bnum - 1;
  BoundaryPoint p;
  OpCount local;
  auto solve = [&](const CMatrix& h00, const CMatrix& h01, const CMatrix& s00, const CMatrix& s01, cplx z) {
    try {
      SurfaceGF s = surface_gf(h00, h01, s00, s01, z);
      local += s.ops;
      if (solves) ++*solves;
      return s.g;
    } catch (const Error& e) {
      std::ostringstream os;
      os << e.what() << " at " << (c == Carrier::Electron ? "(E,kz)" : "(w,qz)") << " index (" << ie << "," << ik
         << ")";
      throw Error(e.kind(), os.str());
    }
  };
  if (c == Carrier::Electron) {
    const double k = grid.kz[ik];
    const double e = grid.energies[ie];
    const cplx z(e, kLeadEta);
    const CMatrix h_l = diag_with_z(o.H0, o.H1, 0, k);
    const CMatrix h_r = diag_with_z(o.H0, o.H1, last, k);
    const CMatrix& s_l = o.S0.diag[0];
    const CMatrix& s_r = o.S0.diag[last];
    const CMatrix h01d = o.H_cell01.adjoint(), s01d = o.S_cell01.adjoint();
    const CMatrix gl = solve(h_l, h01d, s_l, s01d, z);
    const CMatrix gr = solve(h_r, o.H_cell01, s_r, o.S_cell01, z);
    // device-lead couplings of A = E·S - H
    const CMatrix a_fwd = e * o.S_cell01 - o.H_cell01;  // A_{n,n+1}
    const CMatrix a_bwd = e * s01d - h01d;               // A_{n+1,n}
    p.sigma_left = matmul(matmul(a_bwd, gl, &local), a_fwd, &local);
    p.sigma_right = matmul(matmul(a_fwd, gr, &local), a_bwd, &local);
    p.occ_left = fermi(e, dev.structure.mu_left(), grid.kT());
    p.occ_right = fermi(e, dev.structure.mu_right(), grid.kT());
  } else {
    const double q = grid.qz[ik];
    const double w = grid.omegas[ie];
    const cplx z = cplx(w, kLeadEta) * cplx(w, kLeadEta);
    const CMatrix p_l = diag_with_z(o.Phi0, o.Phi1, 0, q);
    const CMatrix p_r = diag_with_z(o.Phi0, o.Phi1, last, q);
    const int n = p_l.rows();
    const CMatrix eye = CMatrix::identity(n), zero(n, n);
    const CMatrix c01d = o.Phi_cell01.adjoint();
    const CMatrix gl = solve(p_l, c01d, eye, zero, z);
    const CMatrix gr = solve(p_r, o.Phi_cell01, eye, zero, z);
    const CMatrix a_fwd = -1.0 * o.Phi_cell01;
    const CMatrix a_bwd = -1.0 * c01d;
    p.sigma_left = matmul(matmul(a_bwd, gl, &local), a_fwd, &local);
    p.sigma_right = matmul(matmul(a_fwd, gr, &local), a_bwd, &local);
    p.occ_left = bose(w, grid.kT());
    p.occ_right = p.occ_left;
  }
  if (ops) *ops += local;
  return p;
}

BoundaryTable boundary_selfenergies(const Device& dev, const SpectralGrid& grid, Carrier c, int threads) {
  BoundaryTable t;
  t.carrier = c;
  t.nk = c == Carrier::Electron ? grid.nkz() : grid.nqz();
  t.ne = c == Carrier::Electron ? grid.ne() : grid.nomega();
  const int total = t.nk * t.ne;
  t.points.resize(total);
  std::vector<OpCount> ops(total);
  std::vector<std::uint64_t> solves(total, 0);
  parallel_for(total, threads, [&](int idx) {
    t.points[idx] = boundary_point(dev, grid, c, idx / t.ne, idx % t.ne, &ops[idx], &solves[idx]);
  });
  for (int i = 0; i < total; ++i) {
    t.ops += ops[i];
    t.surface_solves += solves[i];
  }
  return t;
}

}  // namespace negfmini
