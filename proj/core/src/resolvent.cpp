#include "semiwell/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/SVD>

#include "semiwell/spectral.hpp"

namespace semiwell {

namespace {

SpMat shift(const SparseHermitian& H, cplx z) {
  SpMat s = H.mat;
  for (int i = 0; i < H.n(); ++i) s.coeffRef(i, i) -= z;
  return s;
}

Eigen::VectorXcd restrict_weighted(const Eigen::VectorXcd& v,
                                   const std::vector<int>& sites,
                                   const Eigen::VectorXd& w) {
  Eigen::VectorXcd out((int)sites.size());
  for (int i = 0; i < (int)sites.size(); ++i) out[i] = w[i] * v[sites[i]];
  return out;
}

}  // namespace

ResolventFactor::ResolventFactor(const SparseHermitian& H, cplx z)
    : shifted_(shift(H, z)) {
  lu_.compute(shifted_);
  if (lu_.info() != Eigen::Success)
    throw NearSingular("sparse LU of H - z failed");
}

Eigen::VectorXcd ResolventFactor::solve(const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd x = lu_.solve(v);
  // one step of iterative refinement
  x += lu_.solve(v - shifted_ * x);
  return x;
}

Eigen::VectorXcd ResolventFactor::solve_adjoint(
    const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd x = lu_.adjoint().solve(v);
  x += lu_.adjoint().solve(v - shifted_.adjoint() * x);
  return x;
}

Eigen::MatrixXcd ResolventFactor::solve(const Eigen::MatrixXcd& V) const {
  // Column-by-column: Eigen's SparseLU dense-block solve path costs
  // O(cols^2) in the number of right-hand sides, which is prohibitive for
  // full-identity solves; per-vector solves stay linear.
  Eigen::MatrixXcd X(V.rows(), V.cols());
  for (int j = 0; j < V.cols(); ++j)
    X.col(j) = solve(Eigen::VectorXcd(V.col(j)));
  return X;
}

Eigen::VectorXcd resolvent_apply(const SparseHermitian& H, cplx z,
                                 const Eigen::VectorXcd& v) {
  ResolventFactor f(H, z);
  Eigen::VectorXcd x = f.solve(v);
  double backward = (H.mat * x - z * x - v).norm();
  if (backward > 1e-10 * std::max(v.norm(), 1e-300))
    throw NearSingular("resolvent solve backward error too large");
  return x;
}

Contour make_contour(double lam, double left_crossing, int order) {
  Contour c;
  c.center = cplx(0.5 * (lam + left_crossing), 0);
  c.radius = 0.5 * (lam - left_crossing);
  for (int k = 0; k < order; ++k) {
    double theta = 2.0 * std::numbers::pi * (k + 0.5) / order;
    c.nodes.push_back(c.center + c.radius * std::exp(cplx(0, theta)));
  }
  return c;
}

ProjectionMatrix riesz_projection(const SparseHermitian& H, double lam,
                                  int quad_order) {
  const int n = H.n();
  // Gap verification: equal inertia counts just left and right of lam.
  double nudge = 1e-8 * std::max(1.0, std::abs(lam));
  int count_lo, count_hi;
  try {
    count_lo = inertia_count(H, lam - nudge);
    count_hi = inertia_count(H, lam + nudge);
  } catch (const FactorizationSingular&) {
    throw NotInGap("lam is on top of the spectrum");
  }
  if (count_lo != count_hi)
    throw NotInGap("spectrum crosses the nudge interval around lam");
  const int rank = count_lo;

  // Gershgorin lower bound for the left crossing.
  double lower = 0;
  for (int k = 0; k < H.mat.outerSize(); ++k) {
    double diag = 0, off = 0;
    for (SpMat::InnerIterator it(H.mat, k); it; ++it) {
      if (it.row() == k)
        diag = it.value().real();
      else
        off += std::abs(it.value());
    }
    lower = std::min(lower, diag - off);
  }
  double left = std::min(0.0, lower) - 1.0;

  for (int order = quad_order; order <= 256; order *= 2) {
    Contour c = make_contour(lam, left, order);
    // H is Hermitian and the contour is symmetric about the real axis, so
    // the conjugate node's term is exactly the adjoint of the upper node's:
    // factor the upper-half nodes only and apply the quadrature projector
    // action-wise.  The dense matrix is never formed from the quadrature;
    // the range basis is extracted by a randomized range finder instead.
    std::vector<std::shared_ptr<ResolventFactor>> factors;
    std::vector<cplx> weights;
    for (const cplx& zk : c.nodes) {
      if (zk.imag() <= 0) continue;
      factors.push_back(std::make_shared<ResolventFactor>(H, zk));
      double theta = std::arg(zk - c.center);
      weights.push_back((-c.radius / order) * std::exp(cplx(0, theta)));
    }
    auto apply_Pq = [&](const Eigen::VectorXcd& v) {
      Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
      for (size_t k = 0; k < factors.size(); ++k) {
        out += weights[k] * factors[k]->solve(v);
        out += std::conj(weights[k]) * factors[k]->solve_adjoint(v);
      }
      return out;
    };

    // Power-iteration estimate of ||Pq^2 - Pq|| (Hermitian operator).
    std::mt19937 gen(123);
    std::normal_distribution<double> nd(0, 1);
    Eigen::VectorXcd x(n);
    for (int i = 0; i < n; ++i) x[i] = cplx(nd(gen), nd(gen));
    x.normalize();
    double defect = 0;
    for (int it = 0; it < 40; ++it) {
      Eigen::VectorXcd px = apply_Pq(x);
      Eigen::VectorXcd y = apply_Pq(px) - px;
      defect = y.norm();
      if (defect < 1e-300) break;
      x = y / defect;
    }

    if (defect <= 1e-8) {
      ProjectionMatrix out;
      out.provenance = Provenance::riesz;
      out.rank = rank;
      if (rank == 0) {
        out.P = Eigen::MatrixXcd::Zero(n, n);
        return out;
      }
      // The quadrature error mostly smears the eigenvalues of Pq away from
      // {0, 1}; the range itself is accurate. Project onto an orthonormal
      // basis of the range so the returned matrix is idempotent to roundoff.
      std::mt19937 gen2(77);
      int probes = std::min(n, rank + 8);
      Eigen::MatrixXcd Y(n, probes);
      for (int j = 0; j < probes; ++j) {
        Eigen::VectorXcd g(n);
        for (int i = 0; i < n; ++i) g[i] = cplx(nd(gen2), nd(gen2));
        Y.col(j) = apply_Pq(g);
      }
      Eigen::BDCSVD<Eigen::MatrixXcd> svd1(Y, Eigen::ComputeThinU);
      Eigen::MatrixXcd Q = svd1.matrixU().leftCols(rank);
      Eigen::MatrixXcd Y2(n, rank);  // one subspace-iteration refinement
      for (int j = 0; j < rank; ++j) Y2.col(j) = apply_Pq(Q.col(j));
      Eigen::BDCSVD<Eigen::MatrixXcd> svd2(Y2, Eigen::ComputeThinU);
      Q = svd2.matrixU().leftCols(rank);
      out.basis = Q;
      out.has_basis = true;
      out.P = Q * Q.adjoint();
      out.P = 0.5 * (out.P + out.P.adjoint()).eval();
      return out;
    }
  }
  throw QuadratureNotConverged("contour quadrature did not stabilize");
}

Eigen::VectorXcd ParametrixOps::apply_R(const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (int h = 0; h < (int)well_sites.size(); ++h) {
    if (well_sites[h].empty()) continue;
    Eigen::VectorXcd rhs = restrict_weighted(v, well_sites[h], phi_h[h]);
    Eigen::VectorXcd x = well_solvers[h]->solve(rhs);
    for (int i = 0; i < (int)well_sites[h].size(); ++i)
      out[well_sites[h][i]] += psi_h[h][i] * x[i];
  }
  if (!m0_sites.empty()) {
    Eigen::VectorXcd rhs = restrict_weighted(v, m0_sites, phi0);
    Eigen::VectorXcd x = m0_solver->solve(rhs);
    for (int i = 0; i < (int)m0_sites.size(); ++i)
      out[m0_sites[i]] += psi0[i] * x[i];
  }
  return out;
}

Eigen::VectorXcd ParametrixOps::apply_R_adjoint(
    const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (int h = 0; h < (int)well_sites.size(); ++h) {
    if (well_sites[h].empty()) continue;
    Eigen::VectorXcd rhs = restrict_weighted(v, well_sites[h], psi_h[h]);
    Eigen::VectorXcd x = well_solvers[h]->solve_adjoint(rhs);
    for (int i = 0; i < (int)well_sites[h].size(); ++i)
      out[well_sites[h][i]] += phi_h[h][i] * x[i];
  }
  if (!m0_sites.empty()) {
    Eigen::VectorXcd rhs = restrict_weighted(v, m0_sites, psi0);
    Eigen::VectorXcd x = m0_solver->solve_adjoint(rhs);
    for (int i = 0; i < (int)m0_sites.size(); ++i)
      out[m0_sites[i]] += phi0[i] * x[i];
  }
  return out;
}

Eigen::VectorXcd ParametrixOps::apply_K(const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd r = apply_R(v);
  return H->mat * r - z * r - v;
}

Eigen::VectorXcd ParametrixOps::apply_K_adjoint(
    const Eigen::VectorXcd& v) const {
  return apply_R_adjoint(H->mat * v - std::conj(z) * v) - v;
}

ParametrixOps build_parametrix(const SparseHermitian& H,
                               const WellDecomposition& decomp,
                               const CutoffFamily& cutoffs, cplx z) {
  ParametrixOps ops;
  ops.H = &H;
  ops.model = cutoffs.model;
  ops.z = z;
  const GridModel& m = *cutoffs.model;

  for (int h = 0; h < decomp.num_wells(); ++h) {
    const auto& sites = decomp.components[h];
    ops.well_sites.push_back(sites);
    Eigen::VectorXd ph((int)sites.size()), ps((int)sites.size());
    for (int i = 0; i < (int)sites.size(); ++i) {
      ph[i] = cutoffs.phi_h[h].values[sites[i]];
      ps[i] = cutoffs.psi_h[h].values[sites[i]];
    }
    ops.phi_h.push_back(std::move(ph));
    ops.psi_h.push_back(std::move(ps));
    SparseHermitian Hh = dirichlet_restrict(H, sites);
    try {
      ops.well_solvers.push_back(std::make_shared<ResolventFactor>(Hh, z));
    } catch (const NearSingular&) {
      throw SpectralCollision("z hits the spectrum of a well operator");
    }
  }

  for (int s = 0; s < m.num_sites(); ++s)
    if (m.potential[s] >= cutoffs.E1 + cutoffs.eta) ops.m0_sites.push_back(s);
  if (!ops.m0_sites.empty()) {
    int k = (int)ops.m0_sites.size();
    ops.phi0.resize(k);
    ops.psi0.resize(k);
    for (int i = 0; i < k; ++i) {
      ops.phi0[i] = cutoffs.phi0.values[ops.m0_sites[i]];
      ops.psi0[i] = cutoffs.psi0.values[ops.m0_sites[i]];
    }
    SparseHermitian H0 = dirichlet_restrict(H, ops.m0_sites);
    try {
      ops.m0_solver = std::make_shared<ResolventFactor>(H0, z);
    } catch (const NearSingular&) {
      throw SpectralCollision("z hits the spectrum of the exterior operator");
    }
  }
  return ops;
}

double defect_norm(const ParametrixOps& ops) {
  const int n = ops.H->n();
  std::mt19937 gen(424242u);
  std::normal_distribution<double> nd(0, 1);
  Eigen::VectorXcd x(n);
  for (int i = 0; i < n; ++i) x[i] = cplx(nd(gen), nd(gen));
  x.normalize();
  double est = 0;
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXcd y = ops.apply_K(x);
    Eigen::VectorXcd w = ops.apply_K_adjoint(y);
    double nw = w.norm();
    if (nw < 1e-300) return 0;
    double prev = est;
    est = std::sqrt(nw);
    x = w / nw;
    if (it > 0 && std::abs(est - prev) < 1e-6 * est) break;
  }
  return est;
}

Eigen::VectorXcd parametrix_solve(const ParametrixOps& ops,
                                  const Eigen::VectorXcd& v, double tol,
                                  int max_terms) {
  // (I + K)^{-1} v = sum_j (-K)^j v, then apply R.
  Eigen::VectorXcd term = v, acc = v;
  for (int j = 1; j < max_terms; ++j) {
    term = -ops.apply_K(term);
    acc += term;
    if (term.norm() <= tol * acc.norm()) break;
  }
  return ops.apply_R(acc);
}

std::pair<std::vector<double>, double> spectral_distance(
    const std::vector<double>& full_values,
    const std::vector<double>& well_merged) {
  if (well_merged.empty())
    throw EmptyWellSpectrum("no well eigenvalues to compare against");
  std::vector<double> out;
  double mx = 0;
  for (double lam : full_values) {
    double best = std::numeric_limits<double>::infinity();
    for (double s : well_merged) best = std::min(best, std::abs(lam - s));
    out.push_back(best);
    mx = std::max(mx, best);
  }
  return {out, mx};
}

}  // namespace semiwell
