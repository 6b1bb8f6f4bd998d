#pragma once
#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <complex>
#include <memory>
#include <vector>

#include "semiwell/agmon.hpp"
#include "semiwell/projection.hpp"
#include "semiwell/sparse.hpp"
#include "semiwell/wells.hpp"

namespace semiwell {

// Reusable sparse LU factorization of H - z.
class ResolventFactor {
 public:
  ResolventFactor(const SparseHermitian& H, cplx z);
  Eigen::VectorXcd solve(const Eigen::VectorXcd& v) const;
  // Solve with (H - z)* = H - conj(z).
  Eigen::VectorXcd solve_adjoint(const Eigen::VectorXcd& v) const;
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& V) const;

 private:
  SpMat shifted_;
  // mutable: Eigen's SparseLU adjoint-view accessor is non-const.
  mutable Eigen::SparseLU<SpMat> lu_;
};

// (H - z)^{-1} v with one step of iterative refinement; backward error
// <= 1e-10 ||v|| or NearSingular.
Eigen::VectorXcd resolvent_apply(const SparseHermitian& H, cplx z,
                                 const Eigen::VectorXcd& v);

// Circle crossing the real axis at lam (right) and at min(0, spectral lower
// bound) - 1 (left); trapezoid nodes at theta_k = 2 pi (k + 1/2) / N stay off
// the real axis.
struct Contour {
  cplx center;
  double radius = 0;
  std::vector<cplx> nodes;
};

Contour make_contour(double lam, double left_crossing, int order);

// Spectral projection below lam via contour quadrature of the resolvent.
// lam must sit in a gap (equal inertia counts at lam*(1 -+ 1e-8 nudges));
// quadrature order doubles until ||P^2 - P|| <= 1e-8, capped at 256.
ProjectionMatrix riesz_projection(const SparseHermitian& H, double lam,
                                  int quad_order = 32);

// Glued approximate resolvent
//   R(z) = sum_h psi_h (H_{U_h}-z)^{-1} phi_h + psi_0 (H_{M_0}-z)^{-1} phi_0
// with M_0 = {V >= E1 + eta}, and its defect K(z) = (H - z) R(z) - I, both as
// action-only maps.
struct ParametrixOps {
  const SparseHermitian* H = nullptr;
  const GridModel* model = nullptr;
  cplx z;
  std::vector<std::vector<int>> well_sites;
  std::vector<int> m0_sites;
  std::vector<Eigen::VectorXd> phi_h, psi_h;  // restricted to well sites
  Eigen::VectorXd phi0, psi0;                 // restricted to m0 sites
  std::vector<std::shared_ptr<ResolventFactor>> well_solvers;
  std::shared_ptr<ResolventFactor> m0_solver;

  Eigen::VectorXcd apply_R(const Eigen::VectorXcd& v) const;
  Eigen::VectorXcd apply_R_adjoint(const Eigen::VectorXcd& v) const;
  Eigen::VectorXcd apply_K(const Eigen::VectorXcd& v) const;
  Eigen::VectorXcd apply_K_adjoint(const Eigen::VectorXcd& v) const;
};

ParametrixOps build_parametrix(const SparseHermitian& H,
                               const WellDecomposition& decomp,
                               const CutoffFamily& cutoffs, cplx z);

// ||K|| estimated by power iteration on K*K (50 iterations or relative
// change < 1e-6), deterministic start vector.
double defect_norm(const ParametrixOps& ops);

// (H - z)^{-1} v reconstructed as R (I + K)^{-1} v via the Neumann series;
// requires ||K|| < 1 to converge.
Eigen::VectorXcd parametrix_solve(const ParametrixOps& ops,
                                  const Eigen::VectorXcd& v,
                                  double tol = 1e-12, int max_terms = 300);

// Per-eigenvalue distance from the full spectrum (in-window) to the merged
// well spectrum, plus the maximum (one-sided Hausdorff distance).
std::pair<std::vector<double>, double> spectral_distance(
    const std::vector<double>& full_values,
    const std::vector<double>& well_merged);

}  // namespace semiwell
