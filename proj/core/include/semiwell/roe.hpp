#pragma once
#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "semiwell/projection.hpp"
#include "semiwell/wells.hpp"

namespace semiwell {

// Off-diagonal kernel decay of an operator: sup |K(x,y)| over site pairs at
// distance >= R, with an exponential least-squares fit over the decaying tail.
struct PropagationProfile {
  std::vector<double> radii;
  std::vector<double> sup_offdiag;
  double nu = 0;         // fitted decay rate (sup ~ prefactor * e^{-nu R})
  double prefactor = 0;
  double r_squared = 0;
  bool fit_valid = false;
};

PropagationProfile propagation_profile(const Eigen::MatrixXcd& K,
                                       const GridModel& model,
                                       const std::vector<double>& radii);

// Zero out entries beyond distance R and Hermitian-symmetrize; returns the
// banded matrix and the 2-norm of the difference.
std::pair<Eigen::MatrixXcd, double> band_truncate(const Eigen::MatrixXcd& K,
                                                  const GridModel& model,
                                                  double R);

// Localized frame over the extended net D': per-well subspaces completed to
// rank n_max by local delta vectors, extra net points carrying pure
// delta-vector bases; U maps l^2(D') (x) C^{n_max} isometrically into the
// grid space and conjugates the block-diagonal projection p onto the
// projection built from the subspaces.
struct WannierFrame {
  const GridModel* model = nullptr;
  std::vector<int> anchors;   // one site per well (argmin V)
  std::vector<int> d_prime;   // anchors first, then the separated extension
  std::vector<int> n_h;       // per d_prime entry; 0 beyond the wells
  int n_max = 0;
  double delta = 0;           // max well diameter
  double separation = 0;      // 2*delta + epsilon used for the net
  Eigen::MatrixXcd U;         // grid_n x (|D'| * n_max), orthonormal columns
  Eigen::MatrixXcd p;         // (|D'| * n_max) square, diagonal 0/1
  std::vector<std::vector<int>> D_k;  // wells with n_h == k, k = 1..n_max

  // p restricted to the rank-k part (for the exact p = sum_k p|_{D_k} check).
  Eigen::MatrixXcd p_restricted(int k) const;
};

WannierFrame build_wannier_frame(const WellDecomposition& decomp,
                                 const std::vector<Eigen::MatrixXcd>& subspaces,
                                 const GridModel& model);

// ||U p U* - P||.
double conjugation_check(const WannierFrame& frame, const ProjectionMatrix& P);

}  // namespace semiwell
