#pragma once
#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "semiwell/agmon.hpp"
#include "semiwell/spectral.hpp"

namespace semiwell {

enum class Provenance { riesz, eigen, quasi_gram };

// Hermitian idempotent with provenance.  `basis` (orthonormal columns
// spanning the range) is kept when the construction provides it and is
// otherwise recovered by a seeded randomized range finder.
struct ProjectionMatrix {
  Eigen::MatrixXcd P;
  Provenance provenance = Provenance::eigen;
  int rank = 0;
  Eigen::MatrixXcd basis;  // n x rank when has_basis
  bool has_basis = false;

  int n() const { return (int)P.rows(); }
  Eigen::MatrixXcd range_basis() const;
};

// P = V V* from orthonormal columns.
ProjectionMatrix projection_from_eigenvectors(const Eigen::MatrixXcd& vecs);

struct GramData {
  std::vector<Eigen::MatrixXcd> g;  // per well: overlap of cutoff eigenvectors
  std::vector<Eigen::MatrixXcd> G;  // inverses
  std::vector<double> deviation;    // ||g - I|| per well
  double max_deviation = 0;
};

// Gram-corrected quasi-projection: P = sum_h B_h G_h B_h* with B_h columns
// phi_h * u_{j,h} (well eigenvectors below lam, embedded in the full grid).
// Exactly the orthogonal projection onto span{phi_h u_{j,h}}.
std::pair<ProjectionMatrix, GramData> build_quasi_projection(
    const WellDecomposition& decomp, const CutoffFamily& cutoffs,
    const std::vector<SpectralWindow>& well_windows, double lam);

// Operator 2-norm of E - P.
double projection_gap_norm(const ProjectionMatrix& E,
                           const ProjectionMatrix& P);

// Partial isometry W with W*W = E and WW* = P, from the SVD of the
// cross-Gram of the two range bases.  Requires ||E - P|| < 1.
Eigen::MatrixXcd mvn_partial_isometry(const ProjectionMatrix& E,
                                      const ProjectionMatrix& P);

struct DecompositionResiduals {
  double psi_phi = 0;  // ||E - sum_h psi_h E_h phi_h||
  double phi_phi = 0;  // ||P - sum_h phi_h E_h phi_h||
};

DecompositionResiduals decomposition_check(
    const ProjectionMatrix& E, const WellDecomposition& decomp,
    const CutoffFamily& cutoffs,
    const std::vector<SpectralWindow>& well_windows, double lam);

}  // namespace semiwell
