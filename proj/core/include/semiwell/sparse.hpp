#pragma once
#include <Eigen/SparseCore>
#include <complex>
#include <vector>

#include "semiwell/grid.hpp"

namespace semiwell {

using cplx = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cplx>;

// Compressed sparse complex Hermitian operator.  Both triangles are stored;
// construction mirrors entries so that value(i,j) == conj(value(j,i))
// bit-for-bit.
struct SparseHermitian {
  SpMat mat;
  double mu = 0;  // coupling constant the operator was assembled with
  bool symmetry_checked = false;

  int n() const { return (int)mat.rows(); }
  // Row-sum (Gershgorin) upper bound on the operator 2-norm.
  double norm_bound() const;
  bool check_hermitian() const;
};

// Magnetic graph Laplacian plus mu*V: off-diagonal -e^{i theta_e}/a^2 per
// edge, diagonal (incident edge count)/a^2 + mu*V (which equals 2*dim/a^2 on
// a torus with all extents >= 2).
SparseHermitian assemble_hamiltonian(const GridModel& model, double mu);

// Principal submatrix on the given sites (discrete Dirichlet condition).
// Sites are deduplicated and sorted ascending.
SparseHermitian dirichlet_restrict(const SparseHermitian& H,
                                   const std::vector<int>& sites);

// Embed a vector living on `sites` (ascending) into the full n-dim space.
Eigen::VectorXcd embed(const Eigen::VectorXcd& v, const std::vector<int>& sites,
                       int n);

}  // namespace semiwell
