#pragma once
#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "semiwell/sparse.hpp"
#include "semiwell/wells.hpp"

namespace semiwell {

// Real-valued function on grid sites (distance field, weight, or cutoff).
struct ScalarField {
  const GridModel* model = nullptr;
  Eigen::VectorXd values;

  double operator[](int site) const { return values[site]; }
};

// Shortest-path distance in the degenerate metric [V - E]_+ * g: edge weight
// a * (sqrt([V(tail)-E]_+) + sqrt([V(head)-E]_+)) / 2, Dijkstra with
// site-index tie-breaking; identically zero on the source set.
ScalarField agmon_distance(const GridModel& model, double E,
                           const std::vector<int>& source);

// Weight Phi_h: distance at energy E2 from the energy-E3 core of well h.
ScalarField build_weight(const GridModel& model, const WellDecomposition& decomp,
                         double E2, double E3, int well);

// Mean over incident edges of the squared difference quotient of Phi.
Eigen::VectorXd grad_squared(const GridModel& model, const Eigen::VectorXd& phi);

// Quintic-smoothstep partition adapted to the wells: phi_h live on the
// band [E1+eta, E1+2*eta] of V, psi_h on [E1+5*eta/2, E1+3*eta], psi0 rises
// on [E1+eta/2, E1+eta]; phi0 + sum_h phi_h == 1 exactly, phi_h*psi_h == phi_h,
// phi0*psi0 == phi0.
struct CutoffFamily {
  const GridModel* model = nullptr;
  double E1 = 0;
  double eta = 0;
  std::vector<ScalarField> phi_h;
  std::vector<ScalarField> psi_h;
  ScalarField phi0;
  ScalarField psi0;
};

CutoffFamily build_cutoffs(const GridModel& model,
                           const WellDecomposition& decomp, double E1,
                           double eta);

// Relative defect of the weighted energy identity
//   Re<e^{2 sqrt(mu) Phi}(H - z)u, u>
//     = ||grad_A(e^{sqrt(mu) Phi} u)||^2
//       + <(mu (V - |grad Phi|^2) - Re z) e^{2 sqrt(mu) Phi} u, u>
// returned as |LHS - RHS| / (|LHS| + |RHS| + 1).
double energy_identity_residual(const SparseHermitian& H, const GridModel& model,
                                const ScalarField& Phi, std::complex<double> z,
                                const Eigen::VectorXcd& u);

// l^2 mass (times a^dim) of a normalized Dirichlet eigenvector of well h
// outside the energy-E2 core of that well.  `u` is indexed by the well's
// sorted site list.
double eigenfunction_decay(const GridModel& model,
                           const WellDecomposition& decomp, int well, double E2,
                           const Eigen::VectorXcd& u);

}  // namespace semiwell
