#include "semiwell/projection.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "semiwell/errors.hpp"

namespace semiwell {

namespace {

Eigen::MatrixXcd seeded_gaussian(int rows, int cols, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> nd(0, 1);
  Eigen::MatrixXcd G(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) G(i, j) = cplx(nd(gen), nd(gen));
  return G;
}

// Embedded well eigenvectors below lam, one matrix per well.
std::vector<Eigen::MatrixXcd> embedded_columns(
    const WellDecomposition& decomp,
    const std::vector<SpectralWindow>& well_windows, double lam, int n) {
  std::vector<Eigen::MatrixXcd> out;
  for (int h = 0; h < decomp.num_wells(); ++h) {
    const SpectralWindow& w = well_windows[h];
    std::vector<int> keep;
    for (int j = 0; j < w.count(); ++j)
      if (w.eigenvalues[j] <= lam) keep.push_back(j);
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(n, (int)keep.size());
    for (int c = 0; c < (int)keep.size(); ++c)
      U.col(c) = embed(w.eigenvectors.col(keep[c]), decomp.components[h], n);
    out.push_back(std::move(U));
  }
  return out;
}

}  // namespace

Eigen::MatrixXcd ProjectionMatrix::range_basis() const {
  if (has_basis) return basis;
  if (rank == 0) return Eigen::MatrixXcd(n(), 0);
  // Randomized range finder: P is (nearly) idempotent, so P*G spans the
  // range with overwhelming probability given a few extra columns.
  int probes = std::min(n(), rank + 8);
  Eigen::MatrixXcd Y = P * seeded_gaussian(n(), probes, 99u);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(Y, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(rank);
}

ProjectionMatrix projection_from_eigenvectors(const Eigen::MatrixXcd& vecs) {
  ProjectionMatrix out;
  out.P = vecs * vecs.adjoint();
  out.P = 0.5 * (out.P + out.P.adjoint()).eval();
  out.provenance = Provenance::eigen;
  out.rank = (int)vecs.cols();
  out.basis = vecs;
  out.has_basis = true;
  return out;
}

std::pair<ProjectionMatrix, GramData> build_quasi_projection(
    const WellDecomposition& decomp, const CutoffFamily& cutoffs,
    const std::vector<SpectralWindow>& well_windows, double lam) {
  const int n = decomp.model->num_sites();
  auto embedded = embedded_columns(decomp, well_windows, lam, n);

  ProjectionMatrix P;
  P.P = Eigen::MatrixXcd::Zero(n, n);
  P.provenance = Provenance::quasi_gram;
  GramData gd;
  std::vector<Eigen::MatrixXcd> basis_blocks;

  for (int h = 0; h < decomp.num_wells(); ++h) {
    Eigen::MatrixXcd B = embedded[h];
    for (int c = 0; c < B.cols(); ++c)
      B.col(c) = B.col(c).cwiseProduct(cutoffs.phi_h[h].values.cast<cplx>());
    const int m = (int)B.cols();
    Eigen::MatrixXcd g = B.adjoint() * B;
    g = 0.5 * (g + g.adjoint()).eval();
    double dev = 0;
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(m, m);
    if (m > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
      if (es.eigenvalues().minCoeff() < 1e-6)
        throw GramSingular("cutoff removed too much eigenfunction mass");
      dev = hermitian_norm(g - Eigen::MatrixXcd::Identity(m, m));
      if (dev >= 1.0)
        throw GramSingular("Gram matrix too far from the identity");
      Eigen::LLT<Eigen::MatrixXcd> llt(g);
      G = llt.solve(Eigen::MatrixXcd::Identity(m, m));
      P.P.noalias() += B * G * B.adjoint();
      // Orthonormal basis of this well's block: B g^{-1/2}.
      Eigen::MatrixXcd ghalf =
          es.eigenvectors() *
          es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
          es.eigenvectors().adjoint();
      basis_blocks.push_back(B * ghalf);
      P.rank += m;
    } else {
      basis_blocks.push_back(B);
    }
    gd.g.push_back(std::move(g));
    gd.G.push_back(std::move(G));
    gd.deviation.push_back(dev);
    gd.max_deviation = std::max(gd.max_deviation, dev);
  }
  P.P = 0.5 * (P.P + P.P.adjoint()).eval();
  P.basis.resize(n, P.rank);
  int at = 0;
  for (const auto& blk : basis_blocks) {
    P.basis.middleCols(at, (int)blk.cols()) = blk;
    at += (int)blk.cols();
  }
  P.has_basis = true;
  return {std::move(P), std::move(gd)};
}

double projection_gap_norm(const ProjectionMatrix& E,
                           const ProjectionMatrix& P) {
  if (E.n() != P.n()) throw DimensionMismatch("projection sizes differ");
  return hermitian_norm(E.P - P.P);
}

Eigen::MatrixXcd mvn_partial_isometry(const ProjectionMatrix& E,
                                      const ProjectionMatrix& P) {
  if (E.n() != P.n()) throw DimensionMismatch("projection sizes differ");
  double dist = projection_gap_norm(E, P);
  if (dist >= 1.0)
    throw ProjectionsTooFar("||E - P|| >= 1, no canonical partial isometry");
  if (E.rank == 0) return Eigen::MatrixXcd::Zero(E.n(), E.n());
  Eigen::MatrixXcd QE = E.range_basis();
  Eigen::MatrixXcd QP = P.range_basis();
  // W = P E (E P E)^{-1/2} on range(E); in the bases this is the unitary
  // polar factor of the cross-Gram QP* QE.
  Eigen::MatrixXcd C = QP.adjoint() * QE;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      C, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXcd W =
      QP * (svd.matrixU() * svd.matrixV().adjoint()) * QE.adjoint();
  return W;
}

DecompositionResiduals decomposition_check(
    const ProjectionMatrix& E, const WellDecomposition& decomp,
    const CutoffFamily& cutoffs,
    const std::vector<SpectralWindow>& well_windows, double lam) {
  const int n = E.n();
  auto embedded = embedded_columns(decomp, well_windows, lam, n);
  Eigen::MatrixXcd S1 = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd S2 = Eigen::MatrixXcd::Zero(n, n);
  for (int h = 0; h < decomp.num_wells(); ++h) {
    const Eigen::MatrixXcd& U = embedded[h];
    if (U.cols() == 0) continue;
    Eigen::MatrixXcd phiU = U, psiU = U;
    for (int c = 0; c < U.cols(); ++c) {
      phiU.col(c) =
          U.col(c).cwiseProduct(cutoffs.phi_h[h].values.cast<cplx>());
      psiU.col(c) =
          U.col(c).cwiseProduct(cutoffs.psi_h[h].values.cast<cplx>());
    }
    S1.noalias() += psiU * phiU.adjoint();  // psi_h E_h phi_h
    S2.noalias() += phiU * phiU.adjoint();  // phi_h E_h phi_h
  }
  auto [P, gd] = build_quasi_projection(decomp, cutoffs, well_windows, lam);
  (void)gd;
  DecompositionResiduals r;
  r.psi_phi = operator_norm(E.P - S1);
  r.phi_phi = hermitian_norm(P.P - S2);
  return r;
}

}  // namespace semiwell
