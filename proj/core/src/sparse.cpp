#include "semiwell/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace semiwell {

double SparseHermitian::norm_bound() const {
  Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(mat.rows());
  for (int k = 0; k < mat.outerSize(); ++k)
    for (SpMat::InnerIterator it(mat, k); it; ++it)
      rowsum[it.row()] += std::abs(it.value());
  return rowsum.size() ? rowsum.maxCoeff() : 0.0;
}

bool SparseHermitian::check_hermitian() const {
  SpMat adj = SpMat(mat.adjoint());
  SpMat diff = mat - adj;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SpMat::InnerIterator it(diff, k); it; ++it)
      if (it.value() != cplx(0, 0)) return false;
  return true;
}

SparseHermitian assemble_hamiltonian(const GridModel& model, double mu) {
  const int n = model.num_sites();
  const double inv_a2 = 1.0 / (model.spacing * model.spacing);
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(model.edges.size() * 2 + n);
  for (const Edge& e : model.edges) {
    cplx v = -std::exp(cplx(0, e.phase)) * inv_a2;
    trip.emplace_back(e.tail, e.head, std::conj(v));
    trip.emplace_back(e.head, e.tail, v);
  }
  // Diagonal 2*dim/a^2 everywhere: at a box boundary the missing neighbors
  // are Dirichlet zeros, which still contribute to the on-site coefficient.
  const double diag_kin = 2.0 * model.dim * inv_a2;
  for (int i = 0; i < n; ++i)
    trip.emplace_back(i, i, cplx(diag_kin + mu * model.potential[i], 0));
  SparseHermitian H;
  H.mu = mu;
  H.mat.resize(n, n);
  H.mat.setFromTriplets(trip.begin(), trip.end());
  H.mat.makeCompressed();
  H.symmetry_checked = H.check_hermitian();
  return H;
}

SparseHermitian dirichlet_restrict(const SparseHermitian& H,
                                   const std::vector<int>& sites) {
  if (sites.empty()) throw EmptySiteSet("dirichlet_restrict given no sites");
  std::vector<int> s = sites;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  std::vector<int> pos(H.n(), -1);
  for (int i = 0; i < (int)s.size(); ++i) pos[s[i]] = i;

  std::vector<Eigen::Triplet<cplx>> trip;
  for (int k = 0; k < H.mat.outerSize(); ++k) {
    if (pos[k] < 0) continue;
    for (SpMat::InnerIterator it(H.mat, k); it; ++it)
      if (pos[it.row()] >= 0)
        trip.emplace_back(pos[it.row()], pos[k], it.value());
  }
  SparseHermitian out;
  out.mu = H.mu;
  out.mat.resize((int)s.size(), (int)s.size());
  out.mat.setFromTriplets(trip.begin(), trip.end());
  out.mat.makeCompressed();
  out.symmetry_checked = true;
  return out;
}

Eigen::VectorXcd embed(const Eigen::VectorXcd& v, const std::vector<int>& sites,
                       int n) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  for (int i = 0; i < (int)sites.size(); ++i) out[sites[i]] = v[i];
  return out;
}

}  // namespace semiwell
