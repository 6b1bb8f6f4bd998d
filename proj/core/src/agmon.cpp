#include "semiwell/agmon.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace semiwell {

namespace {

inline double pos_part(double x) { return x > 0 ? x : 0; }

// 1 on the left of [lo,hi], 0 on the right, quintic smoothstep in between.
double falling_step(double u, double lo, double hi) {
  if (u <= lo) return 1.0;
  if (u >= hi) return 0.0;
  double t = (u - lo) / (hi - lo);
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

}  // namespace

ScalarField agmon_distance(const GridModel& model, double E,
                           const std::vector<int>& source) {
  if (source.empty()) throw EmptySource("agmon_distance given empty source");
  const int n = model.num_sites();
  Eigen::VectorXd dist = Eigen::VectorXd::Constant(n, 1e300);
  std::vector<double> root(n);
  for (int i = 0; i < n; ++i)
    root[i] = std::sqrt(pos_part(model.potential[i] - E));

  using Item = std::pair<double, int>;  // (distance, site); index breaks ties
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  for (int s : source) {
    dist[s] = 0;
    pq.emplace(0.0, s);
  }
  std::vector<char> done(n, 0);
  while (!pq.empty()) {
    auto [d, x] = pq.top();
    pq.pop();
    if (done[x]) continue;
    done[x] = 1;
    for (int e : model.incident[x]) {
      const Edge& ed = model.edges[e];
      int y = ed.tail == x ? ed.head : ed.tail;
      double w = model.spacing * 0.5 * (root[ed.tail] + root[ed.head]);
      if (d + w < dist[y]) {
        dist[y] = d + w;
        pq.emplace(dist[y], y);
      }
    }
  }
  return {&model, std::move(dist)};
}

ScalarField build_weight(const GridModel& model, const WellDecomposition& decomp,
                         double E2, double E3, int well) {
  std::vector<int> src = decomp.core(well, E3);
  if (src.empty()) throw EmptyCore("energy-E3 core of the well is empty");
  return agmon_distance(model, E2, src);
}

Eigen::VectorXd grad_squared(const GridModel& model,
                             const Eigen::VectorXd& phi) {
  const int n = model.num_sites();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (int x = 0; x < n; ++x) {
    if (model.incident[x].empty()) continue;
    double acc = 0;
    for (int e : model.incident[x]) {
      const Edge& ed = model.edges[e];
      int y = ed.tail == x ? ed.head : ed.tail;
      double q = (phi[y] - phi[x]) / model.spacing;
      acc += q * q;
    }
    g[x] = acc / (double)model.incident[x].size();
  }
  return g;
}

CutoffFamily build_cutoffs(const GridModel& model,
                           const WellDecomposition& decomp, double E1,
                           double eta) {
  if (eta <= 0) throw BadShape("eta must be positive");
  if (E1 + 3 * eta >= decomp.threshold)
    throw BadShape("need E1 + 3*eta < E0");
  // The narrowest transition band has V-width eta/2 (the psi_h band); it must
  // span at least two grid steps of potential variation to stay smooth at
  // grid scale.
  if (model.lipschitz_bound > 0 &&
      eta / 2 < 2 * model.lipschitz_bound * model.spacing)
    throw BandTooNarrow("cutoff band narrower than two grid steps");

  const int n = model.num_sites();
  CutoffFamily f;
  f.model = &model;
  f.E1 = E1;
  f.eta = eta;

  Eigen::VectorXd phi(n), psi(n), psi0(n);
  for (int i = 0; i < n; ++i) {
    double v = model.potential[i];
    phi[i] = falling_step(v, E1 + eta, E1 + 2 * eta);
    psi[i] = falling_step(v, E1 + 2.5 * eta, E1 + 3 * eta);
    psi0[i] = 1.0 - falling_step(v, E1 + 0.5 * eta, E1 + eta);
  }

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
  for (int h = 0; h < decomp.num_wells(); ++h) {
    Eigen::VectorXd ph = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd ps = Eigen::VectorXd::Zero(n);
    for (int s : decomp.components[h]) {
      ph[s] = phi[s];
      ps[s] = psi[s];
    }
    sum += ph;
    f.phi_h.push_back({&model, std::move(ph)});
    f.psi_h.push_back({&model, std::move(ps)});
  }
  f.phi0 = {&model, Eigen::VectorXd::Ones(n) - sum};
  f.psi0 = {&model, std::move(psi0)};
  return f;
}

double energy_identity_residual(const SparseHermitian& H, const GridModel& model,
                                const ScalarField& Phi, std::complex<double> z,
                                const Eigen::VectorXcd& u) {
  const int n = model.num_sites();
  const double mu = H.mu;
  const double sq = std::sqrt(mu);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = std::exp(sq * Phi.values[i]);

  Eigen::VectorXcd Hu = H.mat * u - z * u;
  double lhs = 0;
  for (int i = 0; i < n; ++i)
    lhs += (w[i] * w[i] * Hu[i] * std::conj(u[i])).real();

  Eigen::VectorXcd wu = w.cast<cplx>().cwiseProduct(u);
  const double inv_a2 = 1.0 / (model.spacing * model.spacing);
  double kinetic = 0;
  for (const Edge& e : model.edges) {
    cplx d = wu[e.head] - std::exp(cplx(0, e.phase)) * wu[e.tail];
    kinetic += std::norm(d) * inv_a2;
  }
  // Box boundary: missing neighbors are Dirichlet zeros, contributing
  // |w u - 0|^2 / a^2 per ghost edge (matches the 2*dim/a^2 diagonal).
  for (int i = 0; i < n; ++i) {
    double ghosts = 2.0 * model.dim - (double)model.incident[i].size();
    if (ghosts > 0) kinetic += ghosts * std::norm(wu[i]) * inv_a2;
  }
  Eigen::VectorXd g2 = grad_squared(model, Phi.values);
  double potential = 0;
  for (int i = 0; i < n; ++i)
    potential += (mu * (model.potential[i] - g2[i]) - z.real()) *
                 std::norm(wu[i]);
  double rhs = kinetic + potential;
  return std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1.0);
}

double eigenfunction_decay(const GridModel& model,
                           const WellDecomposition& decomp, int well, double E2,
                           const Eigen::VectorXcd& u) {
  const auto& comp = decomp.components[well];
  if ((int)comp.size() != (int)u.size())
    throw DimensionMismatch("vector length != well size");
  if (std::abs(u.norm() - 1.0) > 1e-8)
    throw NotNormalized("eigenvector is not normalized");
  double mass = 0;
  for (int i = 0; i < (int)comp.size(); ++i)
    if (model.potential[comp[i]] >= E2) mass += std::norm(u[i]);
  return mass * std::pow(model.spacing, model.dim);
}

}  // namespace semiwell
