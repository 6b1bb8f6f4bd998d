#include "semiwell/roe.hpp"

#include <algorithm>
#include <cmath>

#include "semiwell/errors.hpp"
#include "semiwell/spectral.hpp"

namespace semiwell {

PropagationProfile propagation_profile(const Eigen::MatrixXcd& K,
                                       const GridModel& model,
                                       const std::vector<double>& radii) {
  const int n = (int)K.rows();
  if (n != model.num_sites())
    throw DimensionMismatch("kernel size does not match the model");

  // Bin the pairwise sups at grid-step granularity, then suffix-max.
  int maxbin = 0;
  for (int ax = 0; ax < model.dim; ++ax) {
    int extent = model.shape[ax] - 1;
    if (model.boundary == Boundary::periodic_torus)
      extent = model.shape[ax] / 2;
    maxbin += extent;
  }
  std::vector<double> binmax(maxbin + 1, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      int b = (int)std::lround(model.site_distance(i, j) / model.spacing);
      binmax[b] = std::max(binmax[b], std::abs(K(j, i)));
    }
  for (int b = maxbin - 1; b >= 0; --b)
    binmax[b] = std::max(binmax[b], binmax[b + 1]);

  PropagationProfile prof;
  prof.radii = radii;
  for (double R : radii) {
    int b = (int)std::ceil(R / model.spacing - 1e-12);
    b = std::max(0, std::min(b, maxbin + 1));
    prof.sup_offdiag.push_back(b > maxbin ? 0.0 : binmax[b]);
  }

  // Least-squares exponential fit over the decaying tail: skip the leading
  // plateau and anything at round-off floor.
  double top = prof.sup_offdiag.empty() ? 0 : prof.sup_offdiag.front();
  std::vector<std::pair<double, double>> pts;
  for (size_t i = 0; i < radii.size(); ++i) {
    double s = prof.sup_offdiag[i];
    if (s > 1e-14 && s < top) pts.emplace_back(radii[i], std::log(s));
  }
  if (pts.size() >= 3) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double m = (double)pts.size();
    double denom = m * sxx - sx * sx;
    if (denom > 0) {
      double slope = (m * sxy - sx * sy) / denom;
      double icept = (sy - slope * sx) / m;
      double ssres = 0, sstot = 0, ybar = sy / m;
      for (auto [x, y] : pts) {
        double e = y - (slope * x + icept);
        ssres += e * e;
        sstot += (y - ybar) * (y - ybar);
      }
      prof.nu = -slope;
      prof.prefactor = std::exp(icept);
      prof.r_squared = sstot > 0 ? 1.0 - ssres / sstot : 1.0;
      prof.fit_valid = true;
    }
  }
  return prof;
}

std::pair<Eigen::MatrixXcd, double> band_truncate(const Eigen::MatrixXcd& K,
                                                  const GridModel& model,
                                                  double R) {
  const int n = (int)K.rows();
  if (n != model.num_sites())
    throw DimensionMismatch("kernel size does not match the model");
  Eigen::MatrixXcd banded = K;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (model.site_distance(i, j) > R) banded(i, j) = 0;
  banded = 0.5 * (banded + banded.adjoint()).eval();
  double err = operator_norm(K - banded);
  return {std::move(banded), err};
}

Eigen::MatrixXcd WannierFrame::p_restricted(int k) const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(p.rows(), p.cols());
  if (k < 1 || k > n_max) return out;
  for (int h : D_k[k - 1])
    for (int j = 0; j < k; ++j) out(h * n_max + j, h * n_max + j) = 1.0;
  return out;
}

WannierFrame build_wannier_frame(const WellDecomposition& decomp,
                                 const std::vector<Eigen::MatrixXcd>& subspaces,
                                 const GridModel& model) {
  const int n = model.num_sites();
  if ((int)subspaces.size() != decomp.num_wells())
    throw FrameMismatch("one subspace per well required");

  WannierFrame f;
  f.model = &model;
  f.delta = decomp.max_diameter;
  double eps = std::isfinite(decomp.min_pairwise_distance)
                   ? decomp.min_pairwise_distance
                   : model.spacing;
  f.separation = 2 * f.delta + eps;

  // Anchors: site of minimum V per well, ties broken by site index.
  for (int h = 0; h < decomp.num_wells(); ++h) {
    int best = decomp.components[h][0];
    for (int s : decomp.components[h])
      if (model.potential[s] < model.potential[best]) best = s;
    f.anchors.push_back(best);
  }
  f.d_prime = f.anchors;
  // Greedy extension: the separation constraint involves only pairs with a
  // new point, so anchors are kept unconditionally.
  for (int s = 0; s < n; ++s) {
    bool ok = true;
    for (int t : f.d_prime)
      if (model.site_distance(s, t) < f.separation) {
        ok = false;
        break;
      }
    if (ok) f.d_prime.push_back(s);
  }

  f.n_max = 0;
  for (const auto& S : subspaces) f.n_max = std::max(f.n_max, (int)S.cols());
  for (size_t i = 0; i < f.d_prime.size(); ++i)
    f.n_h.push_back(i < subspaces.size() ? (int)subspaces[i].cols() : 0);

  const int D = (int)f.d_prime.size();
  f.U.resize(n, D * f.n_max);
  f.p = Eigen::MatrixXcd::Zero(D * f.n_max, D * f.n_max);
  f.D_k.assign(std::max(f.n_max, 0), {});

  for (int i = 0; i < D; ++i) {
    std::vector<Eigen::VectorXcd> cols;
    if (i < decomp.num_wells()) {
      const auto& comp = decomp.components[i];
      std::vector<char> inwell(n, 0);
      for (int s : comp) inwell[s] = 1;
      for (int c = 0; c < subspaces[i].cols(); ++c) {
        Eigen::VectorXcd v = subspaces[i].col(c);
        if ((int)v.size() != n)
          throw FrameMismatch("subspace vectors must live on the full grid");
        double outside = 0;
        for (int s = 0; s < n; ++s)
          if (!inwell[s]) outside += std::norm(v[s]);
        if (std::sqrt(outside) > 1e-12)
          throw SubspaceNotLocal("subspace vector leaks outside its well");
        cols.push_back(v);
      }
      if (f.n_max > (int)comp.size())
        throw DimTooLarge("frame rank exceeds the well site count");
      // Complete with delta vectors, modified Gram-Schmidt with
      // reorthogonalization, deterministic ascending site order.
      for (int s : comp) {
        if ((int)cols.size() >= f.n_max) break;
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
        v[s] = 1.0;
        for (int pass = 0; pass < 2; ++pass)
          for (const auto& c : cols) v -= c.dot(v) * c;
        double nrm = v.norm();
        if (nrm > 1e-6) cols.push_back(v / nrm);
      }
      if ((int)cols.size() < f.n_max)
        throw DimTooLarge("could not complete the well basis");
      if (f.n_h[i] > 0) f.D_k[f.n_h[i] - 1].push_back(i);
    } else {
      // Extra net point: delta vectors in the radius-delta grid ball,
      // nearest (then lowest-index) sites first.
      int center = f.d_prime[i];
      std::vector<std::pair<double, int>> ball;
      for (int s = 0; s < n; ++s) {
        double d = model.site_distance(center, s);
        if (d <= f.delta) ball.emplace_back(d, s);
      }
      std::sort(ball.begin(), ball.end());
      if ((int)ball.size() < f.n_max)
        throw DimTooLarge("grid ball too small for the frame rank");
      for (int j = 0; j < f.n_max; ++j) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
        v[ball[j].second] = 1.0;
        cols.push_back(v);
      }
    }
    for (int j = 0; j < f.n_max; ++j) f.U.col(i * f.n_max + j) = cols[j];
    for (int j = 0; j < f.n_h[i]; ++j)
      f.p(i * f.n_max + j, i * f.n_max + j) = 1.0;
  }
  return f;
}

double conjugation_check(const WannierFrame& frame,
                         const ProjectionMatrix& P) {
  if ((int)frame.U.rows() != P.n())
    throw FrameMismatch("frame and projection live on different grids");
  Eigen::MatrixXcd M = frame.U * frame.p * frame.U.adjoint() - P.P;
  return hermitian_norm(M);
}

}  // namespace semiwell
