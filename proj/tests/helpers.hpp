#pragma once
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "semiwell/grid.hpp"
#include "semiwell/sparse.hpp"
#include "semiwell/spectral.hpp"

namespace testutil {

inline std::array<double, 2> zero_field(const std::array<double, 2>&) {
  return {0, 0};
}

inline semiwell::GridModel line(int n, double a, semiwell::Boundary b,
                                const semiwell::PotentialFn& V) {
  return semiwell::build_grid(1, {n}, a, b, V, zero_field);
}

// Two cosine wells on a periodic ring [0, 2): the small sibling of the
// default benchmark model.
inline semiwell::GridModel double_well(int n) {
  double a = 2.0 / n;
  return line(n, a, semiwell::Boundary::periodic_torus,
              [](const std::array<double, 2>& x) {
                double s = std::sin(std::numbers::pi * x[0]);
                return s * s;
              });
}

// Four identical cosine wells on a periodic ring [0, 4).
inline semiwell::GridModel four_well(int n) {
  double a = 4.0 / n;
  return line(n, a, semiwell::Boundary::periodic_torus,
              [](const std::array<double, 2>& x) {
                double s = std::sin(std::numbers::pi * x[0]);
                return s * s;
              });
}

inline semiwell::SparseHermitian diag_operator(const std::vector<double>& d) {
  semiwell::SpMat m((int)d.size(), (int)d.size());
  for (int i = 0; i < (int)d.size(); ++i) m.insert(i, i) = d[i];
  m.makeCompressed();
  semiwell::SparseHermitian H;
  H.mat = std::move(m);
  H.symmetry_checked = true;
  return H;
}

inline Eigen::VectorXcd random_vec(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> nd(0, 1);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = semiwell::cplx(nd(gen), nd(gen));
  return v;
}

// Midpoint of the widest gap of the merged well spectrum below `top`,
// the trailing clipped gap included.
inline double gap_midpoint(const std::vector<double>& merged, double top) {
  semiwell::GapList g = semiwell::detect_gaps(merged, 0, top);
  double lo = merged.back(), hi = top;
  for (size_t i = 0; i < g.intervals.size(); ++i)
    if (g.widths[i] > hi - lo) std::tie(lo, hi) = g.intervals[i];
  return 0.5 * (lo + hi);
}

}  // namespace testutil
