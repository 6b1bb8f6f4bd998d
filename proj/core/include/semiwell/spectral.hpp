#pragma once
#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "semiwell/sparse.hpp"
#include "semiwell/wells.hpp"

namespace semiwell {

struct SpectralWindow {
  double lo = 0;
  double hi = 0;
  std::vector<double> eigenvalues;   // sorted ascending
  Eigen::MatrixXcd eigenvectors;     // orthonormal columns, same order
  std::vector<double> residuals;     // ||H v - lambda v|| per pair
  int count() const { return (int)eigenvalues.size(); }
};

// Full spectrum via LAPACK zheevd; refuses n > 4096.
SpectralWindow eig_dense(const SparseHermitian& H);

// Number of eigenvalues strictly below sigma, from the block-diagonal signs
// of a Bunch-Kaufman LDL* factorization of H - sigma*I.  Throws
// FactorizationSingular if sigma hits the spectrum to machine precision.
int inertia_count(const SparseHermitian& H, double sigma);

// inertia_count with one retry at a relatively nudged sigma.
int inertia_count_nudged(const SparseHermitian& H, double sigma);

// All eigenpairs in [lo, hi] by shift-invert Lanczos with full
// reorthogonalization and deflation; the count is cross-checked against the
// LDL* inertia difference at the endpoints, re-shifting (bisection, up to 5
// factorizations) until it matches.  Throws ConvergenceFailure if not.
SpectralWindow eig_window(const SparseHermitian& H, double lo, double hi);

// eig_window with automatic dense fallback when convergence fails (n <= 4096).
SpectralWindow eig_window_or_dense(const SparseHermitian& H, double lo,
                                   double hi);

struct WellSpectra {
  std::vector<SpectralWindow> per_well;
  std::vector<double> merged;  // sorted multiset union
};

// Dirichlet spectrum of each well in the window, plus the merged multiset.
WellSpectra well_spectrum(const WellDecomposition& decomp,
                          const SparseHermitian& H, double lo, double hi);

struct GapList {
  std::vector<std::pair<double, double>> intervals;
  std::vector<double> widths;
};

// Interior spectral gaps: maximal open intervals of width >= min_width
// bounded by in-window values on both sides.  min_width < 0 selects the
// default 1e-8 * max(1, hi).
GapList detect_gaps(const std::vector<double>& values, double lo, double hi,
                    double min_width = -1);

// Per-well count of Dirichlet eigenvalues <= E1*mu via inertia (retries at
// E1*mu*(1+1e-10) on a singular factorization).
std::vector<int> count_states(const WellDecomposition& decomp,
                              const SparseHermitian& H, double E1, double mu);

// Greedy maximal r-separated subset of points 0..npoints-1 scanned in index
// order; the result is also r-covering.
std::vector<int> separated_net(int npoints,
                               const std::function<double(int, int)>& dist,
                               double r);

// Largest |eigenvalue| of a dense Hermitian matrix: zheevd below n=1025,
// power iteration (fixed seed) above.  Shared norm convention for all
// projection comparisons.
double hermitian_norm(const Eigen::MatrixXcd& A);

// Operator 2-norm of a general square matrix (sqrt of largest eigenvalue of
// A* A, power iteration for large n).
double operator_norm(const Eigen::MatrixXcd& A);

}  // namespace semiwell
