#include "semiwell/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SparseLU>

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "semiwell/errors.hpp"

namespace semiwell {

namespace {

constexpr int kDenseLimit = 4096;

Eigen::MatrixXcd to_dense(const SparseHermitian& H) {
  return Eigen::MatrixXcd(H.mat);
}

Eigen::VectorXcd seeded_random_vector(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(nd(gen), nd(gen));
  return v;
}

// Orthogonalize v against the columns of each basis (classical Gram-Schmidt,
// applied twice); returns the remaining norm.
double orthogonalize(Eigen::VectorXcd& v,
                     const std::vector<const Eigen::MatrixXcd*>& bases) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto* B : bases)
      if (B->cols() > 0) v -= (*B) * (B->adjoint() * v);
  return v.norm();
}

}  // namespace

SpectralWindow eig_dense(const SparseHermitian& H) {
  const int n = H.n();
  if (n > kDenseLimit) throw TooLarge("eig_dense limited to n <= 4096");
  Eigen::MatrixXcd A = to_dense(H);
  Eigen::VectorXd w(n);
  int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, A.data(), n,
                            w.data());
  if (info != 0) throw ConvergenceFailure("zheevd failed");
  SpectralWindow out;
  out.eigenvalues.assign(w.data(), w.data() + n);
  out.eigenvectors = std::move(A);
  out.lo = n ? out.eigenvalues.front() : 0;
  out.hi = n ? out.eigenvalues.back() : 0;
  for (int j = 0; j < n; ++j)
    out.residuals.push_back(
        (H.mat * out.eigenvectors.col(j) - w[j] * out.eigenvectors.col(j))
            .norm());
  return out;
}

int inertia_count(const SparseHermitian& H, double sigma) {
  const int n = H.n();
  Eigen::MatrixXcd A = to_dense(H);
  A.diagonal().array() -= sigma;
  std::vector<lapack_int> ipiv(n);
  int info =
      LAPACKE_zhetrf(LAPACK_COL_MAJOR, 'L', n, A.data(), n, ipiv.data());
  if (info > 0)
    throw FactorizationSingular("sigma is an eigenvalue to machine precision");
  if (info < 0) throw ConvergenceFailure("zhetrf illegal argument");
  int neg = 0;
  for (int k = 0; k < n;) {
    if (ipiv[k] > 0) {
      if (A(k, k).real() < 0) ++neg;
      ++k;
    } else {
      // 2x2 block [[a, conj(b)], [b, c]]
      double a = A(k, k).real(), c = A(k + 1, k + 1).real();
      double det = a * c - std::norm(A(k + 1, k));
      if (det < 0)
        ++neg;  // one negative, one positive
      else if (a + c < 0)
        neg += 2;
      k += 2;
    }
  }
  return neg;
}

int inertia_count_nudged(const SparseHermitian& H, double sigma) {
  try {
    return inertia_count(H, sigma);
  } catch (const FactorizationSingular&) {
    double nudged = sigma + 1e-10 * std::max(1.0, std::abs(sigma));
    return inertia_count(H, nudged);
  }
}

namespace {

// One shift-invert Lanczos pass at the given factorized shift; converged
// pairs inside [lo,hi] that are new w.r.t. `locked` are appended to it.
void lanczos_pass(const SparseHermitian& H, Eigen::SparseLU<SpMat>& lu,
                  double sigma, double lo, double hi, int expected,
                  Eigen::MatrixXcd& locked, std::vector<double>& locked_vals,
                  unsigned seed) {
  const int n = H.n();
  const double restol_scale = H.norm_bound();
  int m_max = std::min<long>(n, std::max(2L * expected + 40, 80L));

  Eigen::MatrixXcd V(n, m_max);
  std::vector<double> alpha, beta;
  Eigen::VectorXcd v = seeded_random_vector(n, seed);
  {
    std::vector<const Eigen::MatrixXcd*> bases{&locked};
    double nrm = orthogonalize(v, bases);
    if (nrm < 1e-12) return;  // complement already exhausted
    v /= nrm;
  }
  int m = 0;
  for (int j = 0; j < m_max; ++j) {
    V.col(j) = v;
    ++m;
    Eigen::VectorXcd w = lu.solve(v);
    if (j > 0) w -= beta[j - 1] * V.col(j - 1);
    double a = (V.col(j).adjoint() * w).value().real();
    alpha.push_back(a);
    w -= a * V.col(j);
    Eigen::MatrixXcd Vj = V.leftCols(j + 1);
    std::vector<const Eigen::MatrixXcd*> bases{&locked, &Vj};
    double b = orthogonalize(w, bases);
    if (b < 1e-10 || j == m_max - 1) {
      beta.push_back(0);
      break;
    }
    beta.push_back(b);
    v = w / b;
  }

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    T(j, j) = alpha[j];
    if (j + 1 < m) T(j + 1, j) = T(j, j + 1) = beta[j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);

  for (int r = 0; r < m; ++r) {
    double nu = es.eigenvalues()[m - 1 - r];  // large |nu| = close to sigma
    if (std::abs(nu) < 1e-14) continue;
    double lam = sigma + 1.0 / nu;
    if (lam < lo || lam > hi) continue;
    Eigen::VectorXcd x =
        V.leftCols(m) * es.eigenvectors().col(m - 1 - r).cast<cplx>();
    std::vector<const Eigen::MatrixXcd*> bases{&locked};
    double nrm = orthogonalize(x, bases);
    if (nrm < 0.5) continue;  // direction already locked
    x /= nrm;
    double lam_ref = (x.adjoint() * (H.mat * x)).value().real();
    double res = (H.mat * x - lam_ref * x).norm();
    if (res > 1e-8 * (std::abs(lam_ref) + restol_scale)) continue;
    if (lam_ref < lo || lam_ref > hi) continue;
    locked.conservativeResize(n, locked.cols() + 1);
    locked.col(locked.cols() - 1) = x;
    locked_vals.push_back(lam_ref);
    if ((int)locked_vals.size() >= expected) return;
  }
}

}  // namespace

SpectralWindow eig_window(const SparseHermitian& H, double lo, double hi) {
  if (lo >= hi) throw BadShape("window lo must be < hi");
  const int n = H.n();
  int expected = inertia_count_nudged(H, hi) - inertia_count_nudged(H, lo);
  SpectralWindow out;
  out.lo = lo;
  out.hi = hi;
  if (expected == 0) {
    out.eigenvectors.resize(n, 0);
    return out;
  }

  Eigen::MatrixXcd locked(n, 0);
  std::vector<double> locked_vals;
  const double mid = 0.5 * (lo + hi), delta = hi - lo;
  const double shifts[5] = {mid, lo + 0.25 * delta, lo + 0.75 * delta,
                            lo + 0.375 * delta, lo + 0.625 * delta};
  unsigned seed = 20240817u;
  for (int attempt = 0;
       attempt < 5 && (int)locked_vals.size() < expected; ++attempt) {
    double sigma = shifts[attempt];
    SpMat shifted = H.mat;
    for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma;
    Eigen::SparseLU<SpMat> lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success) continue;  // shift hit the spectrum
    // A couple of deflated passes per shift to flush out degenerate clusters.
    for (int round = 0;
         round < 4 && (int)locked_vals.size() < expected; ++round)
      lanczos_pass(H, lu, sigma, lo, hi, expected, locked, locked_vals,
                   seed++);
  }
  if ((int)locked_vals.size() != expected)
    throw ConvergenceFailure("shift-invert Lanczos missed the inertia count");

  std::vector<int> order(expected);
  for (int i = 0; i < expected; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return locked_vals[a] < locked_vals[b]; });
  out.eigenvectors.resize(n, expected);
  for (int i = 0; i < expected; ++i) {
    out.eigenvalues.push_back(locked_vals[order[i]]);
    out.eigenvectors.col(i) = locked.col(order[i]);
    out.residuals.push_back((H.mat * out.eigenvectors.col(i) -
                             out.eigenvalues[i] * out.eigenvectors.col(i))
                                .norm());
  }
  return out;
}

SpectralWindow eig_window_or_dense(const SparseHermitian& H, double lo,
                                   double hi) {
  try {
    return eig_window(H, lo, hi);
  } catch (const ConvergenceFailure&) {
    if (H.n() > kDenseLimit) throw;
    SpectralWindow full = eig_dense(H);
    SpectralWindow out;
    out.lo = lo;
    out.hi = hi;
    std::vector<int> keep;
    for (int i = 0; i < full.count(); ++i)
      if (full.eigenvalues[i] >= lo && full.eigenvalues[i] <= hi)
        keep.push_back(i);
    out.eigenvectors.resize(H.n(), (int)keep.size());
    for (int j = 0; j < (int)keep.size(); ++j) {
      out.eigenvalues.push_back(full.eigenvalues[keep[j]]);
      out.eigenvectors.col(j) = full.eigenvectors.col(keep[j]);
      out.residuals.push_back(full.residuals[keep[j]]);
    }
    return out;
  }
}

WellSpectra well_spectrum(const WellDecomposition& decomp,
                          const SparseHermitian& H, double lo, double hi) {
  if (decomp.num_wells() == 0) throw NoWells("empty decomposition");
  WellSpectra out;
  for (int h = 0; h < decomp.num_wells(); ++h) {
    SparseHermitian Hh = dirichlet_restrict(H, decomp.components[h]);
    try {
      out.per_well.push_back(eig_window_or_dense(Hh, lo, hi));
    } catch (const Error& e) {
      throw ConvergenceFailure("well " + std::to_string(h) + ": " + e.what());
    }
    for (double v : out.per_well.back().eigenvalues) out.merged.push_back(v);
  }
  std::sort(out.merged.begin(), out.merged.end());
  return out;
}

GapList detect_gaps(const std::vector<double>& values, double lo, double hi,
                    double min_width) {
  if (min_width < 0) min_width = 1e-8 * std::max(1.0, hi);
  std::vector<double> inside;
  for (double v : values)
    if (v >= lo && v <= hi) inside.push_back(v);
  std::sort(inside.begin(), inside.end());
  GapList g;
  for (size_t i = 0; i + 1 < inside.size(); ++i) {
    double w = inside[i + 1] - inside[i];
    if (w > min_width) {  // strictly wider than the threshold
      g.intervals.emplace_back(inside[i], inside[i + 1]);
      g.widths.push_back(w);
    }
  }
  return g;
}

std::vector<int> count_states(const WellDecomposition& decomp,
                              const SparseHermitian& H, double E1, double mu) {
  std::vector<int> counts;
  double level = E1 * mu;
  for (int h = 0; h < decomp.num_wells(); ++h) {
    SparseHermitian Hh = dirichlet_restrict(H, decomp.components[h]);
    int c;
    try {
      c = inertia_count(Hh, level);
    } catch (const FactorizationSingular&) {
      c = inertia_count(Hh, level * (1 + 1e-10));
    }
    counts.push_back(c);
  }
  return counts;
}

std::vector<int> separated_net(int npoints,
                               const std::function<double(int, int)>& dist,
                               double r) {
  if (r <= 0) throw BadShape("net radius must be positive");
  std::vector<int> kept;
  for (int p = 0; p < npoints; ++p) {
    bool ok = true;
    for (int q : kept)
      if (dist(p, q) < r) {
        ok = false;
        break;
      }
    if (ok) kept.push_back(p);
  }
  return kept;
}

double hermitian_norm(const Eigen::MatrixXcd& A) {
  const int n = (int)A.rows();
  if (n == 0) return 0;
  if (n <= 1024) {
    Eigen::MatrixXcd B = A;
    Eigen::VectorXd w(n);
    int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, B.data(), n,
                              w.data());
    if (info != 0) throw ConvergenceFailure("zheevd failed");
    return std::max(std::abs(w[0]), std::abs(w[n - 1]));
  }
  Eigen::VectorXcd x = seeded_random_vector(n, 7u).normalized();
  double nrm = 0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXcd y = A * x;
    double ny = y.norm();
    if (ny < 1e-300) return 0;
    double prev = nrm;
    nrm = ny;
    x = y / ny;
    if (it > 20 && std::abs(nrm - prev) < 1e-10 * nrm) break;
  }
  return nrm;
}

double operator_norm(const Eigen::MatrixXcd& A) {
  const int n = (int)A.rows();
  if (n == 0) return 0;
  if (n <= 512) {
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(A).singularValues()(0);
  }
  Eigen::VectorXcd x = seeded_random_vector((int)A.cols(), 11u).normalized();
  double s = 0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXcd y = A * x;
    Eigen::VectorXcd z = A.adjoint() * y;
    double nz = z.norm();
    if (nz < 1e-300) return 0;
    double prev = s;
    s = std::sqrt(nz);
    x = z / nz;
    if (it > 20 && std::abs(s - prev) < 1e-10 * s) break;
  }
  return s;
}

}  // namespace semiwell
