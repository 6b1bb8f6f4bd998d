#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "semiwell/resolvent.hpp"
#include "semiwell/spectral.hpp"

using namespace semiwell;

using testutil::diag_operator;
using testutil::gap_midpoint;
using testutil::random_vec;

TEST_CASE("resolvent_apply: closed forms and residual check") {
  SparseHermitian H2 = diag_operator({1, 2});
  Eigen::VectorXcd v(2);
  v << 1.0, 1.0;
  Eigen::VectorXcd x = resolvent_apply(H2, cplx(0, 0), v);
  CHECK(std::abs(x[0] - 1.0) < 1e-12);
  CHECK(std::abs(x[1] - 0.5) < 1e-12);

  // 1x1 zero operator at z = i: (0 - i)^{-1} v = i v.
  SparseHermitian H1 = diag_operator({0});
  Eigen::VectorXcd one(1);
  one << 1.0;
  Eigen::VectorXcd y = resolvent_apply(H1, cplx(0, 1), one);
  CHECK(std::abs(y[0] - cplx(0, 1)) < 1e-12);

  GridModel m = testutil::double_well(50);
  SparseHermitian H = assemble_hamiltonian(m, 20.0);
  Eigen::VectorXcd b = random_vec(50, 31);
  cplx z(3.0, 0.7);
  Eigen::VectorXcd sol = resolvent_apply(H, z, b);
  CHECK((H.mat * sol - z * sol - b).norm() <= 1e-10 * b.norm());
}

TEST_CASE("riesz_projection: diagonal closed form") {
  SparseHermitian H = diag_operator({1, 2, 5, 6});
  ProjectionMatrix P = riesz_projection(H, 3.0);
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(4, 4);
  expect(0, 0) = 1;
  expect(1, 1) = 1;
  CHECK((P.P - expect).norm() < 1e-8);
  CHECK(P.rank == 2);
  CHECK(P.provenance == Provenance::riesz);

  // Below the whole spectrum: the zero projection.
  ProjectionMatrix Z = riesz_projection(H, 0.5);
  CHECK(Z.P.norm() < 1e-8);
  CHECK(Z.rank == 0);

  // On top of an eigenvalue: not a gap.
  CHECK_THROWS_AS(riesz_projection(H, 2.0), NotInGap);
}

TEST_CASE("riesz_projection matches the eigendecomposition") {
  GridModel m = testutil::double_well(64);
  SparseHermitian H = assemble_hamiltonian(m, 30.0);
  auto w = eig_dense(H);
  // Cut between two well-separated eigenvalues mid-spectrum.
  int k = 4;
  while (w.eigenvalues[k + 1] - w.eigenvalues[k] < 0.5) ++k;
  double lam = 0.5 * (w.eigenvalues[k] + w.eigenvalues[k + 1]);
  ProjectionMatrix P = riesz_projection(H, lam);
  Eigen::MatrixXcd V = w.eigenvectors.leftCols(k + 1);
  CHECK(hermitian_norm(P.P - V * V.adjoint()) <= 1e-8);
  CHECK(P.rank == k + 1);

  // Quadrature-order stability: starting finer changes nothing material.
  ProjectionMatrix Q = riesz_projection(H, lam, 64);
  CHECK(hermitian_norm(P.P - Q.P) <= 2e-8);
}

TEST_CASE("parametrix: a single all-covering patch reproduces the resolvent") {
  GridModel m = testutil::line(32, 0.25, Boundary::periodic_torus,
                               [](const std::array<double, 2>&) { return 0.0; });
  SparseHermitian H = assemble_hamiltonian(m, 1.0);
  WellDecomposition d = find_wells(m, 0.5);
  REQUIRE(d.num_wells() == 1);
  CutoffFamily f;
  f.model = &m;
  f.E1 = 0.3;
  f.eta = 0.05;  // V = 0 < E1 + eta everywhere: empty exterior region
  f.phi_h.push_back({&m, Eigen::VectorXd::Ones(32)});
  f.psi_h.push_back({&m, Eigen::VectorXd::Ones(32)});
  f.phi0 = {&m, Eigen::VectorXd::Zero(32)};
  f.psi0 = {&m, Eigen::VectorXd::Zero(32)};

  cplx z(0.7, 0.3);
  ParametrixOps ops = build_parametrix(H, d, f, z);
  CHECK(ops.m0_sites.empty());
  Eigen::VectorXcd v = random_vec(32, 7);
  CHECK((ops.apply_R(v) - resolvent_apply(H, z, v)).norm() <= 1e-10 * v.norm());
  CHECK(ops.apply_K(v).norm() <= 1e-10 * v.norm());
  CHECK(defect_norm(ops) <= 1e-9);
}

TEST_CASE("parametrix: defect identity and adjoint consistency") {
  GridModel m = testutil::four_well(512);
  const double mu = 200.0, E1 = 0.5, eta = 0.1;
  SparseHermitian H = assemble_hamiltonian(m, mu);
  WellDecomposition d = find_wells(m, 0.9);
  WellSpectra ws = well_spectrum(d, H, -1e-9, E1 * mu);
  double lam = gap_midpoint(ws.merged, E1 * mu);
  ParametrixOps ops = build_parametrix(H, d, build_cutoffs(m, d, E1, eta),
                                       cplx(lam, 0));

  const int n = H.n();
  for (unsigned seed = 1; seed <= 20; ++seed) {
    Eigen::VectorXcd v = random_vec(n, seed);
    // K v is literally (H - z) R v - v.
    Eigen::VectorXcd r = ops.apply_R(v);
    Eigen::VectorXcd lhs = H.mat * r - cplx(lam, 0) * r - v;
    CHECK((lhs - ops.apply_K(v)).norm() <= 1e-10 * v.norm());
  }
  // <K u, v> == <u, K* v> and the same for R.
  for (unsigned seed = 40; seed < 45; ++seed) {
    Eigen::VectorXcd u = random_vec(n, seed), v = random_vec(n, seed + 100);
    cplx a = ops.apply_K(u).dot(v), b = u.dot(ops.apply_K_adjoint(v));
    CHECK(std::abs(a - b) <= 1e-9 * u.norm() * v.norm());
    cplx c = ops.apply_R(u).dot(v), e = u.dot(ops.apply_R_adjoint(v));
    CHECK(std::abs(c - e) <= 1e-9 * u.norm() * v.norm());
  }
}

TEST_CASE("parametrix_solve: Neumann reconstruction of the resolvent") {
  // A gently varying two-well ring: the cutoff transition bands are wide in
  // space, which keeps the parametrix defect well below 1 at this scale.
  const int n = 512;
  GridModel m = testutil::line(n, 8.0 / n, Boundary::periodic_torus,
                               [](const std::array<double, 2>& p) {
                                 double s =
                                     std::sin(std::numbers::pi * p[0] / 4.0);
                                 return s * s;
                               });
  const double mu = 400.0, E1 = 0.5, eta = 0.1;
  SparseHermitian H = assemble_hamiltonian(m, mu);
  WellDecomposition d = find_wells(m, 0.9);
  WellSpectra ws = well_spectrum(d, H, -1e-9, E1 * mu);
  double lam = gap_midpoint(ws.merged, E1 * mu);
  cplx z(lam, 0);
  ParametrixOps ops = build_parametrix(H, d, build_cutoffs(m, d, E1, eta), z);
  double kn = defect_norm(ops);
  CHECK(kn < 0.6);
  Eigen::VectorXcd v = random_vec(H.n(), 3);
  Eigen::VectorXcd x = parametrix_solve(ops, v);
  CHECK((x - resolvent_apply(H, z, v)).norm() <= 1e-8 * v.norm());
}

TEST_CASE("spectral_distance: worked example and validation") {
  auto [dists, mx] = spectral_distance({1.0, 2.0, 4.0}, {1.1, 3.9});
  REQUIRE(dists.size() == 3);
  CHECK(dists[0] == doctest::Approx(0.1));
  CHECK(dists[1] == doctest::Approx(0.9));
  CHECK(dists[2] == doctest::Approx(0.1));
  CHECK(mx == doctest::Approx(0.9));

  auto [empty, zero] = spectral_distance({}, {1.0});
  CHECK(empty.empty());
  CHECK(zero == 0.0);
  CHECK_THROWS_AS(spectral_distance({1.0}, {}), EmptyWellSpectrum);
}
