#include <doctest.h>

#include <cmath>

#include "framefem/assembly.hpp"
#include "framefem/errors.hpp"
#include "framefem/frame.hpp"
#include "framefem/linalg.hpp"
#include "framefem/nodal.hpp"
#include "framefem/spectral.hpp"
#include "oracles.hpp"

using namespace framefem;

namespace {

SymmetricMatrix diag(std::vector<double> d) {
  SymmetricMatrix m(int(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m.at(int(i), int(i)) = d[i];
  return m;
}

SymmetricMatrix random_spd(int n, unsigned seed, double shift = 0.5) {
  auto gen = oracles::rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> r(std::size_t(n) * n);
  for (double& v : r) v = nd(gen);
  SymmetricMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        s += r[std::size_t(k) * n + i] * r[std::size_t(k) * n + j];
      m.at(i, j) = s / n + (i == j ? shift : 0.0);
    }
  return m;
}

} // namespace

TEST_CASE("identity spectrum") {
  SpectralReport rep = sym_eigvals(diag({1, 1, 1, 1, 1}), {});
  CHECK(rep.lambda_min == doctest::Approx(1.0));
  CHECK(rep.lambda_max == doctest::Approx(1.0));
  CHECK(rep.kappa == doctest::Approx(1.0));
  CHECK(rep.rank == 5);
}

TEST_CASE("two-point spectrum reproduces 1/eps") {
  for (double eps : {1e-2, 1e-6, 1e-10}) {
    SpectralReport rep = sym_eigvals(diag({1.0, eps}), {1e-11, 1e-12});
    CHECK(rep.kappa == doctest::Approx(1.0 / eps).epsilon(1e-12));
  }
}

TEST_CASE("semidefinite diagonal: rank and positive condition number") {
  SpectralReport rep = sym_eigvals(diag({2, 1, 0}), {});
  CHECK(rep.rank == 2);
  CHECK(rep.lambda_min_pos == doctest::Approx(1.0));
  CHECK(rep.kappa_pos == doctest::Approx(2.0));
}

TEST_CASE("eigensolve of a dense symmetric matrix is consistent") {
  const int n = 40;
  SymmetricMatrix m = random_spd(n, 123);
  EigenDecomposition eig = sym_eig(m);
  // residuals and orthonormality
  std::vector<double> v(n), mv(n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) v[i] = eig.vectors[std::size_t(i) * n + k];
    m.matvec(v, mv);
    for (int i = 0; i < n; ++i) mv[i] -= eig.values[k] * v[i];
    CHECK(norm2(mv) < 1e-12 * std::abs(eig.values[n - 1]) * n);
  }
  for (int k = 0; k < n; ++k)
    for (int l = 0; l <= k; ++l) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        s += eig.vectors[std::size_t(i) * n + k] *
             eig.vectors[std::size_t(i) * n + l];
      CHECK(std::abs(s - (k == l ? 1.0 : 0.0)) < 1e-12);
    }
  // trace identity
  double tr = 0.0, se = 0.0;
  for (int i = 0; i < n; ++i) tr += m(i, i);
  for (double l : eig.values) se += l;
  CHECK(tr == doctest::Approx(se).epsilon(1e-12));
}

TEST_CASE("frame condition of orthonormal and duplicated systems") {
  // orthonormal basis: K = 1
  Comparison1DBasis basis(BasisKind1D::jacobi_bubble, 8);
  auto tables = basis.tables(2 * 8 + 4);
  SymmetricMatrix gram = assemble(*tables, {BilinearFormSpec::Kind::mass});
  CHECK(frame_condition(gram, {}) == doctest::Approx(1.0).epsilon(1e-10));

  // duplicated orthonormal member: eigenvalues {0, 1, 2}
  SymmetricMatrix dup(3);
  dup.at(0, 0) = dup.at(1, 1) = dup.at(1, 0) = 1.0;
  dup.at(2, 2) = 1.0;
  CHECK(frame_condition(dup, {}) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("missing spectral gap is a loud failure") {
  CHECK_THROWS_AS(frame_condition(diag({1.0, 5e-10}), {1e-11, 1e-10}),
                  GapTooSmall);
}

TEST_CASE("generalized condition numbers") {
  SymmetricMatrix m = random_spd(25, 9);
  CHECK(generalized_condition(m, m) == doctest::Approx(1.0).epsilon(1e-10));
  SymmetricMatrix m2(25);
  for (int i = 0; i < 25; ++i)
    for (int j = 0; j <= i; ++j) m2.at(i, j) = 2.0 * m(i, j);
  CHECK(generalized_condition(m2, m) == doctest::Approx(1.0).epsilon(1e-10));

  Comparison1DBasis basis(BasisKind1D::jacobi_bubble, 12);
  auto tables = basis.tables(2 * 12 + 4);
  SymmetricMatrix mass = assemble(*tables, {BilinearFormSpec::Kind::mass});
  SymmetricMatrix stiff = assemble(*tables, {BilinearFormSpec::Kind::stiffness});
  SpectralReport ra = sym_eigvals(stiff, {});
  CHECK(generalized_condition(stiff, mass) ==
        doctest::Approx(ra.kappa).epsilon(1e-8));
  CHECK_THROWS_AS(generalized_condition(diag({1, 2, 3}), diag({1, 1, -1})),
                  MNotDefinite);
}

TEST_CASE("product bound") {
  // equality case: orthonormal basis
  {
    Comparison1DBasis basis(BasisKind1D::jacobi_bubble, 10);
    auto tables = basis.tables(2 * 10 + 4);
    SymmetricMatrix mass = assemble(*tables, {BilinearFormSpec::Kind::mass});
    SymmetricMatrix stiff =
        assemble(*tables, {BilinearFormSpec::Kind::stiffness});
    ProductBoundCheck pb = verify_product_bound(stiff, mass);
    CHECK(pb.holds);
    CHECK(pb.lhs == doctest::Approx(pb.rhs).epsilon(1e-9));
  }
  // Bernstein case
  {
    Comparison1DBasis basis(BasisKind1D::bernstein_interior, 8);
    auto tables = basis.tables(2 * 8 + 4);
    SymmetricMatrix mass = assemble(*tables, {BilinearFormSpec::Kind::mass});
    SymmetricMatrix stiff =
        assemble(*tables, {BilinearFormSpec::Kind::stiffness});
    ProductBoundCheck pb = verify_product_bound(stiff, mass);
    CHECK(pb.holds);
    CHECK(pb.eig_level_holds);
  }
  // randomized SPD pairs
  for (unsigned seed = 0; seed < 20; ++seed) {
    SymmetricMatrix a = random_spd(30, 1000 + seed, 0.1);
    SymmetricMatrix m = random_spd(30, 2000 + seed, 0.3);
    ProductBoundCheck pb = verify_product_bound(a, m);
    CHECK(pb.holds);
    CHECK(pb.eig_level_holds);
  }
}

TEST_CASE("frame operator route gives the same condition number") {
  // an L2-orthonormal basis of P_r(T_h) from the nodal basis and its mass
  // Cholesky factor; the frame operator's spectrum must match the nonzero
  // Gram spectrum
  auto mesh = generate_mesh(MeshKind::interval, 4, 0.0, 1.0);
  const int r = 6;
  GlobalFrame frame(mesh, r, BoundaryCondition::natural);
  auto ft = frame.tables(frame.default_exactness());
  SymmetricMatrix gram = assemble(*ft, {BilinearFormSpec::Kind::mass});
  SpectralReport grep = sym_eigvals(gram, {});

  NodalBasis nodal(mesh, r, false);
  auto nt = nodal.tables(frame.default_exactness());
  SymmetricMatrix nodal_mass = assemble(*nt, {BilinearFormSpec::Kind::mass});
  CholeskyFactor chol(nodal_mass);
  const int n = nodal.size(), N = frame.size();
  std::vector<double> cross(std::size_t(n) * N, 0.0);
  for (std::size_t cb = 0; cb < nt->cells.size(); ++cb) {
    const auto& ncb = nt->cells[cb];
    const auto& fcb = ft->cells[cb];
    const int kn = int(ncb.global.size()), kf = int(fcb.global.size());
    for (int q = 0; q < nt->rule.size(); ++q)
      for (int i = 0; i < kn; ++i)
        for (int k = 0; k < kf; ++k)
          cross[std::size_t(ncb.global[i]) * N + fcb.global[k]] +=
              nt->rule.weights[q] * ncb.scale *
              ncb.values[std::size_t(q) * kn + i] *
              fcb.values[std::size_t(q) * kf + k];
  }
  std::vector<double> col(n);
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < n; ++i) col[i] = cross[std::size_t(i) * N + k];
    chol.solve_lower(col);
    for (int i = 0; i < n; ++i) cross[std::size_t(i) * N + k] = col[i];
  }
  SymmetricMatrix frame_op(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int k = 0; k < N; ++k)
        s += cross[std::size_t(i) * N + k] * cross[std::size_t(j) * N + k];
      frame_op.at(i, j) = s;
    }
  SpectralReport srep = sym_eigvals(frame_op, {});
  CHECK(srep.rank == grep.rank);
  CHECK(grep.kappa_pos == doctest::Approx(srep.kappa).epsilon(1e-8));
  // full nonzero spectra agree
  const int offset = frame.size() - grep.rank;
  for (int k = 0; k < grep.rank; ++k)
    CHECK(grep.eigenvalues[offset + k] ==
          doctest::Approx(srep.eigenvalues[k]).epsilon(1e-8));
}

TEST_CASE("decomposition bound with measured best constants") {
  // with unit-norm local blocks the measured constants make the bound an
  // identity: a = 1/lambda_max, b = 1/lambda_min_pos, K_j = alpha_j = 1
  auto mesh = generate_mesh(MeshKind::interval, 2, 0.0, 1.0);
  for (int r = 2; r <= 4; ++r) {
    GlobalFrame frame(mesh, r, BoundaryCondition::natural);
    auto ft = frame.tables(frame.default_exactness());
    SymmetricMatrix gram = assemble(*ft, {BilinearFormSpec::Kind::mass});
    SpectralReport rep = sym_eigvals(gram, {});
    double max_block_cond = 0.0, max_alpha = 0.0, min_alpha = 1e300;
    for (const auto& [offset, size] : frame.blocks()) {
      SymmetricMatrix blk(size);
      for (int i = 0; i < size; ++i)
        for (int j = 0; j <= i; ++j) blk.at(i, j) = gram(offset + i, offset + j);
      SpectralReport brep = sym_eigvals(blk, {});
      max_block_cond = std::max(max_block_cond, brep.kappa);
      max_alpha = std::max(max_alpha, brep.lambda_min);
      min_alpha = std::min(min_alpha, brep.lambda_min);
    }
    CHECK(max_block_cond == doctest::Approx(1.0).epsilon(1e-10));
    const double a_meas = 1.0 / rep.lambda_max;
    const double b_meas = 1.0 / rep.lambda_min_pos;
    const double bound =
        (1.0 / a_meas) * b_meas * max_block_cond * (max_alpha / min_alpha);
    CHECK(rep.kappa_pos <= bound * (1.0 + 1e-10));
  }
}
