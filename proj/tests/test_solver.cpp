#include <doctest.h>

#include <cmath>

#include "framefem/assembly.hpp"
#include "framefem/errors.hpp"
#include "framefem/frame.hpp"
#include "framefem/nodal.hpp"
#include "framefem/solver.hpp"
#include "framefem/spectral.hpp"
#include "oracles.hpp"

using namespace framefem;

namespace {
SymmetricMatrix diag(std::vector<double> d) {
  SymmetricMatrix m(int(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m.at(int(i), int(i)) = d[i];
  return m;
}
} // namespace

TEST_CASE("pcg on the identity converges in one iteration") {
  SymmetricMatrix a = diag({1, 1, 1, 1});
  IdentityPreconditioner id(4);
  std::vector<double> b{1, -2, 0.5, 3};
  SolveReport rep = pcg(a, b, id, 1e-12, 10);
  CHECK(rep.converged);
  CHECK(rep.iterations == 1);
  for (int i = 0; i < 4; ++i) CHECK(rep.c[i] == doctest::Approx(b[i]));
}

TEST_CASE("pcg solves a consistent semidefinite system") {
  SymmetricMatrix a = diag({1, 0});
  IdentityPreconditioner id(2);
  SolveReport rep = pcg(a, std::vector<double>{1, 0}, id, 1e-12, 10);
  CHECK(rep.converged);
  CHECK(rep.iterations == 1);
  CHECK(rep.c[0] == doctest::Approx(1.0));
  CHECK(rep.c[1] == doctest::Approx(0.0)); // kernel component stays zero
}

TEST_CASE("pcg flags an inconsistent right-hand side") {
  SymmetricMatrix a = diag({1, 0});
  IdentityPreconditioner id(2);
  CHECK_THROWS_AS(pcg(a, std::vector<double>{0, 1}, id, 1e-10, 10),
                  InconsistentRHS);
}

TEST_CASE("pcg enforces the iteration cap") {
  auto mesh = generate_mesh(MeshKind::interval, 8, 0.0, 1.0);
  NodalBasis nodal(mesh, 2, true);
  auto tables = nodal.tables(6);
  SymmetricMatrix a = assemble(*tables, {BilinearFormSpec::Kind::stiffness});
  LoadVector b = assemble_load(*tables, [](std::span<const double>) {
    return 1.0;
  });
  IdentityPreconditioner id(a.order());
  CHECK_THROWS_AS(pcg(a, b.values, id, 1e-14, 2), MaxIterations);
}

TEST_CASE("schwarz preconditioner is symmetric and positive") {
  auto mesh = generate_mesh(MeshKind::unit_square, 2);
  GlobalFrame frame(mesh, 4, BoundaryCondition::essential);
  auto tables = frame.tables(frame.default_exactness());
  const BilinearFormSpec form{BilinearFormSpec::Kind::stiffness};
  SymmetricMatrix a = assemble(*tables, form);
  auto pc = build_schwarz(frame, a, form);
  auto gen = oracles::rng(17);
  std::normal_distribution<double> nd(0.0, 1.0);
  const int n = frame.size();
  std::vector<double> x(n), y(n), bx(n), by(n);
  for (int trial = 0; trial < 5; ++trial) {
    for (double& v : x) v = nd(gen);
    for (double& v : y) v = nd(gen);
    pc->apply(x, bx);
    pc->apply(y, by);
    const double xby = dot(x, by), ybx = dot(y, bx);
    CHECK(xby == doctest::Approx(ybx).epsilon(1e-12));
    CHECK(dot(x, bx) > 0.0);
  }
}

TEST_CASE("single-block frame: preconditioned operator is the identity") {
  auto mesh = generate_mesh(MeshKind::interval, 1, -1.0, 1.0);
  GlobalFrame frame(mesh, 5, BoundaryCondition::essential);
  REQUIRE(frame.blocks().size() == 1);
  auto tables = frame.tables(frame.default_exactness());
  const BilinearFormSpec form{BilinearFormSpec::Kind::stiffness};
  SymmetricMatrix a = assemble(*tables, form);
  auto pc = build_schwarz(frame, a, form);
  const int n = frame.size();
  std::vector<double> e(n, 0.0), ae(n), bae(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    a.matvec(e, ae);
    pc->apply(ae, bae);
    for (int i = 0; i < n; ++i)
      CHECK(bae[i] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
    e[j] = 0.0;
  }
  SpectralReport rep = spectrum_of_preconditioned(a, *pc);
  CHECK(rep.kappa_pos == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("coarse-only regime at r = 1 converges within three iterations") {
  auto mesh = generate_mesh(MeshKind::interval, 4, 0.0, 1.0);
  GlobalFrame frame(mesh, 1, BoundaryCondition::essential);
  auto tables = frame.tables(frame.default_exactness());
  const BilinearFormSpec form{BilinearFormSpec::Kind::stiffness};
  SymmetricMatrix a = assemble(*tables, form);
  LoadVector b = assemble_load(*tables, [](std::span<const double> x) {
    return M_PI * M_PI * std::sin(M_PI * x[0]);
  });
  auto pc = build_schwarz(frame, a, form);
  SolveReport rep = pcg(a, b.values, *pc, 1e-10, 100);
  CHECK(rep.converged);
  CHECK(rep.iterations <= 3);
}

TEST_CASE("identity preconditioner spectrum equals the positive spectrum") {
  auto mesh = generate_mesh(MeshKind::interval, 3, 0.0, 1.0);
  GlobalFrame frame(mesh, 4, BoundaryCondition::essential);
  auto tables = frame.tables(frame.default_exactness());
  SymmetricMatrix a = assemble(*tables, {BilinearFormSpec::Kind::stiffness});
  IdentityPreconditioner id(a.order());
  SpectralReport pre = spectrum_of_preconditioned(a, id);
  SpectralReport direct = sym_eigvals(a, {});
  CHECK(pre.kappa_pos == doctest::Approx(direct.kappa_pos).epsilon(1e-9));
}

TEST_CASE("1D manufactured solution through the full stack") {
  auto mesh = generate_mesh(MeshKind::interval, 4, 0.0, 1.0);
  const int r = 8;
  GlobalFrame frame(mesh, r, BoundaryCondition::essential);
  auto tables = frame.tables(frame.default_exactness());
  const BilinearFormSpec form{BilinearFormSpec::Kind::stiffness};
  SymmetricMatrix a = assemble(*tables, form);
  LoadVector b = assemble_load(*tables, [](std::span<const double> x) {
    return M_PI * M_PI * std::sin(M_PI * x[0]);
  });
  auto pc = build_schwarz(frame, a, form);
  SolveReport rep = pcg(a, b.values, *pc, 1e-10, 2000);
  CHECK(rep.converged);

  // L2 error against sin(pi x)
  auto rule = simplex_quadrature(1, 2 * r + 12);
  double err2 = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto verts = mesh.cell_vertices(c);
    const double scale = mesh.cell_volume(c);
    for (int q = 0; q < rule.size(); ++q) {
      auto bq = rule.bary(q);
      const double x =
          bq[0] * mesh.vertex(verts[0])[0] + bq[1] * mesh.vertex(verts[1])[0];
      std::vector<double> lam{bq[0], bq[1]};
      double uh = 0.0;
      for (int idx : frame.active_on_cell(c))
        uh += rep.c[idx] * frame.eval_on_cell(idx, c, lam);
      const double diff = uh - std::sin(M_PI * x);
      err2 += scale * rule.weights[q] * diff * diff;
    }
  }
  CHECK(std::sqrt(err2) <= 1e-8);

  // Krylov iterates stay outside the redundancy kernel in the B^{-1} sense
  SymmetricMatrix mass = assemble(*tables, {BilinearFormSpec::Kind::mass});
  EigenDecomposition eig = sym_eig(mass);
  const int n = eig.n;
  // dense B and its Cholesky for the B^{-1} inner product
  SymmetricMatrix bmat(n);
  std::vector<double> e(n, 0.0), col(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    pc->apply(e, col);
    e[j] = 0.0;
    for (int i = j; i < n; ++i) bmat.at(i, j) = col[i];
  }
  CholeskyFactor bchol(bmat);
  std::vector<double> binv_c(rep.c);
  bchol.solve(binv_c);
  const double cnorm = std::sqrt(std::max(dot(rep.c, binv_c), 0.0));
  for (int k = 0; k < n && eig.values[k] < 1e-10 * eig.values[n - 1]; ++k) {
    std::vector<double> z(n);
    for (int i = 0; i < n; ++i) z[i] = eig.vectors[std::size_t(i) * n + k];
    std::vector<double> binv_z(z);
    bchol.solve(binv_z);
    const double znorm = std::sqrt(std::max(dot(z, binv_z), 0.0));
    CHECK(std::abs(dot(z, binv_c)) <= 1e-9 * std::max(1.0, znorm * cnorm));
  }

  // representation independence: nodal solve gives the same function
  NodalBasis nodal(mesh, r, true);
  auto nt = nodal.tables(frame.default_exactness());
  SymmetricMatrix an = assemble(*nt, form);
  LoadVector bn = assemble_load(*nt, [](std::span<const double> x) {
    return M_PI * M_PI * std::sin(M_PI * x[0]);
  });
  CholeskyFactor nchol(an);
  std::vector<double> cn(bn.values);
  nchol.solve(cn);
  double diff2 = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto verts = mesh.cell_vertices(c);
    const double scale = mesh.cell_volume(c);
    for (int q = 0; q < rule.size(); ++q) {
      auto bq = rule.bary(q);
      const double x =
          bq[0] * mesh.vertex(verts[0])[0] + bq[1] * mesh.vertex(verts[1])[0];
      std::vector<double> lam{bq[0], bq[1]};
      double uh = 0.0;
      for (int idx : frame.active_on_cell(c))
        uh += rep.c[idx] * frame.eval_on_cell(idx, c, lam);
      const double un =
          nodal.eval_combination(cn, std::span<const double>{&x, 1});
      diff2 += scale * rule.weights[q] * (uh - un) * (uh - un);
    }
  }
  CHECK(std::sqrt(diff2) <= 1e-8);
}

TEST_CASE("schwarz operator is representation independent") {
  // the same additive Schwarz operator expressed in the nodal basis has the
  // same restricted condition number as the frame representation
  auto mesh = generate_mesh(MeshKind::interval, 2, 0.0, 1.0);
  const int r = 3;
  GlobalFrame frame(mesh, r, BoundaryCondition::essential);
  auto ft = frame.tables(frame.default_exactness());
  const BilinearFormSpec form{BilinearFormSpec::Kind::stiffness};
  SymmetricMatrix af = assemble(*ft, form);
  auto pc = build_schwarz(frame, af, form);
  const double kappa_frame = spectrum_of_preconditioned(af, *pc).kappa_pos;

  NodalBasis nodal(mesh, r, true);
  auto nt = nodal.tables(frame.default_exactness());
  SymmetricMatrix an = assemble(*nt, form);
  const int n = nodal.size(), N = frame.size();
  // nodal coordinates of the frame functions: Lagrange coefficients are
  // point values at the active nodes
  std::vector<double> embed(std::size_t(n) * N, 0.0);
  for (int node = 0; node < nodal.total_nodes(); ++node) {
    const int i = nodal.active_index(node);
    if (i < 0) continue;
    auto x = nodal.node_coord(node);
    for (int k = 0; k < N; ++k) embed[std::size_t(i) * N + k] = frame.eval(k, x);
  }
  // B_nodal = sum_blocks X_f (X_f^T A X_f)^{-1} X_f^T + coarse, realized by
  // applying the frame preconditioner through the embedding:
  // B_n = X B_frame-ish ... the local blocks in the nodal representation are
  // congruences of the frame blocks, so B_n = X diag-blocks X^T + coarse;
  // both sides below are assembled from the same local solves.
  class NodalSchwarz final : public Preconditioner {
  public:
    NodalSchwarz(const SymmetricMatrix& an, const std::vector<double>& embed,
                 const GlobalFrame& frame, int n)
        : n_(n), N_(frame.size()), embed_(embed) {
      for (const auto& [offset, size] : frame.blocks()) {
        Block blk;
        blk.offset = offset;
        blk.size = size;
        SymmetricMatrix local(size);
        // X_f^T A X_f with X_f the embedding columns of the block
        std::vector<double> ax(n_);
        for (int a = 0; a < size; ++a) {
          std::vector<double> xa(n_);
          for (int i = 0; i < n_; ++i)
            xa[i] = embed_[std::size_t(i) * N_ + offset + a];
          an.matvec(xa, ax);
          for (int b = 0; b <= a; ++b) {
            double s = 0.0;
            for (int i = 0; i < n_; ++i)
              s += ax[i] * embed_[std::size_t(i) * N_ + offset + b];
            local.at(a, b) = s;
          }
        }
        blk.inv = std::make_unique<CholeskyFactor>(local);
        blocks_.push_back(std::move(blk));
      }
    }
    int order() const override { return n_; }
    void apply(std::span<const double> x, std::span<double> y) const override {
      for (int i = 0; i < n_; ++i) y[i] = 0.0;
      for (const auto& blk : blocks_) {
        std::vector<double> u(blk.size, 0.0);
        for (int a = 0; a < blk.size; ++a)
          for (int i = 0; i < n_; ++i)
            u[a] += embed_[std::size_t(i) * N_ + blk.offset + a] * x[i];
        blk.inv->solve(u);
        for (int a = 0; a < blk.size; ++a)
          for (int i = 0; i < n_; ++i)
            y[i] += embed_[std::size_t(i) * N_ + blk.offset + a] * u[a];
      }
    }

  private:
    struct Block {
      int offset = 0, size = 0;
      std::unique_ptr<CholeskyFactor> inv;
    };
    int n_, N_;
    std::vector<double> embed_;
    std::vector<Block> blocks_;
  };
  // compare without the coarse term on both sides: rebuild a frame-side
  // preconditioner consisting of the local solves only, via a frame with no
  // interior vertices (n=2 mesh has exactly one interior vertex, so instead
  // compare the full operators through the embedding identity)
  NodalSchwarz ns(an, embed, frame, n);
  // add the coarse term on the nodal side: P1 stiffness on interior vertices
  NodalBasis p1(mesh, 1, true);
  auto p1t = p1.tables(4);
  SymmetricMatrix a0 = assemble(*p1t, form);
  CholeskyFactor a0chol(a0);
  // embedding of P1 hats into the nodal degree-r basis by interpolation
  std::vector<double> hats(std::size_t(n) * p1.size(), 0.0);
  for (int node = 0; node < nodal.total_nodes(); ++node) {
    const int i = nodal.active_index(node);
    if (i < 0) continue;
    auto x = nodal.node_coord(node);
    // evaluate each interior hat at the node
    int col = 0;
    for (int vv = 0; vv < p1.total_nodes(); ++vv) {
      if (p1.active_index(vv) < 0) continue;
      std::vector<double> unit(p1.size(), 0.0);
      unit[p1.active_index(vv)] = 1.0;
      hats[std::size_t(i) * p1.size() + col] = p1.eval_combination(unit, x);
      ++col;
    }
  }
  class Combined final : public Preconditioner {
  public:
    Combined(const NodalSchwarz& local, const CholeskyFactor& coarse,
             const std::vector<double>& hats, int n, int nc)
        : local_(local), coarse_(coarse), hats_(hats), n_(n), nc_(nc) {}
    int order() const override { return n_; }
    void apply(std::span<const double> x, std::span<double> y) const override {
      local_.apply(x, y);
      std::vector<double> u(nc_, 0.0);
      for (int c = 0; c < nc_; ++c)
        for (int i = 0; i < n_; ++i) u[c] += hats_[std::size_t(i) * nc_ + c] * x[i];
      coarse_.solve(u);
      for (int c = 0; c < nc_; ++c)
        for (int i = 0; i < n_; ++i) y[i] += hats_[std::size_t(i) * nc_ + c] * u[c];
    }

  private:
    const NodalSchwarz& local_;
    const CholeskyFactor& coarse_;
    const std::vector<double>& hats_;
    int n_, nc_;
  };
  Combined nodal_pc(ns, a0chol, hats, n, p1.size());
  const double kappa_nodal = spectrum_of_preconditioned(an, nodal_pc).kappa_pos;
  CHECK(kappa_frame == doctest::Approx(kappa_nodal).epsilon(1e-6));
}

TEST_CASE("preconditioning beats plain CG and respects the product bound") {
  auto mesh = generate_mesh(MeshKind::interval, 4, 0.0, 1.0);
  const int r = 10;
  GlobalFrame frame(mesh, r, BoundaryCondition::essential);
  auto tables = frame.tables(frame.default_exactness());
  const BilinearFormSpec form{BilinearFormSpec::Kind::stiffness};
  SymmetricMatrix a = assemble(*tables, form);
  LoadVector b = assemble_load(*tables, [](std::span<const double> x) {
    return M_PI * M_PI * std::sin(M_PI * x[0]);
  });
  auto schwarz = build_schwarz(frame, a, form);
  IdentityPreconditioner id(frame.size());
  SolveReport swr = pcg(a, b.values, *schwarz, 1e-10, 10000);
  SolveReport idr = pcg(a, b.values, id, 1e-10, 10000);
  CHECK(swr.iterations < idr.iterations);

  // kappa(B A) restricted to the positive part never exceeds
  // kappa_pos(A) * kappa(B)
  const double k_ba = spectrum_of_preconditioned(a, *schwarz).kappa_pos;
  const double k_a = sym_eigvals(a, {}).kappa_pos;
  const int n = frame.size();
  SymmetricMatrix bmat(n);
  std::vector<double> e(n, 0.0), col(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    schwarz->apply(e, col);
    e[j] = 0.0;
    for (int i = j; i < n; ++i) bmat.at(i, j) = col[i];
  }
  const double k_b = sym_eigvals(bmat, {}).kappa;
  CHECK(k_ba <= k_a * k_b * (1.0 + 1e-10));
}

TEST_CASE("build_schwarz validates its inputs") {
  auto mesh = generate_mesh(MeshKind::interval, 3, 0.0, 1.0);
  GlobalFrame natural(mesh, 3, BoundaryCondition::natural);
  auto tables = natural.tables(natural.default_exactness());
  const BilinearFormSpec stiffness{BilinearFormSpec::Kind::stiffness};
  SymmetricMatrix a = assemble(*tables, stiffness);
  CHECK_THROWS_AS(build_schwarz(natural, a, stiffness), UsageError);
  // stiffness_plus_mass is definite with natural BC and accepted
  const BilinearFormSpec spm{BilinearFormSpec::Kind::stiffness_plus_mass};
  SymmetricMatrix aspm = assemble(*tables, spm);
  CHECK_NOTHROW(build_schwarz(natural, aspm, spm));
}
