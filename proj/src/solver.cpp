#include "framefem/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "framefem/errors.hpp"
#include "framefem/nodal.hpp"

namespace framefem {

void SchwarzPreconditioner::apply(std::span<const double> x,
                                  std::span<double> y) const {
  for (int i = 0; i < n_; ++i) y[i] = 0.0;
  // coarse: y += E A0^{-1} E^T x
  if (coarse_inv_) {
    std::vector<double> u(coarse_pos_.size());
    for (std::size_t k = 0; k < coarse_pos_.size(); ++k)
      u[k] = coarse_scale_[k] * x[coarse_pos_[k]];
    coarse_inv_->solve(u);
    for (std::size_t k = 0; k < coarse_pos_.size(); ++k)
      y[coarse_pos_[k]] += coarse_scale_[k] * u[k];
  }
  // local: y += blockdiag(A_ff^{-1}) x
  std::vector<double> u;
  for (const auto& blk : blocks_) {
    u.assign(x.begin() + blk.offset, x.begin() + blk.offset + blk.size);
    blk.inv->solve(u);
    for (int k = 0; k < blk.size; ++k) y[blk.offset + k] += u[k];
  }
}

std::unique_ptr<SchwarzPreconditioner> build_schwarz(
    const GlobalFrame& frame, const SymmetricMatrix& a,
    const BilinearFormSpec& form) {
  if (a.order() != frame.size())
    throw DimensionMismatch("build_schwarz: matrix does not match frame");
  if (form.kind == BilinearFormSpec::Kind::stiffness &&
      frame.bc() != BoundaryCondition::essential)
    throw UsageError("build_schwarz: pure stiffness needs essential BC");

  auto p = std::unique_ptr<SchwarzPreconditioner>(new SchwarzPreconditioner());
  p->n_ = frame.size();

  for (const auto& [offset, size] : frame.blocks()) {
    SymmetricMatrix local(size);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j <= i; ++j) local.at(i, j) = a(offset + i, offset + j);
    SchwarzPreconditioner::Block blk;
    blk.offset = offset;
    blk.size = size;
    try {
      blk.inv = std::make_unique<CholeskyFactor>(local);
    } catch (const MNotDefinite&) {
      throw SingularLocalBlock("frame block starting at " +
                               std::to_string(offset) + " is singular");
    }
    p->blocks_.push_back(std::move(blk));
  }

  // coarse space: hat functions.  The first member of each vertex block is
  // proportional to the hat, so the embedding has one entry per vertex.
  const SimplicialMesh& mesh = frame.mesh();
  std::vector<int> vertex_of_coarse;
  for (std::size_t b = 0; b < frame.retained().size(); ++b) {
    const SubRef f = frame.retained()[b];
    if (f.m != 0) continue;
    const int pos = frame.blocks()[b].first;
    p->coarse_pos_.push_back(pos);
    const int v = mesh.sub(f).verts[0];
    vertex_of_coarse.push_back(v);
    // hat = phi / (normalization * p0), probed at a supporting cell's center
    const int c = mesh.cells_of(f).front();
    const int d = mesh.dim();
    std::vector<double> lambda(d + 1, 1.0 / (d + 1));
    const double phi = frame.eval_on_cell(frame.blocks()[b].first, c, lambda);
    auto positions = mesh.local_positions(f, c);
    const double hat = lambda[positions[0]];
    p->coarse_scale_.push_back(hat / phi);
  }

  if (!p->coarse_pos_.empty()) {
    // P1 stiffness on the retained vertices, assembled with the same form
    NodalBasis p1(mesh, 1, frame.bc() == BoundaryCondition::essential);
    auto tables = p1.tables(std::max(2, required_exactness(form, 1)));
    SymmetricMatrix a0 = assemble(*tables, form);
    // map coarse slots to P1 active indices: both are per-vertex
    std::vector<int> perm(p->coarse_pos_.size());
    for (std::size_t k = 0; k < perm.size(); ++k) {
      // nodal node ids coincide with first-seen lattice order; locate the
      // active node sitting at this vertex coordinate
      auto x = mesh.vertex(vertex_of_coarse[k]);
      int found = -1;
      for (int node = 0; node < p1.total_nodes(); ++node) {
        auto y = p1.node_coord(node);
        double dist = 0.0;
        for (int i = 0; i < mesh.dim(); ++i) dist += (x[i] - y[i]) * (x[i] - y[i]);
        if (dist < 1e-24) {
          found = p1.active_index(node);
          break;
        }
      }
      if (found < 0)
        throw NumericalError("build_schwarz: coarse vertex not found in P1 basis");
      perm[k] = found;
    }
    // reorder A0 into coarse slot order
    SymmetricMatrix a0p(int(perm.size()));
    for (std::size_t i = 0; i < perm.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j)
        a0p.at(int(i), int(j)) = a0(perm[i], perm[j]);
    p->coarse_inv_ = std::make_unique<CholeskyFactor>(a0p);
  }
  return p;
}

SolveReport pcg(const SymmetricMatrix& a, std::span<const double> b,
                const Preconditioner& precond, double tol, int maxit) {
  const int n = a.order();
  if (int(b.size()) != n || precond.order() != n)
    throw DimensionMismatch("pcg: dimension mismatch");
  SolveReport rep;
  rep.c.assign(n, 0.0);
  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n), p(n), q(n);
  precond.apply(r, z);
  double rho = dot(r, z);
  if (rho < 0.0) throw NumericalError("pcg: preconditioner is not positive");
  const double rho0 = rho;
  rep.residual_norms.push_back(std::sqrt(std::max(rho, 0.0)));
  if (rho0 == 0.0) {
    rep.converged = true;
    return rep;
  }
  p = z;
  for (int it = 1; it <= maxit; ++it) {
    a.matvec(p, q);
    const double pq = dot(p, q);
    if (pq <= 0.0) {
      // zero curvature direction: consistent systems never reach this with
      // a meaningful residual left
      if (std::sqrt(rho) > tol * std::sqrt(rho0))
        throw InconsistentRHS("pcg: zero curvature with residual above tolerance");
      rep.converged = true;
      return rep;
    }
    const double alpha = rho / pq;
    axpy(alpha, p, rep.c);
    axpy(-alpha, q, r);
    precond.apply(r, z);
    const double rho_next = dot(r, z);
    rep.iterations = it;
    rep.residual_norms.push_back(std::sqrt(std::max(rho_next, 0.0)));
    if (std::sqrt(std::max(rho_next, 0.0)) <= tol * std::sqrt(rho0)) {
      rep.converged = true;
      return rep;
    }
    const double beta = rho_next / rho;
    rho = rho_next;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw MaxIterations("pcg: no convergence within " + std::to_string(maxit) +
                      " iterations");
}

SpectralReport spectrum_of_preconditioned(const SymmetricMatrix& a,
                                          const Preconditioner& precond,
                                          const Tolerances& tol) {
  const int n = a.order();
  if (precond.order() != n)
    throw DimensionMismatch("spectrum_of_preconditioned: dimension mismatch");
  // densify B column by column
  SymmetricMatrix bmat(n);
  std::vector<double> e(n, 0.0), col(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    precond.apply(e, col);
    e[j] = 0.0;
    for (int i = j; i < n; ++i) bmat.at(i, j) = col[i];
  }
  CholeskyFactor l(bmat); // B = L L^T, SPD by construction
  // C = L^T A L is congruent to A and similar to B A
  std::vector<double> full = a.to_dense();
  // right-multiply by L: C1 = A L
  std::vector<double> c1(std::size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double aik = full[std::size_t(i) * n + k];
      if (aik == 0.0) continue;
      for (int j = 0; j <= k; ++j)
        c1[std::size_t(i) * n + j] += aik * l.entry(k, j);
    }
  // left-multiply by L^T
  SymmetricMatrix c(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int k = i; k < n; ++k) s += l.entry(k, i) * c1[std::size_t(k) * n + j];
      c.at(i, j) = s;
    }
  return sym_eigvals(c, tol);
}

} // namespace framefem
