#include "framefem/frame.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "framefem/errors.hpp"
#include "framefem/jacobi.hpp"
#include "framefem/quadrature.hpp"

namespace framefem {

int local_dim(int m, int d, int r) {
  if (r < 1) throw UsageError("local_dim: need r >= 1");
  if (m < d) return int(std::llround(binomial(r, m + 1)));
  return int(std::llround(binomial(r - 1, d)));
}

GlobalFrame::GlobalFrame(const SimplicialMesh& mesh, int r, BoundaryCondition bc)
    : mesh_(&mesh), r_(r), bc_(bc) {
  if (r < 1) throw UsageError("frame degree must be >= 1");
  const int d = mesh.dim();

  // retained subsimplices in (m, vertex tuple) order
  for (int m = 0; m <= d; ++m) {
    std::vector<int> order(mesh.delta(m).size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = int(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return mesh.delta(m)[a].verts < mesh.delta(m)[b].verts;
    });
    for (int idx : order) {
      const Subsimplex& s = mesh.delta(m)[idx];
      if (bc == BoundaryCondition::essential && s.on_boundary) continue;
      if (local_dim(m, d, r) == 0) continue;
      retained_.push_back(SubRef{m, idx});
    }
  }

  if (r >= d + 1) interior_.emplace(d, r - d - 1);

  // degree caps: univariate reference families run to kMaxDegree1D, the
  // genuinely multivariate ones to kMaxTotalDegree
  for (const SubRef& f : retained_) {
    const int nvars = f.m < d ? f.m + 1 : d;
    const int deg = f.m < d ? r - f.m - 1 : r - d - 1;
    const int cap = nvars == 1 ? kMaxDegree1D : kMaxTotalDegree;
    if (deg > cap)
      throw DegreeCapExceeded("frame degree r=" + std::to_string(r) +
                              " exceeds the reference family cap");
  }

  // multi-indices per block, graded lexicographic
  for (const SubRef& f : retained_) {
    const int offset = int(indices_.size());
    std::vector<MultiIndex> mis =
        f.m < d ? multi_indices_up_to(f.m + 1, r - f.m - 1)
                : interior_->indices();
    for (auto& s : mis)
      indices_.push_back(FrameIndex{f, std::move(s), int(indices_.size())});
    blocks_.emplace_back(offset, int(indices_.size()) - offset);
  }
  block_of_.resize(indices_.size());
  for (int b = 0; b < int(blocks_.size()); ++b)
    for (int k = 0; k < blocks_[b].second; ++k)
      block_of_[blocks_[b].first + k] = b;

  // incidences: supporting cells and vertex positions per block
  positions_.resize(retained_.size());
  block_cells_.resize(retained_.size());
  active_.assign(mesh.num_cells(), {});
  for (int b = 0; b < int(retained_.size()); ++b) {
    const SubRef f = retained_[b];
    for (int c : mesh.cells_of(f)) {
      block_cells_[b].push_back(c);
      positions_[b].push_back(mesh.local_positions(f, c));
      for (int k = 0; k < blocks_[b].second; ++k)
        active_[c].push_back(blocks_[b].first + k);
    }
  }
  for (auto& a : active_) std::sort(a.begin(), a.end());

  // unit L^2 normalization, computed per function by quadrature; within a
  // block all norms coincide (the pull-back identity), so this doubles as
  // a consistency check of the reference orthonormality
  normalization_.assign(indices_.size(), 1.0);
  const QuadratureRule rule = simplex_quadrature(d, default_exactness());
  std::vector<double> lambda(d + 1);
  std::vector<double> nrm2(indices_.size(), 0.0);
  const double dfact = [&] {
    double f = 1.0;
    for (int k = 2; k <= d; ++k) f *= k;
    return f;
  }();
  for (int b = 0; b < int(retained_.size()); ++b) {
    for (std::size_t ci = 0; ci < block_cells_[b].size(); ++ci) {
      const int c = block_cells_[b][ci];
      const double scale = mesh.cell_volume(c) * dfact;
      for (int q = 0; q < rule.size(); ++q) {
        auto bq = rule.bary(q);
        std::copy(bq.begin(), bq.end(), lambda.begin());
        for (int k = 0; k < blocks_[b].second; ++k) {
          const int idx = blocks_[b].first + k;
          const double v = eval_on_cell(idx, c, lambda);
          nrm2[idx] += scale * rule.weights[q] * v * v;
        }
      }
    }
  }
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (!(nrm2[i] > 0.0))
      throw NumericalError("frame function with vanishing norm");
    normalization_[i] = 1.0 / std::sqrt(nrm2[i]);
  }
}

namespace {
// value and per-mu partials of F(mu) = (prod_j mu_j) * p(mu)
void bubble_times(double p, std::span<const double> dp,
                  std::span<const double> mu, bool want_grad, double& value,
                  std::span<double> grad) {
  const int n = int(mu.size());
  double prod = 1.0;
  for (int j = 0; j < n; ++j) prod *= mu[j];
  value = prod * p;
  if (!want_grad) return;
  std::vector<double> pre(n + 1, 1.0), suf(n + 1, 1.0);
  for (int j = 0; j < n; ++j) pre[j + 1] = pre[j] * mu[j];
  for (int j = n - 1; j >= 0; --j) suf[j] = suf[j + 1] * mu[j];
  for (int j = 0; j < n; ++j)
    grad[j] = pre[j] * suf[j + 1] * p + prod * dp[j];
}
} // namespace

double GlobalFrame::eval_on_cell(int idx, int cell,
                                 std::span<const double> lambda) const {
  if (idx < 0 || idx >= size()) throw InvalidIndex("frame index out of range");
  const FrameIndex& fi = indices_[idx];
  const int b = block_of_[idx];
  auto it = std::find(block_cells_[b].begin(), block_cells_[b].end(), cell);
  if (it == block_cells_[b].end()) return 0.0;
  const auto& pos = positions_[b][it - block_cells_[b].begin()];
  const int d = mesh_->dim();

  if (fi.f.m < d) {
    const int nv = fi.f.m + 1;
    std::vector<double> mu(nv);
    for (int j = 0; j < nv; ++j) mu[j] = std::max(lambda[pos[j]], 0.0);
    double p;
    detail::simplex_jacobi_core(d, fi.f.m, fi.s, mu, false, p, {});
    double value;
    bubble_times(p, {}, mu, false, value, {});
    return normalization_[idx] * value;
  }
  double p = interior_->eval(interior_index(fi), lambda);
  double value;
  bubble_times(p, {}, lambda, false, value, {});
  return normalization_[idx] * value;
}

void GlobalFrame::eval_grad_on_cell(int idx, int cell,
                                    std::span<const double> lambda,
                                    double& value, std::span<double> grad) const {
  if (idx < 0 || idx >= size()) throw InvalidIndex("frame index out of range");
  const int d = mesh_->dim();
  for (int i = 0; i < d; ++i) grad[i] = 0.0;
  value = 0.0;
  const FrameIndex& fi = indices_[idx];
  const int b = block_of_[idx];
  auto it = std::find(block_cells_[b].begin(), block_cells_[b].end(), cell);
  if (it == block_cells_[b].end()) return;
  const auto& pos = positions_[b][it - block_cells_[b].begin()];

  const int nv = fi.f.m < d ? fi.f.m + 1 : d + 1;
  std::vector<double> mu(nv), dp(nv, 0.0), dF(nv);
  double p;
  if (fi.f.m < d) {
    for (int j = 0; j < nv; ++j) mu[j] = std::max(lambda[pos[j]], 0.0);
    detail::simplex_jacobi_core(d, fi.f.m, fi.s, mu, true, p, dp);
  } else {
    for (int j = 0; j < nv; ++j) mu[j] = std::max(lambda[j], 0.0);
    interior_->eval_grad(interior_index(fi), mu, p, dp);
  }
  double F;
  bubble_times(p, dp, mu, true, F, dF);
  value = normalization_[idx] * F;
  for (int j = 0; j < nv; ++j) {
    auto g = mesh_->bary_gradient(cell, fi.f.m < d ? pos[j] : j);
    for (int i = 0; i < d; ++i) grad[i] += dF[j] * g[i];
  }
  for (int i = 0; i < d; ++i) grad[i] *= normalization_[idx];
}

double GlobalFrame::eval(int idx, std::span<const double> x) const {
  const int c = mesh_->find_cell(x);
  std::vector<double> lambda(mesh_->dim() + 1);
  mesh_->bary_coords(c, x, lambda);
  return eval_on_cell(idx, c, lambda);
}

void GlobalFrame::grad(int idx, std::span<const double> x, int cell,
                       std::span<double> g) const {
  std::vector<double> lambda(mesh_->dim() + 1);
  mesh_->bary_coords(cell, x, lambda);
  for (double l : lambda)
    if (l < -1e-9)
      throw CellMismatch("frame gradient: point outside the given cell");
  double value;
  eval_grad_on_cell(idx, cell, lambda, value, g);
}

double GlobalFrame::combination(std::span<const double> c,
                                std::span<const double> x) const {
  if (int(c.size()) != size())
    throw DimensionMismatch("coefficient vector has wrong length");
  const int cell = mesh_->find_cell(x);
  std::vector<double> lambda(mesh_->dim() + 1);
  mesh_->bary_coords(cell, x, lambda);
  double v = 0.0;
  for (int idx : active_[cell])
    if (c[idx] != 0.0) v += c[idx] * eval_on_cell(idx, cell, lambda);
  return v;
}

std::shared_ptr<const BasisTables> GlobalFrame::tables(int quad_exactness) const {
  {
    std::lock_guard<std::mutex> lock(tables_mtx_);
    auto it = tables_.find(quad_exactness);
    if (it != tables_.end()) return it->second;
  }
  const int d = mesh_->dim();
  auto t = std::make_shared<BasisTables>();
  t->mesh = mesh_;
  t->n = size();
  t->degree = r_;
  t->rule = simplex_quadrature(d, quad_exactness);
  t->blocks = blocks_;
  double dfact = 1.0;
  for (int k = 2; k <= d; ++k) dfact *= k;
  const int nq = t->rule.size();
  std::vector<double> lambda(d + 1), g(d);
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    BasisTables::CellBlock cb;
    cb.cell = c;
    cb.scale = mesh_->cell_volume(c) * dfact;
    cb.global = active_[c];
    const int K = int(cb.global.size());
    cb.values.assign(std::size_t(nq) * K, 0.0);
    cb.grads.assign(std::size_t(nq) * K * d, 0.0);
    cb.points.assign(std::size_t(nq) * d, 0.0);
    auto verts = mesh_->cell_vertices(c);
    for (int q = 0; q < nq; ++q) {
      auto bq = t->rule.bary(q);
      std::copy(bq.begin(), bq.end(), lambda.begin());
      for (int i = 0; i < d; ++i) {
        double xi = 0.0;
        for (int k = 0; k <= d; ++k)
          xi += lambda[k] * mesh_->vertex(verts[k])[i];
        cb.points[std::size_t(q) * d + i] = xi;
      }
      for (int k = 0; k < K; ++k) {
        double v;
        eval_grad_on_cell(cb.global[k], c, lambda, v, g);
        cb.values[std::size_t(q) * K + k] = v;
        for (int i = 0; i < d; ++i)
          cb.grads[(std::size_t(q) * K + k) * d + i] = g[i];
      }
    }
    t->cells.push_back(std::move(cb));
  }
  std::lock_guard<std::mutex> lock(tables_mtx_);
  auto [it, inserted] = tables_.emplace(quad_exactness, std::move(t));
  return it->second;
}

double pullback_scaling(const SimplicialMesh& mesh, SubRef f,
                        const std::function<double(std::span<const double>)>& probe,
                        int probe_degree) {
  const int d = mesh.dim();
  if (!f.valid() || f.m >= d)
    throw UnknownSubsimplex("pullback_scaling needs a subsimplex with m < d");
  const int m = f.m;
  // numerator: integral of the pulled-back probe over the macroelement
  double numer = 0.0;
  const QuadratureRule cell_rule = simplex_quadrature(d, probe_degree + d + 2);
  double dfact = 1.0;
  for (int k = 2; k <= d; ++k) dfact *= k;
  std::vector<double> mu(m + 1);
  for (int c : mesh.cells_of(f)) {
    auto pos = mesh.local_positions(f, c);
    const double scale = mesh.cell_volume(c) * dfact;
    for (int q = 0; q < cell_rule.size(); ++q) {
      auto bq = cell_rule.bary(q);
      for (int j = 0; j <= m; ++j) mu[j] = bq[pos[j]];
      numer += scale * cell_rule.weights[q] * probe(mu);
    }
  }
  // denominator: weighted integral over the corner simplex S_m^c, realized
  // as the reference (m+1)-simplex whose zeroth barycentric coordinate is
  // b(lambda)
  const QuadratureRule ref_rule =
      simplex_quadrature(m + 1, probe_degree + std::max(0, d - m - 1) + 2);
  double denom = 0.0, denom_abs = 0.0;
  std::vector<double> lam(m + 1);
  for (int q = 0; q < ref_rule.size(); ++q) {
    auto bq = ref_rule.bary(q);
    for (int j = 0; j <= m; ++j) lam[j] = bq[j + 1];
    const double w = ref_rule.weights[q] * std::pow(bq[0], d - m - 1);
    const double pv = probe(lam);
    denom += w * pv;
    denom_abs += std::abs(w * pv);
  }
  if (std::abs(denom) <= 1e-10 * std::max(denom_abs, 1e-300))
    throw DegenerateProbe("pullback_scaling: probe integral vanishes");
  return numer / denom;
}

Comparison1DBasis::Comparison1DBasis(BasisKind1D kind, int r,
                                     bool include_boundary)
    : kind_(kind), r_(r), include_boundary_(include_boundary) {
  if (r < 2) throw UsageError("comparison basis needs r >= 2");
  if (r > kMaxDegree1D) throw DegreeCapExceeded("comparison basis degree cap");
  if (include_boundary && kind != BasisKind1D::bernstein_interior)
    throw UsageError("boundary members exist only for the Bernstein family");
  mesh_ = std::make_shared<SimplicialMesh>(
      generate_mesh(MeshKind::interval, 1, -1.0, 1.0));
  size_ = include_boundary ? r + 1 : r - 1;
  if (kind == BasisKind1D::jacobi_bubble) (void)jacobi_family(2.0, 2.0);
}

double Comparison1DBasis::eval(int k, double x) const {
  if (k < 0 || k >= size_) throw IndexOutOfRange("comparison basis index");
  switch (kind_) {
    case BasisKind1D::jacobi_bubble:
      return (1.0 - x) * (1.0 + x) * jacobi_family(2.0, 2.0).value(k, x);
    case BasisKind1D::bernstein_interior: {
      const int s = include_boundary_ ? k : k + 1;
      return bernstein_eval(r_, s, 0.5 * (x + 1.0));
    }
    case BasisKind1D::power_interior:
      return power_basis_eval(k + 2, x);
  }
  return 0.0;
}

double Comparison1DBasis::deriv(int k, double x) const {
  if (k < 0 || k >= size_) throw IndexOutOfRange("comparison basis index");
  switch (kind_) {
    case BasisKind1D::jacobi_bubble: {
      double v, dv;
      jacobi_family(2.0, 2.0).value_and_derivative(k, x, v, dv);
      return -2.0 * x * v + (1.0 - x * x) * dv;
    }
    case BasisKind1D::bernstein_interior: {
      const int s = include_boundary_ ? k : k + 1;
      return 0.5 * bernstein_derivative(r_, s, 0.5 * (x + 1.0));
    }
    case BasisKind1D::power_interior:
      return power_basis_derivative(k + 2, x);
  }
  return 0.0;
}

std::shared_ptr<const BasisTables> Comparison1DBasis::tables(
    int quad_exactness) const {
  {
    std::lock_guard<std::mutex> lock(tables_mtx_);
    auto it = tables_.find(quad_exactness);
    if (it != tables_.end()) return it->second;
  }
  auto t = std::make_shared<BasisTables>();
  t->mesh = mesh_.get();
  t->n = size_;
  t->degree = r_;
  t->rule = simplex_quadrature(1, quad_exactness);
  BasisTables::CellBlock cb;
  cb.cell = 0;
  cb.scale = mesh_->cell_volume(0); // d! = 1
  cb.global.resize(size_);
  for (int k = 0; k < size_; ++k) cb.global[k] = k;
  const int nq = t->rule.size();
  cb.values.assign(std::size_t(nq) * size_, 0.0);
  cb.grads.assign(std::size_t(nq) * size_, 0.0);
  cb.points.assign(nq, 0.0);
  for (int q = 0; q < nq; ++q) {
    auto bq = t->rule.bary(q);
    const double x = -1.0 * bq[0] + 1.0 * bq[1];
    cb.points[q] = x;
    for (int k = 0; k < size_; ++k) {
      cb.values[std::size_t(q) * size_ + k] = eval(k, x);
      cb.grads[std::size_t(q) * size_ + k] = deriv(k, x);
    }
  }
  t->cells.push_back(std::move(cb));
  std::lock_guard<std::mutex> lock(tables_mtx_);
  auto [it, inserted] = tables_.emplace(quad_exactness, std::move(t));
  return it->second;
}

Comparison1DBasis build_1d_comparison_basis(BasisKind1D kind, int r) {
  return Comparison1DBasis(kind, r);
}

} // namespace framefem
