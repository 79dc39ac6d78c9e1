#include "framefem/nodal.hpp"

#include <algorithm>
#include <cmath>

#include "framefem/errors.hpp"
#include "framefem/quadrature.hpp"
#include "framefem/simplex_poly.hpp"

namespace framefem {

NodalBasis::NodalBasis(const SimplicialMesh& mesh, int r, bool essential_bc)
    : mesh_(&mesh), r_(r), essential_(essential_bc) {
  if (r < 1) throw UsageError("nodal basis needs r >= 1");
  const int d = mesh.dim();

  // lattice multi-indices |i| = r in d+1 components
  std::vector<std::vector<int>> lattice;
  for (const auto& s : multi_indices_up_to(d + 1, r))
    if (multi_index_total(s) == r) lattice.push_back(s);

  std::map<std::vector<std::pair<int, int>>, int> node_of_key;
  cell_nodes_.resize(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto verts = mesh.cell_vertices(c);
    auto& cn = cell_nodes_[c];
    cn.lattice = lattice;
    for (const auto& li : lattice) {
      // key: the (vertex, weight) pairs with positive weight; vertex ids
      // ascend inside the sorted cell tuple, so the key is canonical
      std::vector<std::pair<int, int>> key;
      std::vector<int> support;
      for (int k = 0; k <= d; ++k)
        if (li[k] > 0) {
          key.emplace_back(verts[k], li[k]);
          support.push_back(verts[k]);
        }
      auto it = node_of_key.find(key);
      int id;
      if (it == node_of_key.end()) {
        id = int(node_coords_.size()) / d;
        node_of_key.emplace(key, id);
        for (int i = 0; i < d; ++i) {
          double xi = 0.0;
          for (int k = 0; k <= d; ++k)
            xi += double(li[k]) / r * mesh.vertex(verts[k])[i];
          node_coords_.push_back(xi);
        }
        SubRef sup = mesh.find_subsimplex(int(support.size()) - 1, support);
        node_boundary_.push_back(mesh.sub(sup).on_boundary);
      } else {
        id = it->second;
      }
      cn.node.push_back(id);
    }
  }

  node_active_.assign(total_nodes(), -1);
  for (int v = 0; v < total_nodes(); ++v)
    if (!essential_ || !node_boundary_[v]) node_active_[v] = n_active_++;
}

double NodalBasis::shape(const std::vector<int>& li,
                         std::span<const double> lambda) const {
  double p = 1.0;
  for (std::size_t j = 0; j < li.size(); ++j)
    for (int q = 0; q < li[j]; ++q)
      p *= (r_ * lambda[j] - q) / double(li[j] - q);
  return p;
}

void NodalBasis::shape_grad(const std::vector<int>& li,
                            std::span<const double> lambda, double& v,
                            std::span<double> dlam) const {
  const int nv = int(li.size());
  std::vector<double> fac(nv), dfac(nv);
  for (int j = 0; j < nv; ++j) {
    double p = 1.0;
    for (int q = 0; q < li[j]; ++q) p *= (r_ * lambda[j] - q) / double(li[j] - q);
    fac[j] = p;
    double dp = 0.0;
    for (int qd = 0; qd < li[j]; ++qd) {
      double term = r_ / double(li[j] - qd);
      for (int q = 0; q < li[j]; ++q)
        if (q != qd) term *= (r_ * lambda[j] - q) / double(li[j] - q);
      dp += term;
    }
    dfac[j] = dp;
  }
  std::vector<double> pre(nv + 1, 1.0), suf(nv + 1, 1.0);
  for (int j = 0; j < nv; ++j) pre[j + 1] = pre[j] * fac[j];
  for (int j = nv - 1; j >= 0; --j) suf[j] = suf[j + 1] * fac[j];
  v = pre[nv];
  for (int j = 0; j < nv; ++j) dlam[j] = pre[j] * suf[j + 1] * dfac[j];
}

std::vector<double> NodalBasis::interpolate(
    const std::function<double(std::span<const double>)>& f) const {
  std::vector<double> c(n_active_, 0.0);
  for (int v = 0; v < total_nodes(); ++v)
    if (node_active_[v] >= 0) c[node_active_[v]] = f(node_coord(v));
  return c;
}

double NodalBasis::eval_combination(std::span<const double> coeffs,
                                    std::span<const double> x) const {
  const int d = mesh_->dim();
  const int c = mesh_->find_cell(x);
  std::vector<double> lambda(d + 1);
  mesh_->bary_coords(c, x, lambda);
  const auto& cn = cell_nodes_[c];
  double val = 0.0;
  for (std::size_t k = 0; k < cn.node.size(); ++k) {
    const int act = node_active_[cn.node[k]];
    if (act >= 0 && coeffs[act] != 0.0)
      val += coeffs[act] * shape(cn.lattice[k], lambda);
  }
  return val;
}

std::shared_ptr<const BasisTables> NodalBasis::tables(int quad_exactness) const {
  {
    std::lock_guard<std::mutex> lock(tables_mtx_);
    auto it = tables_.find(quad_exactness);
    if (it != tables_.end()) return it->second;
  }
  const int d = mesh_->dim();
  auto t = std::make_shared<BasisTables>();
  t->mesh = mesh_;
  t->n = n_active_;
  t->degree = r_;
  t->rule = simplex_quadrature(d, quad_exactness);
  double dfact = 1.0;
  for (int k = 2; k <= d; ++k) dfact *= k;
  const int nq = t->rule.size();
  std::vector<double> lambda(d + 1), dlam(d + 1);
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const auto& cn = cell_nodes_[c];
    BasisTables::CellBlock cb;
    cb.cell = c;
    cb.scale = mesh_->cell_volume(c) * dfact;
    std::vector<int> local; // local lattice indices that are active
    for (std::size_t k = 0; k < cn.node.size(); ++k)
      if (node_active_[cn.node[k]] >= 0) {
        local.push_back(int(k));
        cb.global.push_back(node_active_[cn.node[k]]);
      }
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
        shape_grad(cn.lattice[local[k]], lambda, v, dlam);
        cb.values[std::size_t(q) * K + k] = v;
        for (int i = 0; i < d; ++i) {
          double gi = 0.0;
          for (int j = 0; j <= d; ++j)
            gi += dlam[j] * mesh_->bary_gradient(c, j)[i];
          cb.grads[(std::size_t(q) * K + k) * d + i] = gi;
        }
      }
    }
    t->cells.push_back(std::move(cb));
  }
  std::lock_guard<std::mutex> lock(tables_mtx_);
  auto [it, inserted] = tables_.emplace(quad_exactness, std::move(t));
  return it->second;
}

} // namespace framefem
