#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "framefem/assembly.hpp"
#include "framefem/mesh.hpp"

namespace framefem {

enum class BoundaryCondition;

/// Continuous Lagrange basis of degree r on the equispaced simplex lattice.
/// Nodes are glued across cells through their supporting subsimplex, shape
/// functions use the classical product formula for equispaced lattices.
/// With essential boundary conditions the boundary nodes are dropped.
class NodalBasis {
public:
  NodalBasis(const SimplicialMesh& mesh, int r, bool essential_bc);

  const SimplicialMesh& mesh() const { return *mesh_; }
  int degree() const { return r_; }
  int size() const { return n_active_; }      // active (kept) nodes
  int total_nodes() const { return int(node_coords_.size()) / mesh_->dim(); }

  std::span<const double> node_coord(int node) const {
    return {node_coords_.data() + std::size_t(node) * mesh_->dim(),
            std::size_t(mesh_->dim())};
  }
  bool node_on_boundary(int node) const { return node_boundary_[node]; }
  /// Active index of a node, or -1 if dropped.
  int active_index(int node) const { return node_active_[node]; }

  /// Coefficients of the nodal interpolant are point values; this samples
  /// a function at all active nodes.
  std::vector<double> interpolate(
      const std::function<double(std::span<const double>)>& f) const;

  double eval_combination(std::span<const double> coeffs,
                          std::span<const double> x) const;

  std::shared_ptr<const BasisTables> tables(int quad_exactness) const;

private:
  struct CellNodes {
    std::vector<std::vector<int>> lattice; // multi-index per local node
    std::vector<int> node;                 // global node id per local node
  };
  double shape(const std::vector<int>& lattice,
               std::span<const double> lambda) const;
  void shape_grad(const std::vector<int>& lattice,
                  std::span<const double> lambda, double& v,
                  std::span<double> dlam) const;

  const SimplicialMesh* mesh_;
  int r_;
  bool essential_;
  int n_active_ = 0;
  std::vector<double> node_coords_;
  std::vector<bool> node_boundary_;
  std::vector<int> node_active_;
  std::vector<CellNodes> cell_nodes_;
  mutable std::mutex tables_mtx_;
  mutable std::map<int, std::shared_ptr<const BasisTables>> tables_;
};

} // namespace framefem
