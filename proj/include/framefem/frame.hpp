#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "framefem/assembly.hpp"
#include "framefem/mesh.hpp"
#include "framefem/simplex_poly.hpp"

namespace framefem {

enum class BoundaryCondition { natural, essential };

/// Index of one frame function: the subsimplex f it lives on and the
/// multi-index s of the reference polynomial.
struct FrameIndex {
  SubRef f;
  MultiIndex s;
  int position = 0;
};

/// Dimension of the local space Q*_{f,r}: C(r, m+1) for a subsimplex of
/// dimension m < d, C(r-1, d) for a cell, 0 when vacuous.
int local_dim(int m, int d, int r);

/// The global frame Phi = {Phi_f} of P_r(T_h): for every retained
/// subsimplex f of dimension m < d the pulled-back functions
///   lambda_f^* [ (prod lambda)_m p_s ],  |s| <= r-m-1,
/// and for every cell the interior bubbles (prod lambda)_d q_s.  Every
/// function is normalized to unit L^2(Omega) norm, which makes each local
/// block exactly orthonormal.  With essential boundary conditions all
/// subsimplices contained in the domain boundary are dropped; the remaining
/// functions vanish on the boundary by local support.
///
/// Immutable after construction; evaluation tables are built once per
/// quadrature exactness behind a lock and shared read-only.
class GlobalFrame {
public:
  GlobalFrame(const SimplicialMesh& mesh, int r, BoundaryCondition bc);

  const SimplicialMesh& mesh() const { return *mesh_; }
  int degree() const { return r_; }
  BoundaryCondition bc() const { return bc_; }
  int size() const { return int(indices_.size()); }
  const std::vector<FrameIndex>& indices() const { return indices_; }
  double normalization(int idx) const { return normalization_[idx]; }

  /// Contiguous (offset, size) ranges, one per retained subsimplex, in
  /// (m, vertex tuple) order; alignment with retained().
  const std::vector<std::pair<int, int>>& blocks() const { return blocks_; }
  const std::vector<SubRef>& retained() const { return retained_; }
  int block_of(int idx) const { return block_of_[idx]; }

  double eval(int idx, std::span<const double> x) const;
  /// Gradient of the restriction to `cell`; zero vector when the cell is
  /// outside the support.  Throws CellMismatch when x is not in the cell.
  void grad(int idx, std::span<const double> x, int cell,
            std::span<double> g) const;

  double eval_on_cell(int idx, int cell, std::span<const double> lambda) const;
  void eval_grad_on_cell(int idx, int cell, std::span<const double> lambda,
                         double& value, std::span<double> grad) const;

  /// tau_h(c)(x) = sum c_j phi_j(x).
  double combination(std::span<const double> c, std::span<const double> x) const;

  const std::vector<int>& active_on_cell(int cell) const { return active_[cell]; }
  std::shared_ptr<const BasisTables> tables(int quad_exactness) const;
  int default_exactness() const { return 2 * r_ + 2 * (mesh_->dim() + 1); }

private:
  int interior_index(const FrameIndex& fi) const {
    return fi.position - blocks_[block_of_[fi.position]].first;
  }

  const SimplicialMesh* mesh_;
  int r_;
  BoundaryCondition bc_;
  std::vector<FrameIndex> indices_;
  std::vector<double> normalization_;
  std::vector<SubRef> retained_;
  std::vector<std::pair<int, int>> blocks_;
  std::vector<int> block_of_;
  std::vector<std::vector<int>> active_;                // per cell
  std::vector<std::vector<std::vector<int>>> positions_; // per block, per incident cell
  std::vector<std::vector<int>> block_cells_;            // per block
  std::optional<InteriorOrthobasis> interior_;
  mutable std::mutex tables_mtx_;
  mutable std::map<int, std::shared_ptr<const BasisTables>> tables_;
};

/// Shorthand matching the enumeration operation.
inline GlobalFrame enumerate_frame(const SimplicialMesh& mesh, int r,
                                   BoundaryCondition bc) {
  return GlobalFrame(mesh, r, bc);
}

/// Scaling factor c_f of the change of variables
///   int_{Omega_f} lambda_f^* phi dx = c_f int_{S_m^c} phi(lambda)
///       (1 - sum lambda)^{d-m-1} dlambda,
/// measured as the ratio of the two integrals for the given probe.  The
/// result is independent of the probe; a probe with vanishing weighted
/// integral raises DegenerateProbe.
double pullback_scaling(const SimplicialMesh& mesh, SubRef f,
                        const std::function<double(std::span<const double>)>& probe,
                        int probe_degree = 12);

/// The three single-interval bases of the 1D conditioning study on (-1,1)
/// with homogeneous Dirichlet conditions: L^2-orthonormal Jacobi bubbles
/// (1-x)(1+x) J_s^{2,2}(x), interior Bernstein polynomials, and the power
/// bubbles (1+x)(1-x)x^k.  All span the same space.  The Bernstein family
/// optionally keeps its boundary members (the no-boundary-condition variant
/// of the mass formula study).
enum class BasisKind1D { jacobi_bubble, bernstein_interior, power_interior };

class Comparison1DBasis {
public:
  Comparison1DBasis(BasisKind1D kind, int r, bool include_boundary = false);

  BasisKind1D kind() const { return kind_; }
  int degree() const { return r_; }
  int size() const { return size_; }
  const SimplicialMesh& mesh() const { return *mesh_; }

  double eval(int k, double x) const;
  double deriv(int k, double x) const;

  std::shared_ptr<const BasisTables> tables(int quad_exactness) const;

private:
  BasisKind1D kind_;
  int r_;
  bool include_boundary_;
  int size_;
  std::shared_ptr<SimplicialMesh> mesh_;
  mutable std::mutex tables_mtx_;
  mutable std::map<int, std::shared_ptr<const BasisTables>> tables_;
};

Comparison1DBasis build_1d_comparison_basis(BasisKind1D kind, int r);

} // namespace framefem
