#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace framefem {

/// A subsimplex of the mesh, identified by its sorted vertex tuple.
struct Subsimplex {
  int m = 0;                  // dimension
  std::vector<int> verts;     // sorted ascending, length m+1
  bool on_boundary = false;
};

/// Reference to a subsimplex: dimension m and index into the Delta_m table.
struct SubRef {
  int m = -1;
  int index = -1;
  bool valid() const { return m >= 0 && index >= 0; }
  friend bool operator==(const SubRef& a, const SubRef& b) {
    return a.m == b.m && a.index == b.index;
  }
  friend bool operator<(const SubRef& a, const SubRef& b) {
    return a.m != b.m ? a.m < b.m : a.index < b.index;
  }
};

/// Macroelement of a subsimplex f: the cells containing f, the extended
/// patch (union of the vertex patches of f's vertices), and the local mesh
/// size h_f.  The pull-back scaling c_f is filled in lazily by the frame
/// machinery.
struct Macroelement {
  SubRef f;
  std::vector<int> cells_omega;      // cells with f among their subsimplices
  std::vector<int> cells_omega_ext;  // extended macroelement
  double h_f = 0.0;
  std::optional<double> c_f;
};

enum class MeshKind { interval, unit_square, unit_cube, single_simplex };

/// Conforming simplicial mesh in dimension 1, 2 or 3.  Immutable after
/// construction; all subsimplex tables, incidences, boundary flags and cell
/// geometry are computed eagerly, so concurrent read access is safe.
class SimplicialMesh {
public:
  static SimplicialMesh build(int dim,
                              const std::vector<std::vector<double>>& vertices,
                              const std::vector<std::vector<int>>& cells);
  static SimplicialMesh load_json(const std::string& path);

  int dim() const { return dim_; }
  int num_vertices() const { return int(coords_.size()) / dim_; }
  int num_cells() const { return int(cells_.size()) / (dim_ + 1); }

  std::span<const double> vertex(int v) const {
    return {coords_.data() + std::size_t(v) * dim_, std::size_t(dim_)};
  }
  std::span<const int> cell_vertices(int c) const {
    return {cells_.data() + std::size_t(c) * (dim_ + 1), std::size_t(dim_ + 1)};
  }

  const std::vector<Subsimplex>& delta(int m) const;
  const Subsimplex& sub(SubRef f) const { return delta(f.m)[f.index]; }
  /// Index lookup by sorted vertex tuple; invalid SubRef when absent.
  SubRef find_subsimplex(int m, std::span<const int> verts) const;
  /// Cells incident to a subsimplex.
  const std::vector<int>& cells_of(SubRef f) const;

  Macroelement macroelement(SubRef f) const;

  double cell_volume(int c) const { return volume_[c]; }
  double cell_diameter(int c) const { return diameter_[c]; }
  /// Gradient of the k-th barycentric coordinate of cell c (constant).
  std::span<const double> bary_gradient(int c, int k) const {
    return {grads_.data() + (std::size_t(c) * (dim_ + 1) + k) * dim_,
            std::size_t(dim_)};
  }
  /// All d+1 barycentric coordinates of x with respect to cell c.
  void bary_coords(int c, std::span<const double> x,
                   std::span<double> lambda) const;
  /// First cell whose closure contains x (barycentric tolerance -1e-12);
  /// throws PointOutsideMesh.  Any containing cell gives identical values
  /// for the piecewise linear quantities below, by continuity.
  int find_cell(std::span<const double> x) const;

  /// Extended barycentric coordinate (hat function) of a vertex at x.
  double hat_eval(int vertex, std::span<const double> x) const;
  /// lambda_f(x): the hats of f's vertices, a point of S_m^c.  Needs m < dim.
  void barycentric_map(SubRef f, std::span<const double> x,
                       std::span<double> out) const;

  double domain_volume() const;
  /// Positions of f's vertices inside cell c's sorted tuple, or empty if
  /// f is not a subsimplex of c.
  std::vector<int> local_positions(SubRef f, int c) const;

private:
  SimplicialMesh() = default;
  void build_tables();
  void check_conformity() const;
  void compute_geometry();

  int dim_ = 0;
  std::vector<double> coords_;  // num_vertices * dim
  std::vector<int> cells_;      // num_cells * (dim+1), tuples sorted
  std::array<std::vector<Subsimplex>, 4> delta_;
  std::array<std::map<std::vector<int>, int>, 4> lookup_;
  std::array<std::vector<std::vector<int>>, 4> incident_;
  std::vector<double> volume_, diameter_;
  std::vector<double> grads_;  // num_cells * (dim+1) * dim
};

/// Structured mesh generators.  interval uses [a,b] with n cells; the other
/// kinds use n subdivisions per axis of the unit domain (single_simplex
/// takes the spatial dimension in n).
SimplicialMesh generate_mesh(MeshKind kind, int n, double a = 0.0,
                             double b = 1.0);

} // namespace framefem
