#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "framefem/linalg.hpp"
#include "framefem/mesh.hpp"
#include "framefem/quadrature.hpp"

namespace framefem {

/// Symmetric bilinear form on H^1: kind selects the integrand, the
/// coefficients scale the gradient and value terms.  Pure stiffness with
/// natural boundary conditions is only positive semidefinite (constants in
/// the kernel); stiffness_plus_mass and essential-BC stiffness are definite.
struct BilinearFormSpec {
  enum class Kind { mass, stiffness, stiffness_plus_mass };
  Kind kind = Kind::mass;
  double diffusion = 1.0;
  double reaction = 1.0;
};

/// Per-cell evaluation tables of a discrete basis or frame at the nodes of
/// a reference quadrature rule: the entire interface the assembler needs.
/// Built once per (basis, exactness) pair and shared read-only.
struct BasisTables {
  const SimplicialMesh* mesh = nullptr;
  int n = 0;       // number of global functions
  int degree = 0;  // polynomial degree (for quadrature checks)
  QuadratureRule rule;

  struct CellBlock {
    int cell = 0;
    double scale = 0.0;             // cell volume / reference volume
    std::vector<int> global;        // active function indices, K of them
    std::vector<double> values;     // [q*K + k]
    std::vector<double> grads;      // [(q*K + k)*d + i]
    std::vector<double> points;     // physical quad points, [q*d + i]
  };
  std::vector<CellBlock> cells;

  /// Block offsets per subsimplex when the basis is a frame; empty otherwise.
  std::vector<std::pair<int, int>> blocks;
};

struct LoadVector {
  std::vector<double> values;
  std::string provenance;
};

/// Quadrature-exact assembly of the matrix of the form over the tabulated
/// basis.  Entries couple only functions active on a common cell; everything
/// else stays exactly zero.  Deterministic: fixed cell loop order.
SymmetricMatrix assemble(const BasisTables& tables, const BilinearFormSpec& form);

LoadVector assemble_load(const BasisTables& tables,
                         const std::function<double(std::span<const double>)>& f);

/// Minimum quadrature exactness the form needs on degree-r functions.
int required_exactness(const BilinearFormSpec& form, int degree);

/// Plain-text dump: first line n, then the lower-triangle rows.
void write_matrix(const std::string& path, const SymmetricMatrix& m);
SymmetricMatrix read_matrix(const std::string& path);

} // namespace framefem
