#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace framefem {

/// Dense symmetric matrix storing only the lower triangle, row-major:
/// entry (i,j) with j <= i lives at i*(i+1)/2 + j.  Symmetry is therefore
/// structural, not a runtime property to maintain.
class SymmetricMatrix {
public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(int n) : n_(n), a_(std::size_t(n) * (n + 1) / 2, 0.0) {}

  int order() const { return n_; }

  double operator()(int i, int j) const {
    return j <= i ? a_[idx(i, j)] : a_[idx(j, i)];
  }
  /// Mutable access; (i,j) and (j,i) are the same slot.
  double& at(int i, int j) { return j <= i ? a_[idx(i, j)] : a_[idx(j, i)]; }

  void add(int i, int j, double v) { at(i, j) += v; }

  /// y = A x
  void matvec(std::span<const double> x, std::span<double> y) const;
  /// x . (A x)
  double quadratic_form(std::span<const double> x) const;

  std::vector<double> to_dense() const; // row-major n*n

  /// Optional block structure: (offset, size) per group of indices.
  std::vector<std::pair<int, int>> blocks;

private:
  static std::size_t idx(int i, int j) { return std::size_t(i) * (i + 1) / 2 + j; }
  int n_ = 0;
  std::vector<double> a_;
};

/// Eigen decomposition of a symmetric matrix: values ascending, vectors as
/// columns of a row-major n*n array (vectors[i*n + k] = component i of the
/// k-th eigenvector).
struct EigenDecomposition {
  std::vector<double> values;
  std::vector<double> vectors;
  int n = 0;
  std::span<const double> vector(int k) const; // not contiguous; helper below
};

/// Householder tridiagonalization followed by implicit-shift QL.
/// Deterministic; throws NoConvergence if QL stalls.
EigenDecomposition sym_eig(const SymmetricMatrix& m);

/// Eigenvalues (and first-row eigenvector components in `first_row` if
/// non-null) of a symmetric tridiagonal matrix given by diagonal d and
/// subdiagonal e (e[0] unused).  Used for Golub-Welsch quadrature rules.
void tridiag_eig(std::vector<double>& d, std::vector<double>& e,
                 std::vector<double>* first_row);

/// Cholesky factor L (lower, same packed layout as SymmetricMatrix) with
/// A = L L^T.  Throws MNotDefinite on a non-positive pivot.
class CholeskyFactor {
public:
  explicit CholeskyFactor(const SymmetricMatrix& a);

  int order() const { return n_; }
  /// Solve A x = b in place.
  void solve(std::span<double> b) const;
  /// Solve L y = b in place (forward substitution).
  void solve_lower(std::span<double> b) const;
  /// Solve L^T x = y in place (backward substitution).
  void solve_lower_transpose(std::span<double> b) const;
  double entry(int i, int j) const { return j <= i ? l_[std::size_t(i) * (i + 1) / 2 + j] : 0.0; }

private:
  int n_ = 0;
  std::vector<double> l_;
};

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);

} // namespace framefem
