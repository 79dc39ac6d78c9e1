#pragma once

#include <span>
#include <vector>

namespace framefem {

/// Multi-index s = (s_0, ..., s_k) of nonnegative integers.
using MultiIndex = std::vector<int>;

int multi_index_total(const MultiIndex& s);

/// All multi-indices in `nvars` variables with |s| <= max_total, in graded
/// lexicographic order (by |s|, then lexicographic).
std::vector<MultiIndex> multi_indices_up_to(int nvars, int max_total);

/// Orthonormal Jacobi polynomial J_s on the corner simplex
///   S_m^c = { lambda in R^{m+1} : lambda_j >= 0, sum lambda_j <= 1 }
/// for the weight w_m(lambda) = (prod_j lambda_j)^2 (1 - sum lambda_j)^{d-m-1}.
/// The family { J_s : |s| <= k } is orthonormal in the weighted L^2 inner
/// product on S_m^c.  Requires 0 <= m < d <= 3 and |s| <= kMaxTotalDegree.
double simplex_jacobi_eval(int d, int m, const MultiIndex& s,
                           std::span<const double> lambda);

/// Value together with the partial derivatives w.r.t. lambda_0..lambda_m.
void simplex_jacobi_eval_grad(int d, int m, const MultiIndex& s,
                              std::span<const double> lambda, double& value,
                              std::span<double> grad);

/// Orthonormal basis of P_k on the standard d-simplex
///   S_d = { lambda in R^{d+1} : lambda_j >= 0, sum lambda_j = 1 }
/// under the weight (prod_j lambda_j)^2, parametrized by the barycentric
/// coordinates (lambda_0, ..., lambda_d).  Realized through the corner
/// simplex construction with shifted weight parameters, so orthonormality
/// holds to machine precision at every supported degree.
class InteriorOrthobasis {
public:
  InteriorOrthobasis(int d, int k);

  int dimension() const { return int(indices_.size()); }
  int space_dim() const { return d_; }
  int degree() const { return k_; }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  /// bary has d+1 components summing to 1.
  double eval(int i, std::span<const double> bary) const;
  /// Partial derivatives w.r.t. the d+1 barycentric coordinates (the
  /// extension constant in lambda_d is used, so grad[d] = 0).
  void eval_grad(int i, std::span<const double> bary, double& value,
                 std::span<double> grad) const;

private:
  int d_ = 0, k_ = 0;
  std::vector<MultiIndex> indices_;
};

InteriorOrthobasis interior_orthobasis(int d, int k);

namespace detail {
/// Unvalidated evaluation core shared by the corner family, the interior
/// basis and the frame evaluators.  dparam sets the trailing weight
/// exponent: orthonormal under (prod lambda)^2 (1-sum lambda)^{dparam-m-1}.
void simplex_jacobi_core(int dparam, int m, const MultiIndex& s,
                         std::span<const double> lambda, bool want_grad,
                         double& value, std::span<double> grad);
} // namespace detail

} // namespace framefem
