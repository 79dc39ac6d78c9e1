#pragma once

#include <span>
#include <vector>

namespace framefem {

/// Quadrature rule on the reference m-simplex
///   T_m = { xi in R^m : xi_i >= 0, sum xi <= 1 },
/// with points stored as barycentric tuples (m+1 components per point,
/// summing to 1) and weights summing to vol(T_m) = 1/m!.
struct QuadratureRule {
  int dim = 0;
  int exactness = 0;
  std::vector<double> points;  // size() * (dim+1), barycentric
  std::vector<double> weights;

  int size() const { return int(weights.size()); }
  std::span<const double> bary(int q) const {
    return {points.data() + std::size_t(q) * (dim + 1), std::size_t(dim + 1)};
  }
};

/// Rule integrating all polynomials of total degree <= exactness on T_m.
/// 1D rules are Gauss-Legendre; 2D/3D rules are collapsed tensor products
/// of Gauss-Jacobi rules, so weights are positive at any order.
/// Throws UnsupportedDegree above the implementation cap (600 in 1D,
/// 60 in 2D/3D).
QuadratureRule simplex_quadrature(int m, int exactness);

/// n-point Gauss-Jacobi rule on [0,1] for the weight (1-t)^alpha, computed
/// by Golub-Welsch from the recurrence coefficients.
void gauss_jacobi_01(int n, double alpha, std::vector<double>& nodes,
                     std::vector<double>& weights);

} // namespace framefem
