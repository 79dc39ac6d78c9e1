#include "framefem/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "framefem/errors.hpp"

namespace framefem {

SpectralReport report_from_eigenvalues(std::vector<double> values,
                                       double rank_tol) {
  SpectralReport rep;
  rep.eigenvalues = std::move(values);
  rep.rank_tol = rank_tol;
  if (rep.eigenvalues.empty()) return rep;
  rep.lambda_min = rep.eigenvalues.front();
  rep.lambda_max = rep.eigenvalues.back();
  const double thr = rank_tol * rep.lambda_max;
  rep.lambda_min_pos = std::numeric_limits<double>::quiet_NaN();
  for (double l : rep.eigenvalues)
    if (l > thr) {
      rep.lambda_min_pos = l;
      break;
    }
  for (double l : rep.eigenvalues) rep.rank += l > thr ? 1 : 0;
  rep.kappa = rep.lambda_max / rep.lambda_min;
  rep.kappa_pos = rep.lambda_max / rep.lambda_min_pos;
  return rep;
}

SpectralReport sym_eigvals(const SymmetricMatrix& m, const Tolerances& tol) {
  EigenDecomposition eig = sym_eig(m);
  const int n = eig.n;
  // backward-error verification against the input matrix
  double norm = 0.0;
  for (double l : eig.values) norm = std::max(norm, std::abs(l));
  if (n > 0 && norm > 0.0) {
    std::vector<double> v(n), mv(n);
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) v[i] = eig.vectors[std::size_t(i) * n + k];
      m.matvec(v, mv);
      double res = 0.0;
      for (int i = 0; i < n; ++i) {
        const double r = mv[i] - eig.values[k] * v[i];
        res += r * r;
      }
      if (std::sqrt(res) > tol.eig_residual_tol * norm * std::sqrt(double(n)))
        throw NoConvergence("eigensolver residual check failed at index " +
                            std::to_string(k));
    }
  }
  return report_from_eigenvalues(std::move(eig.values), tol.rank_tol);
}

double frame_condition(const SymmetricMatrix& gram, const Tolerances& tol) {
  SpectralReport rep = sym_eigvals(gram, tol);
  if (!(rep.lambda_min_pos >= 10.0 * tol.rank_tol * rep.lambda_max))
    throw GapTooSmall("frame Gram spectrum has no clear positive gap");
  return rep.kappa_pos;
}

namespace {
SymmetricMatrix congruence_by_cholesky(const SymmetricMatrix& a,
                                       const CholeskyFactor& l) {
  // C = L^{-1} A L^{-T}
  const int n = a.order();
  std::vector<double> full = a.to_dense();
  std::vector<double> col(n);
  // rows: solve L Y = A  (column by column of A)
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) col[i] = full[std::size_t(i) * n + j];
    l.solve_lower(col);
    for (int i = 0; i < n; ++i) full[std::size_t(i) * n + j] = col[i];
  }
  // columns: C = Y L^{-T}, i.e. solve L C^T = Y^T row by row
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) col[j] = full[std::size_t(i) * n + j];
    l.solve_lower(col);
    for (int j = 0; j < n; ++j) full[std::size_t(i) * n + j] = col[j];
  }
  SymmetricMatrix c(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      c.at(i, j) = 0.5 * (full[std::size_t(i) * n + j] + full[std::size_t(j) * n + i]);
  return c;
}
} // namespace

SpectralReport generalized_eigvals(const SymmetricMatrix& a,
                                   const SymmetricMatrix& m,
                                   const Tolerances& tol) {
  if (a.order() != m.order())
    throw DimensionMismatch("generalized_eigvals: order mismatch");
  CholeskyFactor l(m); // throws MNotDefinite when M is not SPD
  SymmetricMatrix c = congruence_by_cholesky(a, l);
  return sym_eigvals(c, tol);
}

double generalized_condition(const SymmetricMatrix& a, const SymmetricMatrix& m,
                             const Tolerances& tol) {
  SpectralReport rep = generalized_eigvals(a, m, tol);
  return rep.kappa;
}

ProductBoundCheck verify_product_bound(const SymmetricMatrix& a,
                                       const SymmetricMatrix& m,
                                       const Tolerances& tol) {
  ProductBoundCheck out;
  SpectralReport ra = sym_eigvals(a, tol);
  SpectralReport rm = sym_eigvals(m, tol);
  SpectralReport rg = generalized_eigvals(a, m, tol);
  out.lambda_max_A = ra.lambda_max;
  out.lambda_min_A = ra.lambda_min;
  out.lambda_max_M = rm.lambda_max;
  out.lambda_min_M = rm.lambda_min;
  out.lambda_max_gen = rg.lambda_max;
  out.lambda_min_gen = rg.lambda_min;
  out.lhs = ra.kappa;
  out.rhs = rg.kappa * rm.kappa;
  const double slack = 1e-10;
  out.eig_level_holds =
      ra.lambda_max <= rg.lambda_max * rm.lambda_max * (1.0 + slack) &&
      ra.lambda_min >= rg.lambda_min * rm.lambda_min * (1.0 - slack);
  out.holds = out.lhs <= out.rhs * (1.0 + slack) && out.eig_level_holds;
  return out;
}

} // namespace framefem
