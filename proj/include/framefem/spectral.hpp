#pragma once

#include <vector>

#include "framefem/linalg.hpp"

namespace framefem {

struct Tolerances {
  double eig_residual_tol = 1e-11; // relative backward-error bound
  double rank_tol = 1e-10;         // relative to lambda_max
};

/// Spectrum summary of a symmetric matrix.  lambda_min_pos is the smallest
/// eigenvalue above the rank threshold rank_tol * lambda_max; rank counts
/// the eigenvalues above it.  kappa uses lambda_min, kappa_pos uses
/// lambda_min_pos.
struct SpectralReport {
  std::vector<double> eigenvalues; // ascending
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double lambda_min_pos = 0.0;
  int rank = 0;
  double kappa = 0.0;
  double kappa_pos = 0.0;
  double rank_tol = 0.0;
};

/// Full symmetric eigensolve with residual verification: every pair (l, v)
/// satisfies |M v - l v| <= eig_residual_tol * |M|, otherwise NoConvergence.
SpectralReport sym_eigvals(const SymmetricMatrix& m, const Tolerances& tol = {});

SpectralReport report_from_eigenvalues(std::vector<double> values,
                                       double rank_tol);

/// Frame condition number K(Phi) = lambda_max / lambda_min_pos of the frame
/// Gram matrix.  Requires a clear spectral gap between the redundancy
/// nullspace and the positive spectrum: lambda_min_pos >= 10 * rank_tol *
/// lambda_max, else GapTooSmall.
double frame_condition(const SymmetricMatrix& gram, const Tolerances& tol = {});

/// Generalized spectrum of A v = theta M v through the Cholesky congruence
/// L^{-1} A L^{-T} with M = L L^T.  M must be positive definite.
SpectralReport generalized_eigvals(const SymmetricMatrix& a,
                                   const SymmetricMatrix& m,
                                   const Tolerances& tol = {});

/// kappa(M^{-1} A), the basis-independent condition number of the pencil.
double generalized_condition(const SymmetricMatrix& a, const SymmetricMatrix& m,
                             const Tolerances& tol = {});

/// Checks kappa(A) <= kappa(M^{-1}A) * kappa(M) together with the
/// eigenvalue-level bounds it follows from.
struct ProductBoundCheck {
  double lhs = 0.0;           // kappa(A)
  double rhs = 0.0;           // kappa(M^{-1}A) * kappa(M)
  bool holds = false;
  bool eig_level_holds = false;
  double lambda_max_A = 0.0, lambda_min_A = 0.0;
  double lambda_max_gen = 0.0, lambda_min_gen = 0.0;
  double lambda_max_M = 0.0, lambda_min_M = 0.0;
};

ProductBoundCheck verify_product_bound(const SymmetricMatrix& a,
                                       const SymmetricMatrix& m,
                                       const Tolerances& tol = {});

} // namespace framefem
