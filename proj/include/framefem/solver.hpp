#pragma once

#include <memory>
#include <span>
#include <vector>

#include "framefem/assembly.hpp"
#include "framefem/frame.hpp"
#include "framefem/linalg.hpp"
#include "framefem/spectral.hpp"

namespace framefem {

/// Symmetric positive definite preconditioner interface on R^N.
class Preconditioner {
public:
  virtual ~Preconditioner() = default;
  virtual int order() const = 0;
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
};

class IdentityPreconditioner final : public Preconditioner {
public:
  explicit IdentityPreconditioner(int n) : n_(n) {}
  int order() const override { return n_; }
  void apply(std::span<const double> x, std::span<double> y) const override {
    std::copy(x.begin(), x.end(), y.begin());
  }

private:
  int n_;
};

/// Additive Schwarz preconditioner for frame systems: an exact coarse solve
/// on P_1 (hat functions are the first members of the vertex blocks, up to
/// scale) plus exact inverses of the per-subsimplex diagonal blocks of A.
class SchwarzPreconditioner final : public Preconditioner {
public:
  int order() const override { return n_; }
  void apply(std::span<const double> x, std::span<double> y) const override;

private:
  friend std::unique_ptr<SchwarzPreconditioner> build_schwarz(
      const GlobalFrame& frame, const SymmetricMatrix& a,
      const BilinearFormSpec& form);
  int n_ = 0;
  struct Block {
    int offset = 0;
    int size = 0;
    std::unique_ptr<CholeskyFactor> inv;
  };
  std::vector<Block> blocks_;
  // coarse part: position and scale of each retained vertex's hat function
  std::vector<int> coarse_pos_;
  std::vector<double> coarse_scale_;
  std::unique_ptr<CholeskyFactor> coarse_inv_;
};

/// Builds the Schwarz preconditioner for a definite form assembled on the
/// frame (essential boundary conditions, or stiffness_plus_mass).
std::unique_ptr<SchwarzPreconditioner> build_schwarz(
    const GlobalFrame& frame, const SymmetricMatrix& a,
    const BilinearFormSpec& form);

/// Outcome of a PCG run.  Residual norms are measured in the inner product
/// of the preconditioner, sqrt(r . B r), starting with the initial residual.
struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_norms;
  bool converged = false;
  std::vector<double> c;
};

/// Preconditioned conjugate gradients with initial guess 0.  Works on
/// consistent semidefinite systems: with c0 = 0 the iterates stay in the
/// Krylov space of B A applied to B b, hence orthogonal to ker(A) in the
/// B^{-1} inner product.  Convergence: |r|_B <= tol * |b|_B.
SolveReport pcg(const SymmetricMatrix& a, std::span<const double> b,
                const Preconditioner& precond, double tol, int maxit);

/// Spectrum of B A restricted to the complement of its kernel, computed from
/// the congruent symmetric matrix L^T A L with B = L L^T.  kappa_pos of the
/// report is the frame-independent condition number of the preconditioned
/// operator.
SpectralReport spectrum_of_preconditioned(const SymmetricMatrix& a,
                                          const Preconditioner& precond,
                                          const Tolerances& tol = {});

} // namespace framefem
