#pragma once

#include <span>
#include <vector>

namespace framefem {

/// Orthonormal Jacobi polynomials J_n for a fixed weight
/// (1-x)^alpha (1+x)^beta on [-1,1], normalized so that
///   int_{-1}^{1} J_s J_t (1-x)^alpha (1+x)^beta dx = delta_st.
///
/// Values come from the classical three-term recurrence followed by the
/// exact Gamma-function normalization, stable through degree ~120.
/// The class also provides the homogenized form
///   G_n(t,b) = b^n * J_n(2 t/b - 1),
/// a bivariate polynomial of degree n, evaluated by the homogenized
/// recurrence so that b = 0 needs no special casing.
class Jacobi1D {
public:
  Jacobi1D(double alpha, double beta, int max_degree);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  int max_degree() const { return max_degree_; }

  double value(int n, double x) const;
  double derivative(int n, double x) const;
  void value_and_derivative(int n, double x, double& v, double& dv) const;

  /// G_n(t, b); any real b.
  double homogenized(int n, double t, double b) const;
  /// G_n with partial derivatives w.r.t. t and b.
  void homogenized_full(int n, double t, double b, double& g, double& gt,
                        double& gb) const;

  /// Shifted family Jtilde_n(xi) = J_n(2 xi - 1) on [0,1].
  double shifted(int n, double xi) const { return value(n, 2.0 * xi - 1.0); }

private:
  void check_degree(int n) const;

  double alpha_ = 0.0, beta_ = 0.0;
  int max_degree_ = 0;
  // classical recurrence  c1 P_n = (c2 x + c3) P_{n-1} - c4 P_{n-2}, n >= 2
  struct Rec {
    double c1, c2, c3, c4;
  };
  std::vector<Rec> rec_;
  std::vector<double> invnorm_; // 1/sqrt(h_n)
};

/// Shared, lazily built family cache.  References stay valid for the
/// lifetime of the process; lookups are thread-safe.
const Jacobi1D& jacobi_family(double alpha, double beta);

/// Orthonormal Jacobi polynomial J_n^{alpha,beta}(x) on [-1,1].
double jacobi_eval(double alpha, double beta, int n, double x);

/// Shifted orthonormal Jacobi polynomial Jtilde_n(xi) = J_n(2 xi - 1).
/// Satisfies int_0^1 Jtilde_s Jtilde_t (1-xi)^a xi^b dxi = 2^{-a-b-1} delta_st.
double shifted_jacobi_eval(double alpha, double beta, int n, double xi);

/// Bernstein polynomial b_{s,r}(t) = C(r,s) t^s (1-t)^{r-s} on [0,1].
double bernstein_eval(int r, int s, double t);
double bernstein_derivative(int r, int s, double t);

/// Power-type bubble (1+x)(1-x)x^{r-2} on [-1,1], r >= 2.
double power_basis_eval(int r, double x);
double power_basis_derivative(int r, double x);

double binomial(int n, int k);

/// Degree caps used across the polynomial families.
inline constexpr int kMaxDegree1D = 120;
inline constexpr int kMaxTotalDegree = 20;

} // namespace framefem
