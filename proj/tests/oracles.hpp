#pragma once

// Test-only oracles, independent of the library's evaluation paths.

#include <cmath>
#include <random>
#include <span>
#include <vector>

namespace oracles {

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// int over the reference m-simplex of prod lambda_i^{a_i} with a_0 the
// exponent of 1 - sum(xi): prod a_i! / (m + sum a_i)!
inline double dirichlet_integral(std::span<const int> exponents, int m) {
  double num = 1.0;
  int total = 0;
  for (int a : exponents) {
    num *= factorial(a);
    total += a;
  }
  return num / factorial(m + total);
}

// int_0^1 t^a (1-t)^b dt
inline double beta_integral(int a, int b) {
  return factorial(a) * factorial(b) / factorial(a + b + 1);
}

inline double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Classical Jacobi polynomial P_n^{(a,b)} for n <= 2 from the hypergeometric
// sum P_n = sum_k C(n+a, n-k) C(n+b, k) ((x-1)/2)^k ((x+1)/2)^{n-k}.
inline double jacobi_closed_form(double a, double b, int n, double x) {
  auto genbinom = [](double top, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c *= (top - (k - i)) / i;
    return c;
  };
  double s = 0.0;
  for (int k = 0; k <= n; ++k)
    s += genbinom(n + a, n - k) * genbinom(n + b, k) *
         std::pow(0.5 * (x - 1.0), k) * std::pow(0.5 * (x + 1.0), n - k);
  return s;
}

// norm^2 of the classical family, from the Gamma form with integer-safe
// lgamma evaluation
inline double jacobi_norm2(double a, double b, int n) {
  double lg = (a + b + 1.0) * std::log(2.0) - std::log(2.0 * n + a + b + 1.0) +
              std::lgamma(n + a + 1.0) + std::lgamma(n + b + 1.0) -
              std::lgamma(n + a + b + 1.0) - std::lgamma(n + 1.0);
  return std::exp(lg);
}

// deterministic RNG for all randomized tests
inline std::mt19937 rng(unsigned seed) { return std::mt19937(seed); }

// uniformly random barycentric point with all coordinates >= margin
inline std::vector<double> random_bary(std::mt19937& gen, int ncomp,
                                       double margin = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> e(ncomp);
  for (;;) {
    double s = 0.0;
    for (int i = 0; i < ncomp; ++i) {
      e[i] = -std::log(u(gen) + 1e-300);
      s += e[i];
    }
    bool ok = true;
    for (int i = 0; i < ncomp; ++i) {
      e[i] /= s;
      if (e[i] < margin) ok = false;
    }
    if (ok) return e;
  }
}

} // namespace oracles
