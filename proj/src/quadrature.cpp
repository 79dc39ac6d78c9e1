#include "framefem/quadrature.hpp"

#include <cmath>
#include <string>

#include "framefem/errors.hpp"
#include "framefem/linalg.hpp"

namespace framefem {

namespace {
constexpr int kMaxExactness1D = 600;
constexpr int kMaxExactnessMulti = 60;

int points_for(int exactness) { return exactness / 2 + 1; }
} // namespace

void gauss_jacobi_01(int n, double alpha, std::vector<double>& nodes,
                     std::vector<double>& weights) {
  // Golub-Welsch on [-1,1] for the weight (1-x)^alpha, then map to [0,1].
  const double a = alpha, b = 0.0;
  std::vector<double> d(n), e(n, 0.0);
  if (n <= 0) throw UsageError("gauss_jacobi_01: need n >= 1");
  d[0] = (b - a) / (a + b + 2.0);
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    d[k] = (b * b - a * a) / (s * (s + 2.0));
    const double bk = 4.0 * k * (k + a) * (k + b) * (k + a + b) /
                      (s * s * (s + 1.0) * (s - 1.0));
    e[k] = std::sqrt(bk);
  }
  std::vector<double> z0;
  tridiag_eig(d, e, &z0);
  const double mu0 = std::exp((a + b + 1.0) * std::log(2.0) +
                              std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                              std::lgamma(a + b + 2.0));
  nodes.resize(n);
  weights.resize(n);
  const double scale = std::exp2(-(a + b + 1.0));
  for (int k = 0; k < n; ++k) {
    nodes[k] = 0.5 * (1.0 + d[k]);
    weights[k] = mu0 * z0[k] * z0[k] * scale;
  }
}

QuadratureRule simplex_quadrature(int m, int exactness) {
  if (m < 0 || m > 3)
    throw UnsupportedDegree("simplex_quadrature: dimension must be in [0,3]");
  if (exactness < 0) throw UnsupportedDegree("negative exactness");
  if (m == 1 && exactness > kMaxExactness1D)
    throw UnsupportedDegree("1D exactness cap " + std::to_string(kMaxExactness1D) +
                            " exceeded");
  if (m >= 2 && exactness > kMaxExactnessMulti)
    throw UnsupportedDegree("2D/3D exactness cap " +
                            std::to_string(kMaxExactnessMulti) + " exceeded");

  QuadratureRule rule;
  rule.dim = m;
  rule.exactness = exactness;

  if (m == 0) {
    rule.points = {1.0};
    rule.weights = {1.0};
    return rule;
  }

  const int n = points_for(exactness);
  if (m == 1) {
    std::vector<double> t, w;
    gauss_jacobi_01(n, 0.0, t, w);
    for (int i = 0; i < n; ++i) {
      rule.points.push_back(1.0 - t[i]);
      rule.points.push_back(t[i]);
      rule.weights.push_back(w[i]);
    }
    return rule;
  }

  if (m == 2) {
    // x = a_i, y = (1-a_i) b_j; the map absorbs the (1-x) Jacobian into
    // a Gauss-Jacobi weight, keeping the rule exact for total degree
    // <= 2n-1.
    std::vector<double> a, wa, bpts, wb;
    gauss_jacobi_01(n, 1.0, a, wa);
    gauss_jacobi_01(n, 0.0, bpts, wb);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double x = a[i];
        const double y = (1.0 - a[i]) * bpts[j];
        rule.points.push_back(1.0 - x - y);
        rule.points.push_back(x);
        rule.points.push_back(y);
        rule.weights.push_back(wa[i] * wb[j]);
      }
    return rule;
  }

  // m == 3
  std::vector<double> a, wa, b, wb, c, wc;
  gauss_jacobi_01(n, 2.0, a, wa);
  gauss_jacobi_01(n, 1.0, b, wb);
  gauss_jacobi_01(n, 0.0, c, wc);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double x = a[i];
        const double y = (1.0 - a[i]) * b[j];
        const double z = (1.0 - a[i]) * (1.0 - b[j]) * c[k];
        rule.points.push_back(1.0 - x - y - z);
        rule.points.push_back(x);
        rule.points.push_back(y);
        rule.points.push_back(z);
        rule.weights.push_back(wa[i] * wb[j] * wc[k]);
      }
  return rule;
}

} // namespace framefem
