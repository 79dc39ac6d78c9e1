#include "framefem/jacobi.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "framefem/errors.hpp"

namespace framefem {

namespace {
// h_n = int_{-1}^1 P_n^2 (1-x)^a (1+x)^b dx for the classical family
double classical_norm(double a, double b, int n) {
  double lg = (a + b + 1.0) * std::log(2.0) - std::log(2.0 * n + a + b + 1.0) +
              std::lgamma(n + a + 1.0) + std::lgamma(n + b + 1.0) -
              std::lgamma(n + a + b + 1.0) - std::lgamma(n + 1.0);
  return std::exp(lg);
}
} // namespace

Jacobi1D::Jacobi1D(double alpha, double beta, int max_degree)
    : alpha_(alpha), beta_(beta), max_degree_(max_degree) {
  if (alpha <= -1.0 || beta <= -1.0)
    throw InvalidParameters("Jacobi weight parameters must be > -1");
  rec_.resize(max_degree_ + 1);
  invnorm_.resize(max_degree_ + 1);
  const double a = alpha, b = beta;
  for (int n = 2; n <= max_degree_; ++n) {
    const double s = 2.0 * n + a + b;
    rec_[n].c1 = 2.0 * n * (n + a + b) * (s - 2.0);
    rec_[n].c2 = (s - 1.0) * s * (s - 2.0);
    rec_[n].c3 = (s - 1.0) * (a * a - b * b);
    rec_[n].c4 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * s;
  }
  for (int n = 0; n <= max_degree_; ++n)
    invnorm_[n] = 1.0 / std::sqrt(classical_norm(a, b, n));
}

void Jacobi1D::check_degree(int n) const {
  if (n < 0 || n > max_degree_)
    throw DegreeCapExceeded("Jacobi degree " + std::to_string(n) +
                            " outside table (cap " +
                            std::to_string(max_degree_) + ")");
}

double Jacobi1D::value(int n, double x) const {
  check_degree(n);
  double pm1 = 1.0;
  if (n == 0) return invnorm_[0];
  double p = 0.5 * (alpha_ + beta_ + 2.0) * x + 0.5 * (alpha_ - beta_);
  for (int k = 2; k <= n; ++k) {
    const Rec& r = rec_[k];
    double pk = ((r.c2 * x + r.c3) * p - r.c4 * pm1) / r.c1;
    pm1 = p;
    p = pk;
  }
  return p * invnorm_[n];
}

void Jacobi1D::value_and_derivative(int n, double x, double& v, double& dv) const {
  check_degree(n);
  double pm1 = 1.0, dpm1 = 0.0;
  double p = 0.5 * (alpha_ + beta_ + 2.0) * x + 0.5 * (alpha_ - beta_);
  double dp = 0.5 * (alpha_ + beta_ + 2.0);
  if (n == 0) {
    v = invnorm_[0];
    dv = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const Rec& r = rec_[k];
    double pk = ((r.c2 * x + r.c3) * p - r.c4 * pm1) / r.c1;
    double dpk = ((r.c2 * x + r.c3) * dp + r.c2 * p - r.c4 * dpm1) / r.c1;
    pm1 = p;
    dpm1 = dp;
    p = pk;
    dp = dpk;
  }
  v = p * invnorm_[n];
  dv = dp * invnorm_[n];
}

double Jacobi1D::derivative(int n, double x) const {
  double v, dv;
  value_and_derivative(n, x, v, dv);
  return dv;
}

double Jacobi1D::homogenized(int n, double t, double b) const {
  check_degree(n);
  if (n == 0) return invnorm_[0];
  double hm1 = 1.0;
  double h = (alpha_ + beta_ + 2.0) * t - (beta_ + 1.0) * b;
  for (int k = 2; k <= n; ++k) {
    const Rec& r = rec_[k];
    double hk = ((r.c2 * (2.0 * t - b) + r.c3 * b) * h - r.c4 * b * b * hm1) / r.c1;
    hm1 = h;
    h = hk;
  }
  return h * invnorm_[n];
}

void Jacobi1D::homogenized_full(int n, double t, double b, double& g,
                                double& gt, double& gb) const {
  check_degree(n);
  if (n == 0) {
    g = invnorm_[0];
    gt = gb = 0.0;
    return;
  }
  double hm1 = 1.0, tm1 = 0.0, bm1 = 0.0;
  double h = (alpha_ + beta_ + 2.0) * t - (beta_ + 1.0) * b;
  double ht = alpha_ + beta_ + 2.0;
  double hb = -(beta_ + 1.0);
  for (int k = 2; k <= n; ++k) {
    const Rec& r = rec_[k];
    const double lin = r.c2 * (2.0 * t - b) + r.c3 * b;
    double hk = (lin * h - r.c4 * b * b * hm1) / r.c1;
    double hkt = (lin * ht + 2.0 * r.c2 * h - r.c4 * b * b * tm1) / r.c1;
    double hkb = (lin * hb + (r.c3 - r.c2) * h -
                  r.c4 * (b * b * bm1 + 2.0 * b * hm1)) /
                 r.c1;
    hm1 = h;
    tm1 = ht;
    bm1 = hb;
    h = hk;
    ht = hkt;
    hb = hkb;
  }
  g = h * invnorm_[n];
  gt = ht * invnorm_[n];
  gb = hb * invnorm_[n];
}

const Jacobi1D& jacobi_family(double alpha, double beta) {
  static std::mutex mtx;
  static std::map<std::pair<double, double>, std::unique_ptr<Jacobi1D>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(alpha, beta);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<Jacobi1D>(alpha, beta, kMaxDegree1D + 20)).first;
  return *it->second;
}

double jacobi_eval(double alpha, double beta, int n, double x) {
  return jacobi_family(alpha, beta).value(n, x);
}

double shifted_jacobi_eval(double alpha, double beta, int n, double xi) {
  return jacobi_family(alpha, beta).value(n, 2.0 * xi - 1.0);
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

double bernstein_eval(int r, int s, double t) {
  if (s < 0 || s > r)
    throw IndexOutOfRange("bernstein_eval: need 0 <= s <= r");
  return binomial(r, s) * std::pow(t, s) * std::pow(1.0 - t, r - s);
}

double bernstein_derivative(int r, int s, double t) {
  if (s < 0 || s > r)
    throw IndexOutOfRange("bernstein_derivative: need 0 <= s <= r");
  double lo = s > 0 ? bernstein_eval(r - 1, s - 1, t) : 0.0;
  double hi = s < r ? bernstein_eval(r - 1, s, t) : 0.0;
  return r * (lo - hi);
}

double power_basis_eval(int r, double x) {
  if (r < 2) throw IndexOutOfRange("power_basis_eval: need r >= 2");
  return (1.0 + x) * (1.0 - x) * std::pow(x, r - 2);
}

double power_basis_derivative(int r, double x) {
  if (r < 2) throw IndexOutOfRange("power_basis_derivative: need r >= 2");
  const int k = r - 2;
  double xk = std::pow(x, k);
  double dxk = k > 0 ? k * std::pow(x, k - 1) : 0.0;
  return -2.0 * x * xk + (1.0 - x * x) * dxk;
}

} // namespace framefem
