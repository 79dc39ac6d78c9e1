#include "framefem/simplex_poly.hpp"

#include <cmath>
#include <string>

#include "framefem/errors.hpp"
#include "framefem/jacobi.hpp"

namespace framefem {

int multi_index_total(const MultiIndex& s) {
  int t = 0;
  for (int v : s) t += v;
  return t;
}

namespace {
void enumerate_rec(int nvars, int budget, MultiIndex& cur,
                   std::vector<MultiIndex>& out) {
  if (int(cur.size()) == nvars) {
    out.push_back(cur);
    return;
  }
  for (int v = 0; v <= budget; ++v) {
    cur.push_back(v);
    enumerate_rec(nvars, budget - v, cur, out);
    cur.pop_back();
  }
}
} // namespace

std::vector<MultiIndex> multi_indices_up_to(int nvars, int max_total) {
  std::vector<MultiIndex> out;
  if (nvars <= 0 || max_total < 0) return out;
  for (int total = 0; total <= max_total; ++total) {
    std::vector<MultiIndex> layer;
    MultiIndex cur;
    enumerate_rec(nvars, total, cur, layer);
    for (auto& s : layer)
      if (multi_index_total(s) == total) out.push_back(std::move(s));
  }
  return out;
}

namespace detail {

// dparam is the weight parameter: the family is orthonormal under
// (prod lambda)^2 (1-sum lambda)^{dparam-m-1} on S_m^c.  The interior basis
// reuses this with shifted parameters.
void simplex_jacobi_core(int dparam, int m, const MultiIndex& s,
                         std::span<const double> lambda, bool want_grad,
                         double& value, std::span<double> grad) {
  const int nv = m + 1;
  // a_j = 2*sum_{i>j} s_i + d + 2m - 3j - 1
  int tail = 0;
  std::vector<int> aj(nv);
  for (int j = nv - 1; j >= 0; --j) {
    aj[j] = 2 * tail + dparam + 2 * m - 3 * j - 1;
    tail += s[j];
  }
  // c_s^{-2} = prod 2^{a_j + 3}
  double log2c = 0.0;
  for (int j = 0; j < nv; ++j) log2c += 0.5 * (aj[j] + 3);
  const double cinv = std::exp2(log2c);

  std::vector<double> v(nv), vt(nv), vb(nv);
  double b = 1.0;
  for (int j = 0; j < nv; ++j) {
    const Jacobi1D& fam = jacobi_family(double(aj[j]), 2.0);
    if (want_grad)
      fam.homogenized_full(s[j], lambda[j], b, v[j], vt[j], vb[j]);
    else
      v[j] = fam.homogenized(s[j], lambda[j], b);
    b -= lambda[j];
  }

  double prod = cinv;
  for (int j = 0; j < nv; ++j) prod *= v[j];
  value = prod;
  if (!want_grad) return;

  // prefix/suffix products give prod_{k != j} v_k without division
  std::vector<double> pre(nv + 1, 1.0), suf(nv + 1, 1.0);
  for (int j = 0; j < nv; ++j) pre[j + 1] = pre[j] * v[j];
  for (int j = nv - 1; j >= 0; --j) suf[j] = suf[j + 1] * v[j];
  for (int l = 0; l < nv; ++l) {
    double g = vt[l] * pre[l] * suf[l + 1];
    for (int j = l + 1; j < nv; ++j)
      g -= vb[j] * pre[j] * suf[j + 1];
    grad[l] = cinv * g;
  }
}

} // namespace detail

namespace {

void validate_point(int m, std::span<const double> lambda) {
  if (int(lambda.size()) != m + 1)
    throw InvalidDimensions("simplex point needs m+1 coordinates");
  double sum = 0.0;
  for (double l : lambda) {
    if (l < -1e-12) throw PointOutsideSimplex("negative barycentric coordinate");
    sum += l;
  }
  if (sum > 1.0 + 1e-12) throw PointOutsideSimplex("coordinate sum exceeds 1");
}

void validate_index(int m, const MultiIndex& s) {
  if (int(s.size()) != m + 1)
    throw InvalidDimensions("multi-index needs m+1 entries");
  for (int v : s)
    if (v < 0) throw InvalidDimensions("negative multi-index entry");
  if (multi_index_total(s) > kMaxTotalDegree)
    throw DegreeCapExceeded("total degree cap " +
                            std::to_string(kMaxTotalDegree) + " exceeded");
}

} // namespace

double simplex_jacobi_eval(int d, int m, const MultiIndex& s,
                           std::span<const double> lambda) {
  if (!(0 <= m && m < d && d <= 3))
    throw InvalidDimensions("simplex_jacobi_eval: need 0 <= m < d <= 3");
  validate_index(m, s);
  validate_point(m, lambda);
  double value;
  detail::simplex_jacobi_core(d, m, s, lambda, false, value, {});
  return value;
}

void simplex_jacobi_eval_grad(int d, int m, const MultiIndex& s,
                              std::span<const double> lambda, double& value,
                              std::span<double> grad) {
  if (!(0 <= m && m < d && d <= 3))
    throw InvalidDimensions("simplex_jacobi_eval_grad: need 0 <= m < d <= 3");
  validate_index(m, s);
  validate_point(m, lambda);
  detail::simplex_jacobi_core(d, m, s, lambda, true, value, grad);
}

InteriorOrthobasis::InteriorOrthobasis(int d, int k) : d_(d), k_(k) {
  if (d < 1 || d > 3)
    throw InvalidDimensions("interior_orthobasis: need 1 <= d <= 3");
  const int cap = d == 1 ? kMaxDegree1D : kMaxTotalDegree;
  if (k < 0 || k > cap)
    throw DegreeCapExceeded("interior_orthobasis: degree out of range");
  indices_ = multi_indices_up_to(d, k);
}

double InteriorOrthobasis::eval(int i, std::span<const double> bary) const {
  if (i < 0 || i >= dimension()) throw IndexOutOfRange("interior basis index");
  double value;
  // weight parameter d+2 makes b(lambda)^2 = lambda_d^2 the trailing factor
  detail::simplex_jacobi_core(d_ + 2, d_ - 1, indices_[i], bary.first(d_),
                              false, value, {});
  return value;
}

void InteriorOrthobasis::eval_grad(int i, std::span<const double> bary,
                                   double& value, std::span<double> grad) const {
  if (i < 0 || i >= dimension()) throw IndexOutOfRange("interior basis index");
  detail::simplex_jacobi_core(d_ + 2, d_ - 1, indices_[i], bary.first(d_),
                              true, value, grad.first(d_));
  grad[d_] = 0.0;
}

InteriorOrthobasis interior_orthobasis(int d, int k) {
  return InteriorOrthobasis(d, k);
}

} // namespace framefem
