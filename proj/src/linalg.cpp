#include "framefem/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "framefem/errors.hpp"

namespace framefem {

void SymmetricMatrix::matvec(std::span<const double> x, std::span<double> y) const {
  for (int i = 0; i < n_; ++i) y[i] = 0.0;
  for (int i = 0; i < n_; ++i) {
    const double* row = a_.data() + idx(i, 0);
    double acc = 0.0;
    for (int j = 0; j < i; ++j) {
      acc += row[j] * x[j];
      y[j] += row[j] * x[i];
    }
    y[i] += acc + row[i] * x[i];
  }
}

double SymmetricMatrix::quadratic_form(std::span<const double> x) const {
  double q = 0.0;
  for (int i = 0; i < n_; ++i) {
    const double* row = a_.data() + idx(i, 0);
    double off = 0.0;
    for (int j = 0; j < i; ++j) off += row[j] * x[j];
    q += x[i] * (2.0 * off + row[i] * x[i]);
  }
  return q;
}

std::vector<double> SymmetricMatrix::to_dense() const {
  std::vector<double> full(std::size_t(n_) * n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j <= i; ++j)
      full[std::size_t(i) * n_ + j] = full[std::size_t(j) * n_ + i] = a_[idx(i, j)];
  return full;
}

std::span<const double> EigenDecomposition::vector(int k) const {
  // Columns are strided; callers that need a contiguous vector copy it out.
  return {vectors.data() + k, 0};
}

namespace {

// Householder reduction of a dense symmetric matrix (row-major, n*n) to
// tridiagonal form.  On exit z holds the accumulated orthogonal transform,
// d the diagonal and e the subdiagonal (e[0] = 0).
void householder_tridiag(std::vector<double>& z, int n, std::vector<double>& d,
                         std::vector<double>& e) {
  auto zz = [&](int i, int j) -> double& { return z[std::size_t(i) * n + j]; };
  for (int i = n - 1; i > 0; --i) {
    int l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (int k = 0; k < i; ++k) scale += std::abs(zz(i, k));
      if (scale == 0.0) {
        e[i] = zz(i, l);
      } else {
        for (int k = 0; k < i; ++k) {
          zz(i, k) /= scale;
          h += zz(i, k) * zz(i, k);
        }
        double f = zz(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        zz(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j < i; ++j) {
          zz(j, i) = zz(i, j) / h;
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += zz(j, k) * zz(i, k);
          for (int k = j + 1; k < i; ++k) g += zz(k, j) * zz(i, k);
          e[j] = g / h;
          f += e[j] * zz(i, j);
        }
        double hh = f / (h + h);
        for (int j = 0; j < i; ++j) {
          f = zz(i, j);
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k <= j; ++k) zz(j, k) -= f * e[k] + g * zz(i, k);
        }
      }
    } else {
      e[i] = zz(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    if (d[i] != 0.0) {
      for (int j = 0; j < i; ++j) {
        double g = 0.0;
        for (int k = 0; k < i; ++k) g += zz(i, k) * zz(k, j);
        for (int k = 0; k < i; ++k) zz(k, j) -= g * zz(k, i);
      }
    }
    d[i] = zz(i, i);
    zz(i, i) = 1.0;
    for (int j = 0; j < i; ++j) zz(j, i) = zz(i, j) = 0.0;
  }
}

// Implicit-shift QL on a tridiagonal matrix.  z (if non-null) is a row-major
// zrows*n array whose columns are rotated along; pass the identity to get
// eigenvectors, or a single unit row to get first components only.
void tridiag_ql(std::vector<double>& d, std::vector<double>& e, int n,
                double* z, int zrows) {
  if (n == 0) return;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == 60)
          throw NoConvergence("tridiagonal QL: too many iterations");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          double b = c * e[i];
          e[i + 1] = r = std::hypot(f, g);
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          d[i + 1] = g + (p = s * r);
          g = c * r - b;
          for (int k = 0; k < zrows; ++k) {
            double* row = z + std::size_t(k) * n;
            f = row[i + 1];
            row[i + 1] = s * row[i] + c * f;
            row[i] = c * row[i] - s * f;
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

void sort_ascending(std::vector<double>& d, int n, double* z, int zrows) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](int a, int b) { return d[a] < d[b]; });
  std::vector<double> dtmp(n);
  for (int k = 0; k < n; ++k) dtmp[k] = d[perm[k]];
  d = dtmp;
  if (z) {
    std::vector<double> row(n);
    for (int r = 0; r < zrows; ++r) {
      double* zr = z + std::size_t(r) * n;
      for (int k = 0; k < n; ++k) row[k] = zr[perm[k]];
      std::copy(row.begin(), row.end(), zr);
    }
  }
}

} // namespace

EigenDecomposition sym_eig(const SymmetricMatrix& m) {
  const int n = m.order();
  EigenDecomposition out;
  out.n = n;
  if (n == 0) return out;
  out.vectors = m.to_dense();
  out.values.assign(n, 0.0);
  std::vector<double> e(n, 0.0);
  householder_tridiag(out.vectors, n, out.values, e);
  tridiag_ql(out.values, e, n, out.vectors.data(), n);
  sort_ascending(out.values, n, out.vectors.data(), n);
  return out;
}

void tridiag_eig(std::vector<double>& d, std::vector<double>& e,
                 std::vector<double>* first_row) {
  const int n = int(d.size());
  if (first_row) {
    first_row->assign(n, 0.0);
    if (n > 0) (*first_row)[0] = 1.0;
    tridiag_ql(d, e, n, first_row->data(), 1);
    sort_ascending(d, n, first_row->data(), 1);
  } else {
    tridiag_ql(d, e, n, nullptr, 0);
    sort_ascending(d, n, nullptr, 0);
  }
}

CholeskyFactor::CholeskyFactor(const SymmetricMatrix& a) : n_(a.order()) {
  l_.assign(std::size_t(n_) * (n_ + 1) / 2, 0.0);
  auto L = [&](int i, int j) -> double& { return l_[std::size_t(i) * (i + 1) / 2 + j]; };
  for (int j = 0; j < n_; ++j) {
    double diag = a(j, j);
    for (int k = 0; k < j; ++k) diag -= L(j, k) * L(j, k);
    if (!(diag > 0.0))
      throw MNotDefinite("Cholesky: non-positive pivot at row " + std::to_string(j));
    const double ljj = std::sqrt(diag);
    L(j, j) = ljj;
    for (int i = j + 1; i < n_; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / ljj;
    }
  }
}

void CholeskyFactor::solve_lower(std::span<double> b) const {
  for (int i = 0; i < n_; ++i) {
    double s = b[i];
    const double* row = l_.data() + std::size_t(i) * (i + 1) / 2;
    for (int k = 0; k < i; ++k) s -= row[k] * b[k];
    b[i] = s / row[i];
  }
}

void CholeskyFactor::solve_lower_transpose(std::span<double> b) const {
  for (int i = n_ - 1; i >= 0; --i) {
    double s = b[i];
    for (int k = i + 1; k < n_; ++k) s -= l_[std::size_t(k) * (k + 1) / 2 + i] * b[k];
    b[i] = s / l_[std::size_t(i) * (i + 1) / 2 + i];
  }
}

void CholeskyFactor::solve(std::span<double> b) const {
  solve_lower(b);
  solve_lower_transpose(b);
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

} // namespace framefem
