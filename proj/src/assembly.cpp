#include "framefem/assembly.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "framefem/errors.hpp"

namespace framefem {

int required_exactness(const BilinearFormSpec& form, int degree) {
  switch (form.kind) {
    case BilinearFormSpec::Kind::mass:
      return 2 * degree;
    case BilinearFormSpec::Kind::stiffness:
      return std::max(0, 2 * degree - 2);
    case BilinearFormSpec::Kind::stiffness_plus_mass:
      return 2 * degree;
  }
  return 2 * degree;
}

SymmetricMatrix assemble(const BasisTables& tables, const BilinearFormSpec& form) {
  if (!tables.mesh) throw DimensionMismatch("assemble: tables carry no mesh");
  if (tables.rule.exactness < required_exactness(form, tables.degree))
    throw QuadratureTooWeak("assemble: rule exactness " +
                            std::to_string(tables.rule.exactness) +
                            " below required " +
                            std::to_string(required_exactness(form, tables.degree)));
  const int d = tables.mesh->dim();
  const bool use_val = form.kind != BilinearFormSpec::Kind::stiffness;
  const bool use_grad = form.kind != BilinearFormSpec::Kind::mass;
  const double cv = form.kind == BilinearFormSpec::Kind::mass ? 1.0 : form.reaction;
  const double cg = form.diffusion;

  SymmetricMatrix a(tables.n);
  a.blocks = tables.blocks;
  const int nq = tables.rule.size();
  for (const auto& cb : tables.cells) {
    const int K = int(cb.global.size());
    for (int k = 0; k < K; ++k)
      for (int l = 0; l <= k; ++l) {
        double acc = 0.0;
        for (int q = 0; q < nq; ++q) {
          double term = 0.0;
          if (use_val)
            term += cv * cb.values[std::size_t(q) * K + k] *
                    cb.values[std::size_t(q) * K + l];
          if (use_grad) {
            const double* gk = cb.grads.data() + (std::size_t(q) * K + k) * d;
            const double* gl = cb.grads.data() + (std::size_t(q) * K + l) * d;
            double dotg = 0.0;
            for (int i = 0; i < d; ++i) dotg += gk[i] * gl[i];
            term += cg * dotg;
          }
          acc += tables.rule.weights[q] * term;
        }
        a.add(cb.global[k], cb.global[l], acc * cb.scale);
      }
  }
  return a;
}

LoadVector assemble_load(const BasisTables& tables,
                         const std::function<double(std::span<const double>)>& f) {
  LoadVector load;
  load.values.assign(tables.n, 0.0);
  const int d = tables.mesh->dim();
  const int nq = tables.rule.size();
  for (const auto& cb : tables.cells) {
    const int K = int(cb.global.size());
    for (int q = 0; q < nq; ++q) {
      const double fq =
          f(std::span<const double>{cb.points.data() + std::size_t(q) * d,
                                    std::size_t(d)});
      const double wq = tables.rule.weights[q] * cb.scale * fq;
      for (int k = 0; k < K; ++k)
        load.values[cb.global[k]] += wq * cb.values[std::size_t(q) * K + k];
    }
  }
  return load;
}

void write_matrix(const std::string& path, const SymmetricMatrix& m) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open for writing: " + path);
  out << m.order() << "\n";
  char buf[32];
  for (int i = 0; i < m.order(); ++i) {
    for (int j = 0; j <= i; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << buf << (j == i ? "" : " ");
    }
    out << "\n";
  }
}

SymmetricMatrix read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open matrix file: " + path);
  int n = 0;
  in >> n;
  if (n < 0) throw UsageError("matrix file: bad order");
  SymmetricMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double v;
      if (!(in >> v)) throw UsageError("matrix file: truncated");
      m.at(i, j) = v;
    }
  return m;
}

} // namespace framefem
