#include "framefem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <string>

#include <json.hpp>

#include "framefem/errors.hpp"

namespace framefem {

namespace {

double det_d(const std::vector<double>& e, int d) {
  // e holds d columns of length d (column-major)
  if (d == 1) return e[0];
  if (d == 2) return e[0] * e[3] - e[2] * e[1];
  return e[0] * (e[4] * e[8] - e[7] * e[5]) - e[3] * (e[1] * e[8] - e[7] * e[2]) +
         e[6] * (e[1] * e[5] - e[4] * e[2]);
}

// Inverse of a small d x d matrix given column-major; row-major output.
std::vector<double> invert_d(const std::vector<double>& e, int d, double det) {
  std::vector<double> inv(std::size_t(d) * d);
  if (d == 1) {
    inv[0] = 1.0 / det;
  } else if (d == 2) {
    inv[0] = e[3] / det;
    inv[1] = -e[2] / det;
    inv[2] = -e[1] / det;
    inv[3] = e[0] / det;
  } else {
    inv[0] = (e[4] * e[8] - e[7] * e[5]) / det;
    inv[1] = (e[6] * e[5] - e[3] * e[8]) / det;
    inv[2] = (e[3] * e[7] - e[6] * e[4]) / det;
    inv[3] = (e[7] * e[2] - e[1] * e[8]) / det;
    inv[4] = (e[0] * e[8] - e[6] * e[2]) / det;
    inv[5] = (e[6] * e[1] - e[0] * e[7]) / det;
    inv[6] = (e[1] * e[5] - e[4] * e[2]) / det;
    inv[7] = (e[3] * e[2] - e[0] * e[5]) / det;
    inv[8] = (e[0] * e[4] - e[3] * e[1]) / det;
  }
  return inv;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

} // namespace

SimplicialMesh SimplicialMesh::build(int dim,
                                     const std::vector<std::vector<double>>& vertices,
                                     const std::vector<std::vector<int>>& cells) {
  if (dim < 1 || dim > 3) throw UsageError("mesh dimension must be 1, 2 or 3");
  if (vertices.empty() || cells.empty())
    throw UsageError("mesh needs at least one vertex and one cell");

  SimplicialMesh mesh;
  mesh.dim_ = dim;
  mesh.coords_.reserve(vertices.size() * dim);
  for (const auto& v : vertices) {
    if (int(v.size()) != dim)
      throw UsageError("vertex coordinate count does not match dimension");
    mesh.coords_.insert(mesh.coords_.end(), v.begin(), v.end());
  }

  const int nv = int(vertices.size());
  mesh.cells_.reserve(cells.size() * (dim + 1));
  for (const auto& c : cells) {
    if (int(c.size()) != dim + 1)
      throw UsageError("cell vertex count does not match dimension");
    std::vector<int> t(c);
    std::sort(t.begin(), t.end());
    for (int v : t)
      if (v < 0 || v >= nv)
        throw IndexOutOfRange("cell references vertex " + std::to_string(v));
    for (int k = 0; k + 1 <= dim; ++k)
      if (t[k] == t[k + 1])
        throw DegenerateCell("cell repeats vertex " + std::to_string(t[k]));
    mesh.cells_.insert(mesh.cells_.end(), t.begin(), t.end());
  }

  mesh.compute_geometry();
  mesh.build_tables();
  mesh.check_conformity();
  return mesh;
}

void SimplicialMesh::compute_geometry() {
  const int d = dim_;
  const int nc = int(cells_.size()) / (d + 1);
  volume_.resize(nc);
  diameter_.resize(nc);
  grads_.assign(std::size_t(nc) * (d + 1) * d, 0.0);
  for (int c = 0; c < nc; ++c) {
    auto verts = std::span<const int>{cells_.data() + std::size_t(c) * (d + 1),
                                      std::size_t(d + 1)};
    std::vector<double> edges(std::size_t(d) * d); // columns v_k - v_0
    for (int k = 1; k <= d; ++k)
      for (int i = 0; i < d; ++i)
        edges[std::size_t(k - 1) * d + i] =
            coords_[std::size_t(verts[k]) * d + i] -
            coords_[std::size_t(verts[0]) * d + i];
    double det = det_d(edges, d);
    double diam = 0.0;
    for (int a = 0; a <= d; ++a)
      for (int b = a + 1; b <= d; ++b) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
          double t = coords_[std::size_t(verts[a]) * d + i] -
                     coords_[std::size_t(verts[b]) * d + i];
          s += t * t;
        }
        diam = std::max(diam, std::sqrt(s));
      }
    diameter_[c] = diam;
    volume_[c] = std::abs(det) / factorial(d);
    if (!(volume_[c] > 1e-14 * std::pow(diam, d)))
      throw DegenerateCell("cell " + std::to_string(c) + " has zero volume");
    auto inv = invert_d(edges, d, det); // row k-1 of inv = grad lambda_k
    for (int k = 1; k <= d; ++k)
      for (int i = 0; i < d; ++i) {
        double g = inv[std::size_t(k - 1) * d + i];
        grads_[(std::size_t(c) * (d + 1) + k) * d + i] = g;
        grads_[(std::size_t(c) * (d + 1) + 0) * d + i] -= g;
      }
  }
}

void SimplicialMesh::build_tables() {
  const int d = dim_;
  const int nc = int(cells_.size()) / (d + 1);
  for (int m = 0; m <= d; ++m) {
    delta_[m].clear();
    lookup_[m].clear();
    incident_[m].clear();
  }
  for (int c = 0; c < nc; ++c) {
    auto verts = cell_vertices(c);
    for (unsigned mask = 1; mask < (1u << (d + 1)); ++mask) {
      std::vector<int> sub;
      for (int k = 0; k <= d; ++k)
        if (mask & (1u << k)) sub.push_back(verts[k]);
      const int m = int(sub.size()) - 1;
      auto it = lookup_[m].find(sub);
      int idx;
      if (it == lookup_[m].end()) {
        idx = int(delta_[m].size());
        lookup_[m].emplace(sub, idx);
        delta_[m].push_back(Subsimplex{m, sub, false});
        incident_[m].emplace_back();
      } else {
        idx = it->second;
      }
      incident_[m][idx].push_back(c);
    }
  }
  // cells are stored in input order inside Delta_d; incidences are sorted
  for (int m = 0; m <= d; ++m)
    for (auto& inc : incident_[m]) {
      std::sort(inc.begin(), inc.end());
      inc.erase(std::unique(inc.begin(), inc.end()), inc.end());
    }
  // boundary flags: a facet in exactly one cell is a boundary facet, and
  // every subsimplex of a boundary facet lies on the boundary
  for (const auto& facet : delta_[d - 1]) {
    int idx = lookup_[d - 1].at(facet.verts);
    if (incident_[d - 1][idx].size() != 1) continue;
    const auto& fv = facet.verts;
    for (unsigned mask = 1; mask < (1u << fv.size()); ++mask) {
      std::vector<int> sub;
      for (std::size_t k = 0; k < fv.size(); ++k)
        if (mask & (1u << k)) sub.push_back(fv[k]);
      const int m = int(sub.size()) - 1;
      auto it = lookup_[m].find(sub);
      if (it != lookup_[m].end()) delta_[m][it->second].on_boundary = true;
    }
  }
}

void SimplicialMesh::check_conformity() const {
  const int d = dim_;
  const int nc = num_cells();
  // duplicate cells
  {
    std::set<std::vector<int>> seen;
    for (int c = 0; c < nc; ++c) {
      auto verts = cell_vertices(c);
      std::vector<int> t(verts.begin(), verts.end());
      if (!seen.insert(t).second) throw NonConforming("duplicate cell");
    }
  }
  // coincident vertices
  double bbox = 0.0;
  const int nv = num_vertices();
  for (int i = 0; i < nv; ++i)
    for (int k = 0; k < d; ++k) bbox = std::max(bbox, std::abs(coords_[std::size_t(i) * d + k]));
  const double tol = 1e-12 * std::max(bbox, 1.0);
  for (int i = 0; i < nv; ++i)
    for (int j = i + 1; j < nv; ++j) {
      double dist = 0.0;
      for (int k = 0; k < d; ++k)
        dist = std::max(dist, std::abs(coords_[std::size_t(i) * d + k] -
                                       coords_[std::size_t(j) * d + k]));
      if (dist <= tol)
        throw NonConforming("vertices " + std::to_string(i) + " and " +
                            std::to_string(j) + " coincide");
    }
  // facet incidence: one (boundary) or two (interior) cells
  for (std::size_t i = 0; i < delta_[d - 1].size(); ++i) {
    auto n = incident_[d - 1][i].size();
    if (n != 1 && n != 2)
      throw NonConforming("facet shared by " + std::to_string(n) + " cells");
  }
  // no mesh vertex inside the closure of a cell it does not belong to;
  // this catches hanging nodes and partially shared facets
  std::vector<double> lambda(d + 1);
  for (int v = 0; v < nv; ++v) {
    auto x = vertex(v);
    for (int c = 0; c < nc; ++c) {
      auto verts = cell_vertices(c);
      if (std::find(verts.begin(), verts.end(), v) != verts.end()) continue;
      bary_coords(c, x, lambda);
      double lmin = lambda[0];
      for (int k = 1; k <= d; ++k) lmin = std::min(lmin, lambda[k]);
      if (lmin >= -1e-9)
        throw NonConforming("vertex " + std::to_string(v) +
                            " lies inside cell " + std::to_string(c));
    }
  }
}

const std::vector<Subsimplex>& SimplicialMesh::delta(int m) const {
  if (m < 0 || m > dim_) throw IndexOutOfRange("subsimplex dimension");
  return delta_[m];
}

SubRef SimplicialMesh::find_subsimplex(int m, std::span<const int> verts) const {
  if (m < 0 || m > dim_) return {};
  std::vector<int> key(verts.begin(), verts.end());
  std::sort(key.begin(), key.end());
  auto it = lookup_[m].find(key);
  if (it == lookup_[m].end()) return {};
  return SubRef{m, it->second};
}

const std::vector<int>& SimplicialMesh::cells_of(SubRef f) const {
  if (!f.valid() || f.m > dim_ || f.index >= int(delta_[f.m].size()))
    throw UnknownSubsimplex("invalid subsimplex reference");
  return incident_[f.m][f.index];
}

Macroelement SimplicialMesh::macroelement(SubRef f) const {
  Macroelement mac;
  mac.f = f;
  mac.cells_omega = cells_of(f);
  std::set<int> ext;
  for (int v : sub(f).verts) {
    SubRef vr = find_subsimplex(0, std::span<const int>(&v, 1));
    for (int c : cells_of(vr)) ext.insert(c);
  }
  mac.cells_omega_ext.assign(ext.begin(), ext.end());
  for (int c : mac.cells_omega) mac.h_f = std::max(mac.h_f, diameter_[c]);
  return mac;
}

void SimplicialMesh::bary_coords(int c, std::span<const double> x,
                                 std::span<double> lambda) const {
  const int d = dim_;
  auto verts = cell_vertices(c);
  lambda[0] = 1.0;
  for (int k = 1; k <= d; ++k) {
    auto g = bary_gradient(c, k);
    double val = 0.0;
    for (int i = 0; i < d; ++i)
      val += g[i] * (x[i] - coords_[std::size_t(verts[0]) * d + i]);
    lambda[k] = val;
    lambda[0] -= val;
  }
}

int SimplicialMesh::find_cell(std::span<const double> x) const {
  const int d = dim_;
  std::vector<double> lambda(d + 1);
  for (int c = 0; c < num_cells(); ++c) {
    bary_coords(c, x, lambda);
    double lmin = lambda[0];
    for (int k = 1; k <= d; ++k) lmin = std::min(lmin, lambda[k]);
    if (lmin >= -1e-12) return c;
  }
  throw PointOutsideMesh("point not contained in any cell");
}

double SimplicialMesh::hat_eval(int vertex_id, std::span<const double> x) const {
  if (vertex_id < 0 || vertex_id >= num_vertices())
    throw IndexOutOfRange("hat_eval: vertex index");
  const int c = find_cell(x);
  auto verts = cell_vertices(c);
  std::vector<double> lambda(dim_ + 1);
  bary_coords(c, x, lambda);
  for (int k = 0; k <= dim_; ++k)
    if (verts[k] == vertex_id)
      return std::clamp(lambda[k], 0.0, 1.0);
  return 0.0;
}

void SimplicialMesh::barycentric_map(SubRef f, std::span<const double> x,
                                     std::span<double> out) const {
  if (!f.valid() || f.m >= dim_)
    throw UnknownSubsimplex("barycentric_map needs a subsimplex with m < d");
  const int c = find_cell(x);
  auto verts = cell_vertices(c);
  std::vector<double> lambda(dim_ + 1);
  bary_coords(c, x, lambda);
  const auto& fv = sub(f).verts;
  for (std::size_t j = 0; j < fv.size(); ++j) {
    out[j] = 0.0;
    for (int k = 0; k <= dim_; ++k)
      if (verts[k] == fv[j]) out[j] = std::clamp(lambda[k], 0.0, 1.0);
  }
}

double SimplicialMesh::domain_volume() const {
  double v = 0.0;
  for (int c = 0; c < num_cells(); ++c) v += volume_[c];
  return v;
}

std::vector<int> SimplicialMesh::local_positions(SubRef f, int c) const {
  auto verts = cell_vertices(c);
  const auto& fv = sub(f).verts;
  std::vector<int> pos;
  pos.reserve(fv.size());
  for (int v : fv) {
    auto it = std::find(verts.begin(), verts.end(), v);
    if (it == verts.end()) return {};
    pos.push_back(int(it - verts.begin()));
  }
  return pos;
}

SimplicialMesh SimplicialMesh::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open mesh file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text); // whole file must be one JSON value
  } catch (const std::exception& e) {
    throw UsageError("mesh file parse error: " + std::string(e.what()));
  }
  if (!j.is_object()) throw UsageError("mesh file: top level must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "dim" && it.key() != "vertices" && it.key() != "cells")
      throw UsageError("mesh file: unknown key '" + it.key() + "'");
  if (!j.contains("dim") || !j.contains("vertices") || !j.contains("cells"))
    throw UsageError("mesh file: needs dim, vertices and cells");
  int dim = j.at("dim").get<int>();
  auto vertices = j.at("vertices").get<std::vector<std::vector<double>>>();
  auto cells = j.at("cells").get<std::vector<std::vector<int>>>();
  return build(dim, vertices, cells);
}

SimplicialMesh generate_mesh(MeshKind kind, int n, double a, double b) {
  if (n < 1) throw UsageError("generate_mesh: need n >= 1");
  switch (kind) {
    case MeshKind::interval: {
      if (!(b > a)) throw UsageError("interval: need b > a");
      std::vector<std::vector<double>> verts;
      for (int i = 0; i <= n; ++i) verts.push_back({a + (b - a) * i / n});
      std::vector<std::vector<int>> cells;
      for (int i = 0; i < n; ++i) cells.push_back({i, i + 1});
      return SimplicialMesh::build(1, verts, cells);
    }
    case MeshKind::unit_square: {
      auto id = [n](int i, int j) { return j * (n + 1) + i; };
      std::vector<std::vector<double>> verts;
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
          verts.push_back({double(i) / n, double(j) / n});
      std::vector<std::vector<int>> cells;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
          cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
      return SimplicialMesh::build(2, verts, cells);
    }
    case MeshKind::unit_cube: {
      auto id = [n](int i, int j, int k) {
        return (k * (n + 1) + j) * (n + 1) + i;
      };
      std::vector<std::vector<double>> verts;
      for (int k = 0; k <= n; ++k)
        for (int j = 0; j <= n; ++j)
          for (int i = 0; i <= n; ++i)
            verts.push_back({double(i) / n, double(j) / n, double(k) / n});
      // Kuhn subdivision: six path tetrahedra per cube, one per permutation,
      // identical in every cube so faces match across cubes
      const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                               {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
      std::vector<std::vector<int>> cells;
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i)
            for (const auto& p : perms) {
              int pos[3] = {i, j, k};
              std::vector<int> tet{id(pos[0], pos[1], pos[2])};
              for (int step = 0; step < 3; ++step) {
                pos[p[step]] += 1;
                tet.push_back(id(pos[0], pos[1], pos[2]));
              }
              cells.push_back(tet);
            }
      return SimplicialMesh::build(3, verts, cells);
    }
    case MeshKind::single_simplex: {
      int d = n;
      if (d < 1 || d > 3) throw UsageError("single_simplex: dimension 1..3");
      std::vector<std::vector<double>> verts;
      verts.push_back(std::vector<double>(d, 0.0));
      for (int k = 0; k < d; ++k) {
        std::vector<double> v(d, 0.0);
        v[k] = 1.0;
        verts.push_back(v);
      }
      std::vector<std::vector<int>> cells;
      std::vector<int> all(d + 1);
      for (int k = 0; k <= d; ++k) all[k] = k;
      cells.push_back(all);
      return SimplicialMesh::build(d, verts, cells);
    }
  }
  throw UnsupportedKind("unknown mesh kind");
}

} // namespace framefem
