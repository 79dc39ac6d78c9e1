#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "framefem/errors.hpp"
#include "framefem/experiments.hpp"
#include "oracles.hpp"

using namespace framefem;

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) : path(name) {
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};
} // namespace

TEST_CASE("mesh specs parse") {
  CHECK(mesh_from_spec("gen:interval:4").num_cells() == 4);
  CHECK(mesh_from_spec("gen:square:2").num_cells() == 8);
  CHECK(mesh_from_spec("gen:cube:1").num_cells() == 6);
  CHECK(mesh_from_spec("gen:simplex:2").num_cells() == 1);
  CHECK_THROWS_AS(mesh_from_spec("gen:torus:2"), UsageError);
  CHECK_THROWS_AS(mesh_from_spec("no_such_file.json"), UsageError);
}

TEST_CASE("csv schema") {
  CHECK(csv_header() == "r,kappa_M,kappa_A,kappa_genAM,K_frame,N,rank,iters");
  ResultRow row;
  row.r = 7;
  row.kappa_M = 2.0;
  row.N = 11;
  CHECK(csv_line(row) == "7,2,,,,11,,");
}

TEST_CASE("cond1d jacobi: unit mass condition and matching operator kappa") {
  TempDir dir("exp_jacobi_tmp");
  auto res = run_cond1d(BasisKind1D::jacobi_bubble, 12, false,
                        {dir.path.string(), false, 1e-10});
  for (const auto& row : res.rows) {
    REQUIRE(row.kappa_M.has_value());
    CHECK(*row.kappa_M == doctest::Approx(1.0).epsilon(1e-10));
    REQUIRE(row.kappa_A.has_value());
    REQUIRE(row.kappa_genAM.has_value());
    CHECK(*row.kappa_A == doctest::Approx(*row.kappa_genAM).epsilon(1e-8));
    CHECK(*row.N == row.r - 1);
  }
  CHECK(std::filesystem::exists(res.csv_path));
  CHECK(std::filesystem::exists(res.svg_log_path));
  CHECK(std::filesystem::exists(res.svg_ratio_path));
}

TEST_CASE("cond1d bernstein without boundary conditions: exact identity") {
  // the spectral condition number of the full Bernstein mass matrix equals
  // C(2r+1, r) exactly; frozen here from the closed-form eigenvalue result
  TempDir dir("exp_bern_tmp");
  auto res = run_cond1d(BasisKind1D::bernstein_interior, 8, true,
                        {dir.path.string(), false, 1e-10});
  for (const auto& row : res.rows) {
    const double exact = oracles::binom(2 * row.r + 1, row.r);
    CHECK(*row.kappa_M == doctest::Approx(exact).epsilon(1e-9));
    CHECK(!row.kappa_A.has_value());
  }
}

TEST_CASE("cond1d power dominates bernstein in mass conditioning") {
  TempDir dir("exp_power_tmp");
  auto bern = run_cond1d(BasisKind1D::bernstein_interior, 12, false,
                         {dir.path.string(), false, 1e-10});
  auto power = run_cond1d(BasisKind1D::power_interior, 12, false,
                          {dir.path.string(), false, 1e-10});
  for (std::size_t i = 0; i < power.rows.size(); ++i) {
    const int r = power.rows[i].r;
    if (r < 5) continue;
    CHECK(*power.rows[i].kappa_M > *bern.rows[i].kappa_M);
  }
  CHECK_THROWS_AS(run_cond1d(BasisKind1D::power_interior, 21, false,
                             {dir.path.string(), false, 1e-10}),
                  DegreeCapExceeded);
}

TEST_CASE("cond1d output is byte-identical across runs") {
  TempDir d1("exp_det1_tmp"), d2("exp_det2_tmp");
  auto r1 = run_cond1d(BasisKind1D::bernstein_interior, 9, false,
                       {d1.path.string(), false, 1e-10});
  auto r2 = run_cond1d(BasisKind1D::bernstein_interior, 9, false,
                       {d2.path.string(), false, 1e-10});
  CHECK(slurp(r1.csv_path) == slurp(r2.csv_path));
  CHECK(slurp(r1.svg_log_path) == slurp(r2.svg_log_path));
}

TEST_CASE("frame-cond on a single essential interval: K identically one") {
  TempDir dir("exp_fc_tmp");
  SimplicialMesh mesh = generate_mesh(MeshKind::interval, 1, -1.0, 1.0);
  // write it to JSON to exercise the file loader path
  const auto path = dir.path / "interval.json";
  {
    std::ofstream out(path);
    out << R"({"dim":1,"vertices":[[-1],[1]],"cells":[[0,1]]})";
  }
  auto res = run_frame_cond(path.string(), 9, BoundaryCondition::essential,
                            {dir.path.string(), false, 1e-10});
  for (const auto& row : res.rows)
    CHECK(*row.K_frame == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(res.plateau_ratio == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("frame-cond reports rank equal to the FE dimension") {
  TempDir dir("exp_fc2_tmp");
  auto res = run_frame_cond("gen:interval:3", 6, BoundaryCondition::natural,
                            {dir.path.string(), false, 1e-10});
  for (const auto& row : res.rows) {
    CHECK(*row.rank == 3 * row.r + 1);
    CHECK(*row.N == 4 * row.r + 3 * (row.r - 1));
  }
}

TEST_CASE("frame-cond in 3D: bounded K and the right rank") {
  TempDir dir("exp_fc3_tmp");
  auto res = run_frame_cond("gen:cube:1", 4, BoundaryCondition::natural,
                            {dir.path.string(), false, 1e-10});
  // Kuhn cube: 8 vertices, 19 edges, 18 faces, 6 cells
  const long long V = 8, E = 19, F = 18, T = 6;
  for (const auto& row : res.rows) {
    const long long r = row.r;
    const long long dim_pr =
        V + (r - 1) * E + (r - 1) * (r - 2) / 2 * F +
        (r - 1) * (r - 2) * (r - 3) / 6 * T;
    CHECK(*row.rank == dim_pr);
    CHECK(*row.K_frame > 1.0);
    CHECK(*row.K_frame < 100.0);
  }
}

TEST_CASE("dimension table flags the vertex and top-dimension mismatches") {
  auto t1 = run_dim_table(1, 5, 10, 9, 0, 0);
  CHECK(t1.frame_dim_definitional == 5 * 10 + 4 * 9);
  CHECK(t1.frame_dim_table == (2 * 5 - 1) * 10 - (5 - 1)); // published total
  CHECK(t1.rows[0].table_value + t1.rows[1].table_value ==
        6 * 10 + 4 * 9); // expanded per-entity sum differs from the total
  CHECK(t1.discrepancy);
  CHECK(!t1.rows[0].agree); // vertex term (r+1)V vs rV
  CHECK(t1.rows[1].agree);  // 1D element term matches

  auto t2 = run_dim_table(2, 4, 9, 16, 8, 0);
  CHECK(t2.rows[1].agree); // edge term r(r-1)/2 in both
  CHECK(!t2.rows[0].agree);
  CHECK(!t2.rows[2].agree); // face term differs from the local dimension
  CHECK(t2.frame_dim_definitional ==
        4 * 9 + oracles::binom(4, 2) * 16 + oracles::binom(3, 2) * 8);

  auto t3 = run_dim_table(3, 5, 8, 19, 18, 6);
  CHECK(t3.rows[2].agree);  // 3D face term C(r,3)
  CHECK(!t3.rows[3].agree); // cell term differs
  CHECK(t3.text.find("MISMATCH") != std::string::npos);
}

TEST_CASE("worker cap does not change the emitted bytes") {
  TempDir d1("exp_thr1_tmp"), d2("exp_thr2_tmp");
  setenv("FRAMEFEM_THREADS", "1", 1);
  auto r1 = run_frame_cond("gen:interval:3", 8, BoundaryCondition::natural,
                           {d1.path.string(), false, 1e-10});
  setenv("FRAMEFEM_THREADS", "3", 1);
  auto r2 = run_frame_cond("gen:interval:3", 8, BoundaryCondition::natural,
                           {d2.path.string(), false, 1e-10});
  unsetenv("FRAMEFEM_THREADS");
  CHECK(slurp(r1.csv_path) == slurp(r2.csv_path));
}

TEST_CASE("solve run produces a convergent report") {
  TempDir dir("exp_solve_tmp");
  auto res = run_solve("gen:interval:4", 6, PrecondKind::schwarz, 1e-10,
                       {dir.path.string(), false, 1e-10});
  CHECK(res.l2_error < 1e-6);
  CHECK(res.iterations >= 1);
  CHECK(res.kappa_precond < 50.0);
  CHECK(std::filesystem::exists(res.csv_path));
  // residual monotonicity holds on the preconditioned acceptance runs
  for (std::size_t i = 1; i < res.residual_norms.size(); ++i)
    CHECK(res.residual_norms[i] <=
          res.residual_norms[i - 1] * (1.0 + 1e-8));
}
