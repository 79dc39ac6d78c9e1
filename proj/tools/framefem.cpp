#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "framefem/errors.hpp"
#include "framefem/experiments.hpp"

namespace {

using namespace framefem;

int dispatch(CLI::App& app, int argc, char** argv) {
  std::string out_dir = ".";
  bool dump_matrix = false;
  double rank_tol = 1e-10;
  app.add_option("--out", out_dir, "output directory for CSV/SVG files");
  app.add_flag("--dump-matrix", dump_matrix, "write assembled matrices");
  app.add_option("--rank-tol", rank_tol,
                 "relative eigenvalue threshold separating the redundancy "
                 "nullspace from the positive spectrum");

  auto* cond1d = app.add_subcommand(
      "cond1d", "mass/stiffness conditioning of the single-interval bases");
  cond1d->fallthrough();
  std::string basis = "jacobi";
  int rmax_cond = 20;
  bool no_bc = false;
  cond1d->add_option("--basis", basis, "jacobi | bernstein | power")->required();
  cond1d->add_option("--rmax", rmax_cond, "largest polynomial degree")->required();
  cond1d->add_flag("--no-bc", no_bc, "keep Bernstein boundary members");

  auto* framecond = app.add_subcommand(
      "frame-cond", "frame condition number K over a degree range");
  framecond->fallthrough();
  std::string mesh_spec_fc = "gen:interval:4";
  int rmax_fc = 10;
  std::string bc = "natural";
  framecond->add_option("--mesh", mesh_spec_fc, "gen:kind:n or mesh JSON path")
      ->required();
  framecond->add_option("--rmax", rmax_fc, "largest polynomial degree")->required();
  framecond->add_option("--bc", bc, "natural | essential");

  auto* dimtable = app.add_subcommand(
      "dim-table", "frame dimension bookkeeping against the published table");
  dimtable->fallthrough();
  int dt_dim = 1, dt_r = 4;
  std::string counts = "2,1,0,0";
  dimtable->add_option("--dim", dt_dim, "space dimension")->required();
  dimtable->add_option("--r", dt_r, "polynomial degree")->required();
  dimtable->add_option("--counts", counts, "V,E,F,T entity counts")->required();

  auto* solve = app.add_subcommand(
      "solve", "manufactured-solution Poisson solve in the frame");
  solve->fallthrough();
  std::string mesh_spec_sv = "gen:interval:4";
  int sv_r = 4;
  std::string precond = "schwarz";
  double tol = 1e-10;
  solve->add_option("--mesh", mesh_spec_sv, "gen:kind:n or mesh JSON path")
      ->required();
  solve->add_option("--r", sv_r, "polynomial degree")->required();
  solve->add_option("--precond", precond, "none | schwarz");
  solve->add_option("--tol", tol, "relative B-residual tolerance");

  app.require_subcommand(1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  RunOptions opt{out_dir, dump_matrix, rank_tol};
  if (!std::filesystem::exists(out_dir))
    std::filesystem::create_directories(out_dir);

  if (cond1d->parsed()) {
    BasisKind1D kind;
    if (basis == "jacobi") kind = BasisKind1D::jacobi_bubble;
    else if (basis == "bernstein") kind = BasisKind1D::bernstein_interior;
    else if (basis == "power") kind = BasisKind1D::power_interior;
    else throw UsageError("unknown basis: " + basis);
    Cond1DResult res = run_cond1d(kind, rmax_cond, no_bc, opt);
    std::cout << "wrote " << res.csv_path << "\n";
    std::cout << "wrote " << res.svg_log_path << "\n";
    std::cout << "wrote " << res.svg_ratio_path << "\n";
    for (const auto& note : res.notes) std::cout << "note: " << note << "\n";
    return 0;
  }
  if (framecond->parsed()) {
    BoundaryCondition bcv;
    if (bc == "natural") bcv = BoundaryCondition::natural;
    else if (bc == "essential") bcv = BoundaryCondition::essential;
    else throw UsageError("unknown bc: " + bc);
    FrameCondResult res = run_frame_cond(mesh_spec_fc, rmax_fc, bcv, opt);
    std::printf("plateau over top half: max %.6g, min %.6g, ratio %.6g\n",
                res.plateau_max, res.plateau_min, res.plateau_ratio);
    std::printf("K at rmax %.6g, at median r %.6g\n", res.k_at_rmax,
                res.k_at_median);
    std::cout << "wrote " << res.csv_path << "\n";
    std::cout << "wrote " << res.svg_path << "\n";
    return 0;
  }
  if (dimtable->parsed()) {
    long long v = 0, e = 0, f = 0, t = 0;
    if (std::sscanf(counts.c_str(), "%lld,%lld,%lld,%lld", &v, &e, &f, &t) < 2)
      throw UsageError("dim-table: --counts expects V,E,F,T");
    DimTableResult res = run_dim_table(dt_dim, dt_r, v, e, f, t);
    std::cout << res.text;
    return 0;
  }
  if (solve->parsed()) {
    PrecondKind pk;
    if (precond == "none") pk = PrecondKind::none;
    else if (precond == "schwarz") pk = PrecondKind::schwarz;
    else throw UsageError("unknown preconditioner: " + precond);
    SolveRunResult res = run_solve(mesh_spec_sv, sv_r, pk, tol, opt);
    std::printf("iterations %d, L2 error %.6g, restricted kappa(BA) %.6g\n",
                res.iterations, res.l2_error, res.kappa_precond);
    std::cout << "wrote " << res.csv_path << "\n";
    return 0;
  }
  return 2;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"high-order finite element frames: conditioning experiments"};
  try {
    return dispatch(app, argc, argv);
  } catch (const framefem::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const framefem::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
