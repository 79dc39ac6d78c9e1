#pragma once

#include <optional>
#include <string>
#include <vector>

#include "framefem/frame.hpp"
#include "framefem/mesh.hpp"
#include "framefem/solver.hpp"

namespace framefem {

struct RunOptions {
  std::string out_dir = ".";
  bool dump_matrix = false;
  double rank_tol = 1e-10;
};

/// One CSV row.  Schema is fixed across all experiments:
///   r,kappa_M,kappa_A,kappa_genAM,K_frame,N,rank,iters
/// with empty fields where a column does not apply.
struct ResultRow {
  int r = 0;
  std::optional<double> kappa_M, kappa_A, kappa_genAM, K_frame;
  std::optional<long long> N, rank, iters;
};

std::string csv_header();
std::string csv_line(const ResultRow& row);
void write_csv(const std::string& path, const std::vector<ResultRow>& rows);

/// Mesh specification: "gen:interval:n" (unit interval), "gen:square:n",
/// "gen:cube:n", "gen:simplex:d", or a path to a mesh JSON file.
SimplicialMesh mesh_from_spec(const std::string& spec);

struct Cond1DResult {
  std::vector<ResultRow> rows;
  std::vector<std::string> notes;
  std::string csv_path, svg_log_path, svg_ratio_path;
};

/// Condition numbers of mass and stiffness matrices for the three
/// single-interval bases, r = 2..rmax, with the log10 plot and the
/// log(kappa)/log(r) growth-exponent plot.  no_bc keeps the Bernstein
/// boundary members (mass study only).
Cond1DResult run_cond1d(BasisKind1D basis, int rmax, bool no_bc,
                        const RunOptions& opt);

struct FrameCondResult {
  std::vector<ResultRow> rows;
  double plateau_max = 0.0, plateau_min = 0.0, plateau_ratio = 0.0;
  double k_at_rmax = 0.0, k_at_median = 0.0;
  std::string csv_path, svg_path;
};

/// Frame condition number K(Phi) over r = 2..rmax with plateau statistics
/// over the top half of the degree range.
FrameCondResult run_frame_cond(const std::string& mesh_spec, int rmax,
                               BoundaryCondition bc, const RunOptions& opt);

struct DimTableRow {
  std::string entity;
  long long count = 0;
  long long definitional = 0;
  long long table_value = 0;
  bool agree = false;
};

struct DimTableResult {
  int d = 0, r = 0;
  long long basis_dim_definitional = 0;
  long long basis_dim_table = 0;
  long long frame_dim_definitional = 0;
  long long frame_dim_table = 0;
  std::vector<DimTableRow> rows; // per-entity frame terms
  bool discrepancy = false;
  std::string text;
};

/// Dimension bookkeeping: definitional frame counts (sum of local block
/// dimensions) next to the published table formulas, flagging the entries
/// that disagree instead of reconciling them.
DimTableResult run_dim_table(int d, int r, long long V, long long E,
                             long long F, long long T);

enum class PrecondKind { none, schwarz };

struct SolveRunResult {
  ResultRow row;
  int iterations = 0;
  std::vector<double> residual_norms;
  double l2_error = 0.0;
  double kappa_precond = 0.0; // restricted kappa(B A)
  std::string csv_path;
};

/// Manufactured-solution Poisson solve (essential BC) on a unit-domain mesh:
/// u = prod_i sin(pi x_i), f = d pi^2 u.  Reports iterations, the L2 error
/// against the manufactured solution and the condition number of the
/// preconditioned operator restricted to the complement of the kernel.
SolveRunResult run_solve(const std::string& mesh_spec, int r,
                         PrecondKind precond, double tol,
                         const RunOptions& opt);

} // namespace framefem
