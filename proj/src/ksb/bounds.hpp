#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ksb/sos.hpp"

namespace ksb {

enum class BoundKind { Truncated, Pde };

const char* to_string(BoundKind kind);

/// Result of the certificate clean-up and verification pass: the Gram
/// blocks are re-projected so that the reconstructed constraint polynomials
/// match the assembled coefficients to `residual` with PSD blocks of
/// minimum eigenvalue `min_eigenvalue`, and the constraint polynomials are
/// sampled at random points (`sample_min` is the worst value seen,
/// normalized by 1 + |B|).
struct CertificateReport {
  bool certified = false;
  double residual = 0.0;        // max |reconstructed - assembled| coefficient
  double min_eigenvalue = 0.0;  // over all Gram blocks
  double sample_min = 0.0;      // min S(a) / (1 + |B|) over random points
  double bound_adjustment = 0.0;  // added to B to restore strict feasibility
};

struct BoundResult {
  double domain = 0.0;
  int n_modes = 0;
  int degree = 0;  // 2d
  BoundKind kind = BoundKind::Truncated;
  double bound = 0.0;
  SolveStatus status = SolveStatus::IterationLimit;
  double primal_res = 0.0;
  double dual_res = 0.0;
  long iterations = 0;
  double seconds = 0.0;
  std::vector<double> coeffs;  // decision values, indexed by DecisionVar::id
  CertificateReport certificate;

  bool usable() const {
    return status == SolveStatus::Optimal || status == SolveStatus::Inaccurate;
  }
  /// V's |a|^{2d} coefficient and per-mode linear coefficients (quadratic V
  /// only), for background recovery.
  double leading_coeff(const SosProgram& prog) const;
};

struct BoundOptions {
  SolverSettings solver;
  bool auto_eps = true;      // 1e-8 when total PSD dimension <= 300, else 1e-6
  bool polish = true;        // Dykstra certificate clean-up after the solve
  bool use_symmetry = true;  // parity block-diagonalization (truncated only)
  unsigned sample_seed = 20240817;
  int sample_points = 10000;
};

/// V's per-mode linear coefficients (for background recovery from a
/// quadratic bound result).
Eigen::VectorXd linear_coeffs(const SosProgram& prog,
                              const std::vector<double>& y);

/// Solve the degree-2d truncated-system bound program at (N, L).
BoundResult bound_truncated(int n_modes, double domain, int degree2d,
                            const BoundOptions& opts = {});

/// Solve the degree-2d full-PDE bound program at (N, L); requires N > L.
BoundResult bound_pde(int n_modes, double domain, int degree2d,
                      const BoundOptions& opts = {});

/// Rebuild the program matching a result (for certificate inspection or
/// background recovery).
SosProgram rebuild_program(const BoundResult& result, bool use_symmetry = true);

/// Verify a (program, decision values, Gram blocks) triple: coefficient
/// match, PSD blocks, and random-point sampling of every constraint.
CertificateReport verify_certificate(const SosProgram& prog,
                                     const SdpProblem& sdp,
                                     const Eigen::VectorXd& x,
                                     unsigned sample_seed = 20240817,
                                     int sample_points = 10000);

struct ConvergenceStudy {
  std::vector<BoundResult> results;
  bool converged = false;
  int n_converged = 0;     // first N of the confirmed plateau
  double bound = 0.0;      // bound at the largest solved N
};

/// Increase N one step at a time until the bound changes by at most
/// plateau_tol * (1 + |B|) for two consecutive steps.
ConvergenceStudy converge_in_N(double domain, int degree2d, BoundKind kind,
                               int n_start, int n_max, double plateau_tol = 1e-4,
                               const BoundOptions& opts = {});

struct SweepRow {
  double domain = 0.0;
  int n_modes = 0;
  int degree = 0;
  BoundKind kind = BoundKind::Truncated;
  double bound = 0.0;
  SolveStatus status = SolveStatus::IterationLimit;
  double primal_res = 0.0;
  double dual_res = 0.0;
  long iterations = 0;
  double seconds = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;  // sorted by L
};

/// Append one row to the sweep CSV
/// `L,N,degree,kind,bound,status,primal_res,dual_res,iters,seconds`,
/// writing the header when the file does not exist yet.
void append_sweep_csv(const SweepRow& row, const std::string& path);
SweepTable read_sweep_csv(const std::string& path);

/// Mode count for domain size L from the N >= 3n heuristic, where n is the
/// branch index maximizing the primary-equilibrium energy envelope
/// (n <= ceil(L / 1.1947) + 1).
int sweep_mode_count(double domain);

/// One converged bound per grid point; rows are appended to csv_path (if
/// nonempty) as they complete, and grid points already present in the file
/// are skipped so interrupted sweeps resume. Per-row failures are recorded
/// with their status and the sweep continues. `workers` rows run
/// concurrently.
SweepTable sweep_L(const std::vector<double>& grid, int degree2d, BoundKind kind,
                   const std::string& csv_path = "", int workers = 1,
                   int n_max = 128, const BoundOptions& opts = {});

/// Sliding-window power-law fit: least-squares slope of log B against log L
/// over |log L' - log L| <= window, per row with >= 3 points in range.
std::vector<std::pair<double, double>> local_exponent(const SweepTable& table,
                                                      double window);

}  // namespace ksb
