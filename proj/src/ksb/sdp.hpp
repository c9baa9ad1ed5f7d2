#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <string>
#include <vector>

namespace ksb {

enum class BlockKind { Psd, Diag, Free };

struct SdpBlock {
  BlockKind kind = BlockKind::Psd;
  int dim = 0;  // matrix dimension for Psd, vector length for Diag/Free

  int vec_size() const { return kind == BlockKind::Psd ? dim * (dim + 1) / 2 : dim; }
};

/// Block-diagonal SDP in standard conic form
///
///   min  <c, x>   s.t.   A x = b,   x in K,
///
/// where K is the product of the blocks: PSD cones (stored in scaled-upper-
/// triangle svec coordinates, off-diagonal entries multiplied by sqrt(2)),
/// nonnegative diagonal blocks, and unconstrained scalar blocks.
struct SdpProblem {
  std::vector<SdpBlock> blocks;
  Eigen::SparseMatrix<double, Eigen::RowMajor> a;  // m x vec_dim
  Eigen::VectorXd b;
  Eigen::VectorXd c;  // objective, vec_dim

  int vec_dim() const;
  int block_offset(int index) const;

  // svec index of entry (i, j), i <= j, within a Psd block of dimension dim.
  static int tri_index(int i, int j) { return j * (j + 1) / 2 + i; }
};

struct SolverSettings {
  double eps_primal = 1e-8;
  double eps_dual = 1e-8;
  double eps_gap = 1e-8;
  long max_iters = 5'000'000;
  double time_limit = 0.0;  // wall-clock seconds; <= 0 disables
  bool scaling = true;
  double relaxation = 1.5;
  long check_interval = 25;
  long stall_window = 100'000;
  double stall_ratio = 1e-2;
  int acceleration_memory = 10;   // Anderson extrapolation history (<=1 disables)
  int acceleration_interval = 10;  // iterations between extrapolation attempts

  void validate() const;
};

enum class SolveStatus { Optimal, Inaccurate, Infeasible, Unbounded, IterationLimit };

const char* to_string(SolveStatus status);

struct SdpSolution {
  SolveStatus status = SolveStatus::IterationLimit;
  Eigen::VectorXd x;  // conic-feasible point, svec coordinates
  Eigen::VectorXd y;  // equality multipliers
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double primal_res = 0.0;
  double dual_res = 0.0;
  double gap = 0.0;
  long iterations = 0;
  double seconds = 0.0;

  bool usable() const {
    return status == SolveStatus::Optimal || status == SolveStatus::Inaccurate;
  }
};

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped).
/// Throws if M deviates from symmetry by more than 1e-10.
Eigen::MatrixXd psd_project(const Eigen::MatrixXd& m);

/// First-order operator-splitting solve of the problem together with its
/// dual via the homogeneous self-dual embedding: each iteration is one
/// linear solve against a cached factorization plus one projection onto the
/// cone, with over-relaxation and safeguarded Anderson extrapolation.
/// Infeasible and unbounded problems are detected through certificates of
/// the embedding.
SdpSolution solve(const SdpProblem& problem, const SolverSettings& settings);

/// Extract block `index` of an svec-coordinate point as a dense symmetric
/// matrix (Psd) or a diagonal matrix view of the entries (Diag/Free).
Eigen::MatrixXd unpack_block(const SdpProblem& problem, const Eigen::VectorXd& x,
                             int index);

/// Exchange the roles of the conic point and the equality multipliers:
/// the returned problem has variables (s, nu) with s mirroring the cone
/// blocks of `problem` and nu free, constraints s + A^T nu = c on cone
/// coordinates / A^T nu = c on free coordinates, and objective -<b, nu>.
/// Its optimal value is the negative of the original optimal value, and
/// splitting iterations often behave very differently on the two forms.
SdpProblem dualize(const SdpProblem& problem);

/// Map a solution of dualize(problem) back to the original problem
/// (conic point from the multipliers, multipliers from the nu segment,
/// objective values and residual fields recomputed on the original data).
SdpSolution undualize(const SdpProblem& problem, const SdpSolution& dual_sol);

/// Sparse SDPA ".dat-s" text. Free blocks are emitted as nonnegative
/// diagonal blocks of doubled size via the x = x+ - x- split.
void export_sdpa(const SdpProblem& problem, std::ostream& os);
void export_sdpa(const SdpProblem& problem, const std::string& path);

}  // namespace ksb
