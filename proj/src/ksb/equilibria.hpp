#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "ksb/galerkin.hpp"

namespace ksb {

/// A steady state of the truncated system.
struct Equilibrium {
  Eigen::VectorXd a;
  double domain = 0.0;
  int n_modes = 0;
  double energy = 0.0;    // |a|^2 / (2 pi L)
  double residual = 0.0;  // ||f(a)||
};

struct BranchSample {
  double domain = 0.0;
  double energy = 0.0;
  int n_modes = 0;
  double residual = 0.0;
};

/// Samples of (L, energy) along one primary branch, sorted in L.
struct BranchCurve {
  int branch = 1;
  std::vector<BranchSample> samples;
};

/// Damped Newton iteration on f(a) = 0 from the initial guess a0.
/// Converges to residual <= 1e-11 * (1 + ||a||); throws std::runtime_error
/// on non-convergence or a singular Jacobian.
Equilibrium newton_equilibrium(const Eigen::VectorXd& a0, double domain,
                               int n_modes);

/// Natural-parameter continuation of the branch bifurcating from zero in
/// mode `branch` (onset at L = branch), from max(l_min, branch + 1e-3) to
/// l_max with the given initial step; the step halves on Newton failure.
BranchCurve continue_branch(int branch, double l_min, double l_max, int n_modes,
                            double step = 0.05);

/// Mean energy of the n-th primary equilibrium at domain size L, computed
/// as the E_1 energy at L/n on a floor(N/n)-mode system (E_n occupies every
/// n-th mode). Returns 0 for L/n <= 1 and when the unimodal branch
/// terminates before L/n (it ends shortly past L = 2). If under_resolved
/// is non-null it is set when floor(N/n) < 4.
double primary_branch_energy(int branch, double domain, int n_modes,
                             bool* under_resolved = nullptr);

/// The E_n state of the N-mode system at domain L built from the E_1 state
/// `base` of the floor(N/n)-mode system at domain L/n: a_{kn} = sqrt(n) b_k.
Equilibrium rescale_equilibrium(int branch, const Equilibrium& base,
                                double domain, int n_modes);

/// argmax and max of the primary-branch energies over 1 <= n <= ceil(L)+1.
std::pair<int, double> envelope_max_energy(double domain, int n_modes);

}  // namespace ksb
