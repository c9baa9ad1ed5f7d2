#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "ksb/galerkin.hpp"

namespace ksb {

/// Thrown when a trajectory exceeds the blow-up threshold ||a|| > 1e6;
/// expected for truncations with N < 2L - 2.
struct BlowUpError : std::runtime_error {
  double time;
  explicit BlowUpError(double t)
      : std::runtime_error("trajectory blow-up detected"), time(t) {}
};

struct IntegrationOptions {
  double dt = 0.0;        // <= 0 selects the default 0.01 * min(1, L^2/N^2)
  int state_stride = 0;   // record the state every k-th step; 0 keeps only the last
};

/// Fixed-step trajectory record: energy is sampled every step, states only
/// at the requested stride (plus the final state).
struct Trajectory {
  std::vector<double> times;     // one entry per step, strictly increasing
  std::vector<double> energy;    // mean energy |a|^2 / (2 pi L) at `times`
  std::vector<Eigen::VectorXd> states;  // strided snapshots (may be empty)
  Eigen::VectorXd final_state;
  double dt = 0.0;
  bool blew_up = false;
  double blow_up_time = 0.0;
};

/// Default step size 0.01 * min(1, L^2/N^2) resolving the fastest decaying
/// mode of the linear part.
double default_time_step(double domain, int n_modes);

/// Integrate the truncated system from a0 to time t_final with a fixed-step
/// fourth-order exponential integrator (the diagonal linear part is treated
/// exactly, the quadratic part with fourth-order accuracy). On blow-up the
/// trajectory is returned truncated with blew_up set.
Trajectory integrate(const Eigen::VectorXd& a0, double domain, int n_modes,
                     double t_final, const IntegrationOptions& opts = {});

struct EnergyStats {
  double mean = 0.0;
  double stderr_mean = 0.0;  // standard error estimated from 10 batch means
  double t_total = 0.0;
  double t_transient = 0.0;
};

/// Time average of the mean energy over [t_transient, t_total]; t_transient
/// <= 0 selects the default 20% of t_total. Throws BlowUpError if the
/// trajectory blows up.
EnergyStats empirical_mean_energy(const Eigen::VectorXd& a0, double domain,
                                  int n_modes, double t_total,
                                  double t_transient = -1.0,
                                  const IntegrationOptions& opts = {});

/// Deterministic pseudo-random initial condition with O(1) energy spread
/// over the low modes; `seed` selects the realization.
Eigen::VectorXd random_initial_state(int n_modes, double domain, unsigned seed);

}  // namespace ksb
