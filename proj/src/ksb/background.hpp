#pragma once

#include <Eigen/Dense>
#include <string>

namespace ksb {

/// Background-method representation of a quadratic auxiliary functional:
/// V(a) = (alpha / 4 pi L) |a|^2 - (alpha / 2 pi L) sum_n a_n z_n with
/// zeta(x) = (pi L)^{-1/2} sum_n z_n sin(n x / L).
struct BackgroundProfile {
  double alpha = 0.0;
  Eigen::VectorXd z;  // z_1 .. z_N
  double domain = 0.0;
  int n_modes = 0;
};

/// Invert V(a) = c |a|^2 + sum_n linear_n a_n into (alpha, zeta):
/// alpha = 4 pi L c and z_n = -linear_n / (2 c). Throws if c == 0. The
/// optimal quadratic V carry only even-index linear terms, so recovered
/// profiles have vanishing odd z and fundamental period pi L.
BackgroundProfile recover_background(double c, const Eigen::VectorXd& linear,
                                     double domain);

/// Linear coefficients of the V that re-expands the profile; inverse of
/// recover_background (exact algebra). The quadratic coefficient is
/// alpha / (4 pi L).
Eigen::VectorXd background_to_linear(const BackgroundProfile& profile);

/// Pointwise sine synthesis zeta(x) = (pi L)^{-1/2} sum z_n sin(n x / L).
double sample_zeta(const BackgroundProfile& profile, double x);
Eigen::VectorXd sample_zeta(const BackgroundProfile& profile,
                            const Eigen::VectorXd& x);

/// d zeta / dx at x.
double sample_zeta_derivative(const BackgroundProfile& profile, double x);

/// Least-squares slope of zeta on the interior of one fundamental period
/// (pi L for recovered profiles). The steepest point of |zeta'| locates the
/// boundary layer; 15% of the half-period is excluded at each end of the
/// interior segment before fitting.
double fit_interior_slope(const BackgroundProfile& profile, int samples = 4096);

/// CSV `x,zeta` over [-pi L, pi L] for plotting.
void write_profile_csv(const BackgroundProfile& profile, const std::string& path,
                       int samples = 1024);

/// JSON document with alpha, L, N and the z coefficients.
void write_profile_json(const BackgroundProfile& profile, const std::string& path);

}  // namespace ksb
