#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ksb/polynomial.hpp"

namespace ksb {

struct TruncationParams {
  int n_modes = 0;  // N
  double domain = 0.0;  // L; spatial period is 2*pi*L

  void validate() const;
};

/// N-mode sine-basis truncation of the KSE. rhs[n-1] holds f_n as a
/// polynomial in a_1..a_N; eigenvalues run through index N+1 because the
/// tail estimate of the full-PDE program needs lambda_{N+1}.
struct KsSystem {
  TruncationParams params;
  std::vector<Polynomial> rhs;
  std::vector<double> eigenvalues;  // lambda_1 .. lambda_{N+1}

  double lambda(int n) const { return eigenvalues.at(static_cast<std::size_t>(n) - 1); }
};

/// lambda_n = (n/L)^2 - (n/L)^4.
double ks_eigenvalue(int n, double domain);

KsSystem build_system(const TruncationParams& params);

/// Truncated mean energy (1/(2 pi L)) * |a|^2 as a polynomial.
Polynomial energy_poly(const TruncationParams& params);

/// f(a) evaluated numerically by direct convolution; agrees with the
/// symbolic rhs to roundoff.
Eigen::VectorXd eval_rhs(const KsSystem& system, const Eigen::VectorXd& a);

Eigen::MatrixXd jacobian(const KsSystem& system, const Eigen::VectorXd& a);

}  // namespace ksb
