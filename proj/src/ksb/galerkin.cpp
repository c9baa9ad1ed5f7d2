#include "ksb/galerkin.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ksb {

void TruncationParams::validate() const {
  if (n_modes < 1) throw std::invalid_argument("mode count must be positive");
  if (!(domain > 0.0)) throw std::invalid_argument("domain parameter L must be positive");
}

double ks_eigenvalue(int n, double domain) {
  double k = n / domain;
  double k2 = k * k;
  return k2 * (1.0 - k2);
}

KsSystem build_system(const TruncationParams& params) {
  params.validate();
  const int n = params.n_modes;
  const double l = params.domain;
  const double inv_sqrt_pil = 1.0 / std::sqrt(std::numbers::pi * l);

  KsSystem sys;
  sys.params = params;
  sys.eigenvalues.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 1; k <= n + 1; ++k) sys.eigenvalues.push_back(ks_eigenvalue(k, l));

  sys.rhs.reserve(static_cast<std::size_t>(n));
  for (int mode = 1; mode <= n; ++mode) {
    Polynomial f(n);
    f.add_term(Monomial::variable(mode - 1), sys.lambda(mode));
    const double cn = inv_sqrt_pil * mode / l;
    for (int m = 1; m <= n - mode; ++m)
      f.add_term(Monomial::variable(m - 1) * Monomial::variable(m + mode - 1), 0.5 * cn);
    for (int m = 1; m <= mode - 1; ++m)
      f.add_term(Monomial::variable(m - 1) * Monomial::variable(mode - m - 1), -0.25 * cn);
    sys.rhs.push_back(std::move(f));
  }
  return sys;
}

Polynomial energy_poly(const TruncationParams& params) {
  params.validate();
  Polynomial e(params.n_modes);
  const double scale = 1.0 / (2.0 * std::numbers::pi * params.domain);
  for (int i = 0; i < params.n_modes; ++i)
    e.add_term(Monomial::variable(i, 2), scale);
  return e;
}

Eigen::VectorXd eval_rhs(const KsSystem& sys, const Eigen::VectorXd& a) {
  const int n = sys.params.n_modes;
  if (a.size() != n) throw std::invalid_argument("state vector has wrong length");
  const double l = sys.params.domain;
  const double inv_sqrt_pil = 1.0 / std::sqrt(std::numbers::pi * l);

  Eigen::VectorXd f(n);
  for (int mode = 1; mode <= n; ++mode) {
    double conv = 0.0;
    for (int m = 1; m <= n - mode; ++m) conv += 0.5 * a[m - 1] * a[m + mode - 1];
    for (int m = 1; m <= mode - 1; ++m) conv -= 0.25 * a[m - 1] * a[mode - m - 1];
    f[mode - 1] = sys.lambda(mode) * a[mode - 1] + inv_sqrt_pil * (mode / l) * conv;
  }
  return f;
}

Eigen::MatrixXd jacobian(const KsSystem& sys, const Eigen::VectorXd& a) {
  const int n = sys.params.n_modes;
  if (a.size() != n) throw std::invalid_argument("state vector has wrong length");
  const double l = sys.params.domain;
  const double inv_sqrt_pil = 1.0 / std::sqrt(std::numbers::pi * l);

  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int mode = 1; mode <= n; ++mode) {
    const double cn = inv_sqrt_pil * mode / l;
    j(mode - 1, mode - 1) += sys.lambda(mode);
    for (int k = 1; k <= n; ++k) {
      double d = 0.0;
      if (k + mode <= n) d += 0.5 * a[k + mode - 1];
      if (k - mode >= 1) d += 0.5 * a[k - mode - 1];
      if (mode - k >= 1) d -= 0.5 * a[mode - k - 1];
      j(mode - 1, k - 1) += cn * d;
    }
  }
  return j;
}

}  // namespace ksb
