#include <cmath>
#include <random>

#include "doctest.h"
#include "ksb/galerkin.hpp"

using namespace ksb;

TEST_CASE("linear eigenvalues") {
  CHECK(ks_eigenvalue(1, 1.0) == doctest::Approx(0.0));
  CHECK(ks_eigenvalue(2, 2.0) == doctest::Approx(0.0));
  CHECK(ks_eigenvalue(1, 2.0) == doctest::Approx(0.25 - 0.0625));
  // growth for n < L, decay for n > L
  CHECK(ks_eigenvalue(2, 3.0) > 0.0);
  CHECK(ks_eigenvalue(4, 3.0) < 0.0);
}

TEST_CASE("system carries one extra eigenvalue for the tail estimate") {
  KsSystem sys = build_system({5, 2.5});
  REQUIRE(sys.eigenvalues.size() == 6);
  CHECK(sys.lambda(6) == doctest::Approx(ks_eigenvalue(6, 2.5)));
  REQUIRE(sys.rhs.size() == 5);
  for (const auto& f : sys.rhs) CHECK(f.degree() <= 2);
}

TEST_CASE("symbolic right-hand side matches direct convolution") {
  KsSystem sys = build_system({6, 3.5});
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd a(6);
    for (int i = 0; i < 6; ++i) a[i] = unif(rng);
    Eigen::VectorXd fa = eval_rhs(sys, a);
    std::vector<double> av(a.data(), a.data() + a.size());
    for (int n = 0; n < 6; ++n)
      CHECK(sys.rhs[n].evaluate(av) == doctest::Approx(fa[n]).epsilon(1e-12));
  }
}

TEST_CASE("low-mode right-hand side against a hand expansion") {
  // N = 2: f_1 = lambda_1 a1 + (1/(2 sqrt(pi L) L)) a1 a2,
  //        f_2 = lambda_2 a2 - (1/(2 sqrt(pi L) L)) a1^2.
  const double L = 2.0;
  KsSystem sys = build_system({2, L});
  const double k = 1.0 / (2.0 * std::sqrt(M_PI * L) * L);
  Eigen::VectorXd a(2);
  a << 0.7, -1.3;
  Eigen::VectorXd fa = eval_rhs(sys, a);
  CHECK(fa[0] == doctest::Approx(ks_eigenvalue(1, L) * a[0] + k * a[0] * a[1]));
  CHECK(fa[1] ==
        doctest::Approx(ks_eigenvalue(2, L) * a[1] - k * a[0] * a[0]));
}

TEST_CASE("quadratic term conserves energy") {
  // The nonlinearity is energy-neutral: sum_n a_n f_n = sum_n lambda_n a_n^2.
  KsSystem sys = build_system({8, 4.2});
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> unif(-1.5, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd a(8);
    for (int i = 0; i < 8; ++i) a[i] = unif(rng);
    Eigen::VectorXd fa = eval_rhs(sys, a);
    double lhs = a.dot(fa);
    double rhs = 0.0;
    for (int n = 1; n <= 8; ++n) rhs += sys.lambda(n) * a[n - 1] * a[n - 1];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("vector field is equivariant under the sign symmetry") {
  // f_n(sigma a) = (-1)^n f_n(a) with sigma a_n = (-1)^n a_n.
  KsSystem sys = build_system({6, 3.0});
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd a(6), sa(6);
  for (int i = 0; i < 6; ++i) {
    a[i] = unif(rng);
    sa[i] = ((i + 1) % 2 == 0 ? 1.0 : -1.0) * a[i];
  }
  Eigen::VectorXd fa = eval_rhs(sys, a);
  Eigen::VectorXd fsa = eval_rhs(sys, sa);
  for (int i = 0; i < 6; ++i) {
    double sign = ((i + 1) % 2 == 0) ? 1.0 : -1.0;
    CHECK(fsa[i] == doctest::Approx(sign * fa[i]).epsilon(1e-12));
  }
}

TEST_CASE("energy polynomial") {
  TruncationParams params{4, 1.7};
  Polynomial e = energy_poly(params);
  Eigen::VectorXd a(4);
  a << 1.0, -0.5, 2.0, 0.25;
  std::vector<double> av(a.data(), a.data() + a.size());
  CHECK(e.evaluate(av) ==
        doctest::Approx(a.squaredNorm() / (2.0 * M_PI * 1.7)));
}

TEST_CASE("jacobian matches finite differences") {
  KsSystem sys = build_system({5, 2.2});
  Eigen::VectorXd a(5);
  a << 0.3, -0.8, 1.1, 0.05, -0.4;
  Eigen::MatrixXd j = jacobian(sys, a);
  const double h = 1e-6;
  for (int col = 0; col < 5; ++col) {
    Eigen::VectorXd ap = a, am = a;
    ap[col] += h;
    am[col] -= h;
    Eigen::VectorXd fd = (eval_rhs(sys, ap) - eval_rhs(sys, am)) / (2 * h);
    for (int row = 0; row < 5; ++row)
      CHECK(j(row, col) == doctest::Approx(fd[row]).epsilon(1e-6));
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS(build_system({0, 1.0}));
  CHECK_THROWS(build_system({4, -1.0}));
}
