#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ksb/polynomial.hpp"

using namespace ksb;

namespace {

long binomial(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("monomial construction and products") {
  Monomial one;
  CHECK(one.is_constant());
  CHECK(one.degree() == 0);

  Monomial a1 = Monomial::variable(0);
  Monomial a2sq = Monomial::variable(1, 2);
  Monomial prod = a1 * a2sq;
  CHECK(prod.degree() == 3);
  CHECK(prod.exponent(0) == 1);
  CHECK(prod.exponent(1) == 2);
  CHECK(prod.exponent(2) == 0);
  CHECK(prod.max_var() == 1);
  CHECK((a1 * one) == a1);
  CHECK((a1 * a1).exponent(0) == 2);
}

TEST_CASE("monomial derivative applies the power rule") {
  Monomial m = Monomial::variable(0, 3) * Monomial::variable(2, 1);
  int coeff = 0;
  Monomial d = m.derivative(0, &coeff);
  CHECK(coeff == 3);
  CHECK(d.exponent(0) == 2);
  CHECK(d.exponent(2) == 1);

  d = m.derivative(1, &coeff);
  CHECK(coeff == 0);

  d = m.derivative(2, &coeff);
  CHECK(coeff == 1);
  CHECK(d.exponent(2) == 0);
  CHECK(d.exponent(0) == 3);
}

TEST_CASE("monomial evaluation") {
  Monomial m = Monomial::variable(0, 2) * Monomial::variable(1);
  std::array<double, 2> x = {3.0, -2.0};
  CHECK(m.evaluate(x) == doctest::Approx(-18.0));
}

TEST_CASE("graded lexicographic order") {
  // 1 < a1 < a2 < a1^2 < a1 a2 < a2^2
  std::vector<Monomial> expect = {
      Monomial{},
      Monomial::variable(0),
      Monomial::variable(1),
      Monomial::variable(0, 2),
      Monomial::variable(0) * Monomial::variable(1),
      Monomial::variable(1, 2),
  };
  GrlexLess less;
  for (std::size_t i = 0; i + 1 < expect.size(); ++i) {
    CHECK(less(expect[i], expect[i + 1]));
    CHECK_FALSE(less(expect[i + 1], expect[i]));
  }
  std::vector<Monomial> basis = monomial_basis(2, 2);
  REQUIRE(basis.size() == expect.size());
  for (std::size_t i = 0; i < basis.size(); ++i) CHECK(basis[i] == expect[i]);
}

TEST_CASE("monomial basis has binomial count") {
  for (int n : {1, 2, 3, 4}) {
    for (int d : {0, 1, 2, 3, 4}) {
      CHECK(static_cast<long>(monomial_basis(n, d).size()) ==
            binomial(n + d, d));
    }
  }
}

TEST_CASE("parity classes partition the basis") {
  SignSymmetry sym = SignSymmetry::kse(3, false);
  CHECK(sym.parity[0] == -1);  // a_1 flips
  CHECK(sym.parity[1] == +1);  // a_2 fixed
  CHECK(sym.parity[2] == -1);  // a_3 flips
  auto even = monomial_basis(3, 3, sym, ParityClass::Even);
  auto odd = monomial_basis(3, 3, sym, ParityClass::Odd);
  auto full = monomial_basis(3, 3);
  CHECK(even.size() + odd.size() == full.size());
  for (const auto& m : even) CHECK(sym.parity_of(m) == 1);
  for (const auto& m : odd) CHECK(sym.parity_of(m) == -1);
}

TEST_CASE("polynomial arithmetic agrees with pointwise evaluation") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int n = 3;
  Polynomial p(n), q(n);
  auto basis = monomial_basis(n, 3);
  for (const auto& m : basis) {
    p.add_term(m, unif(rng));
    q.add_term(m, unif(rng));
  }
  for (int trial = 0; trial < 20; ++trial) {
    std::array<double, n> x;
    for (auto& v : x) v = unif(rng);
    double pv = p.evaluate(x), qv = q.evaluate(x);
    CHECK((p + q).evaluate(x) == doctest::Approx(pv + qv).epsilon(1e-12));
    CHECK((p - q).evaluate(x) == doctest::Approx(pv - qv).epsilon(1e-12));
    CHECK((p * q).evaluate(x) == doctest::Approx(pv * qv).epsilon(1e-12));
    CHECK((p * 2.5).evaluate(x) == doctest::Approx(2.5 * pv).epsilon(1e-12));
  }
}

TEST_CASE("tiny coefficients are dropped") {
  Polynomial p(1);
  p.add_term(Monomial::variable(0), 1.0);
  p.add_term(Monomial::variable(0), -1.0 + 1e-16);
  CHECK(p.is_zero());
}

TEST_CASE("gradient matches finite differences") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int n = 3;
  Polynomial p(n);
  for (const auto& m : monomial_basis(n, 4)) p.add_term(m, unif(rng));
  const double h = 1e-6;
  for (int var = 0; var < n; ++var) {
    Polynomial g = p.gradient(var);
    std::array<double, n> x = {0.3, -0.7, 0.45};
    std::array<double, n> xp = x, xm = x;
    xp[var] += h;
    xm[var] -= h;
    double fd = (p.evaluate(xp) - p.evaluate(xm)) / (2 * h);
    CHECK(g.evaluate(x) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("sign symmetry action matches pointwise sign flips") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int n = 4;
  SignSymmetry sym = SignSymmetry::kse(n, false);
  Polynomial p(n);
  for (const auto& m : monomial_basis(n, 3)) p.add_term(m, unif(rng));
  Polynomial ps = p.apply_symmetry(sym);
  for (int trial = 0; trial < 10; ++trial) {
    std::array<double, n> x, sx;
    for (int i = 0; i < n; ++i) {
      x[i] = unif(rng);
      sx[i] = sym.parity[i] * x[i];
    }
    CHECK(ps.evaluate(x) == doctest::Approx(p.evaluate(sx)).epsilon(1e-12));
  }
}

TEST_CASE("lie derivative is the chain rule along the vector field") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int n = 2;
  std::vector<Polynomial> f;
  for (int i = 0; i < n; ++i) {
    Polynomial fi(n);
    for (const auto& m : monomial_basis(n, 2)) fi.add_term(m, unif(rng));
    f.push_back(fi);
  }
  Polynomial v(n);
  for (const auto& m : monomial_basis(n, 3)) v.add_term(m, unif(rng));
  Polynomial lie = lie_derivative(f, v);
  // d/dt V(x(t)) along x' = f(x), via a small explicit step.
  std::array<double, n> x = {0.4, -0.3};
  double expected = 0.0;
  for (int i = 0; i < n; ++i)
    expected += f[i].evaluate(x) * v.gradient(i).evaluate(x);
  CHECK(lie.evaluate(x) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("variable naming context") {
  VarContext ctx{4, true};  // a1, a2, a3, and the trailing tail variable
  CHECK(ctx.name(0) == "a1");
  CHECK(ctx.name(2) == "a3");
  CHECK(ctx.name(3) == "q");
  VarContext plain{2, false};
  CHECK(plain.name(1) == "a2");
}
