#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ksb {

/// Sparse exponent vector. Entries are (variable index, exponent) pairs,
/// sorted by variable index; zero exponents are never stored.
class Monomial {
 public:
  Monomial() = default;

  static Monomial variable(int var, int exp = 1);

  int degree() const { return degree_; }
  bool is_constant() const { return exps_.empty(); }
  int exponent(int var) const;
  const std::vector<std::pair<int, int>>& exponents() const { return exps_; }
  int max_var() const { return exps_.empty() ? -1 : exps_.back().first; }

  Monomial operator*(const Monomial& other) const;

  // Formal derivative with respect to `var`. The power-rule factor is written
  // to *coeff; the result is the constant monomial with *coeff = 0 when `var`
  // does not appear.
  Monomial derivative(int var, int* coeff) const;

  double evaluate(std::span<const double> x) const;

  bool operator==(const Monomial& other) const { return exps_ == other.exps_; }

 private:
  std::vector<std::pair<int, int>> exps_;
  int degree_ = 0;

  friend struct GrlexLess;
};

/// Graded lexicographic order: lower total degree first, ties broken by the
/// exponent of the lowest-indexed variable (larger exponent earlier), so that
/// 1 < a1 < a2 < a1^2 < a1*a2 < a2^2.
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Sign assignment per variable; the group action a -> (s_0 a_0, s_1 a_1, ...).
struct SignSymmetry {
  std::vector<std::int8_t> parity;  // +1 or -1 per variable

  // Parity of the KSE symmetry a_n -> (-1)^n a_n on variables a_1..a_N
  // (variable index i holds a_{i+1}); the tail variable q, when present,
  // is assigned sign +1.
  static SignSymmetry kse(int n_modes, bool with_q);

  int parity_of(const Monomial& m) const;
};

/// Maps variable indices to display names "a1".."aN" plus optional trailing "q".
struct VarContext {
  int n_vars = 0;
  bool has_q = false;

  std::string name(int var) const;
};

/// Sparse multivariate polynomial with real coefficients. Terms with
/// |coefficient| < 1e-14 are dropped during normalization, so a default
/// (empty) term map is the zero polynomial.
class Polynomial {
 public:
  static constexpr double kCoeffEps = 1e-14;

  explicit Polynomial(int n_vars) : n_vars_(n_vars) {}

  static Polynomial constant(int n_vars, double value);
  static Polynomial variable(int n_vars, int var);
  static Polynomial term(int n_vars, const Monomial& m, double coeff);

  int n_vars() const { return n_vars_; }
  const std::map<Monomial, double, GrlexLess>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  std::size_t n_terms() const { return terms_.size(); }
  double coefficient(const Monomial& m) const;
  double max_abs_coeff() const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(double scale) const;
  Polynomial operator-() const { return *this * -1.0; }

  Polynomial gradient(int var) const;
  Polynomial apply_symmetry(const SignSymmetry& g) const;

  double evaluate(std::span<const double> x) const;

  // Adds coeff * m in place and renormalizes the touched term.
  void add_term(const Monomial& m, double coeff);

  /// Canonical debug form: one term per line, sorted in graded-lex order,
  /// e.g. "-2.5 * a1^2 a3".
  std::string to_string(const VarContext& ctx) const;

 private:
  int n_vars_;
  std::map<Monomial, double, GrlexLess> terms_;

  void check_context(const Polynomial& other) const;
};

/// Sum over n of f[n] * dV/da_n. `f` may cover only a leading subset of the
/// variables of V (used when V also depends on the tail variable q).
Polynomial lie_derivative(std::span<const Polynomial> f, const Polynomial& v);

enum class ParityClass { Even, Odd };

/// All monomials of total degree <= max_deg in graded-lex order.
std::vector<Monomial> monomial_basis(int n_vars, int max_deg);

/// Same, restricted to one parity class of the sign symmetry.
std::vector<Monomial> monomial_basis(int n_vars, int max_deg,
                                     const SignSymmetry& sym,
                                     ParityClass parity);

}  // namespace ksb
