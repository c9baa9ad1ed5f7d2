#include "ksb/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ksb {

Monomial Monomial::variable(int var, int exp) {
  if (var < 0 || exp < 0) throw std::invalid_argument("bad variable/exponent");
  Monomial m;
  if (exp > 0) {
    m.exps_.emplace_back(var, exp);
    m.degree_ = exp;
  }
  return m;
}

int Monomial::exponent(int var) const {
  for (const auto& [v, e] : exps_)
    if (v == var) return e;
  return 0;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out;
  out.exps_.reserve(exps_.size() + other.exps_.size());
  auto it = exps_.begin();
  auto jt = other.exps_.begin();
  while (it != exps_.end() || jt != other.exps_.end()) {
    if (jt == other.exps_.end() || (it != exps_.end() && it->first < jt->first)) {
      out.exps_.push_back(*it++);
    } else if (it == exps_.end() || jt->first < it->first) {
      out.exps_.push_back(*jt++);
    } else {
      out.exps_.emplace_back(it->first, it->second + jt->second);
      ++it;
      ++jt;
    }
  }
  out.degree_ = degree_ + other.degree_;
  return out;
}

Monomial Monomial::derivative(int var, int* coeff) const {
  Monomial out;
  *coeff = 0;
  for (const auto& [v, e] : exps_) {
    if (v == var) {
      *coeff = e;
      if (e > 1) out.exps_.emplace_back(v, e - 1);
    } else {
      out.exps_.emplace_back(v, e);
    }
  }
  if (*coeff == 0) return Monomial();
  out.degree_ = degree_ - 1;
  return out;
}

double Monomial::evaluate(std::span<const double> x) const {
  double prod = 1.0;
  for (const auto& [v, e] : exps_) {
    double p = x[static_cast<std::size_t>(v)];
    for (int k = 0; k < e; ++k) prod *= p;
  }
  return prod;
}

bool GrlexLess::operator()(const Monomial& a, const Monomial& b) const {
  if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
  auto it = a.exps_.begin();
  auto jt = b.exps_.begin();
  while (it != a.exps_.end() && jt != b.exps_.end()) {
    if (it->first != jt->first) return it->first < jt->first;
    if (it->second != jt->second) return it->second > jt->second;
    ++it;
    ++jt;
  }
  return false;  // equal
}

SignSymmetry SignSymmetry::kse(int n_modes, bool with_q) {
  SignSymmetry g;
  g.parity.resize(static_cast<std::size_t>(n_modes) + (with_q ? 1 : 0));
  for (int i = 0; i < n_modes; ++i)
    g.parity[static_cast<std::size_t>(i)] = ((i + 1) % 2 == 0) ? 1 : -1;
  if (with_q) g.parity.back() = 1;
  return g;
}

int SignSymmetry::parity_of(const Monomial& m) const {
  int sign = 1;
  for (const auto& [v, e] : m.exponents()) {
    if (v >= static_cast<int>(parity.size()))
      throw std::invalid_argument("symmetry does not cover variable");
    if (parity[static_cast<std::size_t>(v)] < 0 && e % 2 == 1) sign = -sign;
  }
  return sign;
}

std::string VarContext::name(int var) const {
  if (has_q && var == n_vars - 1) return "q";
  return "a" + std::to_string(var + 1);
}

Polynomial Polynomial::constant(int n_vars, double value) {
  Polynomial p(n_vars);
  p.add_term(Monomial(), value);
  return p;
}

Polynomial Polynomial::variable(int n_vars, int var) {
  if (var < 0 || var >= n_vars) throw std::invalid_argument("variable out of context");
  Polynomial p(n_vars);
  p.add_term(Monomial::variable(var), 1.0);
  return p;
}

Polynomial Polynomial::term(int n_vars, const Monomial& m, double coeff) {
  if (m.max_var() >= n_vars) throw std::invalid_argument("monomial out of context");
  Polynomial p(n_vars);
  p.add_term(m, coeff);
  return p;
}

int Polynomial::degree() const {
  return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [mono, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

void Polynomial::check_context(const Polynomial& other) const {
  if (n_vars_ != other.n_vars_)
    throw std::invalid_argument("polynomial variable-context mismatch");
}

void Polynomial::add_term(const Monomial& m, double coeff) {
  auto [it, inserted] = terms_.try_emplace(m, coeff);
  if (!inserted) it->second += coeff;
  if (std::abs(it->second) < kCoeffEps) terms_.erase(it);
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  check_context(other);
  Polynomial out = *this;
  for (const auto& [m, c] : other.terms_) out.add_term(m, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
  check_context(other);
  Polynomial out = *this;
  for (const auto& [m, c] : other.terms_) out.add_term(m, -c);
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  check_context(other);
  Polynomial out(n_vars_);
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : other.terms_) out.add_term(ma * mb, ca * cb);
  return out;
}

Polynomial Polynomial::operator*(double scale) const {
  Polynomial out(n_vars_);
  for (const auto& [m, c] : terms_) out.add_term(m, c * scale);
  return out;
}

Polynomial Polynomial::gradient(int var) const {
  if (var < 0 || var >= n_vars_) throw std::invalid_argument("variable out of context");
  Polynomial out(n_vars_);
  for (const auto& [m, c] : terms_) {
    int k = 0;
    Monomial dm = m.derivative(var, &k);
    if (k != 0) out.add_term(dm, c * k);
  }
  return out;
}

Polynomial Polynomial::apply_symmetry(const SignSymmetry& g) const {
  Polynomial out(n_vars_);
  for (const auto& [m, c] : terms_) out.add_term(m, c * g.parity_of(m));
  return out;
}

double Polynomial::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_vars_)
    throw std::invalid_argument("evaluation point has wrong dimension");
  double sum = 0.0;
  for (const auto& [m, c] : terms_) sum += c * m.evaluate(x);
  return sum;
}

std::string Polynomial::to_string(const VarContext& ctx) const {
  if (terms_.empty()) return "0\n";
  std::ostringstream os;
  os.precision(17);
  for (const auto& [m, c] : terms_) {
    os << c;
    for (const auto& [v, e] : m.exponents()) {
      os << " * " << ctx.name(v);
      if (e > 1) os << "^" << e;
    }
    os << "\n";
  }
  return os.str();
}

Polynomial lie_derivative(std::span<const Polynomial> f, const Polynomial& v) {
  if (f.empty() || static_cast<int>(f.size()) > v.n_vars())
    throw std::invalid_argument("rhs length incompatible with V");
  Polynomial out(v.n_vars());
  for (std::size_t n = 0; n < f.size(); ++n) {
    Polynomial dv = v.gradient(static_cast<int>(n));
    if (dv.is_zero()) continue;
    Polynomial fn(v.n_vars());
    if (f[n].n_vars() == v.n_vars()) {
      fn = f[n];
    } else {
      // Lift f_n into the larger context (extra trailing variables unused).
      for (const auto& [m, c] : f[n].terms()) {
        if (m.max_var() >= v.n_vars())
          throw std::invalid_argument("rhs component out of context");
        fn.add_term(m, c);
      }
    }
    out = out + fn * dv;
  }
  return out;
}

namespace {

void enumerate_monomials(int n_vars, int max_deg, int var, Monomial prefix,
                         std::vector<Monomial>& out) {
  out.push_back(prefix);
  if (prefix.degree() == max_deg) return;
  for (int v = var; v < n_vars; ++v) {
    Monomial next = prefix * Monomial::variable(v);
    enumerate_monomials(n_vars, max_deg, v, next, out);
  }
}

}  // namespace

std::vector<Monomial> monomial_basis(int n_vars, int max_deg) {
  if (max_deg < 0) throw std::invalid_argument("negative degree");
  std::vector<Monomial> out;
  enumerate_monomials(n_vars, max_deg, 0, Monomial(), out);
  std::sort(out.begin(), out.end(), GrlexLess{});
  return out;
}

std::vector<Monomial> monomial_basis(int n_vars, int max_deg,
                                     const SignSymmetry& sym,
                                     ParityClass parity) {
  std::vector<Monomial> all = monomial_basis(n_vars, max_deg);
  std::vector<Monomial> out;
  int want = parity == ParityClass::Even ? 1 : -1;
  for (const auto& m : all)
    if (sym.parity_of(m) == want) out.push_back(m);
  return out;
}

}  // namespace ksb
