#include "ksb/sos.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace ksb {

namespace {

Polynomial poly_power(const Polynomial& base, int exp) {
  Polynomial out = Polynomial::constant(base.n_vars(), 1.0);
  for (int k = 0; k < exp; ++k) out = out * base;
  return out;
}

Polynomial norm_squared(int n_vars, int count) {
  Polynomial s(n_vars);
  for (int i = 0; i < count; ++i) s.add_term(Monomial::variable(i, 2), 1.0);
  return s;
}

void check_degree(int degree2d) {
  if (degree2d < 2 || degree2d % 2 != 0)
    throw std::invalid_argument("polynomial degree 2d must be even and >= 2");
}

// Symmetric monomials of total degree 1..max_deg; for contexts with q the
// q-exponent is additionally required to be even so V is a function of q^2.
std::vector<Monomial> ansatz_monomials(int n_vars, int max_deg,
                                       const SignSymmetry& sym, bool with_q) {
  std::vector<Monomial> out;
  for (const auto& m : monomial_basis(n_vars, max_deg, sym, ParityClass::Even)) {
    if (m.is_constant()) continue;
    if (with_q && m.exponent(n_vars - 1) % 2 != 0) continue;
    out.push_back(m);
  }
  return out;
}

}  // namespace

Polynomial d_dq2(const Polynomial& p) {
  const int q = p.n_vars() - 1;
  Polynomial out(p.n_vars());
  for (const auto& [m, c] : p.terms()) {
    int e = m.exponent(q);
    if (e == 0) continue;
    if (e % 2 != 0) throw std::invalid_argument("polynomial has odd power of q");
    Monomial dm;
    for (const auto& [v, ex] : m.exponents()) {
      int e2 = (v == q) ? ex - 2 : ex;
      if (e2 > 0) dm = dm * Monomial::variable(v, e2);
    }
    out.add_term(dm, c * (e / 2));
  }
  return out;
}

Polynomial SosProgram::assemble(int constraint, std::span<const double> y) const {
  const auto& con = constraints.at(static_cast<std::size_t>(constraint));
  Polynomial p = con.constant_part;
  for (const auto& [id, mult] : con.linear_parts)
    p = p + mult * y[static_cast<std::size_t>(id)];
  return p;
}

std::pair<std::vector<Monomial>, std::vector<Monomial>> symmetry_split(
    int n_vars, int max_deg, const SignSymmetry& sym) {
  return {monomial_basis(n_vars, max_deg, sym, ParityClass::Even),
          monomial_basis(n_vars, max_deg, sym, ParityClass::Odd)};
}

namespace {

std::vector<std::vector<Monomial>> split_blocks(int n_vars, int max_deg,
                                                const SignSymmetry& sym) {
  auto [even, odd] = symmetry_split(n_vars, max_deg, sym);
  std::vector<std::vector<Monomial>> blocks;
  if (!even.empty()) blocks.push_back(std::move(even));
  if (!odd.empty()) blocks.push_back(std::move(odd));
  return blocks;
}

}  // namespace

SosProgram build_truncated_program(int n_modes, double domain, int degree2d,
                                   bool use_symmetry) {
  check_degree(degree2d);
  TruncationParams params{n_modes, domain};
  params.validate();
  const int d = degree2d / 2;

  SosProgram prog;
  prog.params = params;
  prog.degree = degree2d;
  prog.pde = false;
  prog.n_vars = n_modes;
  prog.symmetry = SignSymmetry::kse(n_modes, false);
  prog.degenerate = n_modes < 2.0 * domain - 2.0;

  KsSystem sys = build_system(params);
  Polynomial lead = poly_power(norm_squared(n_modes, n_modes), d);
  Polynomial lead_flux = lie_derivative(sys.rhs, lead);

  SosConstraint s(n_modes);
  s.name = "S";
  s.constant_part = -energy_poly(params);

  int id = 0;
  prog.vars.push_back({id, VarRole::Bound, Monomial(), 0});
  prog.bound_var = id;
  s.linear_parts.emplace_back(id, Polynomial::constant(n_modes, 1.0));
  ++id;

  prog.vars.push_back({id, VarRole::LeadingCoeff, Monomial(), 0});
  s.linear_parts.emplace_back(id, -lead_flux);
  ++id;

  for (const auto& m : ansatz_monomials(n_modes, degree2d - 1, prog.symmetry, false)) {
    prog.vars.push_back({id, VarRole::PCoeff, m, 0});
    s.linear_parts.emplace_back(
        id, -lie_derivative(sys.rhs, Polynomial::term(n_modes, m, 1.0)));
    ++id;
  }

  if (use_symmetry)
    s.basis_blocks = split_blocks(n_modes, d, prog.symmetry);
  else
    s.basis_blocks.push_back(monomial_basis(n_modes, d));
  prog.constraints.push_back(std::move(s));
  return prog;
}

SosProgram build_pde_program(int n_modes, double domain, int degree2d) {
  check_degree(degree2d);
  TruncationParams params{n_modes, domain};
  params.validate();
  if (!(n_modes > domain))
    throw std::invalid_argument(
        "PDE program requires N > L so that lambda_{N+1} < 0");
  const int d = degree2d / 2;
  const int nv = n_modes + 1;  // trailing variable is q
  const int qvar = n_modes;

  SosProgram prog;
  prog.params = params;
  prog.degree = degree2d;
  prog.pde = true;
  prog.n_vars = nv;
  prog.symmetry = SignSymmetry::kse(n_modes, true);

  KsSystem sys = build_system(params);
  const double lambda_tail = sys.lambda(n_modes + 1);
  const double theta_coef =
      1.0 / (4.0 * std::sqrt(std::numbers::pi) * std::pow(domain, 1.5));

  // |a|^2 + q^2 and its powers
  Polynomial total_sq = norm_squared(nv, n_modes);
  total_sq.add_term(Monomial::variable(qvar, 2), 1.0);
  Polynomial lead = poly_power(total_sq, d);
  Polynomial lead_sub = poly_power(total_sq, d - 1);

  Polynomial q2(nv);
  q2.add_term(Monomial::variable(qvar, 2), 1.0);

  // V = c * lead + sum_b p_b * m_b; decision variables
  int id = 0;
  prog.vars.push_back({id, VarRole::Bound, Monomial(), 0});
  prog.bound_var = id++;
  prog.vars.push_back({id, VarRole::LeadingCoeff, Monomial(), 0});
  const int c_var = id++;
  std::vector<std::pair<int, Monomial>> p_vars;
  for (const auto& m : ansatz_monomials(nv, degree2d - 1, prog.symmetry, true)) {
    prog.vars.push_back({id, VarRole::PCoeff, m, 0});
    p_vars.emplace_back(id, m);
    ++id;
  }

  // R_n ansatz: symmetric monomials (even in q) of degree <= 2d-2, constant
  // included.
  std::vector<Monomial> r_basis;
  for (const auto& m :
       monomial_basis(nv, degree2d - 2, prog.symmetry, ParityClass::Even))
    if (m.exponent(qvar) % 2 == 0) r_basis.push_back(m);
  std::vector<std::vector<int>> r_vars(static_cast<std::size_t>(n_modes));
  for (int n = 1; n <= n_modes; ++n)
    for (const auto& m : r_basis) {
      prog.vars.push_back({id, VarRole::RCoeff, m, n});
      r_vars[static_cast<std::size_t>(n - 1)].push_back(id);
      ++id;
    }

  // T constraint
  SosConstraint t(nv);
  t.name = "T";
  t.constant_part = total_sq * (-1.0 / (2.0 * std::numbers::pi * domain));
  t.linear_parts.emplace_back(prog.bound_var, Polynomial::constant(nv, 1.0));
  t.linear_parts.emplace_back(
      c_var, -(lie_derivative(sys.rhs, lead) +
               q2 * lead_sub * (2.0 * lambda_tail * d)));
  for (const auto& [pid, m] : p_vars) {
    Polynomial pm = Polynomial::term(nv, m, 1.0);
    t.linear_parts.emplace_back(
        pid, -(lie_derivative(sys.rhs, pm) + q2 * d_dq2(pm) * (2.0 * lambda_tail)));
  }
  for (int n = 1; n <= n_modes; ++n) {
    Polynomial window = q2 * 2.0;  // 2 q^2 + sum_{m=N-n+1}^N a_m^2
    for (int m = n_modes - n + 1; m <= n_modes; ++m)
      window.add_term(Monomial::variable(m - 1, 2), 1.0);
    window = window * (-theta_coef * n);
    std::size_t k = 0;
    for (int rid : r_vars[static_cast<std::size_t>(n - 1)]) {
      t.linear_parts.emplace_back(
          rid, window * Polynomial::term(nv, r_basis[k], 1.0));
      ++k;
    }
  }
  t.basis_blocks = split_blocks(nv, d, prog.symmetry);
  prog.constraints.push_back(std::move(t));

  // dV/dq^2 >= 0
  SosConstraint dv(nv);
  dv.name = "dVdq2";
  dv.linear_parts.emplace_back(c_var, lead_sub * static_cast<double>(d));
  for (const auto& [pid, m] : p_vars) {
    Polynomial dm = d_dq2(Polynomial::term(nv, m, 1.0));
    if (!dm.is_zero()) dv.linear_parts.emplace_back(pid, dm);
  }
  dv.basis_blocks = split_blocks(nv, d - 1, prog.symmetry);
  prog.constraints.push_back(std::move(dv));

  // R_n - M_n and R_n + M_n, with M_n = dP/da_n - 2 (dP/dq^2) a_n
  for (int n = 1; n <= n_modes; ++n) {
    Polynomial an = Polynomial::variable(nv, n - 1);
    for (int sign : {-1, +1}) {
      SosConstraint rc(nv);
      rc.name = (sign < 0 ? "R-M:" : "R+M:") + std::to_string(n);
      std::size_t k = 0;
      for (int rid : r_vars[static_cast<std::size_t>(n - 1)]) {
        rc.linear_parts.emplace_back(rid, Polynomial::term(nv, r_basis[k], 1.0));
        ++k;
      }
      for (const auto& [pid, m] : p_vars) {
        Polynomial pm = Polynomial::term(nv, m, 1.0);
        Polynomial mn = pm.gradient(n - 1) - an * d_dq2(pm) * 2.0;
        if (!mn.is_zero()) rc.linear_parts.emplace_back(pid, mn * double(sign));
      }
      if (n % 2 == 0) {
        rc.basis_blocks = split_blocks(nv, d - 1, prog.symmetry);
      } else {
        // M_n is parity-odd for odd n, so the two-block reduction does not
        // apply; use the full basis.
        rc.basis_blocks.push_back(monomial_basis(nv, d - 1));
      }
      prog.constraints.push_back(std::move(rc));
    }
  }
  return prog;
}

std::vector<GramRow> gram_parameterize(const SosConstraint& con) {
  std::map<Monomial, GramRow, GrlexLess> rows;
  auto row_for = [&](const Monomial& m) -> GramRow& {
    auto [it, inserted] = rows.try_emplace(m);
    if (inserted) it->second.monomial = m;
    return it->second;
  };

  int offset = 0;
  for (const auto& basis : con.basis_blocks) {
    const int dim = static_cast<int>(basis.size());
    for (int j = 0; j < dim; ++j)
      for (int i = 0; i <= j; ++i) {
        Monomial prod = basis[static_cast<std::size_t>(i)] *
                        basis[static_cast<std::size_t>(j)];
        double coef = (i == j) ? 1.0 : std::numbers::sqrt2;
        row_for(prod).gram_entries.emplace_back(offset + SdpProblem::tri_index(i, j),
                                                coef);
      }
    offset += dim * (dim + 1) / 2;
  }

  for (const auto& [m, c] : con.constant_part.terms()) row_for(m).constant = c;
  for (const auto& [id, mult] : con.linear_parts)
    for (const auto& [m, c] : mult.terms())
      row_for(m).var_coeffs.emplace_back(id, c);

  std::vector<GramRow> out;
  out.reserve(rows.size());
  for (auto& [m, row] : rows) {
    if (row.gram_entries.empty() && row.var_coeffs.empty()) {
      if (std::abs(row.constant) > 1e-12)
        throw std::runtime_error(
            "constraint monomial not representable in basis products");
      continue;
    }
    out.push_back(std::move(row));
  }
  return out;
}

SdpProblem to_sdp(const SosProgram& prog) {
  SdpProblem sdp;
  const int n_free = static_cast<int>(prog.vars.size());

  // Gram blocks in constraint order, then one free block of decision vars.
  std::vector<int> con_offset;  // svec offset of each constraint's first block
  int off = 0;
  for (const auto& con : prog.constraints) {
    con_offset.push_back(off);
    for (const auto& basis : con.basis_blocks) {
      sdp.blocks.push_back({BlockKind::Psd, static_cast<int>(basis.size())});
      off += sdp.blocks.back().vec_size();
    }
  }
  // Nonnegative slack tied to the leading coefficient of V: only
  // functionals bounded below (c >= 0) yield valid bounds, and without the
  // constraint the program can be spuriously feasible on truncations whose
  // trajectories escape to infinity.
  const int lead_off = off;
  sdp.blocks.push_back({BlockKind::Diag, 1});
  const int free_off = lead_off + 1;
  sdp.blocks.push_back({BlockKind::Free, n_free});
  const int nvec = free_off + n_free;

  int lead_var = -1;
  for (const auto& v : prog.vars)
    if (v.role == VarRole::LeadingCoeff) lead_var = v.id;

  std::vector<Eigen::Triplet<double>> trips;
  std::vector<double> rhs;
  if (lead_var >= 0) {
    trips.emplace_back(0, lead_off, 1.0);
    trips.emplace_back(0, free_off + lead_var, -1.0);
    rhs.push_back(0.0);
  }
  for (std::size_t ci = 0; ci < prog.constraints.size(); ++ci) {
    for (const auto& row : gram_parameterize(prog.constraints[ci])) {
      const int r = static_cast<int>(rhs.size());
      for (const auto& [k, coef] : row.gram_entries)
        trips.emplace_back(r, con_offset[ci] + k, coef);
      for (const auto& [id, coef] : row.var_coeffs)
        trips.emplace_back(r, free_off + id, -coef);
      rhs.push_back(row.constant);
    }
  }

  const int m = static_cast<int>(rhs.size());
  sdp.a.resize(m, nvec);
  sdp.a.setFromTriplets(trips.begin(), trips.end());
  sdp.b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), m);
  sdp.c = Eigen::VectorXd::Zero(nvec);
  sdp.c[free_off + prog.bound_var] = 1.0;
  return sdp;
}

}  // namespace ksb
