#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ksb/galerkin.hpp"
#include "ksb/polynomial.hpp"
#include "ksb/sdp.hpp"

namespace ksb {

enum class VarRole { Bound, LeadingCoeff, PCoeff, RCoeff };

struct DecisionVar {
  int id = 0;
  VarRole role = VarRole::PCoeff;
  Monomial monomial;  // the V (or R_n) monomial this coefficient multiplies
  int r_mode = 0;     // n for RCoeff variables
};

/// One SOS-constrained polynomial whose coefficients are affine in the
/// decision variables: constant_part + sum_k y_k * linear_parts[k].
struct SosConstraint {
  std::string name;
  Polynomial constant_part;
  std::vector<std::pair<int, Polynomial>> linear_parts;
  std::vector<std::vector<Monomial>> basis_blocks;

  explicit SosConstraint(int n_vars) : constant_part(n_vars) {}
};

struct SosProgram {
  TruncationParams params;
  int degree = 0;  // 2d
  bool pde = false;
  int n_vars = 0;  // N, or N+1 with q as the trailing variable
  SignSymmetry symmetry;
  std::vector<DecisionVar> vars;
  std::vector<SosConstraint> constraints;
  int bound_var = 0;
  bool degenerate = false;  // truncated program with N < 2L-2 (may be unbounded)

  /// Constraint polynomial at decision values y (certificate checks).
  Polynomial assemble(int constraint, std::span<const double> y) const;
};

/// min B over V(a) = c|a|^{2d} + P(a) subject to
/// S = B - E_N - f.grad(V) being SOS. P spans the symmetric monomials of
/// degree 1..2d-1. With use_symmetry the Gram matrix is block-diagonalized
/// into the even/odd parity basis split; without it a single full basis
/// block is used (same optimum, larger SDP).
SosProgram build_truncated_program(int n_modes, double domain, int degree2d,
                                   bool use_symmetry = true);

/// min B over V(a,q^2) = c(|a|^2+q^2)^d + P(a,q^2) subject to the tail
/// estimate constraints: T SOS, dV/dq^2 SOS, and R_n -+ M_n SOS for
/// n = 1..N (2N+2 SOS constraints).
SosProgram build_pde_program(int n_modes, double domain, int degree2d);

/// Even-parity and odd-parity monomial bases of degree <= max_deg; the Gram
/// matrix of a symmetric polynomial is block-diagonal across the partition.
std::pair<std::vector<Monomial>, std::vector<Monomial>> symmetry_split(
    int n_vars, int max_deg, const SignSymmetry& sym);

/// One linear coefficient-matching equation per monomial.
struct GramRow {
  Monomial monomial;
  // svec coordinates local to this constraint's concatenated Gram blocks,
  // with the sqrt(2) off-diagonal convention of SdpProblem
  std::vector<std::pair<int, double>> gram_entries;
  std::vector<std::pair<int, double>> var_coeffs;  // (decision var id, weight)
  double constant = 0.0;
};

std::vector<GramRow> gram_parameterize(const SosConstraint& constraint);

SdpProblem to_sdp(const SosProgram& program);

/// d/d(q^2) of a polynomial even in the trailing variable q.
Polynomial d_dq2(const Polynomial& p);

}  // namespace ksb
