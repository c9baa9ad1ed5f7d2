#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "doctest.h"
#include "ksb/bounds.hpp"
#include "ksb/equilibria.hpp"

using namespace ksb;

TEST_CASE("quadratic bound at a chaotic domain size") {
  BoundResult res = bound_truncated(6, 3.5, 2);
  REQUIRE(res.usable());
  CHECK(res.bound == doctest::Approx(9.074245).epsilon(1e-3));
  CHECK(res.primal_res <= 1e-6);
  CHECK(res.dual_res <= 1e-6);
  CHECK(res.certificate.certified);
  CHECK(res.certificate.residual <= 1e-6);
  CHECK(res.certificate.min_eigenvalue >= -1e-7);
  CHECK(res.certificate.sample_min >= -1e-6);
  CHECK(res.seconds > 0.0);
  CHECK(res.iterations > 0);
}

TEST_CASE("quartic auxiliary functionals tighten the bound") {
  BoundResult quad = bound_truncated(6, 2.0, 2);
  BoundResult quart = bound_truncated(6, 2.0, 4);
  REQUIRE(quad.usable());
  REQUIRE(quart.usable());
  CHECK(quart.bound <= quad.bound + 1e-6);
  CHECK(quart.bound == doctest::Approx(0.222904).epsilon(1e-3));
  // The bound dominates the best equilibrium energy.
  auto [branch, energy] = envelope_max_energy(2.0, 6);
  CHECK(quart.bound >= energy - 1e-3 * (1.0 + energy));
}

TEST_CASE("parity blocks are optional and do not change the optimum") {
  BoundOptions with_sym;
  BoundOptions without_sym;
  without_sym.use_symmetry = false;
  BoundResult a = bound_truncated(6, 2.0, 4, with_sym);
  BoundResult b = bound_truncated(6, 2.0, 4, without_sym);
  REQUIRE(a.usable());
  REQUIRE(b.usable());
  CHECK(std::abs(a.bound - b.bound) <= 1e-6 * (1.0 + std::abs(a.bound)));
}

TEST_CASE("certificate verification rejects corrupted gram data") {
  BoundResult res = bound_truncated(6, 3.5, 2);
  REQUIRE(res.usable());
  SosProgram prog = rebuild_program(res);
  SdpProblem sdp = to_sdp(prog);
  SolverSettings settings;
  SdpSolution sol = solve(sdp, settings);
  REQUIRE(sol.usable());
  CertificateReport good = verify_certificate(prog, sdp, sol.x);
  // The raw solver output may carry small infeasibility but must be close.
  CHECK(good.residual <= 1e-4);

  Eigen::VectorXd bad = sol.x;
  bad[0] += 0.5;  // corrupt one Gram entry
  CertificateReport report = verify_certificate(prog, sdp, bad);
  CHECK_FALSE(report.certified);
  CHECK(report.residual > 1e-3);
}

TEST_CASE("linear coefficients feed background recovery") {
  BoundResult res = bound_truncated(8, 1.8, 2);
  REQUIRE(res.usable());
  SosProgram prog = rebuild_program(res);
  double c = res.leading_coeff(prog);
  CHECK(c > 0.0);
  Eigen::VectorXd lin = linear_coeffs(prog, res.coeffs);
  CHECK(lin.size() == 8);
  // The optimal quadratic functional has even-mode linear terms only.
  for (int i = 0; i < 8; i += 2) CHECK(std::abs(lin[i]) <= 1e-5);
}

TEST_CASE("convergence study plateaus in the mode count") {
  ConvergenceStudy study =
      converge_in_N(2.0, 2, BoundKind::Truncated, 6, 12, 1e-4);
  REQUIRE_FALSE(study.results.empty());
  CHECK(study.converged);
  CHECK(study.bound == doctest::Approx(study.results.back().bound));
  CHECK(study.n_converged >= 6);
}

TEST_CASE("sweep csv rows survive a round trip") {
  const std::string path = "bounds_test_sweep.csv";
  std::remove(path.c_str());
  SweepRow row;
  row.domain = 2.5;
  row.n_modes = 9;
  row.degree = 4;
  row.kind = BoundKind::Pde;
  row.bound = 1.23456789;
  row.status = SolveStatus::Optimal;
  row.primal_res = 1e-9;
  row.dual_res = 2e-9;
  row.iterations = 12345;
  row.seconds = 6.5;
  append_sweep_csv(row, path);
  row.domain = 1.5;
  row.kind = BoundKind::Truncated;
  append_sweep_csv(row, path);

  SweepTable table = read_sweep_csv(path);
  REQUIRE(table.rows.size() == 2);
  // Sorted by L on read.
  CHECK(table.rows[0].domain == doctest::Approx(1.5));
  CHECK(table.rows[0].kind == BoundKind::Truncated);
  CHECK(table.rows[1].domain == doctest::Approx(2.5));
  CHECK(table.rows[1].kind == BoundKind::Pde);
  CHECK(table.rows[1].n_modes == 9);
  CHECK(table.rows[1].bound == doctest::Approx(1.23456789));
  CHECK(table.rows[1].status == SolveStatus::Optimal);
  CHECK(table.rows[1].iterations == 12345);
  std::remove(path.c_str());
}

TEST_CASE("sweeps resume from an existing csv") {
  const std::string path = "bounds_test_resume.csv";
  std::remove(path.c_str());
  std::vector<double> grid = {2.0};
  SweepTable first = sweep_L(grid, 2, BoundKind::Truncated, path);
  REQUIRE(first.rows.size() == 1);
  double bound = first.rows[0].bound;
  // Second run must return the cached row without re-solving.
  SweepTable second = sweep_L(grid, 2, BoundKind::Truncated, path);
  REQUIRE(second.rows.size() == 1);
  CHECK(second.rows[0].bound == doctest::Approx(bound).epsilon(1e-12));
  std::remove(path.c_str());
}

TEST_CASE("mode-count heuristic") {
  // At least three modes per active wavelength, never fewer than six.
  CHECK(sweep_mode_count(1.0) >= 6);
  CHECK(sweep_mode_count(10.0) >= 18);
  CHECK(sweep_mode_count(20.0) > sweep_mode_count(10.0));
}

TEST_CASE("local exponent recovers a synthetic power law") {
  SweepTable table;
  for (double l = 10.0; l <= 40.0; l *= 1.1) {
    SweepRow row;
    row.domain = l;
    row.bound = 0.3 * std::pow(l, 1.8);
    row.status = SolveStatus::Optimal;
    table.rows.push_back(row);
  }
  auto fits = local_exponent(table, 0.35);
  REQUIRE_FALSE(fits.empty());
  for (const auto& [l, p] : fits) CHECK(p == doctest::Approx(1.8).epsilon(1e-6));
}

TEST_CASE("under-resolved truncated programs fail to produce a bound") {
  // N = 3 at L = 4 admits unbounded trajectories; no valid certificate
  // exists and the solve must not report success.
  BoundOptions opts;
  opts.solver.max_iters = 200000;
  BoundResult res = bound_truncated(3, 4.0, 2, opts);
  CHECK_FALSE(res.status == SolveStatus::Optimal);
  CHECK_FALSE(res.certificate.certified);
}
