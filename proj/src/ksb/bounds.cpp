#include "ksb/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ksb/equilibria.hpp"

namespace ksb {

const char* to_string(BoundKind kind) {
  return kind == BoundKind::Truncated ? "truncated" : "pde";
}

double BoundResult::leading_coeff(const SosProgram& prog) const {
  for (const auto& v : prog.vars)
    if (v.role == VarRole::LeadingCoeff) return coeffs.at(static_cast<std::size_t>(v.id));
  throw std::logic_error("program has no leading coefficient variable");
}

Eigen::VectorXd linear_coeffs(const SosProgram& prog, const std::vector<double>& y) {
  const int n = prog.params.n_modes;
  Eigen::VectorXd lin = Eigen::VectorXd::Zero(n);
  for (const auto& v : prog.vars) {
    if (v.role != VarRole::PCoeff || v.monomial.degree() != 1) continue;
    const int var = v.monomial.exponents().front().first;
    if (var < n) lin[var] = y.at(static_cast<std::size_t>(v.id));
  }
  return lin;
}

namespace {

int free_offset(const SdpProblem& sdp) {
  int off = 0;
  for (const auto& blk : sdp.blocks)
    if (blk.kind != BlockKind::Free) off += blk.vec_size();
  return off;
}

int total_psd_dim(const SdpProblem& sdp) {
  int d = 0;
  for (const auto& blk : sdp.blocks)
    if (blk.kind == BlockKind::Psd) d += blk.dim;
  return d;
}

// Alternating-projection (Dykstra) clean-up: with the decision values y
// held fixed, move the Gram blocks to the intersection of the affine set
// {A_g x_g = b - A_f y} and the PSD cone. If the intersection is empty or
// too thin (the solver stopped at a degenerate boundary point), the bound
// is nudged upward, which restores strict feasibility of constraints that
// contain the bound variable, and the projection is retried.
struct PolishOutcome {
  bool ok = false;
  double residual = 0.0;
  double bound_adjustment = 0.0;
};

PolishOutcome polish_gram(const SosProgram& prog, const SdpProblem& sdp,
                          Eigen::VectorXd& x) {
  const int n_free = static_cast<int>(prog.vars.size());
  const int n_g = free_offset(sdp);
  const int m = static_cast<int>(sdp.b.size());

  Eigen::SparseMatrix<double> ag(m, n_g), af(m, n_free);
  {
    std::vector<Eigen::Triplet<double>> tg, tf;
    for (int i = 0; i < m; ++i)
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(sdp.a, i);
           it; ++it) {
        if (it.col() < n_g)
          tg.emplace_back(i, static_cast<int>(it.col()), it.value());
        else
          tf.emplace_back(i, static_cast<int>(it.col()) - n_g, it.value());
      }
    ag.setFromTriplets(tg.begin(), tg.end());
    af.setFromTriplets(tf.begin(), tf.end());
  }
  Eigen::SparseMatrix<double> agt = ag.transpose();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol;
  {
    Eigen::SparseMatrix<double> aat = (ag * agt).pruned();
    Eigen::SparseMatrix<double> reg(m, m);
    reg.setIdentity();
    reg *= 1e-12;
    aat += reg;
    chol.compute(aat);
    if (chol.info() != Eigen::Success) return {};
  }

  std::vector<SdpBlock> gram_blocks;
  for (const auto& blk : sdp.blocks)
    if (blk.kind != BlockKind::Free) gram_blocks.push_back(blk);

  Eigen::VectorXd y = x.tail(n_free);
  Eigen::VectorXd rhs = sdp.b - af * y;
  Eigen::VectorXd z = x.head(n_g);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(n_g);  // PSD-step correction

  auto project_affine = [&](Eigen::VectorXd& v) {
    v -= agt * chol.solve(ag * v - rhs);
  };
  auto project_psd = [&](Eigen::VectorXd& v) {
    int off = 0;
    for (const auto& blk : gram_blocks) {
      if (blk.kind == BlockKind::Psd) {
        Eigen::MatrixXd mtx(blk.dim, blk.dim);
        int k = 0;
        for (int j = 0; j < blk.dim; ++j)
          for (int i = 0; i <= j; ++i, ++k) {
            double val = v[off + k];
            mtx(i, j) = (i == j) ? val : val / std::sqrt(2.0);
            mtx(j, i) = mtx(i, j);
          }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mtx);
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
        mtx = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
        k = 0;
        for (int j = 0; j < blk.dim; ++j)
          for (int i = 0; i <= j; ++i, ++k)
            v[off + k] = (i == j) ? mtx(i, j) : mtx(i, j) * std::sqrt(2.0);
      } else {
        v.segment(off, blk.dim) = v.segment(off, blk.dim).cwiseMax(0.0);
      }
      off += blk.vec_size();
    }
  };

  PolishOutcome out;
  const double bound0 = y[prog.bound_var];
  int bump = 0;
  constexpr int kMaxBumps = 10;
  while (true) {
    bool converged = false;
    for (int iter = 0; iter < 600; ++iter) {
      Eigen::VectorXd v = z;
      project_affine(v);
      // Dykstra needs a correction only for the non-affine set
      Eigen::VectorXd w = v + q;
      Eigen::VectorXd w0 = w;
      project_psd(w);
      q = w0 - w;
      z = w;
      if (iter % 10 == 9 || iter == 599) {
        double res = (ag * z - rhs).cwiseAbs().maxCoeff();
        if (res <= 5e-7) {
          converged = true;
          break;
        }
      }
    }
    if (converged) break;
    if (++bump > kMaxBumps) break;
    const double delta = 1e-8 * (1.0 + std::abs(bound0)) * std::pow(4.0, bump - 1);
    y[prog.bound_var] += delta;
    out.bound_adjustment = y[prog.bound_var] - bound0;
    rhs = sdp.b - af * y;
    q.setZero();
  }
  // final state: z is exactly PSD (last step was the cone projection)
  out.residual = (ag * z - rhs).cwiseAbs().maxCoeff();
  out.ok = out.residual <= 1e-6;
  x.head(n_g) = z;
  x.tail(n_free) = y;
  return out;
}

}  // namespace

CertificateReport verify_certificate(const SosProgram& prog, const SdpProblem& sdp,
                                     const Eigen::VectorXd& x, unsigned sample_seed,
                                     int sample_points) {
  CertificateReport rep;
  rep.residual = (sdp.a * x - sdp.b).cwiseAbs().maxCoeff();

  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < sdp.blocks.size(); ++k) {
    if (sdp.blocks[k].kind != BlockKind::Psd) continue;
    Eigen::MatrixXd g = unpack_block(sdp, x, static_cast<int>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, es.eigenvalues().minCoeff());
  }

  const int n_free = static_cast<int>(prog.vars.size());
  std::vector<double> y(x.data() + (x.size() - n_free),
                        x.data() + x.size());
  const double bound = y[static_cast<std::size_t>(prog.bound_var)];

  // sample the leading constraint (S for the truncated program, T for the
  // PDE program); the remaining constraints are covered by the coefficient
  // and eigenvalue checks
  Polynomial s = prog.assemble(0, y);
  std::mt19937 rng(sample_seed);
  std::uniform_real_distribution<double> box(-1.5, 1.5);
  std::vector<double> pt(static_cast<std::size_t>(prog.n_vars));
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < sample_points; ++i) {
    for (auto& v : pt) v = box(rng);
    worst = std::min(worst, s.evaluate(pt));
  }
  rep.sample_min = worst / (1.0 + std::abs(bound));

  rep.certified = rep.residual <= 1e-6 && rep.min_eigenvalue >= -1e-7 &&
                  rep.sample_min >= -1e-6;
  return rep;
}

namespace {

BoundResult solve_program(SosProgram&& prog, BoundKind kind,
                          const BoundOptions& opts) {
  SdpProblem sdp = to_sdp(prog);
  SolverSettings settings = opts.solver;
  if (opts.auto_eps) {
    const double eps = total_psd_dim(sdp) <= 300 ? 1e-8 : 1e-6;
    settings.eps_primal = settings.eps_dual = settings.eps_gap = eps;
  }
  SdpSolution sol = solve(sdp, settings);

  BoundResult res;
  res.domain = prog.params.domain;
  res.n_modes = prog.params.n_modes;
  res.degree = prog.degree;
  res.kind = kind;
  res.status = sol.status;
  res.primal_res = sol.primal_res;
  res.dual_res = sol.dual_res;
  res.iterations = sol.iterations;
  res.seconds = sol.seconds;

  if (!res.usable()) return res;

  const int n_free = static_cast<int>(prog.vars.size());
  Eigen::VectorXd x = sol.x;
  if (opts.polish) {
    PolishOutcome pol = polish_gram(prog, sdp, x);
    res.certificate.bound_adjustment = pol.bound_adjustment;
  }
  res.coeffs.assign(x.data() + (x.size() - n_free), x.data() + x.size());
  res.bound = res.coeffs[static_cast<std::size_t>(prog.bound_var)];

  CertificateReport rep =
      verify_certificate(prog, sdp, x, opts.sample_seed, opts.sample_points);
  rep.bound_adjustment = res.certificate.bound_adjustment;
  res.certificate = rep;
  return res;
}

}  // namespace

BoundResult bound_truncated(int n_modes, double domain, int degree2d,
                            const BoundOptions& opts) {
  return solve_program(
      build_truncated_program(n_modes, domain, degree2d, opts.use_symmetry),
      BoundKind::Truncated, opts);
}

BoundResult bound_pde(int n_modes, double domain, int degree2d,
                      const BoundOptions& opts) {
  return solve_program(build_pde_program(n_modes, domain, degree2d),
                       BoundKind::Pde, opts);
}

SosProgram rebuild_program(const BoundResult& result, bool use_symmetry) {
  if (result.kind == BoundKind::Truncated)
    return build_truncated_program(result.n_modes, result.domain, result.degree,
                                   use_symmetry);
  return build_pde_program(result.n_modes, result.domain, result.degree);
}

ConvergenceStudy converge_in_N(double domain, int degree2d, BoundKind kind,
                               int n_start, int n_max, double plateau_tol,
                               const BoundOptions& opts) {
  if (n_start > n_max) throw std::invalid_argument("n_start must be <= n_max");
  if (kind == BoundKind::Pde)
    n_start = std::max(n_start, static_cast<int>(std::floor(domain)) + 1);
  ConvergenceStudy study;
  int confirmations = 0;
  for (int n = n_start; n <= n_max; ++n) {
    BoundResult r = kind == BoundKind::Truncated
                        ? bound_truncated(n, domain, degree2d, opts)
                        : bound_pde(n, domain, degree2d, opts);
    study.results.push_back(r);
    const std::size_t k = study.results.size();
    if (k >= 2 && r.usable() && study.results[k - 2].usable()) {
      const double prev = study.results[k - 2].bound;
      if (std::abs(r.bound - prev) <= plateau_tol * (1.0 + std::abs(r.bound)))
        ++confirmations;
      else
        confirmations = 0;
    } else {
      confirmations = 0;
    }
    if (confirmations >= 2) {
      study.converged = true;
      study.n_converged = n - 2;
      study.bound = r.bound;
      return study;
    }
  }
  if (!study.results.empty() && study.results.back().usable())
    study.bound = study.results.back().bound;
  return study;
}

void append_sweep_csv(const SweepRow& row, const std::string& path) {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream os(path, std::ios::app);
  if (!os) throw std::runtime_error("cannot open " + path);
  if (fresh)
    os << "L,N,degree,kind,bound,status,primal_res,dual_res,iters,seconds\n";
  os.precision(12);
  os << row.domain << "," << row.n_modes << "," << row.degree << ","
     << to_string(row.kind) << "," << row.bound << "," << to_string(row.status)
     << "," << row.primal_res << "," << row.dual_res << "," << row.iterations
     << "," << row.seconds << "\n";
  if (!os.good()) throw std::runtime_error("write failed: " + path);
}

SweepTable read_sweep_csv(const std::string& path) {
  SweepTable table;
  std::ifstream is(path);
  if (!is) return table;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("L,", 0) == 0) continue;
    std::stringstream ss(line);
    std::string field;
    SweepRow row;
    auto next = [&]() {
      if (!std::getline(ss, field, ',')) throw std::runtime_error("bad sweep row");
      return field;
    };
    row.domain = std::stod(next());
    row.n_modes = std::stoi(next());
    row.degree = std::stoi(next());
    row.kind = next() == "pde" ? BoundKind::Pde : BoundKind::Truncated;
    row.bound = std::stod(next());
    std::string st = next();
    row.status = st == "optimal"      ? SolveStatus::Optimal
                 : st == "inaccurate" ? SolveStatus::Inaccurate
                 : st == "infeasible" ? SolveStatus::Infeasible
                 : st == "unbounded"  ? SolveStatus::Unbounded
                                      : SolveStatus::IterationLimit;
    row.primal_res = std::stod(next());
    row.dual_res = std::stod(next());
    row.iterations = std::stol(next());
    row.seconds = std::stod(next());
    table.rows.push_back(row);
  }
  std::sort(table.rows.begin(), table.rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.domain < b.domain; });
  return table;
}

int sweep_mode_count(double domain) {
  const int n_cap = static_cast<int>(std::ceil(domain / 1.1947)) + 1;
  int best_n = 1;
  double best = -1.0;
  for (int n = 1; n <= n_cap; ++n) {
    const double l1 = domain / n;
    if (l1 <= 1.02) continue;
    const int modes = std::clamp(static_cast<int>(std::ceil(6.0 * l1)), 6, 48);
    const double e = primary_branch_energy(1, l1, modes);
    if (e > best) {
      best = e;
      best_n = n;
    }
  }
  return std::max(3 * best_n, 6);
}

SweepTable sweep_L(const std::vector<double>& grid, int degree2d, BoundKind kind,
                   const std::string& csv_path, int workers, int n_max,
                   const BoundOptions& opts) {
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
  SweepTable table;
  std::mutex mu;
  if (!csv_path.empty()) {
    SweepTable existing = read_sweep_csv(csv_path);
    for (const auto& row : existing.rows)
      if (row.degree == degree2d && row.kind == kind) table.rows.push_back(row);
  }
  auto done = [&](double l) {
    for (const auto& row : table.rows)
      if (std::abs(row.domain - l) <= 1e-12 * (1.0 + std::abs(l))) return true;
    return false;
  };

  auto run_one = [&](double l) {
    SweepRow row;
    row.domain = l;
    row.degree = degree2d;
    row.kind = kind;
    try {
      const int n_start = sweep_mode_count(l);
      ConvergenceStudy study =
          converge_in_N(l, degree2d, kind, n_start, n_max, 1e-4, opts);
      const BoundResult& r = study.results.back();
      row.n_modes = r.n_modes;
      row.bound = r.bound;
      row.status = r.status;
      row.primal_res = r.primal_res;
      row.dual_res = r.dual_res;
      row.iterations = r.iterations;
      row.seconds = 0.0;
      for (const auto& each : study.results) row.seconds += each.seconds;
    } catch (const std::exception&) {
      row.status = SolveStatus::IterationLimit;
    }
    std::lock_guard<std::mutex> lock(mu);
    table.rows.push_back(row);
    if (!csv_path.empty()) append_sweep_csv(row, csv_path);
  };

  std::vector<double> todo;
  for (double l : grid)
    if (!done(l)) todo.push_back(l);

  workers = std::max(1, workers);
  for (std::size_t base = 0; base < todo.size();
       base += static_cast<std::size_t>(workers)) {
    std::vector<std::future<void>> batch;
    for (std::size_t j = base;
         j < std::min(todo.size(), base + static_cast<std::size_t>(workers)); ++j)
      batch.push_back(std::async(std::launch::async, run_one, todo[j]));
    for (auto& f : batch) f.get();
  }

  std::sort(table.rows.begin(), table.rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.domain < b.domain; });
  return table;
}

std::vector<std::pair<double, double>> local_exponent(const SweepTable& table,
                                                      double window) {
  std::vector<std::pair<double, double>> out;
  std::vector<std::pair<double, double>> pts;  // (log L, log B)
  for (const auto& row : table.rows) {
    if (row.bound <= 0 || row.domain <= 0) continue;
    if (row.status != SolveStatus::Optimal && row.status != SolveStatus::Inaccurate)
      continue;
    pts.emplace_back(std::log(row.domain), std::log(row.bound));
  }
  for (const auto& [lx, ly] : pts) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const auto& [px, py] : pts) {
      if (std::abs(px - lx) > window) continue;
      sx += px;
      sy += py;
      sxx += px * px;
      sxy += px * py;
      ++cnt;
    }
    if (cnt < 3) continue;
    const double denom = cnt * sxx - sx * sx;
    if (std::abs(denom) < 1e-30) continue;
    out.emplace_back(std::exp(lx), (cnt * sxy - sx * sy) / denom);
  }
  return out;
}

}  // namespace ksb
