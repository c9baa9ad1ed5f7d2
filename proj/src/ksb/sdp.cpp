#include "ksb/sdp.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace ksb {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

int SdpProblem::vec_dim() const {
  int n = 0;
  for (const auto& blk : blocks) n += blk.vec_size();
  return n;
}

int SdpProblem::block_offset(int index) const {
  int off = 0;
  for (int i = 0; i < index; ++i) off += blocks[static_cast<std::size_t>(i)].vec_size();
  return off;
}

void SolverSettings::validate() const {
  if (!(eps_primal > 0) || !(eps_dual > 0) || !(eps_gap > 0))
    throw std::invalid_argument("tolerances must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(relaxation > 0.0) || !(relaxation < 2.0))
    throw std::invalid_argument("relaxation must lie in (0, 2)");
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Inaccurate: return "inaccurate";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

Eigen::MatrixXd psd_project(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix not square");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

namespace {

// Project w onto the product cone described by `blocks`, writing into xt.
void cone_project(const std::vector<SdpBlock>& blocks, const Eigen::VectorXd& w,
                  Eigen::VectorXd& xt, std::vector<Eigen::MatrixXd>& work,
                  std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>>& eigs) {
  int off = 0;
  int psd_idx = 0;
  for (const auto& blk : blocks) {
    if (blk.kind == BlockKind::Psd) {
      Eigen::MatrixXd& m = work[static_cast<std::size_t>(psd_idx)];
      int k = 0;
      for (int j = 0; j < blk.dim; ++j)
        for (int i = 0; i <= j; ++i, ++k) {
          double v = w[off + k];
          if (i == j) {
            m(i, j) = v;
          } else {
            m(i, j) = v / kSqrt2;
            m(j, i) = m(i, j);
          }
        }
      auto& es = eigs[static_cast<std::size_t>(psd_idx)];
      es.compute(m);
      const auto& vec = es.eigenvectors();
      const auto& val = es.eigenvalues();
      m.setZero();
      for (int e = 0; e < blk.dim; ++e) {
        if (val[e] <= 0.0) continue;
        m.noalias() += val[e] * vec.col(e) * vec.col(e).transpose();
      }
      k = 0;
      for (int j = 0; j < blk.dim; ++j)
        for (int i = 0; i <= j; ++i, ++k)
          xt[off + k] = (i == j) ? m(i, j) : m(i, j) * kSqrt2;
      ++psd_idx;
    } else if (blk.kind == BlockKind::Diag) {
      xt.segment(off, blk.dim) = w.segment(off, blk.dim).cwiseMax(0.0);
    } else {
      xt.segment(off, blk.dim) = w.segment(off, blk.dim);
    }
    off += blk.vec_size();
  }
}

}  // namespace

// Operator splitting on the homogeneous self-dual embedding.  The problem
// min <c,x> s.t. Ax = b, x in K is first written in "slack" form
//
//   min <c,x>  s.t.  As x + s = bs,  s in {0}^m x K,  x free,
//
// with As = [A; -I_cone] selecting the cone coordinates of x.  The embedding
// seeks a nonzero (x, y, tau) >= 0, (0, s, kappa) in the dual cone with
//
//   [0, As^T, c; -As, 0, bs; -c^T, -bs^T, 0] (x, y, tau) = (0, s, kappa),
//
// solved by alternating a linear solve against the cached factorization of
// I + As^T As with a projection onto the cone, plus over-relaxation and
// safeguarded Anderson extrapolation.  tau > 0 at a fixed point yields the
// optimal pair (x/tau, y/tau); kappa > 0 yields an infeasibility or
// unboundedness certificate.
SdpSolution solve(const SdpProblem& problem, const SolverSettings& settings) {
  settings.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const int n = problem.vec_dim();
  const int m = static_cast<int>(problem.b.size());
  if (problem.a.rows() != m || problem.a.cols() != n)
    throw std::invalid_argument("constraint matrix dimensions inconsistent");

  // Cone blocks with their x-coordinate offsets.
  std::vector<SdpBlock> cone_blocks;
  std::vector<int> cone_x_off;
  int nc = 0;
  {
    int off = 0;
    for (const auto& blk : problem.blocks) {
      if (blk.kind != BlockKind::Free) {
        cone_blocks.push_back(blk);
        cone_x_off.push_back(off);
        nc += blk.vec_size();
      }
      off += blk.vec_size();
    }
  }
  const int mt = m + nc;  // stacked row count

  // x-coordinate index of each cone row, in stacked-row order.
  std::vector<int> cone_coord(static_cast<std::size_t>(nc));
  {
    int r = 0;
    for (std::size_t k = 0; k < cone_blocks.size(); ++k)
      for (int t = 0; t < cone_blocks[k].vec_size(); ++t, ++r)
        cone_coord[static_cast<std::size_t>(r)] = cone_x_off[k] + t;
  }

  // Stacked matrix As = [A; -I_cone].
  Eigen::SparseMatrix<double> as(mt, n);
  {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(problem.a.nonZeros()) +
                  static_cast<std::size_t>(nc));
    for (int i = 0; i < m; ++i)
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(problem.a, i);
           it; ++it)
        trips.emplace_back(i, static_cast<int>(it.col()), it.value());
    for (int r = 0; r < nc; ++r)
      trips.emplace_back(m + r, cone_coord[static_cast<std::size_t>(r)], -1.0);
    as.setFromTriplets(trips.begin(), trips.end());
  }

  // Ruiz equilibration of the stacked matrix.  Column scales are uniform
  // within each PSD block of x and row scales are uniform within each PSD
  // slack block, so both cones stay invariant under the scaling.
  Eigen::VectorXd row_scale = Eigen::VectorXd::Ones(mt);
  Eigen::VectorXd col_scale = Eigen::VectorXd::Ones(n);
  if (settings.scaling) {
    for (int pass = 0; pass < 10; ++pass) {
      Eigen::VectorXd rmax = Eigen::VectorXd::Zero(mt);
      Eigen::VectorXd cmax = Eigen::VectorXd::Zero(n);
      for (int j = 0; j < as.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(as, j); it; ++it) {
          double v = std::abs(it.value());
          rmax[it.row()] = std::max(rmax[it.row()], v);
          cmax[j] = std::max(cmax[j], v);
        }
      int off = 0;
      for (const auto& blk : problem.blocks) {
        int sz = blk.vec_size();
        if (blk.kind == BlockKind::Psd) {
          double mx = cmax.segment(off, sz).maxCoeff();
          cmax.segment(off, sz).setConstant(mx);
        }
        off += sz;
      }
      int roff = m;
      for (const auto& blk : cone_blocks) {
        int sz = blk.vec_size();
        if (blk.kind == BlockKind::Psd) {
          double mx = rmax.segment(roff, sz).maxCoeff();
          rmax.segment(roff, sz).setConstant(mx);
        }
        roff += sz;
      }
      Eigen::VectorXd dr(mt), dc(n);
      for (int i = 0; i < mt; ++i) dr[i] = rmax[i] > 0 ? 1.0 / std::sqrt(rmax[i]) : 1.0;
      for (int j = 0; j < n; ++j) dc[j] = cmax[j] > 0 ? 1.0 / std::sqrt(cmax[j]) : 1.0;
      as = dr.asDiagonal() * as * dc.asDiagonal();
      row_scale.array() *= dr.array();
      col_scale.array() *= dc.array();
    }
  }
  Eigen::VectorXd bs = Eigen::VectorXd::Zero(mt);
  bs.head(m) = row_scale.head(m).cwiseProduct(problem.b);
  Eigen::VectorXd c_scaled = col_scale.cwiseProduct(problem.c);
  const double sigma_b = std::max(bs.norm(), 1e-12);
  const double sigma_c = std::max(c_scaled.norm(), 1e-12);
  bs /= sigma_b;
  c_scaled /= sigma_c;

  Eigen::SparseMatrix<double> ast = as.transpose();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol;
  {
    Eigen::SparseMatrix<double> ata = (ast * as).pruned();
    Eigen::SparseMatrix<double> id(n, n);
    id.setIdentity();
    ata += id;
    chol.compute(ata);
    if (chol.info() != Eigen::Success)
      throw std::runtime_error("factorization of I + A^T*A failed");
  }

  // z = M^{-1} r with M = [I, As^T; -As, I]:  (I + As^T As) zx = rx - As^T ry.
  auto solve_m = [&](const Eigen::VectorXd& rx, const Eigen::VectorXd& ry,
                     Eigen::VectorXd& zx, Eigen::VectorXd& zy) {
    zx = chol.solve(rx - ast * ry);
    zy = ry + as * zx;
  };
  Eigen::VectorXd gx(n), gy(mt);
  solve_m(c_scaled, bs, gx, gy);
  const double gscal = 1.0 + c_scaled.dot(gx) + bs.dot(gy);

  std::vector<Eigen::MatrixXd> work;
  std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> eigs;
  for (const auto& blk : cone_blocks)
    if (blk.kind == BlockKind::Psd) {
      work.emplace_back(blk.dim, blk.dim);
      eigs.emplace_back();
    }

  // State z = [u; v] with u = (x, y, tau), v = (0, s, kappa).
  const int nu = n + mt + 1;
  const int nz = 2 * nu;
  const double alpha = settings.relaxation;

  Eigen::VectorXd px(n), py(mt), utx(n), uty(mt), wc(nc), pc(nc);

  auto apply_map = [&](const Eigen::VectorXd& zin, Eigen::VectorXd& zout,
                       Eigen::VectorXd& f_o) {
    // w = u + v
    px = zin.segment(0, n) + zin.segment(nu, n);
    py = zin.segment(n, mt) + zin.segment(nu + n, mt);
    const double wtau = zin[n + mt] + zin[nz - 1];
    // ut = (I + Q)^{-1} w via the cached factorization
    solve_m(px, py, utx, uty);
    const double uttau = (wtau + c_scaled.dot(utx) + bs.dot(uty)) / gscal;
    utx -= gx * uttau;
    uty -= gy * uttau;
    // over-relaxation
    utx = alpha * utx + (1.0 - alpha) * zin.segment(0, n);
    uty = alpha * uty + (1.0 - alpha) * zin.segment(n, mt);
    const double rtau = alpha * uttau + (1.0 - alpha) * zin[n + mt];
    // u+ = Pi_C(ut - v) with C = R^n x (R^m x K) x R+; by Moreau the new
    // v = v - ut + u+ lies exactly in the dual cone {0} x ({0} x K) x R+.
    zout.segment(0, n) = utx - zin.segment(nu, n);
    zout.segment(n, m) = uty.head(m) - zin.segment(nu + n, m);
    wc = uty.tail(nc) - zin.segment(nu + n + m, nc);
    cone_project(cone_blocks, wc, pc, work, eigs);
    zout.segment(n + m, nc) = pc;
    const double taup = std::max(rtau - zin[nz - 1], 0.0);
    zout[n + mt] = taup;
    zout.segment(nu, n + m).setZero();
    zout.segment(nu + n + m, nc) =
        zin.segment(nu + n + m, nc) - uty.tail(nc) + pc;
    zout[nz - 1] = zin[nz - 1] - rtau + taup;
    f_o = zout - zin;
  };

  // Anderson acceleration (type II): ring buffers of consecutive differences
  // of the fixed-point residual f and of g = z + f, with the Gram matrix of
  // the residual differences maintained one column per push. Valid columns
  // always occupy slots 0..aa_count-1 (the ring is refilled in place once
  // full), so the Gram principal submatrix stays contiguous.
  const int aa_mem = settings.acceleration_memory;
  const int aa_interval = settings.acceleration_interval;
  const int aa_cap = aa_mem > 1 ? aa_mem - 1 : 0;  // difference columns
  Eigen::MatrixXd df_buf, dg_buf, aa_gram;
  Eigen::VectorXd prev_f, prev_g, gcur;
  int aa_count = 0;
  int aa_head = 0;
  bool aa_have_prev = false;
  long aa_accepted = 0;
  if (aa_cap > 0) {
    df_buf.resize(nz, aa_cap);
    dg_buf.resize(nz, aa_cap);
    aa_gram.resize(aa_cap, aa_cap);
    prev_f.resize(nz);
    prev_g.resize(nz);
    gcur.resize(nz);
  }
  auto aa_reset = [&] {
    aa_count = 0;
    aa_head = 0;
    aa_have_prev = false;
  };
  auto aa_push = [&](const Eigen::VectorXd& zv, const Eigen::VectorXd& fv) {
    if (aa_cap == 0) return;
    gcur = zv + fv;
    if (aa_have_prev) {
      const int slot = aa_head;
      df_buf.col(slot) = fv - prev_f;
      dg_buf.col(slot) = gcur - prev_g;
      aa_head = (aa_head + 1) % aa_cap;
      if (aa_count < aa_cap) ++aa_count;
      aa_gram.col(slot).head(aa_count).noalias() =
          df_buf.leftCols(aa_count).transpose() * df_buf.col(slot);
      aa_gram.row(slot).head(aa_count) =
          aa_gram.col(slot).head(aa_count).transpose();
    }
    prev_f = fv;
    prev_g.swap(gcur);  // gcur holds zv + fv
    aa_have_prev = true;
  };

  Eigen::VectorXd z = Eigen::VectorXd::Zero(nz);
  z[n + mt] = 1.0;  // tau
  z[nz - 1] = 1.0;  // kappa
  Eigen::VectorXd znew(nz), f(nz), z_aa(nz), znew_aa(nz), f_aa(nz);
  apply_map(z, znew, f);

  const double bnorm0 = 1.0 + problem.b.norm();
  const double cnorm0 = 1.0 + problem.c.norm();
  const double eps_inf = 1e-9;

  SdpSolution sol;
  double best_stall = std::numeric_limits<double>::infinity();
  double prev_stall = std::numeric_limits<double>::infinity();
  int stall_strikes = 0;
  bool stalled = false;
  double cert_pinf = std::numeric_limits<double>::infinity();
  double cert_unbd = std::numeric_limits<double>::infinity();

  Eigen::VectorXd xs(n), ys(mt), ss(nc), ax(m), aty(n);

  // Unscaled primal/dual points (times tau) and certificate residuals from
  // the current iterate; returns false if tau is too small to normalize.
  double tau = 1.0, kappa = 1.0;
  auto measure = [&](const Eigen::VectorXd& zc, double& pres, double& dres,
                     double& gap, double& pobj, double& dobj) {
    tau = zc[n + mt];
    kappa = zc[nz - 1];
    xs = sigma_b * col_scale.cwiseProduct(zc.segment(0, n));
    ys = sigma_c * row_scale.cwiseProduct(zc.segment(n, mt));
    ss = sigma_b * zc.segment(nu + n + m, nc).cwiseQuotient(row_scale.tail(nc));
    ax = problem.a * xs;
    aty = problem.a.transpose() * ys.head(m);
    for (int r = 0; r < nc; ++r)
      aty[cone_coord[static_cast<std::size_t>(r)]] -= ys[m + r];
    const double ctx = problem.c.dot(xs);
    const double bty = problem.b.dot(ys.head(m));
    // certificate residuals (independent of tau)
    double cone_gap = 0.0;
    for (int r = 0; r < nc; ++r) {
      double d = ss[r] - xs[cone_coord[static_cast<std::size_t>(r)]];
      cone_gap += d * d;
    }
    cert_pinf = bty < 0 ? aty.norm() * bnorm0 / (-bty)
                        : std::numeric_limits<double>::infinity();
    cert_unbd = ctx < 0 ? std::sqrt(ax.squaredNorm() + cone_gap) * cnorm0 / (-ctx)
                        : std::numeric_limits<double>::infinity();
    if (tau <= 1e-11) return false;
    pres = std::sqrt((ax - problem.b * tau).squaredNorm() + cone_gap) /
           (tau * bnorm0);
    dres = (aty + problem.c * tau).norm() / (tau * cnorm0);
    pobj = ctx / tau;
    dobj = -bty / tau;
    gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    return true;
  };

  long it = 0;
  for (; it < settings.max_iters; ++it) {
    apply_map(z, znew, f);
    aa_push(z, f);
    z = znew;

    // Safeguarded Anderson step: form the extrapolated point from the
    // history, evaluate the map there, and accept only if the fixed-point
    // residual decreases.
    if (aa_cap > 0 && aa_count >= 2 && (it + 1) % aa_interval == 0) {
      Eigen::MatrixXd gram = aa_gram.topLeftCorner(aa_count, aa_count);
      gram.diagonal().array() += 1e-12 * (1.0 + gram.trace());
      Eigen::VectorXd gamma =
          gram.ldlt().solve(df_buf.leftCols(aa_count).transpose() * f);
      z_aa = prev_g - dg_buf.leftCols(aa_count) * gamma;
      apply_map(z_aa, znew_aa, f_aa);
      if (f_aa.norm() < f.norm()) {
        aa_push(z_aa, f_aa);
        z = znew_aa;
        ++aa_accepted;
      } else {
        aa_reset();  // restart the history after a failed extrapolation
      }
    }

    if ((it + 1) % settings.check_interval == 0 || it + 1 == settings.max_iters) {
      double pres = std::numeric_limits<double>::infinity();
      double dres = std::numeric_limits<double>::infinity();
      double gap = 0.0, pobj = 0.0, dobj = 0.0;
      bool normalizable = measure(z, pres, dres, gap, pobj, dobj);

      if (std::getenv("KSB_SDP_DEBUG") && (it + 1) % 10000 < settings.check_interval) {
        std::fprintf(stderr,
                     "it=%ld tau=%.2e kap=%.2e pres=%.2e dres=%.2e gap=%.2e "
                     "aa=%ld pobj=%.8f dobj=%.8f\n",
                     it + 1, tau, kappa, pres, dres, gap, aa_accepted, pobj, dobj);
      }
      if (normalizable) {
        sol.primal_res = pres;
        sol.dual_res = dres;
        sol.gap = gap;
        sol.primal_obj = pobj;
        sol.dual_obj = dobj;
        if (pres <= settings.eps_primal && dres <= settings.eps_dual &&
            gap <= settings.eps_gap) {
          sol.status = SolveStatus::Optimal;
          break;
        }
      }
      if (cert_pinf <= eps_inf) {
        sol.status = SolveStatus::Infeasible;
        break;
      }
      if (cert_unbd <= eps_inf) {
        sol.status = SolveStatus::Unbounded;
        break;
      }
      if (settings.time_limit > 0 &&
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                  .count() > settings.time_limit)
        break;  // graded below like a stall/iteration-limit exit
      if ((it + 1) % settings.stall_window == 0) {
        double cur = normalizable ? std::max(pres, dres)
                                  : std::min(cert_pinf, cert_unbd);
        best_stall = std::min(best_stall, cur);
        if (std::isfinite(prev_stall) &&
            (prev_stall - best_stall) < settings.stall_ratio * prev_stall) {
          if (++stall_strikes >= 3) {
            stalled = true;
            break;
          }
        } else {
          stall_strikes = 0;
        }
        prev_stall = best_stall;
      }
    }
  }
  sol.iterations = std::min(it + 1, settings.max_iters);
  if (sol.status != SolveStatus::Optimal && sol.status != SolveStatus::Infeasible &&
      sol.status != SolveStatus::Unbounded) {
    // Stalled or out of iterations: accept a relaxed certificate if one is
    // nearly satisfied, otherwise grade by the achieved residuals.
    if (cert_pinf <= 1e-6)
      sol.status = SolveStatus::Infeasible;
    else if (cert_unbd <= 1e-6)
      sol.status = SolveStatus::Unbounded;
    else if (std::max(sol.primal_res, sol.dual_res) <= 1e-4 && tau > 1e-11)
      sol.status = SolveStatus::Inaccurate;
    else
      sol.status = SolveStatus::IterationLimit;
    (void)stalled;
  }

  // Report multipliers in the convention c - A^T y in K*, dual obj = b^T y;
  // the embedding's y carries the opposite sign.
  if (tau > 1e-11) {
    sol.x = xs / tau;
    sol.y = -ys.head(m) / tau;
  } else {
    sol.x = xs;  // certificate direction
    sol.y = -ys.head(m);
  }
  sol.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

SdpProblem dualize(const SdpProblem& p) {
  const int m = static_cast<int>(p.b.size());
  const int n = p.vec_dim();
  SdpProblem d;
  std::vector<int> slack_off(p.blocks.size(), -1);
  int soff = 0;
  for (std::size_t k = 0; k < p.blocks.size(); ++k) {
    if (p.blocks[k].kind == BlockKind::Free) continue;
    slack_off[k] = soff;
    d.blocks.push_back(p.blocks[k]);
    soff += p.blocks[k].vec_size();
  }
  d.blocks.push_back({BlockKind::Free, m});
  const int nd = soff + m;
  d.b = p.c;
  d.c = Eigen::VectorXd::Zero(nd);
  d.c.segment(soff, m) = -p.b;
  std::vector<Eigen::Triplet<double>> trips;
  int off = 0;
  for (std::size_t k = 0; k < p.blocks.size(); ++k) {
    int vs = p.blocks[k].vec_size();
    if (p.blocks[k].kind != BlockKind::Free)
      for (int t = 0; t < vs; ++t) trips.emplace_back(off + t, slack_off[k] + t, 1.0);
    off += vs;
  }
  Eigen::SparseMatrix<double> acol = p.a;  // column-major copy for column scans
  for (int j = 0; j < acol.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(acol, j); it; ++it)
      trips.emplace_back(j, soff + static_cast<int>(it.row()), it.value());
  d.a = Eigen::SparseMatrix<double, Eigen::RowMajor>(n, nd);
  d.a.setFromTriplets(trips.begin(), trips.end());
  return d;
}

SdpSolution undualize(const SdpProblem& problem, const SdpSolution& dual_sol) {
  const int m = static_cast<int>(problem.b.size());
  const int n = problem.vec_dim();
  int soff = 0;
  for (const auto& blk : problem.blocks)
    if (blk.kind != BlockKind::Free) soff += blk.vec_size();
  SdpSolution sol;
  sol.status = dual_sol.status;
  if (sol.status == SolveStatus::Infeasible)
    sol.status = SolveStatus::Unbounded;
  else if (sol.status == SolveStatus::Unbounded)
    sol.status = SolveStatus::Infeasible;
  sol.x = -dual_sol.y;
  sol.y = dual_sol.x.segment(soff, m);
  sol.primal_obj = problem.c.dot(sol.x);
  sol.dual_obj = problem.b.dot(sol.y);
  sol.gap = std::abs(sol.primal_obj - sol.dual_obj) /
            (1.0 + std::abs(sol.primal_obj) + std::abs(sol.dual_obj));
  sol.primal_res = m > 0 ? (problem.a * sol.x - problem.b).norm() /
                               (1.0 + problem.b.norm())
                         : 0.0;
  // dual feasibility of (y, slack): c - A^T y must lie in the dual cone;
  // the dualized primal residual measured exactly this, so reuse it.
  sol.dual_res = dual_sol.primal_res;
  sol.iterations = dual_sol.iterations;
  sol.seconds = dual_sol.seconds;
  (void)n;
  return sol;
}

Eigen::MatrixXd unpack_block(const SdpProblem& problem, const Eigen::VectorXd& x,
                             int index) {
  const auto& blk = problem.blocks.at(static_cast<std::size_t>(index));
  const int off = problem.block_offset(index);
  if (blk.kind == BlockKind::Psd) {
    Eigen::MatrixXd m(blk.dim, blk.dim);
    int k = 0;
    for (int j = 0; j < blk.dim; ++j)
      for (int i = 0; i <= j; ++i, ++k) {
        double v = x[off + k];
        m(i, j) = (i == j) ? v : v / kSqrt2;
        m(j, i) = m(i, j);
      }
    return m;
  }
  return x.segment(off, blk.dim).asDiagonal();
}

namespace {

struct SdpaEntry {
  int mat, blk, i, j;
  double value;
};

// Collect entries of one svec-coordinate vector as SDPA quintuple rows for
// matrix `mat`, splitting free blocks into doubled diagonal blocks.
void collect_entries(const SdpProblem& p, int mat,
                     const std::function<double(int)>& coeff,
                     std::vector<SdpaEntry>& out) {
  int off = 0;
  int blkno = 1;
  for (const auto& blk : p.blocks) {
    for (int k = 0; k < blk.vec_size(); ++k) {
      double v = coeff(off + k);
      if (v == 0.0) continue;
      if (blk.kind == BlockKind::Psd) {
        int j = 0;
        while (SdpProblem::tri_index(0, j + 1) <= k) ++j;
        int i = k - SdpProblem::tri_index(0, j);
        double val = (i == j) ? v : v / kSqrt2;
        out.push_back({mat, blkno, i + 1, j + 1, val});
      } else if (blk.kind == BlockKind::Diag) {
        out.push_back({mat, blkno, k + 1, k + 1, v});
      } else {
        out.push_back({mat, blkno, k + 1, k + 1, v});
        out.push_back({mat, blkno, blk.dim + k + 1, blk.dim + k + 1, -v});
      }
    }
    off += blk.vec_size();
    ++blkno;
  }
}

}  // namespace

void export_sdpa(const SdpProblem& p, std::ostream& os) {
  const int m = static_cast<int>(p.b.size());
  os << m << "\n";
  os << p.blocks.size() << "\n";
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    const auto& blk = p.blocks[i];
    if (i) os << " ";
    if (blk.kind == BlockKind::Psd)
      os << blk.dim;
    else if (blk.kind == BlockKind::Diag)
      os << -blk.dim;
    else
      os << -(2 * blk.dim);
  }
  os << "\n";
  os.precision(17);
  for (int i = 0; i < m; ++i) {
    if (i) os << " ";
    os << p.b[i];
  }
  os << "\n";

  std::vector<SdpaEntry> entries;
  collect_entries(p, 0, [&](int k) { return p.c[k]; }, entries);
  for (int i = 0; i < m; ++i) {
    Eigen::RowVectorXd dense = p.a.row(i);
    collect_entries(p, i + 1, [&](int k) { return dense[k]; }, entries);
  }
  for (const auto& e : entries)
    os << e.mat << " " << e.blk << " " << e.i << " " << e.j << " " << e.value << "\n";
}

void export_sdpa(const SdpProblem& p, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  export_sdpa(p, os);
  if (!os.good()) throw std::runtime_error("write failed: " + path);
}

}  // namespace ksb
