#include "ksbound.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <string>

#include "json.hpp"
#include "ksb/background.hpp"
#include "ksb/bounds.hpp"
#include "ksb/equilibria.hpp"
#include "ksb/simulate.hpp"

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* what) {
  g_last_error = what;
  return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const std::invalid_argument& e) {
    return fail(KSB_EINVAL, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(KSB_EIO, e.what());
  } catch (const std::exception& e) {
    return fail(KSB_ESOLVER, e.what());
  } catch (...) {
    return fail(KSB_ESOLVER, "unknown error");
  }
}

ksb::BoundKind to_kind(int kind) {
  if (kind == KSB_KIND_TRUNCATED) return ksb::BoundKind::Truncated;
  if (kind == KSB_KIND_PDE) return ksb::BoundKind::Pde;
  throw std::invalid_argument("unknown bound kind");
}

}  // namespace

struct ksb_options {
  ksb::BoundOptions bound;
  int workers = 1;
};

struct ksb_bound_result {
  ksb::BoundResult result;
};

extern "C" {

const char* ksb_last_error(void) { return g_last_error.c_str(); }

const char* ksb_version(void) { return "0.1.0"; }

ksb_options* ksb_options_create(void) { return new (std::nothrow) ksb_options; }

void ksb_options_destroy(ksb_options* opts) { delete opts; }

int ksb_options_set(ksb_options* opts, const char* key, double value) {
  return guarded([&] {
    if (!opts || !key) throw std::invalid_argument("null options or key");
    const std::string k = key;
    if (k == "eps") {
      if (!(value > 0)) throw std::invalid_argument("eps must be positive");
      opts->bound.auto_eps = false;
      opts->bound.solver.eps_primal = value;
      opts->bound.solver.eps_dual = value;
      opts->bound.solver.eps_gap = value;
    } else if (k == "max_iters") {
      if (value < 1) throw std::invalid_argument("max_iters must be >= 1");
      opts->bound.solver.max_iters = static_cast<long>(value);
    } else if (k == "time_limit") {
      if (value < 0) throw std::invalid_argument("time_limit must be >= 0");
      opts->bound.solver.time_limit = value;
    } else if (k == "polish") {
      opts->bound.polish = value != 0;
    } else if (k == "symmetry") {
      opts->bound.use_symmetry = value != 0;
    } else if (k == "workers") {
      if (value < 1) throw std::invalid_argument("workers must be >= 1");
      opts->workers = static_cast<int>(value);
    } else if (k == "seed") {
      opts->bound.sample_seed = static_cast<unsigned>(value);
    } else {
      throw std::invalid_argument("unknown option key: " + k);
    }
    return KSB_OK;
  });
}

int ksb_bound(int kind, int n_modes, double domain, int degree2d,
              const ksb_options* opts, ksb_bound_result** out) {
  return guarded([&] {
    if (!out) throw std::invalid_argument("null result pointer");
    ksb::BoundOptions bo = opts ? opts->bound : ksb::BoundOptions{};
    ksb::BoundResult r = to_kind(kind) == ksb::BoundKind::Truncated
                             ? ksb::bound_truncated(n_modes, domain, degree2d, bo)
                             : ksb::bound_pde(n_modes, domain, degree2d, bo);
    *out = new ksb_bound_result{std::move(r)};
    return KSB_OK;
  });
}

void ksb_bound_result_destroy(ksb_bound_result* result) { delete result; }

double ksb_bound_value(const ksb_bound_result* result) {
  return result ? result->result.bound : 0.0;
}

const char* ksb_bound_status(const ksb_bound_result* result) {
  return result ? ksb::to_string(result->result.status) : "invalid";
}

int ksb_bound_is_usable(const ksb_bound_result* result) {
  return result && result->result.usable() ? 1 : 0;
}

int ksb_bound_stats(const ksb_bound_result* result, double* primal_res,
                    double* dual_res, long* iterations, double* seconds) {
  return guarded([&] {
    if (!result) throw std::invalid_argument("null result");
    if (primal_res) *primal_res = result->result.primal_res;
    if (dual_res) *dual_res = result->result.dual_res;
    if (iterations) *iterations = result->result.iterations;
    if (seconds) *seconds = result->result.seconds;
    return KSB_OK;
  });
}

int ksb_bound_certificate(const ksb_bound_result* result, int* certified,
                          double* residual, double* min_eigenvalue,
                          double* sample_min) {
  return guarded([&] {
    if (!result) throw std::invalid_argument("null result");
    const auto& c = result->result.certificate;
    if (certified) *certified = c.certified ? 1 : 0;
    if (residual) *residual = c.residual;
    if (min_eigenvalue) *min_eigenvalue = c.min_eigenvalue;
    if (sample_min) *sample_min = c.sample_min;
    return KSB_OK;
  });
}

int ksb_bound_coeffs(const ksb_bound_result* result, double* buf, int len) {
  if (!result) return -1;
  const auto& c = result->result.coeffs;
  if (buf) {
    const int n = std::min<int>(len, static_cast<int>(c.size()));
    std::memcpy(buf, c.data(), sizeof(double) * static_cast<std::size_t>(n));
  }
  return static_cast<int>(c.size());
}

int ksb_bound_write_json(const ksb_bound_result* result, const char* path) {
  return guarded([&] {
    if (!result || !path) throw std::invalid_argument("null result or path");
    const ksb::BoundResult& r = result->result;
    nlohmann::json j;
    j["L"] = r.domain;
    j["N"] = r.n_modes;
    j["degree"] = r.degree;
    j["kind"] = ksb::to_string(r.kind);
    j["bound"] = r.bound;
    j["status"] = ksb::to_string(r.status);
    j["primal_res"] = r.primal_res;
    j["dual_res"] = r.dual_res;
    j["iters"] = r.iterations;
    j["seconds"] = r.seconds;
    j["certificate"] = {{"certified", r.certificate.certified},
                        {"residual", r.certificate.residual},
                        {"min_eigenvalue", r.certificate.min_eigenvalue},
                        {"sample_min", r.certificate.sample_min},
                        {"bound_adjustment", r.certificate.bound_adjustment}};
    if (r.usable()) {
      ksb::SosProgram prog = ksb::rebuild_program(r);
      ksb::VarContext ctx{prog.n_vars, prog.pde};
      nlohmann::json coeffs = nlohmann::json::object();
      for (const auto& v : prog.vars) {
        std::string name;
        switch (v.role) {
          case ksb::VarRole::Bound: name = "B"; break;
          case ksb::VarRole::LeadingCoeff: name = "c"; break;
          case ksb::VarRole::PCoeff:
            name = "P[" +
                   ksb::Polynomial::term(prog.n_vars, v.monomial, 1.0).to_string(ctx) +
                   "]";
            break;
          case ksb::VarRole::RCoeff:
            name = "R" + std::to_string(v.r_mode) + "[" +
                   ksb::Polynomial::term(prog.n_vars, v.monomial, 1.0).to_string(ctx) +
                   "]";
            break;
        }
        coeffs[name] = r.coeffs.at(static_cast<std::size_t>(v.id));
      }
      j["coeffs"] = coeffs;
    }
    std::ofstream os(path);
    if (!os) throw std::ios_base::failure("cannot open " + std::string(path));
    os << j.dump(2) << "\n";
    if (!os.good()) throw std::ios_base::failure("write failed");
    return KSB_OK;
  });
}

int ksb_converge_in_n(int kind, double domain, int degree2d, int n_start,
                      int n_max, double plateau_tol, const ksb_options* opts,
                      const char* csv_path, int* converged, int* n_used,
                      double* bound) {
  return guarded([&] {
    ksb::BoundOptions bo = opts ? opts->bound : ksb::BoundOptions{};
    ksb::ConvergenceStudy study = ksb::converge_in_N(
        domain, degree2d, to_kind(kind), n_start, n_max, plateau_tol, bo);
    if (csv_path) {
      for (const auto& r : study.results) {
        ksb::SweepRow row;
        row.domain = r.domain;
        row.n_modes = r.n_modes;
        row.degree = r.degree;
        row.kind = r.kind;
        row.bound = r.bound;
        row.status = r.status;
        row.primal_res = r.primal_res;
        row.dual_res = r.dual_res;
        row.iterations = r.iterations;
        row.seconds = r.seconds;
        ksb::append_sweep_csv(row, csv_path);
      }
    }
    if (converged) *converged = study.converged ? 1 : 0;
    if (n_used)
      *n_used = study.results.empty() ? 0 : study.results.back().n_modes;
    if (bound) *bound = study.bound;
    return KSB_OK;
  });
}

int ksb_sweep(int kind, int degree2d, const double* grid, int grid_len,
              int n_max, const ksb_options* opts, const char* csv_path) {
  return guarded([&] {
    if (!grid || grid_len < 1) throw std::invalid_argument("empty sweep grid");
    if (!csv_path) throw std::invalid_argument("sweep requires a CSV path");
    std::vector<double> g(grid, grid + grid_len);
    ksb::BoundOptions bo = opts ? opts->bound : ksb::BoundOptions{};
    ksb::sweep_L(g, degree2d, to_kind(kind), csv_path,
                 opts ? opts->workers : 1, n_max, bo);
    return KSB_OK;
  });
}

int ksb_export_sdpa(int kind, int n_modes, double domain, int degree2d,
                    const char* path) {
  return guarded([&] {
    if (!path) throw std::invalid_argument("null path");
    ksb::SosProgram prog =
        to_kind(kind) == ksb::BoundKind::Truncated
            ? ksb::build_truncated_program(n_modes, domain, degree2d)
            : ksb::build_pde_program(n_modes, domain, degree2d);
    try {
      ksb::export_sdpa(ksb::to_sdp(prog), std::string(path));
    } catch (const std::runtime_error& e) {
      throw std::ios_base::failure(e.what());
    }
    return KSB_OK;
  });
}

int ksb_branch_csv(int branch, double l_min, double l_max, int n_modes,
                   const char* path) {
  return guarded([&] {
    if (!path) throw std::invalid_argument("null path");
    ksb::BranchCurve curve = ksb::continue_branch(branch, l_min, l_max, n_modes);
    std::ofstream os(path);
    if (!os) throw std::ios_base::failure("cannot open " + std::string(path));
    os.precision(12);
    os << "n,L,N,energy,residual\n";
    for (const auto& s : curve.samples)
      os << curve.branch << "," << s.domain << "," << s.n_modes << ","
         << s.energy << "," << s.residual << "\n";
    if (!os.good()) throw std::ios_base::failure("write failed");
    return KSB_OK;
  });
}

int ksb_envelope_max(double domain, int n_modes, int* branch, double* energy) {
  return guarded([&] {
    auto [n, e] = ksb::envelope_max_energy(domain, n_modes);
    if (branch) *branch = n;
    if (energy) *energy = e;
    return KSB_OK;
  });
}

int ksb_simulate(int n_modes, double domain, double t_total, unsigned seed,
                 const char* csv_path, double* mean, double* stderr_mean,
                 double* final_norm, int* blew_up) {
  return guarded([&] {
    Eigen::VectorXd a0 = ksb::random_initial_state(n_modes, domain, seed);
    ksb::Trajectory traj = ksb::integrate(a0, domain, n_modes, t_total);
    if (csv_path) {
      std::ofstream os(csv_path);
      if (!os) throw std::ios_base::failure("cannot open " + std::string(csv_path));
      os.precision(12);
      os << "t,energy\n";
      for (std::size_t i = 0; i < traj.times.size(); ++i)
        os << traj.times[i] << "," << traj.energy[i] << "\n";
      if (!os.good()) throw std::ios_base::failure("write failed");
    }
    if (blew_up) *blew_up = traj.blew_up ? 1 : 0;
    if (final_norm) *final_norm = traj.final_state.norm();
    if (traj.blew_up) {
      if (mean) *mean = 0.0;
      if (stderr_mean) *stderr_mean = 0.0;
      return KSB_OK;
    }
    const double t_transient = 0.2 * t_total;
    std::size_t first = 0;
    while (first < traj.times.size() && traj.times[first] < t_transient) ++first;
    const std::size_t count = traj.times.size() - first;
    if (count < 10) throw std::invalid_argument("averaging window too short");
    double m = 0.0;
    for (std::size_t i = first; i < traj.times.size(); ++i) m += traj.energy[i];
    m /= static_cast<double>(count);
    if (mean) *mean = m;
    if (stderr_mean) {
      constexpr int kBatches = 10;
      double var = 0.0;
      for (int b = 0; b < kBatches; ++b) {
        const std::size_t lo = first + (count * static_cast<std::size_t>(b)) / kBatches;
        const std::size_t hi =
            first + (count * (static_cast<std::size_t>(b) + 1)) / kBatches;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += traj.energy[i];
        const double d = s / static_cast<double>(hi - lo) - m;
        var += d * d;
      }
      *stderr_mean = std::sqrt(var / (kBatches - 1) / kBatches);
    }
    return KSB_OK;
  });
}

int ksb_background(int n_modes, double domain, const ksb_options* opts,
                   const char* csv_path, const char* json_path, double* alpha,
                   double* interior_slope) {
  return guarded([&] {
    ksb::BoundOptions bo = opts ? opts->bound : ksb::BoundOptions{};
    ksb::BoundResult r = ksb::bound_truncated(n_modes, domain, 2, bo);
    if (!r.usable())
      throw std::runtime_error(std::string("quadratic bound solve failed: ") +
                               ksb::to_string(r.status));
    ksb::SosProgram prog = ksb::rebuild_program(r, bo.use_symmetry);
    const double c = r.leading_coeff(prog);
    Eigen::VectorXd lin = ksb::linear_coeffs(prog, r.coeffs);
    ksb::BackgroundProfile profile = ksb::recover_background(c, lin, domain);
    try {
      if (csv_path) ksb::write_profile_csv(profile, csv_path);
      if (json_path) ksb::write_profile_json(profile, json_path);
    } catch (const std::runtime_error& e) {
      throw std::ios_base::failure(e.what());
    }
    if (alpha) *alpha = profile.alpha;
    if (interior_slope) *interior_slope = ksb::fit_interior_slope(profile);
    return KSB_OK;
  });
}

}  // extern "C"
