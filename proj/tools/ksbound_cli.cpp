// Command-line front end for the ksbound shared library. Subcommands:
//   bound        solve one bound program and report/serialize the result
//   sweep        converged bounds over a grid of domain sizes (append CSV)
//   equilibria   continue a primary equilibrium branch to CSV
//   simulate     integrate the truncated system and report mean energy
//   background   recover (alpha, zeta) from the optimal quadratic bound
//   export-sdpa  write a program in sparse SDPA format
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ksbound.h"

namespace {

// FNV-1a over the canonical option string; stamped into output headers so
// artifacts can be traced back to the exact configuration.
std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct Common {
  std::string kind = "trunc";
  double domain = 0.0;
  int n_modes = 0;
  int degree = 2;
  double eps = 0.0;
  double max_iters = 0.0;
  double time_limit = 0.0;
  int workers = 1;
  double seed = 0.0;
  bool no_polish = false;
  bool no_symmetry = false;
  std::string out;
};

int kind_code(const std::string& kind) {
  if (kind == "trunc" || kind == "truncated") return KSB_KIND_TRUNCATED;
  if (kind == "pde") return KSB_KIND_PDE;
  return -1;
}

// 1 for invalid configuration, 2 for numerical/runtime failure.
int report_error(int code) {
  std::fprintf(stderr, "error: %s\n", ksb_last_error());
  return code == KSB_EINVAL ? 1 : 2;
}

ksb_options* make_options(const Common& c) {
  ksb_options* o = ksb_options_create();
  if (!o) return nullptr;
  int rc = KSB_OK;
  if (c.eps > 0) rc = rc ? rc : ksb_options_set(o, "eps", c.eps);
  if (c.max_iters > 0) rc = rc ? rc : ksb_options_set(o, "max_iters", c.max_iters);
  if (c.time_limit > 0)
    rc = rc ? rc : ksb_options_set(o, "time_limit", c.time_limit);
  if (c.workers > 1) rc = rc ? rc : ksb_options_set(o, "workers", c.workers);
  if (c.seed > 0) rc = rc ? rc : ksb_options_set(o, "seed", c.seed);
  if (c.no_polish) rc = rc ? rc : ksb_options_set(o, "polish", 0);
  if (c.no_symmetry) rc = rc ? rc : ksb_options_set(o, "symmetry", 0);
  if (rc != KSB_OK) {
    ksb_options_destroy(o);
    return nullptr;
  }
  return o;
}

std::string config_string(const Common& c, const std::string& cmd) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s kind=%s L=%.9g N=%d degree=%d eps=%.3g "
                "max_iters=%.0f time_limit=%.3g workers=%d seed=%.0f polish=%d "
                "symmetry=%d",
                cmd.c_str(), c.kind.c_str(), c.domain, c.n_modes, c.degree,
                c.eps, c.max_iters, c.time_limit, c.workers, c.seed,
                c.no_polish ? 0 : 1, c.no_symmetry ? 0 : 1);
  return buf;
}

void print_header(const Common& c, const std::string& cmd) {
  std::printf("# ksbound %s config_hash=%016" PRIx64 "\n", ksb_version(),
              fnv1a(config_string(c, cmd)));
}

void add_solver_flags(CLI::App* app, Common& c) {
  app->add_option("--eps", c.eps, "solver tolerance (default: size-dependent)")
      ->envname("KSBOUND_EPS");
  app->add_option("--max-iters", c.max_iters, "solver iteration cap")
      ->envname("KSBOUND_MAX_ITERS");
  app->add_option("--time-limit", c.time_limit,
                  "solver wall-clock limit in seconds (0 = none)")
      ->envname("KSBOUND_TIME_LIMIT");
  app->add_option("--workers", c.workers, "concurrent sweep rows")
      ->envname("KSBOUND_WORKERS");
  app->add_option("--seed", c.seed, "RNG seed")->envname("KSBOUND_SEED");
  app->add_flag("--no-polish", c.no_polish, "skip certificate clean-up");
  app->add_flag("--no-symmetry", c.no_symmetry, "disable parity block split");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Upper bounds on time-averaged energy of truncated "
               "Kuramoto-Sivashinsky dynamics"};
  app.set_config("--config", "", "INI configuration file");
  app.set_version_flag("--version", []() { return std::string(ksb_version()); });
  app.require_subcommand(1);

  Common c;

  CLI::App* bound = app.add_subcommand("bound", "solve one bound program");
  bound->add_option("--kind", c.kind, "trunc or pde")->envname("KSBOUND_KIND");
  bound->add_option("--L", c.domain, "domain size")->required()->envname("KSBOUND_L");
  bound->add_option("--N", c.n_modes, "mode count")->required()->envname("KSBOUND_N");
  bound->add_option("--degree", c.degree, "polynomial degree 2d")
      ->envname("KSBOUND_DEGREE");
  bound->add_option("--out", c.out, "JSON result path")->envname("KSBOUND_OUT");
  add_solver_flags(bound, c);

  CLI::App* sweep = app.add_subcommand("sweep", "converged bounds over L grid");
  double l_min = 0.0, l_max = 0.0;
  int points = 0, n_max = 128;
  std::vector<double> grid;
  sweep->add_option("--kind", c.kind, "trunc or pde");
  sweep->add_option("--degree", c.degree, "polynomial degree 2d");
  sweep->add_option("--Lmin", l_min, "grid start");
  sweep->add_option("--Lmax", l_max, "grid end");
  sweep->add_option("--points", points, "log-spaced grid size");
  sweep->add_option("--grid", grid, "explicit L values")->delimiter(',');
  sweep->add_option("--Nmax", n_max, "mode-count cap");
  sweep->add_option("--out", c.out, "append-only CSV path")->required();
  add_solver_flags(sweep, c);

  CLI::App* eq = app.add_subcommand("equilibria", "primary branch continuation");
  int branch = 1;
  eq->add_option("--branch", branch, "branch index n");
  eq->add_option("--Lmin", l_min, "continuation start (default just past onset)");
  eq->add_option("--Lmax", l_max, "continuation end")->required();
  eq->add_option("--N", c.n_modes, "mode count (default 16)");
  eq->add_option("--out", c.out, "CSV path (default branch.csv)");

  CLI::App* sim = app.add_subcommand("simulate", "integrate and time-average");
  double t_total = 500.0;
  sim->add_option("--L", c.domain, "domain size")->required();
  sim->add_option("--N", c.n_modes, "mode count (default from L)");
  sim->add_option("--T", t_total, "integration horizon");
  sim->add_option("--seed", c.seed, "initial-condition seed");
  sim->add_option("--out", c.out, "trajectory CSV `t,energy`");

  CLI::App* bg = app.add_subcommand("background", "recover (alpha, zeta)");
  std::string json_out;
  bg->add_option("--L", c.domain, "domain size")->required();
  bg->add_option("--N", c.n_modes, "mode count")->required();
  bg->add_option("--out", c.out, "profile CSV `x,zeta`");
  bg->add_option("--json", json_out, "JSON with alpha and z coefficients");
  add_solver_flags(bg, c);

  CLI::App* exp = app.add_subcommand("export-sdpa", "write sparse SDPA file");
  exp->add_option("--kind", c.kind, "trunc or pde");
  exp->add_option("--L", c.domain, "domain size")->required();
  exp->add_option("--N", c.n_modes, "mode count")->required();
  exp->add_option("--degree", c.degree, "polynomial degree 2d");
  exp->add_option("--out", c.out, "output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion")
      return app.exit(e);
    app.exit(e);
    return 1;
  }

  if (bound->parsed()) {
    const int kc = kind_code(c.kind);
    if (kc < 0) {
      std::fprintf(stderr, "error: unknown kind '%s'\n", c.kind.c_str());
      return 1;
    }
    ksb_options* o = make_options(c);
    if (!o) return report_error(KSB_EINVAL);
    ksb_bound_result* r = nullptr;
    int rc = ksb_bound(kc, c.n_modes, c.domain, c.degree, o, &r);
    ksb_options_destroy(o);
    if (rc != KSB_OK) return report_error(rc);
    print_header(c, "bound");
    double pres = 0, dres = 0, secs = 0;
    long iters = 0;
    ksb_bound_stats(r, &pres, &dres, &iters, &secs);
    int certified = 0;
    double cres = 0, ceig = 0, csmin = 0;
    ksb_bound_certificate(r, &certified, &cres, &ceig, &csmin);
    std::printf("bound=%.9g status=%s iters=%ld seconds=%.3f primal_res=%.3g "
                "dual_res=%.3g certified=%d\n",
                ksb_bound_value(r), ksb_bound_status(r), iters, secs, pres,
                dres, certified);
    int usable = ksb_bound_is_usable(r);
    if (!c.out.empty()) {
      rc = ksb_bound_write_json(r, c.out.c_str());
      if (rc != KSB_OK) {
        ksb_bound_result_destroy(r);
        return report_error(rc);
      }
    }
    ksb_bound_result_destroy(r);
    return usable ? 0 : 2;
  }

  if (sweep->parsed()) {
    const int kc = kind_code(c.kind);
    if (kc < 0) {
      std::fprintf(stderr, "error: unknown kind '%s'\n", c.kind.c_str());
      return 1;
    }
    if (grid.empty()) {
      if (!(l_min > 0 && l_max >= l_min && points >= 1)) {
        std::fprintf(stderr,
                     "error: provide --grid or --Lmin/--Lmax/--points\n");
        return 1;
      }
      for (int i = 0; i < points; ++i) {
        const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        grid.push_back(std::exp(std::log(l_min) +
                                t * (std::log(l_max) - std::log(l_min))));
      }
    }
    print_header(c, "sweep");
    ksb_options* o = make_options(c);
    if (!o) return report_error(KSB_EINVAL);
    int rc = ksb_sweep(kc, c.degree, grid.data(), static_cast<int>(grid.size()),
                       n_max, o, c.out.c_str());
    ksb_options_destroy(o);
    if (rc != KSB_OK) return report_error(rc);
    std::printf("sweep complete: %zu grid points -> %s\n", grid.size(),
                c.out.c_str());
    return 0;
  }

  if (eq->parsed()) {
    if (c.n_modes <= 0) c.n_modes = 16;
    if (l_min <= 0) l_min = 1.02 * branch;
    if (c.out.empty()) c.out = "branch.csv";
    print_header(c, "equilibria");
    int rc = ksb_branch_csv(branch, l_min, l_max, c.n_modes, c.out.c_str());
    if (rc != KSB_OK) return report_error(rc);
    int peak_branch = 0;
    double peak = 0.0;
    // report the envelope peak over the continued range end
    rc = ksb_envelope_max(l_max, c.n_modes, &peak_branch, &peak);
    if (rc != KSB_OK) return report_error(rc);
    std::printf("branch=%d written to %s; envelope max at L=%.9g: branch %d, "
                "energy %.9g\n",
                branch, c.out.c_str(), l_max, peak_branch, peak);
    return 0;
  }

  if (sim->parsed()) {
    if (c.n_modes <= 0)
      c.n_modes = std::max(8, 2 * static_cast<int>(std::ceil(c.domain)) + 2);
    print_header(c, "simulate");
    double mean = 0, se = 0, fnorm = 0;
    int blew = 0;
    int rc = ksb_simulate(c.n_modes, c.domain, t_total,
                          static_cast<unsigned>(c.seed),
                          c.out.empty() ? nullptr : c.out.c_str(), &mean, &se,
                          &fnorm, &blew);
    if (rc != KSB_OK) return report_error(rc);
    if (blew) {
      std::printf("blow-up detected (N=%d, L=%.9g)\n", c.n_modes, c.domain);
      return 2;
    }
    if (fnorm <= 1e-8)
      std::printf("decayed to zero: final_norm=%.3g mean_energy=%.9g\n", fnorm,
                  mean);
    else
      std::printf("mean_energy=%.9g stderr=%.3g final_norm=%.9g N=%d\n", mean,
                  se, fnorm, c.n_modes);
    return 0;
  }

  if (bg->parsed()) {
    print_header(c, "background");
    ksb_options* o = make_options(c);
    if (!o) return report_error(KSB_EINVAL);
    double alpha = 0, slope = 0;
    int rc = ksb_background(c.n_modes, c.domain, o,
                            c.out.empty() ? nullptr : c.out.c_str(),
                            json_out.empty() ? nullptr : json_out.c_str(),
                            &alpha, &slope);
    ksb_options_destroy(o);
    if (rc != KSB_OK) return report_error(rc);
    std::printf("alpha=%.9g interior_slope=%.9g\n", alpha, slope);
    return 0;
  }

  if (exp->parsed()) {
    const int kc = kind_code(c.kind);
    if (kc < 0) {
      std::fprintf(stderr, "error: unknown kind '%s'\n", c.kind.c_str());
      return 1;
    }
    print_header(c, "export-sdpa");
    int rc = ksb_export_sdpa(kc, c.n_modes, c.domain, c.degree, c.out.c_str());
    if (rc != KSB_OK) return report_error(rc);
    std::printf("wrote %s\n", c.out.c_str());
    return 0;
  }

  return 1;
}
