/* C interface to the ksbound library: upper bounds on the time-averaged
 * energy of Galerkin truncations of the Kuramoto-Sivashinsky equation via
 * sum-of-squares programming, plus equilibrium continuation, time
 * integration, and background-method recovery.
 *
 * All functions return KSB_OK on success or an error code; the message for
 * the most recent failure on the calling thread is available from
 * ksb_last_error(). Objects returned through out-parameters are owned by
 * the caller and released with the matching _destroy function.
 */
#ifndef KSBOUND_H
#define KSBOUND_H

#ifdef __cplusplus
extern "C" {
#endif

#define KSB_OK 0       /* success */
#define KSB_EINVAL 1   /* invalid argument or configuration */
#define KSB_ESOLVER 2  /* numerical failure (solver, Newton, blow-up) */
#define KSB_EIO 3      /* file I/O failure */

/* Message for the last error on this thread; empty string if none. */
const char* ksb_last_error(void);

const char* ksb_version(void);

/* ---- options ---------------------------------------------------------- */

typedef struct ksb_options ksb_options;

ksb_options* ksb_options_create(void);
void ksb_options_destroy(ksb_options* opts);

/* Known keys (unknown keys are rejected with KSB_EINVAL):
 *   eps         solver tolerance; overrides the size-dependent default
 *   max_iters   solver iteration cap (default 5e6)
 *   time_limit  solver wall-clock limit in seconds (0 = none, default)
 *   polish      0/1 certificate clean-up after the solve (default 1)
 *   symmetry    0/1 parity block-diagonalization (default 1)
 *   workers     concurrent rows in sweeps (default 1)
 *   seed        RNG seed for certificate sampling / initial conditions
 */
int ksb_options_set(ksb_options* opts, const char* key, double value);

/* ---- bound computation ------------------------------------------------ */

#define KSB_KIND_TRUNCATED 0
#define KSB_KIND_PDE 1

typedef struct ksb_bound_result ksb_bound_result;

/* Solve the degree-2d bound program at (N, L). A completed solve returns
 * KSB_OK even when the program is infeasible or hits the iteration limit;
 * inspect ksb_bound_status. KSB_ESOLVER signals an internal failure. */
int ksb_bound(int kind, int n_modes, double domain, int degree2d,
              const ksb_options* opts, ksb_bound_result** out);
void ksb_bound_result_destroy(ksb_bound_result* result);

double ksb_bound_value(const ksb_bound_result* result);
/* "optimal", "inaccurate", "infeasible", "unbounded", or "iteration-limit" */
const char* ksb_bound_status(const ksb_bound_result* result);
int ksb_bound_is_usable(const ksb_bound_result* result);
int ksb_bound_stats(const ksb_bound_result* result, double* primal_res,
                    double* dual_res, long* iterations, double* seconds);
int ksb_bound_certificate(const ksb_bound_result* result, int* certified,
                          double* residual, double* min_eigenvalue,
                          double* sample_min);
/* Decision values of the auxiliary functional; returns the count, or copies
 * up to len entries when buf is non-NULL. */
int ksb_bound_coeffs(const ksb_bound_result* result, double* buf, int len);
/* JSON object mirroring the result, including named V coefficients. */
int ksb_bound_write_json(const ksb_bound_result* result, const char* path);

/* Increase N from n_start until the bound plateaus (relative change below
 * plateau_tol twice in a row) or n_max is reached. Appends one CSV row per
 * solve to csv_path when non-NULL. */
int ksb_converge_in_n(int kind, double domain, int degree2d, int n_start,
                      int n_max, double plateau_tol, const ksb_options* opts,
                      const char* csv_path, int* converged, int* n_used,
                      double* bound);

/* One converged bound per grid point, appended to csv_path (resumable:
 * rows already present are skipped). */
int ksb_sweep(int kind, int degree2d, const double* grid, int grid_len,
              int n_max, const ksb_options* opts, const char* csv_path);

/* Write the degree-2d program at (N, L) in sparse SDPA format. */
int ksb_export_sdpa(int kind, int n_modes, double domain, int degree2d,
                    const char* path);

/* ---- equilibria ------------------------------------------------------- */

/* Continue the branch bifurcating in mode `branch` over [l_min, l_max] and
 * write CSV rows `n,L,N,energy,residual` to path. */
int ksb_branch_csv(int branch, double l_min, double l_max, int n_modes,
                   const char* path);

/* Maximum primary-equilibrium energy at domain L and its branch index. */
int ksb_envelope_max(double domain, int n_modes, int* branch, double* energy);

/* ---- simulation ------------------------------------------------------- */

/* Integrate from a pseudo-random initial state (selected by `seed`) to
 * t_total and report the time-averaged energy over the final 80%. Writes a
 * trajectory CSV `t,energy` when csv_path is non-NULL. `blew_up` is set to
 * 1 (with KSB_OK) when the trajectory exceeds the blow-up threshold. */
int ksb_simulate(int n_modes, double domain, double t_total, unsigned seed,
                 const char* csv_path, double* mean, double* stderr_mean,
                 double* final_norm, int* blew_up);

/* ---- background method ------------------------------------------------ */

/* Solve the quadratic (2d = 2) bound at (N, L), recover (alpha, zeta), and
 * optionally write the profile CSV `x,zeta` and a JSON document with alpha
 * and the z coefficients. Reports alpha and the interior slope of zeta. */
int ksb_background(int n_modes, double domain, const ksb_options* opts,
                   const char* csv_path, const char* json_path, double* alpha,
                   double* interior_slope);

#ifdef __cplusplus
}
#endif

#endif /* KSBOUND_H */
