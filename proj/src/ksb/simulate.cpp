#include "ksb/simulate.hpp"

#include <cmath>
#include <random>

namespace ksb {

namespace {

constexpr double kBlowUpNorm = 1e6;

// phi_k(z) = (e^z - sum_{j<k} z^j/j!) / z^k, evaluated by Taylor series for
// small |z| where the closed form cancels catastrophically.
double phi(int k, double z) {
  if (std::abs(z) > 0.5) {
    double e = std::exp(z);
    double p = e;  // phi_0
    double fact = 1.0;
    for (int j = 1; j <= k; ++j) {
      p = (p - 1.0 / fact) / z;
      fact *= j;
    }
    // the recurrence above divides out the partial sums incrementally:
    // phi_{j}(z) = (phi_{j-1}(z) - 1/(j-1)!) / z
    return p;
  }
  double term = 1.0, sum = 0.0;
  double fact = 1.0;
  for (int j = 1; j <= k; ++j) fact *= j;
  term = 1.0 / fact;
  for (int j = 0; j < 24; ++j) {
    sum += term;
    term *= z / static_cast<double>(k + j + 1);
  }
  return sum;
}

struct Etdrk4Coeffs {
  Eigen::ArrayXd e, e2, q, f1, f2, f3;
};

Etdrk4Coeffs make_coeffs(const KsSystem& sys, double dt) {
  const int n = sys.params.n_modes;
  Etdrk4Coeffs c;
  c.e.resize(n);
  c.e2.resize(n);
  c.q.resize(n);
  c.f1.resize(n);
  c.f2.resize(n);
  c.f3.resize(n);
  for (int i = 0; i < n; ++i) {
    const double z = dt * sys.lambda(i + 1);
    const double p1 = phi(1, z), p2 = phi(2, z), p3 = phi(3, z);
    c.e[i] = std::exp(z);
    c.e2[i] = std::exp(0.5 * z);
    c.q[i] = 0.5 * dt * phi(1, 0.5 * z);
    c.f1[i] = dt * (p1 - 3.0 * p2 + 4.0 * p3);
    c.f2[i] = dt * (p2 - 2.0 * p3);
    c.f3[i] = dt * (4.0 * p3 - p2);
  }
  return c;
}

}  // namespace

double default_time_step(double domain, int n_modes) {
  const double r = domain / n_modes;
  return 0.01 * std::min(1.0, r * r);
}

Trajectory integrate(const Eigen::VectorXd& a0, double domain, int n_modes,
                     double t_final, const IntegrationOptions& opts) {
  if (a0.size() != n_modes)
    throw std::invalid_argument("initial state size does not match mode count");
  if (!(t_final > 0)) throw std::invalid_argument("t_final must be positive");
  KsSystem sys = build_system({n_modes, domain});
  const double dt = opts.dt > 0 ? opts.dt : default_time_step(domain, n_modes);
  const long steps = static_cast<long>(std::ceil(t_final / dt - 1e-9));
  const Etdrk4Coeffs c = make_coeffs(sys, dt);
  const double escale = 1.0 / (2.0 * M_PI * domain);

  Eigen::ArrayXd lambda(n_modes);
  for (int i = 0; i < n_modes; ++i) lambda[i] = sys.lambda(i + 1);
  auto nonlin = [&](const Eigen::ArrayXd& u) -> Eigen::ArrayXd {
    return eval_rhs(sys, u.matrix()).array() - lambda * u;
  };

  Trajectory traj;
  traj.dt = dt;
  traj.times.reserve(static_cast<std::size_t>(steps) + 1);
  traj.energy.reserve(static_cast<std::size_t>(steps) + 1);

  Eigen::ArrayXd u = a0.array();
  traj.times.push_back(0.0);
  traj.energy.push_back(u.matrix().squaredNorm() * escale);
  if (opts.state_stride > 0) traj.states.push_back(u.matrix());

  for (long s = 1; s <= steps; ++s) {
    const Eigen::ArrayXd nu = nonlin(u);
    const Eigen::ArrayXd ua = c.e2 * u + c.q * nu;
    const Eigen::ArrayXd na = nonlin(ua);
    const Eigen::ArrayXd ub = c.e2 * u + c.q * na;
    const Eigen::ArrayXd nb = nonlin(ub);
    const Eigen::ArrayXd uc = c.e2 * ua + c.q * (2.0 * nb - nu);
    const Eigen::ArrayXd nc = nonlin(uc);
    u = c.e * u + c.f1 * nu + 2.0 * c.f2 * (na + nb) + c.f3 * nc;

    const double t = static_cast<double>(s) * dt;
    const double nrm = u.matrix().norm();
    if (!std::isfinite(nrm) || nrm > kBlowUpNorm) {
      traj.blew_up = true;
      traj.blow_up_time = t;
      break;
    }
    traj.times.push_back(t);
    traj.energy.push_back(nrm * nrm * escale);
    if (opts.state_stride > 0 && s % opts.state_stride == 0)
      traj.states.push_back(u.matrix());
  }
  traj.final_state = u.matrix();
  return traj;
}

EnergyStats empirical_mean_energy(const Eigen::VectorXd& a0, double domain,
                                  int n_modes, double t_total,
                                  double t_transient,
                                  const IntegrationOptions& opts) {
  if (t_transient < 0) t_transient = 0.2 * t_total;
  if (!(t_transient < t_total))
    throw std::invalid_argument("transient must end before t_total");
  Trajectory traj = integrate(a0, domain, n_modes, t_total, opts);
  if (traj.blew_up) throw BlowUpError(traj.blow_up_time);

  std::size_t first = 0;
  while (first < traj.times.size() && traj.times[first] < t_transient) ++first;
  const std::size_t count = traj.times.size() - first;
  if (count < 10) throw std::invalid_argument("averaging window too short");

  double mean = 0.0;
  for (std::size_t i = first; i < traj.times.size(); ++i) mean += traj.energy[i];
  mean /= static_cast<double>(count);

  // standard error from 10 batch means (batches are contiguous in time, so
  // the estimate is robust to the serial correlation of the trajectory)
  constexpr int kBatches = 10;
  double batch_mean[kBatches];
  for (int bvar = 0; bvar < kBatches; ++bvar) {
    const std::size_t lo = first + (count * static_cast<std::size_t>(bvar)) / kBatches;
    const std::size_t hi =
        first + (count * (static_cast<std::size_t>(bvar) + 1)) / kBatches;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += traj.energy[i];
    batch_mean[bvar] = s / static_cast<double>(hi - lo);
  }
  double var = 0.0;
  for (int bvar = 0; bvar < kBatches; ++bvar) {
    const double d = batch_mean[bvar] - mean;
    var += d * d;
  }
  var /= static_cast<double>(kBatches - 1);

  EnergyStats st;
  st.mean = mean;
  st.stderr_mean = std::sqrt(var / kBatches);
  st.t_total = t_total;
  st.t_transient = t_transient;
  return st;
}

Eigen::VectorXd random_initial_state(int n_modes, double domain, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd a(n_modes);
  const double amp = std::sqrt(M_PI * domain);
  for (int i = 0; i < n_modes; ++i)
    a[i] = amp * gauss(rng) / (1.0 + static_cast<double>(i) * i / 4.0);
  return a;
}

}  // namespace ksb
