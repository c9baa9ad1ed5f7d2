#include "ksb/background.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace ksb {

BackgroundProfile recover_background(double c, const Eigen::VectorXd& linear,
                                     double domain) {
  if (c == 0.0) throw std::invalid_argument("degenerate quadratic leading term");
  if (!(domain > 0)) throw std::invalid_argument("domain must be positive");
  BackgroundProfile p;
  p.alpha = 4.0 * M_PI * domain * c;
  p.z = -linear / (2.0 * c);
  p.domain = domain;
  p.n_modes = static_cast<int>(linear.size());
  return p;
}

Eigen::VectorXd background_to_linear(const BackgroundProfile& profile) {
  const double c = profile.alpha / (4.0 * M_PI * profile.domain);
  return -2.0 * c * profile.z;
}

double sample_zeta(const BackgroundProfile& profile, double x) {
  const double scale = 1.0 / std::sqrt(M_PI * profile.domain);
  double s = 0.0;
  for (int n = 1; n <= profile.n_modes; ++n)
    s += profile.z[n - 1] * std::sin(n * x / profile.domain);
  return scale * s;
}

Eigen::VectorXd sample_zeta(const BackgroundProfile& profile,
                            const Eigen::VectorXd& x) {
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = sample_zeta(profile, x[i]);
  return out;
}

double sample_zeta_derivative(const BackgroundProfile& profile, double x) {
  const double scale = 1.0 / std::sqrt(M_PI * profile.domain);
  double s = 0.0;
  for (int n = 1; n <= profile.n_modes; ++n)
    s += profile.z[n - 1] * (n / profile.domain) * std::cos(n * x / profile.domain);
  return scale * s;
}

double fit_interior_slope(const BackgroundProfile& profile, int samples) {
  if (samples < 16) throw std::invalid_argument("too few samples");
  // Recovered profiles carry only even-index coefficients, so one sawtooth
  // period spans pi L; fall back to the full 2 pi L period otherwise.
  bool even_only = true;
  for (int n = 1; n <= profile.n_modes; n += 2)
    if (std::abs(profile.z[n - 1]) > 1e-8 * (1.0 + profile.z.norm())) {
      even_only = false;
      break;
    }
  const double period = (even_only ? 1.0 : 2.0) * M_PI * profile.domain;

  // locate the boundary layer at the steepest point of the profile
  double x0 = 0.0, dmax = -1.0;
  for (int i = 0; i < samples; ++i) {
    const double x = period * i / samples;
    const double d = std::abs(sample_zeta_derivative(profile, x));
    if (d > dmax) {
      dmax = d;
      x0 = x;
    }
  }
  // interior segment between consecutive layers, shrunk by 15% of the
  // half-period at each end
  const double margin = 0.15 * (period / 2.0);
  const double lo = x0 + margin;
  const double hi = x0 + period - margin;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int cnt = 0;
  for (int i = 0; i < samples; ++i) {
    const double x = lo + (hi - lo) * i / (samples - 1);
    const double y = sample_zeta(profile, x);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  const double denom = cnt * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) throw std::runtime_error("degenerate slope fit");
  return (cnt * sxy - sx * sy) / denom;
}

void write_profile_csv(const BackgroundProfile& profile, const std::string& path,
                       int samples) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.precision(12);
  os << "x,zeta\n";
  const double half = M_PI * profile.domain;
  for (int i = 0; i <= samples; ++i) {
    const double x = -half + 2.0 * half * i / samples;
    os << x << "," << sample_zeta(profile, x) << "\n";
  }
  if (!os.good()) throw std::runtime_error("write failed: " + path);
}

void write_profile_json(const BackgroundProfile& profile, const std::string& path) {
  nlohmann::json j;
  j["alpha"] = profile.alpha;
  j["L"] = profile.domain;
  j["N"] = profile.n_modes;
  j["z"] = std::vector<double>(profile.z.data(), profile.z.data() + profile.z.size());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << j.dump(2) << "\n";
  if (!os.good()) throw std::runtime_error("write failed: " + path);
}

}  // namespace ksb
