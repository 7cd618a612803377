#include "ionspec/lineshape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ionspec {

double lineshape(const LineshapeParams& p, double delta) {
  double d = delta - p.center;
  double x = p.alpha * d / p.omega;
  double u = 1.0 + x * x;
  double phi = 0.5 * p.omega * p.tau * std::sqrt(u);
  double s = std::sin(phi);
  return p.contrast * s * s / u;
}

LineshapeGrad lineshape_grad(const LineshapeParams& p, double delta) {
  double d = delta - p.center;
  double w = p.omega;
  double x = p.alpha * d / w;
  double u = 1.0 + x * x;
  double rt = std::sqrt(u);
  double phi = 0.5 * w * p.tau * rt;
  double sn = std::sin(phi);
  double sin2phi = std::sin(2.0 * phi);

  LineshapeGrad g;
  double shape = sn * sn / u;  // P / A
  g.value = p.contrast * shape;

  // u depends on delta, alpha, omega; phi on u, omega, tau.
  double u_d = 2.0 * p.alpha * p.alpha * d / (w * w);
  double u_alpha = 2.0 * p.alpha * d * d / (w * w);
  double u_omega = -2.0 * x * x / w;
  double phi_u = 0.25 * w * p.tau / rt;  // partial, u varying
  double dP_du = p.contrast * (sin2phi * phi_u / u - sn * sn / (u * u));
  double dP_dphi_direct = p.contrast * sin2phi / u;

  g.d_param[0] = shape;                                       // contrast
  g.d_param[1] = dP_dphi_direct * 0.5 * p.tau * rt + dP_du * u_omega;  // omega
  g.d_param[2] = dP_dphi_direct * 0.5 * w * rt;               // tau
  g.d_param[3] = dP_du * u_alpha;                             // alpha
  g.d_delta = dP_du * u_d;
  g.d_param[4] = -g.d_delta;                                  // center
  return g;
}

LineshapeMap map_hamiltonian_to_lineshape(double omega, ScanKind kind,
                                          int n_spins) {
  LineshapeMap m;
  m.omega_line = 2.0 * omega;
  switch (kind) {
    case ScanKind::single_spin:
      m.alpha = 1.0;
      break;
    case ScanKind::even_pair:
    case ScanKind::odd_pair:
      m.alpha = 2.0;
      break;
    case ScanKind::ghz:
      if (n_spins < 1) throw std::invalid_argument("n_spins must be positive");
      m.alpha = static_cast<double>(n_spins);
      break;
  }
  return m;
}

double fisher_per_shot(const LineshapeParams& p, double delta) {
  LineshapeGrad g = lineshape_grad(p, delta);
  double prob = std::clamp(g.value, 1e-12, 1.0 - 1e-12);
  return g.d_delta * g.d_delta / (prob * (1.0 - prob));
}

double lineshape_fwhm(const LineshapeParams& p, bool squared) {
  // Peak sits at the center for any pulse area we care about; walk outward
  // until the (possibly squared) profile falls below half its peak, then
  // bisect the crossing.
  auto value = [&](double delta) {
    double v = lineshape(p, delta);
    return squared ? v * v : v;
  };
  double peak = value(p.center);
  if (peak <= 0) throw std::invalid_argument("profile has no peak to measure");
  double half = 0.5 * peak;
  double step = 0.05 * p.omega / std::max(p.alpha, 1.0);
  double hi = p.center + step;
  while (value(hi) > half) {
    hi += step;
    if (hi - p.center > 1e4 * p.omega)
      throw std::runtime_error("half maximum not found");
  }
  double lo = hi - step;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (value(mid) > half ? lo : hi) = mid;
  }
  return 2.0 * (0.5 * (lo + hi) - p.center);  // symmetric about the center
}

}  // namespace ionspec
