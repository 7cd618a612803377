#ifndef IONSPEC_LINESHAPE_HPP
#define IONSPEC_LINESHAPE_HPP

#include <array>

#include "ionspec/units.hpp"

namespace ionspec {

// Generalized Rabi resonance profile
//   P(delta) = A sin^2( (omega tau / 2) sqrt(1 + (alpha d / omega)^2) )
//                / (1 + (alpha d / omega)^2),   d = delta - center.
// alpha is the narrowing exponent: 1 for one spin, 2 for the correlated pair,
// N for the N-spin stretched states. delta and omega in rad/s, tau in s.
struct LineshapeParams {
  double contrast = 1.0;  // A
  double omega = 0.0;     // omega_line, the on-resonance gap (rad/s)
  double tau = 0.0;       // pulse duration (s)
  double alpha = 1.0;
  double center = 0.0;    // resonance position on the scan axis (rad/s)
};

double lineshape(const LineshapeParams& p, double delta);

// Value plus partial derivatives in the order A, omega, tau, alpha, center,
// and the derivative along the scan axis.
struct LineshapeGrad {
  double value = 0.0;
  std::array<double, 5> d_param{};  // d/dA, d/domega, d/dtau, d/dalpha, d/dcenter
  double d_delta = 0.0;
};

LineshapeGrad lineshape_grad(const LineshapeParams& p, double delta);

// Expected (omega_line, alpha) for a probability spectrum generated by the
// bare models when the scan axis is the physical detuning. The dressed-state
// gap on resonance is twice the Hamiltonian coupling coefficient, so
// omega_line = 2 omega for every kind; only alpha differs.
enum class ScanKind { single_spin, even_pair, odd_pair, ghz };

struct LineshapeMap {
  double omega_line = 0.0;
  double alpha = 0.0;
};

LineshapeMap map_hamiltonian_to_lineshape(double omega, ScanKind kind,
                                          int n_spins = 2);

// Binary-outcome Fisher information per shot, (dP/ddelta)^2 / (P (1 - P)).
double fisher_per_shot(const LineshapeParams& p, double delta);

// Full width at half maximum of the profile, and of the product of two
// identical profiles (the coincidence spectrum of two uncorrelated spins).
double lineshape_fwhm(const LineshapeParams& p, bool squared = false);

}  // namespace ionspec

#endif
