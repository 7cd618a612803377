#ifndef IONSPEC_PROTOCOLS_HPP
#define IONSPEC_PROTOCOLS_HPP

#include <cstdint>

#include "ionspec/lineshape.hpp"

namespace ionspec {

// Head-to-head frequency estimation budget for three readout strategies at a
// fixed cycle count: one ion per cycle, two uncorrelated ions per cycle, and
// one correlated pair per cycle. Uncertainties are per-cycle sigmas at the
// operating point of each profile, the steepest side of the central fringe.
// The profiles only differ by the axis rescaling alpha, so the sigma ratios
// at those matched points are exact.
struct ProtocolComparison {
  double omega_line = 0.0;
  double tau = 0.0;

  double delta_opt_single = 0.0;  // steepest-slope point of the single profile
  double delta_opt_corr = 0.0;

  double fisher_single = 0.0;  // per cycle, (rad/s)^-2
  double fisher_pair = 0.0;
  double fisher_corr = 0.0;

  double sigma_single = 0.0;  // 1/sqrt(fisher), rad/s per cycle^(1/2)
  double sigma_pair = 0.0;
  double sigma_corr = 0.0;

  double ratio_corr_pair = 0.0;    // expect 1/sqrt(2)
  double ratio_corr_single = 0.0;  // expect 1/2

  double fwhm_single = 0.0;
  double fwhm_corr = 0.0;
  double fwhm_product = 0.0;  // coincidence spectrum of two uncorrelated spins

  // Monte Carlo check via single-point slope inversion; zero when skipped.
  double mc_sigma_single = 0.0;
  double mc_sigma_pair = 0.0;
  double mc_sigma_corr = 0.0;
  double mc_ratio_corr_pair = 0.0;
  double mc_ratio_corr_single = 0.0;
};

// tau <= 0 defaults to the pi pulse, tau = pi / omega_line. The Monte Carlo
// runs only when mc_shots and mc_replicas are both positive.
ProtocolComparison compare_protocols(double omega_line, double tau = 0.0,
                                     long mc_shots = 0, int mc_replicas = 0,
                                     std::uint64_t seed = 1);

}  // namespace ionspec

#endif
