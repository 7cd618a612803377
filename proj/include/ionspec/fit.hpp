#ifndef IONSPEC_FIT_HPP
#define IONSPEC_FIT_HPP

#include <Eigen/Dense>
#include <array>

#include "ionspec/lineshape.hpp"

namespace ionspec {

// One spectrum column against the scan axis. With shots == 0 the y values
// are exact probabilities and the fit is least squares; with shots > 0 the
// y values are observed fractions k/shots and the fit maximizes the binomial
// likelihood.
struct FitData {
  Eigen::VectorXd delta;  // rad/s
  Eigen::VectorXd y;
  long shots = 0;
};

// Parameter order everywhere: contrast, omega, tau, alpha, center.
struct FitOptions {
  std::array<bool, 5> free = {true, true, false, true, true};
  double alpha_min = 0.25;
  double alpha_max = 6.0;
  int multistart = 8;  // extra starts spread over the alpha range
  int max_iter = 300;
};

struct FitResult {
  LineshapeParams params;
  std::array<double, 5> std_error{};  // 0 for fixed parameters
  double objective = 0.0;  // log likelihood, or -ssr/2 for exact fits
  double ssr = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Levenberg-style damped Fisher scoring with analytic derivatives. Runs from
// `init` plus a deterministic grid of alpha starts; best objective wins,
// ties resolved toward the smaller alpha.
FitResult fit_lineshape(const FitData& data, const LineshapeParams& init,
                        const FitOptions& opts = {});

}  // namespace ionspec

#endif
