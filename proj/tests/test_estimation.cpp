#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ionspec/fit.hpp"
#include "ionspec/protocols.hpp"
#include "ionspec/rng.hpp"
#include "ionspec/units.hpp"

using namespace ionspec;

namespace {

std::mt19937_64 test_rng(7);

double urand(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(test_rng);
}

}  // namespace

TEST_CASE("lineshape evaluates to the frozen closed-form values") {
  LineshapeParams p{1.0, hz(400), 0.0, 2.0, hz(30)};
  p.tau = pi / p.omega;  // pi pulse: omega tau = pi

  // full transfer on resonance
  CHECK(lineshape(p, p.center) == doctest::Approx(1.0).scale(0).epsilon(1e-12));
  // at alpha d = omega the detuning parameter is exactly 1
  double d_half = p.omega / 2.0;
  CHECK(lineshape(p, p.center + d_half) ==
        doctest::Approx(0.3165638355103539).scale(0).epsilon(1e-12));
  // even in the detuning from the center
  CHECK(lineshape(p, p.center + 1.234 * d_half) ==
        doctest::Approx(lineshape(p, p.center - 1.234 * d_half))
            .scale(0)
            .epsilon(1e-14));
  // contrast enters linearly
  LineshapeParams q = p;
  q.contrast = 0.37;
  CHECK(lineshape(q, p.center + d_half) ==
        doctest::Approx(0.37 * lineshape(p, p.center + d_half))
            .scale(0)
            .epsilon(1e-14));
  // a 2 pi pulse returns everything on resonance
  q = p;
  q.tau = two_pi / p.omega;
  CHECK(lineshape(q, p.center) == doctest::Approx(0.0).scale(1).epsilon(1e-24));
}

TEST_CASE("analytic gradient agrees with central differences") {
  for (int draw = 0; draw < 10; ++draw) {
    LineshapeParams p;
    p.contrast = urand(0.2, 1.0);
    p.omega = urand(1e3, 1e4);
    p.tau = urand(0.5, 3.0) * pi / p.omega;
    p.alpha = urand(0.5, 4.0);
    p.center = urand(-1.0, 1.0) * p.omega;
    double delta = p.center + urand(-2.0, 2.0) * p.omega / p.alpha;

    LineshapeGrad g = lineshape_grad(p, delta);
    CHECK(g.value == doctest::Approx(lineshape(p, delta)).scale(0).epsilon(1e-14));

    const double scale[5] = {1.0, p.omega, p.tau, 1.0, p.omega};
    for (int k = 0; k < 5; ++k) {
      double h = 1e-6 * scale[k];
      LineshapeParams lo = p, hi = p;
      double* fields_lo[5] = {&lo.contrast, &lo.omega, &lo.tau, &lo.alpha, &lo.center};
      double* fields_hi[5] = {&hi.contrast, &hi.omega, &hi.tau, &hi.alpha, &hi.center};
      *fields_lo[k] -= h;
      *fields_hi[k] += h;
      double fd = (lineshape(hi, delta) - lineshape(lo, delta)) / (2.0 * h);
      // compare in dimensionless units so omega/tau derivatives are not
      // trivially inside an absolute tolerance
      double an_s = g.d_param[k] * scale[k], fd_s = fd * scale[k];
      CHECK(std::abs(an_s - fd_s) <= 1e-5 * (1.0 + std::abs(an_s)));
    }
    double h = 1e-6 * p.omega;
    double fd = (lineshape(p, delta + h) - lineshape(p, delta - h)) / (2.0 * h);
    CHECK(std::abs((g.d_delta - fd) * p.omega) <=
          1e-5 * (1.0 + std::abs(g.d_delta * p.omega)));
  }
}

TEST_CASE("hamiltonian coupling maps to the line gap and narrowing exponent") {
  double w = khz(1.2);
  LineshapeMap m = map_hamiltonian_to_lineshape(w, ScanKind::single_spin);
  CHECK(m.omega_line == doctest::Approx(2.0 * w));
  CHECK(m.alpha == 1.0);
  CHECK(map_hamiltonian_to_lineshape(w, ScanKind::even_pair).alpha == 2.0);
  CHECK(map_hamiltonian_to_lineshape(w, ScanKind::odd_pair).alpha == 2.0);
  CHECK(map_hamiltonian_to_lineshape(w, ScanKind::ghz, 4).alpha == 4.0);
  CHECK(map_hamiltonian_to_lineshape(w, ScanKind::ghz, 3).omega_line ==
        doctest::Approx(2.0 * w));
  CHECK_THROWS_AS(map_hamiltonian_to_lineshape(w, ScanKind::ghz, 0),
                  std::invalid_argument);
}

TEST_CASE("fwhm narrows by the exponent and the frozen pi-pulse width") {
  LineshapeParams single{1.0, hz(800), 0.0, 1.0, hz(-55)};
  single.tau = pi / single.omega;
  LineshapeParams corr = single;
  corr.alpha = 2.0;

  double w1 = lineshape_fwhm(single);
  // frozen by independent bisection of the pi-pulse profile
  CHECK(w1 == doctest::Approx(1.5973707105694 * single.omega).scale(0).epsilon(1e-9));
  CHECK(lineshape_fwhm(corr) == doctest::Approx(0.5 * w1).scale(0).epsilon(1e-9));
  CHECK(lineshape_fwhm(single, /*squared=*/true) ==
        doctest::Approx(0.7221278618333 * w1).scale(0).epsilon(1e-9));
}

TEST_CASE("protocol budget reproduces the analytic information ratios") {
  double w = hz(500);
  ProtocolComparison cp = compare_protocols(w);
  CHECK(cp.tau == doctest::Approx(pi / w).scale(0).epsilon(1e-12));

  // frozen operating point of the pi-pulse profile: the steepest flank sits
  // at alpha delta / omega = 0.76105225 where the per-shot information is
  // 3.63749301 / omega^2
  CHECK(cp.delta_opt_single ==
        doctest::Approx(0.7610522484 * w).scale(0).epsilon(1e-6));
  CHECK(cp.delta_opt_corr ==
        doctest::Approx(0.5 * cp.delta_opt_single).scale(0).epsilon(1e-6));
  CHECK(cp.fisher_single * w * w ==
        doctest::Approx(3.6374930081).scale(0).epsilon(1e-6));

  CHECK(cp.fisher_pair == doctest::Approx(2.0 * cp.fisher_single).scale(0).epsilon(1e-12));
  CHECK(cp.fisher_corr == doctest::Approx(4.0 * cp.fisher_single).scale(0).epsilon(1e-9));
  CHECK(cp.ratio_corr_pair ==
        doctest::Approx(1.0 / std::sqrt(2.0)).scale(0).epsilon(1e-9));
  CHECK(cp.ratio_corr_single == doctest::Approx(0.5).scale(0).epsilon(1e-9));
  CHECK(cp.sigma_single == doctest::Approx(1.0 / std::sqrt(cp.fisher_single)));

  CHECK(cp.fwhm_corr == doctest::Approx(0.5 * cp.fwhm_single).scale(0).epsilon(1e-9));
  CHECK(cp.fwhm_product < cp.fwhm_single);
  CHECK(cp.fwhm_product > cp.fwhm_corr);

  // monte carlo off by default
  CHECK(cp.mc_sigma_single == 0.0);
  CHECK(cp.mc_ratio_corr_pair == 0.0);

  CHECK_THROWS_AS(compare_protocols(0.0), std::invalid_argument);
}

TEST_CASE("monte carlo readout noise tracks the fisher prediction") {
  double w = hz(500);
  long shots = 20000;
  ProtocolComparison cp = compare_protocols(w, 0.0, shots, 400, 11);

  double root_n = std::sqrt(double(shots));
  CHECK(cp.mc_sigma_single ==
        doctest::Approx(cp.sigma_single / root_n).scale(0).epsilon(0.10));
  CHECK(cp.mc_sigma_pair ==
        doctest::Approx(cp.sigma_pair / root_n).scale(0).epsilon(0.10));
  CHECK(cp.mc_sigma_corr ==
        doctest::Approx(cp.sigma_corr / root_n).scale(0).epsilon(0.10));
  CHECK(cp.mc_ratio_corr_pair ==
        doctest::Approx(1.0 / std::sqrt(2.0)).scale(0).epsilon(0.10));
  CHECK(cp.mc_ratio_corr_single == doctest::Approx(0.5).scale(0).epsilon(0.10));

  // same seed, same draw
  ProtocolComparison again = compare_protocols(w, 0.0, shots, 400, 11);
  CHECK(again.mc_sigma_corr == cp.mc_sigma_corr);
}

namespace {

FitData exact_data(const LineshapeParams& truth, int n_points, double span) {
  FitData d;
  d.delta.resize(n_points);
  d.y.resize(n_points);
  for (int i = 0; i < n_points; ++i) {
    d.delta(i) = truth.center + span * (2.0 * i / (n_points - 1) - 1.0);
    d.y(i) = lineshape(truth, d.delta(i));
  }
  return d;
}

}  // namespace

TEST_CASE("least squares fit recovers exact spectra to high precision") {
  LineshapeParams truth{0.9, hz(400), 0.0, 2.0, hz(12)};
  truth.tau = pi / truth.omega;
  FitData data = exact_data(truth, 41, 2.0 * truth.omega);

  LineshapeParams init = truth;
  init.contrast = 1.0;
  init.omega = 1.15 * truth.omega;
  init.alpha = 1.0;  // multistart has to climb over to 2
  init.center = truth.center + 0.1 * truth.omega;

  FitResult r = fit_lineshape(data, init);
  CHECK(r.converged);
  CHECK(r.params.contrast == doctest::Approx(truth.contrast).scale(0).epsilon(1e-7));
  CHECK(r.params.omega == doctest::Approx(truth.omega).scale(0).epsilon(1e-7));
  CHECK(r.params.alpha == doctest::Approx(truth.alpha).scale(0).epsilon(1e-7));
  CHECK(r.params.center == doctest::Approx(truth.center).scale(0).epsilon(1e-4));
  CHECK(r.params.tau == truth.tau);  // held fixed
  CHECK(r.ssr < 1e-14);
  CHECK(r.std_error[2] == 0.0);  // fixed parameters report no error
}

TEST_CASE("fit recovers a triple narrowed line") {
  LineshapeParams truth{1.0, hz(300), 0.0, 3.0, 0.0};
  truth.tau = pi / truth.omega;
  FitData data = exact_data(truth, 61, 1.5 * truth.omega);
  LineshapeParams init = truth;
  init.alpha = 1.0;
  FitResult r = fit_lineshape(data, init);
  CHECK(r.converged);
  CHECK(r.params.alpha == doctest::Approx(3.0).scale(0).epsilon(1e-6));
}

TEST_CASE("binomial counts fit lands within its own error bars") {
  LineshapeParams truth{0.93, hz(400), 0.0, 2.0, hz(-8)};
  truth.tau = pi / truth.omega;
  long shots = 600;
  int n_points = 61;

  FitData data;
  data.delta.resize(n_points);
  data.y.resize(n_points);
  data.shots = shots;
  for (int i = 0; i < n_points; ++i) {
    data.delta(i) = truth.center + 2.0 * truth.omega * (2.0 * i / (n_points - 1) - 1.0);
    double prob = lineshape(truth, data.delta(i));
    std::mt19937_64 rng = stream_rng(321, i);
    long k = std::binomial_distribution<long>(shots, prob)(rng);
    data.y(i) = double(k) / double(shots);
  }

  LineshapeParams init{1.0, 1.2 * truth.omega, truth.tau, 1.0, 0.0};
  FitResult r = fit_lineshape(data, init);
  CHECK(r.converged);
  CHECK(std::abs(r.params.alpha - truth.alpha) < 0.15);
  CHECK(std::abs(r.params.alpha - truth.alpha) < 5.0 * r.std_error[3]);
  CHECK(std::abs(r.params.center - truth.center) < 5.0 * r.std_error[4]);
  CHECK(r.params.omega == doctest::Approx(truth.omega).scale(0).epsilon(0.02));
  CHECK(r.params.contrast == doctest::Approx(truth.contrast).scale(0).epsilon(0.05));
  CHECK(r.std_error[3] > 0.0);
  CHECK(r.std_error[3] < 0.1);
}

TEST_CASE("fit honors fixed alpha and an empty free set") {
  LineshapeParams truth{0.8, hz(250), 0.0, 2.0, hz(5)};
  truth.tau = pi / truth.omega;
  FitData data = exact_data(truth, 31, 1.5 * truth.omega);

  LineshapeParams init = truth;
  init.contrast = 0.5;
  init.center = 0.0;
  FitOptions opts;
  opts.free = {true, true, false, false, true};  // alpha pinned at the init
  FitResult r = fit_lineshape(data, init, opts);
  CHECK(r.converged);
  CHECK(r.params.alpha == 2.0);
  CHECK(r.params.contrast == doctest::Approx(truth.contrast).scale(0).epsilon(1e-7));
  CHECK(r.params.center == doctest::Approx(truth.center).scale(0).epsilon(1e-4));

  opts.free = {false, false, false, false, false};
  FitResult frozen = fit_lineshape(data, truth, opts);
  CHECK(frozen.converged);
  CHECK(frozen.ssr < 1e-20);
  CHECK(frozen.iterations == 0);

  FitData bad = data;
  bad.y.resize(3);
  CHECK_THROWS_AS(fit_lineshape(bad, init), std::invalid_argument);
}
