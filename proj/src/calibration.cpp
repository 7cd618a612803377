#include "ionspec/calibration.hpp"

#include <cmath>
#include <stdexcept>

#include "ionspec/rng.hpp"

namespace ionspec {

double light_shift(const LightShiftParams& p) {
  if (p.rabi < 0) throw std::invalid_argument("beam rabi must be >= 0");
  if (p.detuning == 0) throw std::invalid_argument("beam detuning must be nonzero");
  return p.prefactor * p.rabi * p.rabi / p.detuning;
}

namespace {

FitResult fit_center(const SpectrumDataset& ds, const std::string& target,
                     double omega_line_guess, double alpha) {
  FitData fd = extract_fit_data(ds, target);
  LineshapeParams init;
  init.contrast = 1.0;
  init.omega = omega_line_guess;
  init.tau = ds.pulse_time;
  init.alpha = alpha;
  init.center = 0.5 * (fd.delta.minCoeff() + fd.delta.maxCoeff());
  FitOptions opts;
  opts.free = {true, true, false, false, true};  // contrast, gap, center
  return fit_lineshape(fd, init, opts);
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t k) {
  return stream_rng(seed, k, 0)();
}

}  // namespace

FrequencyPair extract_frequencies(const SpectrumDataset& ion1,
                                  const SpectrumDataset& ion2,
                                  double omega_line_guess) {
  FrequencyPair out;
  FitResult r1 = fit_center(ion1, "u", omega_line_guess, 1.0);
  FitResult r2 = fit_center(ion2, "u", omega_line_guess, 1.0);
  out.f1 = r1.params.center;
  out.f2 = r2.params.center;
  out.err1 = r1.std_error[4];
  out.err2 = r2.std_error[4];
  out.mean = 0.5 * (out.f1 + out.f2);
  out.diff = out.f1 - out.f2;
  out.err_mean = 0.5 * std::hypot(out.err1, out.err2);
  out.err_diff = std::hypot(out.err1, out.err2);
  return out;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& sigma) {
  std::size_t n = x.size();
  if (n < 2 || y.size() != n)
    throw std::invalid_argument("linear fit needs matching x/y with n >= 2");
  std::vector<double> w(n, 1.0);
  bool weighted = sigma.size() == n;
  if (weighted) {
    for (std::size_t i = 0; i < n; ++i) {
      if (sigma[i] <= 0) {  // exact data point, fall back to equal weights
        weighted = false;
        break;
      }
    }
  }
  if (weighted)
    for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / (sigma[i] * sigma[i]);

  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
    sxx += w[i] * x[i] * x[i];
    sxy += w[i] * x[i] * y[i];
  }
  double det = sw * sxx - sx * sx;
  if (std::abs(det) < 1e-300) throw std::runtime_error("degenerate abscissae");
  LinearFit f;
  f.slope = (sw * sxy - sx * sy) / det;
  f.intercept = (sxx * sy - sx * sxy) / det;

  double ss_res = 0, ss_tot = 0, ybar = sy / sw;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - (f.slope * x[i] + f.intercept);
    ss_res += w[i] * r * r;
    ss_tot += w[i] * (y[i] - ybar) * (y[i] - ybar);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  // With unit weights rescale by the residual variance, chi2/dof otherwise.
  double scale = weighted ? 1.0 : (n > 2 ? ss_res / double(n - 2) : 0.0);
  f.slope_err = std::sqrt(scale * sw / det);
  f.intercept_err = std::sqrt(scale * sxx / det);
  return f;
}

namespace {

SpectrumDataset probe_ion(const CalibrationConfig& cfg, double f_true,
                          double probe_time, std::uint64_t scan_seed) {
  double halfwidth = cfg.span_factor * pi / probe_time;  // ~ linewidth units
  ScanConfig sc;
  sc.model = ScanModel::single_spin;
  sc.initial_state = "d";
  sc.pulse_time = probe_time;
  sc.axis1 = {"delta1", f_true - halfwidth, f_true + halfwidth, cfg.points};
  sc.shots = cfg.shots;
  sc.noise = cfg.noise;
  sc.seed = scan_seed;
  sc.threads = cfg.threads;
  sc.single_ion.omega = cfg.probe_omega;
  sc.single_ion.detuning = f_true;
  return run_scan(sc);
}

}  // namespace

CalibrationCurve build_calibration(const CalibrationConfig& cfg) {
  if (cfg.shifted_ion != 1 && cfg.shifted_ion != 2)
    throw std::invalid_argument("shifted_ion must be 1 or 2");
  if (cfg.probe_omega <= 0)
    throw std::invalid_argument("probe coupling must be positive");
  if (cfg.powers.empty()) throw std::invalid_argument("no powers given");
  double probe_time =
      cfg.probe_time > 0 ? cfg.probe_time : pi_time(cfg.probe_omega);

  CalibrationCurve curve;
  curve.shifted_ion = cfg.shifted_ion;
  curve.baseline_diff = cfg.baseline_diff;

  std::vector<double> xs, ys, es;
  for (std::size_t k = 0; k < cfg.powers.size(); ++k) {
    double power = cfg.powers[k];
    if (power < 0) throw std::invalid_argument("powers must be >= 0");
    double shift = light_shift_at_power(cfg.beam, power);
    double f1 = +0.5 * cfg.baseline_diff + (cfg.shifted_ion == 1 ? shift : 0.0);
    double f2 = -0.5 * cfg.baseline_diff + (cfg.shifted_ion == 2 ? shift : 0.0);

    SpectrumDataset d1 =
        probe_ion(cfg, f1, probe_time, derived_seed(cfg.seed, 2 * k));
    SpectrumDataset d2 =
        probe_ion(cfg, f2, probe_time, derived_seed(cfg.seed, 2 * k + 1));

    CalibrationPoint pt;
    pt.power = power;
    pt.shift_programmed = shift;
    pt.freqs = extract_frequencies(d1, d2, 2.0 * cfg.probe_omega);
    curve.points.push_back(pt);

    xs.push_back(power);
    ys.push_back(pt.freqs.diff);
    es.push_back(pt.freqs.err_diff);
  }
  curve.diff_vs_power = linear_fit(xs, ys, es);
  return curve;
}

std::vector<MeanShiftCheck> correlated_mean_consistency(
    const CalibrationConfig& cfg, double pair_omega,
    const std::vector<double>& powers) {
  if (pair_omega <= 0)
    throw std::invalid_argument("pair coupling must be positive");
  double probe_time = pi_time(pair_omega);
  double omega_line = 2.0 * pair_omega;
  double halfwidth = cfg.span_factor * pi / probe_time;

  std::vector<MeanShiftCheck> checks;
  for (std::size_t k = 0; k < powers.size(); ++k) {
    double shift = light_shift_at_power(cfg.beam, powers[k]);
    double signed_shift = cfg.shifted_ion == 1 ? shift : -shift;
    double mean = 0.5 * std::abs(shift);

    ScanConfig sc;
    sc.model = ScanModel::effective_pair;
    sc.initial_state = "dd";
    sc.pulse_time = probe_time;
    sc.axis1 = {"delta1", mean - halfwidth, mean + halfwidth, cfg.points};
    sc.shots = cfg.shots;
    sc.noise = cfg.noise;
    sc.seed = derived_seed(cfg.seed, 1000 + k);
    sc.threads = cfg.threads;
    sc.light_shift = signed_shift;
    sc.pair.omega = pair_omega;
    sc.pair.differential = 0.5 * cfg.baseline_diff;
    SpectrumDataset ds = run_scan(sc);

    FitResult fr = fit_center(ds, "uu", omega_line, 2.0);
    MeanShiftCheck chk;
    chk.power = powers[k];
    chk.shift_programmed = shift;
    chk.mean_expected = mean;
    chk.correlated_center = fr.params.center;
    chk.correlated_err = fr.std_error[4];
    checks.push_back(chk);
  }
  return checks;
}

}  // namespace ionspec
