// End-to-end checks of the headline results: narrowing factors, subspace
// structure, full-drive consistency, pi-time calibration, resonance loci,
// the estimation advantage, n-spin scaling, the light-shift pipeline and
// the infrastructure guarantees. One line per criterion.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <vector>

#include "ionspec/calibration.hpp"
#include "ionspec/io.hpp"
#include "ionspec/ms_model.hpp"
#include "ionspec/protocols.hpp"
#include "ionspec/quantum.hpp"
#include "ionspec/scan.hpp"
#include "ionspec/units.hpp"
#include "ionspec/verify.hpp"

using namespace ionspec;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

struct Criterion {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << "  FAILED: " << what << "\n";
    }
  }
  void note(const std::string& line) { detail << "  " << line << "\n"; }
};

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

FitResult fit_spectrum(const SpectrumDataset& ds, const std::string& target,
                       double init_alpha) {
  FitData fd = extract_fit_data(ds, target);
  LineshapeParams init;
  init.contrast = 1.0;
  init.tau = ds.pulse_time;
  init.omega = pi / init.tau;
  init.alpha = init_alpha;
  init.center = 0.5 * (fd.delta.minCoeff() + fd.delta.maxCoeff());
  return fit_lineshape(fd, init);
}

double refine_peak(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  int j = 0;
  y.maxCoeff(&j);
  if (j == 0 || j == y.size() - 1) return x(j);
  double denom = y(j - 1) - 2.0 * y(j) + y(j + 1);
  if (std::abs(denom) < 1e-300) return x(j);
  return x(j) + 0.5 * (y(j - 1) - y(j + 1)) / denom * (x(j + 1) - x(j));
}

MsParams drive_params() {
  // epsilon = 2 pi 25.5 kHz with eta rabi = epsilon / 10, on a
  // ground-state-cooled axial mode at a typical 1 MHz trap frequency
  MsParams ms;
  ms.nu = mhz(1);
  ms.epsilon = khz(25.5);
  ms.rabi = khz(25.5);
  ms.eta = 0.1;
  ms.n_max = 10;
  return ms;
}

// ------------------------------------------------------------ criterion 1

Criterion narrowing_factors() {
  Criterion c;
  Timer timer;
  double w = hz(500);

  ScanConfig even;
  even.model = ScanModel::effective_pair;
  even.pair.omega = w;
  even.axis1 = {"delta1", -4.0 * w, 4.0 * w, 41};
  FitResult fe = fit_spectrum(run_scan(even), "uu", 2.0);
  c.require(std::abs(fe.params.alpha - 2.0) < 1e-3,
            "pair common-mode scan alpha = " + fmt(fe.params.alpha));

  ScanConfig single;
  single.model = ScanModel::single_spin;
  single.single_ion.omega = w;
  single.axis1 = {"delta1", -4.0 * w, 4.0 * w, 41};
  FitResult fs = fit_spectrum(run_scan(single), "u", 1.0);
  c.require(std::abs(fs.params.alpha - 1.0) < 1e-3,
            "single spin scan alpha = " + fmt(fs.params.alpha));

  ScanConfig odd;
  odd.model = ScanModel::effective_pair;
  odd.pair.omega = w;
  odd.initial_state = "ud";
  odd.axis1 = {"delta2", -4.0 * w, 4.0 * w, 41};
  FitResult fo = fit_spectrum(run_scan(odd), "du", 2.0);
  c.require(std::abs(fo.params.alpha - 2.0) < 1e-3,
            "pair difference scan alpha = " + fmt(fo.params.alpha));

  ScanConfig noisy = even;
  noisy.shots = 500;
  noisy.noise.sigma_common = 0.5 * w;
  noisy.seed = 42;
  FitResult fn = fit_spectrum(run_scan(noisy), "uu", 2.0);
  c.require(fn.params.alpha < 2.0,
            "noisy scan should pull alpha below 2, got " + fmt(fn.params.alpha));
  c.require(fn.params.contrast < 1.0,
            "noisy scan should pull contrast below 1, got " +
                fmt(fn.params.contrast));

  c.note("alpha: even " + fmt(fe.params.alpha) + ", single " +
         fmt(fs.params.alpha) + ", odd " + fmt(fo.params.alpha) +
         "; with detuning noise alpha " + fmt(fn.params.alpha, 3) +
         ", contrast " + fmt(fn.params.contrast, 3));
  double dt = timer.seconds();
  c.require(dt < 5.0, "runtime " + fmt(dt, 3) + " s exceeds 5 s");
  c.note("runtime " + fmt(dt, 3) + " s");
  return c;
}

// ------------------------------------------------------------ criterion 2

Criterion subspace_invariances() {
  Criterion c;
  Timer timer;
  double w = hz(400);

  ScanConfig even;
  even.model = ScanModel::effective_pair;
  even.pair.omega = w;
  even.axis1 = {"delta2", -5.0 * w, 5.0 * w, 21};
  SpectrumDataset de = run_scan(even);
  double dev_e = 0.0, leak_e = 0.0;
  for (int i = 0; i < de.values.rows(); ++i) {
    dev_e = std::max(dev_e,
                     (de.values.row(i) - de.values.row(0)).cwiseAbs().maxCoeff());
    leak_e = std::max(leak_e, de.values(i, 1) + de.values(i, 2));
  }
  c.require(dev_e < 1e-12, "even populations moved " + fmt(dev_e, 3) +
                               " under the difference sweep");
  c.require(leak_e < 1e-12, "even init leaked " + fmt(leak_e, 3) +
                                " into the odd pair");

  ScanConfig odd;
  odd.model = ScanModel::effective_pair;
  odd.pair.omega = w;
  odd.initial_state = "ud";
  odd.axis1 = {"delta1", -10.0 * w, 10.0 * w, 21};
  SpectrumDataset dd = run_scan(odd);
  double dev_o = 0.0, leak_o = 0.0, min_odd = 1.0;
  for (int i = 0; i < dd.values.rows(); ++i) {
    dev_o = std::max(dev_o,
                     (dd.values.row(i) - dd.values.row(0)).cwiseAbs().maxCoeff());
    leak_o = std::max(leak_o, dd.values(i, 0) + dd.values(i, 3));
    min_odd = std::min(min_odd, dd.values(i, 1) + dd.values(i, 2));
  }
  c.require(dev_o < 1e-12, "odd populations moved " + fmt(dev_o, 3) +
                               " under the common sweep");
  c.require(leak_o < 1e-12,
            "odd init leaked " + fmt(leak_o, 3) + " into the even pair");
  c.require(min_odd > 1.0 - 1e-12,
            "one-excitation population dipped to " + fmt(min_odd));

  c.note("max drift: even " + fmt(dev_e, 3) + ", odd " + fmt(dev_o, 3) +
         "; odd population stays at " + fmt(min_odd, 15));
  double dt = timer.seconds();
  c.require(dt < 1.0, "runtime " + fmt(dt, 3) + " s exceeds 1 s");
  c.note("runtime " + fmt(dt, 3) + " s");
  return c;
}

// ------------------------------------------------------------ criterion 3

Criterion full_drive_consistency() {
  Criterion c;
  Timer timer;
  MsParams ms = drive_params();

  PiTimeReport rep = measure_pi_time(ms);
  c.require(rep.peak_population >= 0.95,
            "peak transfer " + fmt(rep.peak_population, 4) + " below 0.95");

  StateVector psi0 = ms_initial_state(ms);
  StateVector at_pi = ms_propagate(ms, psi0, rep.measured);
  Eigen::VectorXd sp = spin_populations(at_pi);
  double leak = sp(1) + sp(2);
  c.require(leak < 0.05, "odd-pair leakage " + fmt(leak, 4) + " at the pi time");

  // one flop, sampled: the slow-frame model must shadow the full drive
  std::vector<double> times;
  for (int i = 0; i <= 20; ++i) times.push_back(rep.measured * i / 20.0);
  std::vector<StateVector> traj = ms_propagate_sampled(ms, psi0, times);
  Operator h_eff = ising_two_spin(effective_params(ms));
  StateVector pair0 = basis_state("dd");
  double dev = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    Eigen::VectorXd full = spin_populations(traj[i]);
    Eigen::VectorXd eff = populations(propagate_static(h_eff, pair0, times[i]));
    dev = std::max(dev, (full - eff).cwiseAbs().maxCoeff());
  }
  c.require(dev < 0.05, "effective-model deviation " + fmt(dev, 4) +
                            " over one flop exceeds 0.05");

  // beyond 0.8 epsilon the sidebands take over and the slow model must break
  double disc = 0.0;
  for (double f : {-1.15, -1.0, -0.85, 0.85, 1.0, 1.15}) {
    double d = f * ms.epsilon;
    ScanConfig fc;
    fc.model = ScanModel::full_drive;
    fc.ms = ms;
    fc.pulse_time = rep.measured;
    fc.axis1 = {"delta1", d, d, 1};
    ScanConfig ec;
    ec.model = ScanModel::effective_pair;
    ec.pair.omega = effective_params(ms).omega;
    ec.pulse_time = rep.measured;
    ec.axis1 = fc.axis1;
    disc = std::max(disc, (run_scan(fc).values - run_scan(ec).values)
                              .cwiseAbs()
                              .maxCoeff());
  }
  c.require(disc > 0.2, "sideband-band discrepancy only " + fmt(disc, 4));

  c.note("peak " + fmt(rep.peak_population, 4) + " at " +
         fmt(rep.measured * 1e6, 4) + " us; leakage " + fmt(leak, 4) +
         "; flop deviation " + fmt(dev, 4) + "; sideband discrepancy " +
         fmt(disc, 3));
  double dt = timer.seconds();
  c.require(dt < 300.0, "runtime " + fmt(dt, 3) + " s exceeds 5 min");
  c.note("runtime " + fmt(dt, 3) + " s");
  return c;
}

// ------------------------------------------------------------ criterion 4

Criterion pi_time_calibration() {
  Criterion c;
  Timer timer;
  MsParams ms = drive_params();
  PiTimeReport rep = measure_pi_time(ms);

  // eta^2 rabi^2 / epsilon = 2 pi 255 Hz makes the bare candidate 980.4 us
  double bare = 1.0 / (4.0 * 255.0);
  c.require(std::abs(rep.candidate_full - bare) < 1e-9,
            "bare candidate " + fmt(rep.candidate_full * 1e6, 6) + " us");
  c.require(std::abs(rep.candidate_half - 2.0 * rep.candidate_full) < 1e-12,
            "halved-coupling candidate is not twice the bare one");
  c.require(rep.measured > 0.95 * rep.candidate_half &&
                rep.measured < 1.15 * rep.candidate_half,
            "measured " + fmt(rep.measured * 1e6, 5) +
                " us is far from the halved-coupling candidate");
  c.require(rep.prefactor > 0.42 && rep.prefactor < 0.52,
            "prefactor " + fmt(rep.prefactor, 4));

  // tau_pi must track epsilon / (eta rabi)^2 across parameter sets
  std::vector<MsParams> sweep(3, ms);
  sweep[0].epsilon = khz(20);
  sweep[0].rabi = khz(20);
  sweep[1].epsilon = khz(25.5);
  sweep[1].rabi = khz(25.5);
  sweep[2].epsilon = khz(32);
  sweep[2].rabi = khz(20);
  double lo = 1e300, hi = 0.0;
  for (const MsParams& p : sweep) {
    PiTimeReport r = measure_pi_time(p);
    double scaled = r.measured * p.eta * p.eta * p.rabi * p.rabi / p.epsilon;
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  c.require(hi / lo - 1.0 < 0.05,
            "scaled pi times spread by " + fmt(100.0 * (hi / lo - 1.0), 3) + "%");

  c.note("measured " + fmt(rep.measured * 1e6, 5) + " us vs candidates " +
         fmt(rep.candidate_full * 1e6, 5) + " / " +
         fmt(rep.candidate_half * 1e6, 5) + " us; prefactor " +
         fmt(rep.prefactor, 4) + "; scaling spread " +
         fmt(100.0 * (hi / lo - 1.0), 3) + "%");
  double dt = timer.seconds();
  c.note("runtime " + fmt(dt, 3) + " s");
  return c;
}

// ------------------------------------------------------------ criterion 5

Criterion resonance_loci() {
  Criterion c;
  Timer timer;
  double w = hz(400);
  double tol = 0.05 * w;

  // even pair: the common-mode locus must sit at half the light shift,
  // symmetrically for both shift signs
  ScanConfig even;
  even.model = ScanModel::effective_pair;
  even.pair.omega = w;
  even.axis1 = {"delta1", -hz(500), hz(500), 21};
  even.axis2 = AxisSpec{"light_shift", -hz(600), hz(600), 21};
  SpectrumDataset grid_e = run_2d_scan(even);

  double worst_e = 0.0, asym = 0.0;
  std::vector<double> locus(21);
  for (int k = 0; k < 21; ++k) {
    SpectrumDataset s = slice_2d(grid_e, 0, k);
    Eigen::VectorXd x = hz(1.0) * s.axes.col(0);
    locus[k] = refine_peak(x, s.values.col(3));
    double light = hz(1.0) * grid_e.axes(k * 21, 1);
    worst_e = std::max(worst_e, std::abs(locus[k] - 0.5 * std::abs(light)));
  }
  for (int k = 0; k < 21; ++k)
    asym = std::max(asym, std::abs(locus[k] - locus[20 - k]));
  c.require(worst_e < tol, "even locus misses |shift|/2 by " +
                               fmt(to_hz(worst_e), 3) + " Hz");
  c.require(asym < tol, "even locus asymmetry " + fmt(to_hz(asym), 3) + " Hz");

  // odd pair: the difference locus pins to zero whatever the laser detuning
  ScanConfig odd;
  odd.model = ScanModel::effective_pair;
  odd.pair.omega = w;
  odd.initial_state = "ud";
  odd.axis1 = {"delta2", -hz(500), hz(500), 21};
  odd.axis2 = AxisSpec{"delta1", -hz(2000), hz(2000), 21};
  SpectrumDataset grid_o = run_2d_scan(odd);
  double worst_o = 0.0;
  for (int k = 0; k < 21; ++k) {
    SpectrumDataset s = slice_2d(grid_o, 0, k);
    Eigen::VectorXd x = hz(1.0) * s.axes.col(0);
    worst_o = std::max(worst_o, std::abs(refine_peak(x, s.values.col(1))));
  }
  c.require(worst_o < tol, "odd locus strays to " + fmt(to_hz(worst_o), 3) +
                               " Hz off zero");

  c.note("even locus error " + fmt(to_hz(worst_e), 3) + " Hz, asymmetry " +
         fmt(to_hz(asym), 3) + " Hz; odd locus error " + fmt(to_hz(worst_o), 3) +
         " Hz (tolerance " + fmt(to_hz(tol), 3) + " Hz)");
  double dt = timer.seconds();
  c.require(dt < 120.0, "runtime " + fmt(dt, 3) + " s exceeds 2 min");
  c.note("runtime " + fmt(dt, 3) + " s");
  return c;
}

// ------------------------------------------------------------ criterion 6

Criterion estimation_advantage() {
  Criterion c;
  Timer timer;
  double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  ProtocolComparison cmp = compare_protocols(hz(1000), 0.0, 10000, 200, 7);
  c.require(std::abs(cmp.ratio_corr_pair - inv_sqrt2) < 0.02 * inv_sqrt2,
            "corr/pair ratio " + fmt(cmp.ratio_corr_pair, 6));
  c.require(std::abs(cmp.ratio_corr_single - 0.5) < 0.02 * 0.5,
            "corr/single ratio " + fmt(cmp.ratio_corr_single, 6));
  c.require(std::abs(cmp.mc_ratio_corr_pair - inv_sqrt2) < 0.10 * inv_sqrt2,
            "monte carlo corr/pair ratio " + fmt(cmp.mc_ratio_corr_pair, 4));
  c.require(std::abs(cmp.mc_ratio_corr_single - 0.5) < 0.10 * 0.5,
            "monte carlo corr/single ratio " + fmt(cmp.mc_ratio_corr_single, 4));

  c.note("fisher ratios " + fmt(cmp.ratio_corr_pair, 6) + " / " +
         fmt(cmp.ratio_corr_single, 6) + "; monte carlo " +
         fmt(cmp.mc_ratio_corr_pair, 4) + " / " +
         fmt(cmp.mc_ratio_corr_single, 4) + " (10^4 shots, 200 replicas)");
  double dt = timer.seconds();
  c.require(dt < 120.0, "runtime " + fmt(dt, 3) + " s exceeds 2 min");
  c.note("runtime " + fmt(dt, 3) + " s");
  return c;
}

// ------------------------------------------------------------ criterion 7

Criterion n_spin_scaling() {
  Criterion c;
  Timer timer;
  double w = hz(300);
  std::string report;
  for (int n : {2, 3, 4}) {
    ScanConfig cfg;
    cfg.model = ScanModel::n_spin;
    cfg.nspin.omega = w;
    cfg.nspin.spins = n;
    double span = 6.0 * w / n;
    cfg.axis1 = {"delta1", -span, span, 41};
    SpectrumDataset ds = run_scan(cfg);
    FitResult fr = fit_spectrum(ds, ds.labels.back(), 2.5);
    c.require(std::abs(fr.params.alpha - n) < 0.01 * n,
              "alpha for n=" + std::to_string(n) + " came out " +
                  fmt(fr.params.alpha));
    report += (report.empty() ? "" : ", ") + std::to_string(n) + " -> " +
              fmt(fr.params.alpha, 8);
  }
  c.note("fitted narrowing " + report);
  double dt = timer.seconds();
  c.require(dt < 30.0, "runtime " + fmt(dt, 3) + " s exceeds 30 s");
  c.note("runtime " + fmt(dt, 3) + " s");
  return c;
}

// ------------------------------------------------------------ criterion 8

Criterion calibration_pipeline() {
  Criterion c;
  Timer timer;
  CalibrationConfig cfg;
  cfg.beam.rabi = khz(40);
  cfg.beam.detuning = mhz(3.5);
  cfg.powers = {0.0, 0.5, 1.0, 1.5};
  cfg.baseline_diff = hz(50);
  cfg.probe_omega = hz(500);
  cfg.shots = 400;
  cfg.seed = 12;

  CalibrationCurve noisy = build_calibration(cfg);
  double pull = std::abs(noisy.diff_vs_power.intercept - hz(50)) /
                noisy.diff_vs_power.intercept_err;
  c.require(pull < 2.0, "recovered baseline " +
                            fmt(to_hz(noisy.diff_vs_power.intercept), 4) +
                            " Hz is " + fmt(pull, 2) + " sigma from 50 Hz");

  CalibrationConfig exact = cfg;
  exact.shots = 0;
  CalibrationCurve c1 = build_calibration(exact);
  exact.shifted_ion = 2;
  CalibrationCurve c2 = build_calibration(exact);
  double flip = c2.diff_vs_power.slope / c1.diff_vs_power.slope;
  c.require(std::abs(flip + 1.0) < 1e-6,
            "slope ratio between branches " + fmt(flip, 8));

  std::vector<double> powers{0.0, 1.0};
  auto checks = correlated_mean_consistency(cfg, hz(500), powers);
  const CalibrationPoint& p0 = noisy.points[0];
  const CalibrationPoint& p1 = noisy.points[2];  // power 1.0
  double worst_sigma = 0.0;
  for (std::size_t k = 0; k < checks.size(); ++k) {
    const FrequencyPair& fp = (k == 0 ? p0 : p1).freqs;
    double err = std::hypot(checks[k].correlated_err, fp.err_mean);
    double sig = std::abs(checks[k].correlated_center - fp.mean) / err;
    worst_sigma = std::max(worst_sigma, sig);
  }
  c.require(worst_sigma < 2.0, "correlated center disagrees with the "
                               "single-ion mean by " +
                                   fmt(worst_sigma, 2) + " sigma");

  c.note("baseline " + fmt(to_hz(noisy.diff_vs_power.intercept), 4) + " +- " +
         fmt(to_hz(noisy.diff_vs_power.intercept_err), 4) +
         " Hz (injected 50); slope " + fmt(to_hz(noisy.diff_vs_power.slope), 4) +
         " Hz/power (programmed " + fmt(to_hz(light_shift(cfg.beam)), 4) +
         "); branch ratio " + fmt(flip, 8) + "; mean consistency " +
         fmt(worst_sigma, 2) + " sigma");
  double dt = timer.seconds();
  c.require(dt < 120.0, "runtime " + fmt(dt, 3) + " s exceeds 2 min");
  c.note("runtime " + fmt(dt, 3) + " s");
  return c;
}

// ------------------------------------------------------------ criterion 9

Criterion infrastructure() {
  Criterion c;
  Timer timer;

  ScanConfig cfg;
  cfg.model = ScanModel::effective_pair;
  cfg.pair.omega = hz(300);
  cfg.axis1 = {"delta1", -hz(900), hz(900), 9};
  cfg.shots = 80;
  cfg.noise.sigma_common = hz(30);
  cfg.seed = 21;
  SpectrumDataset ds = run_scan(cfg);

  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "ionspec_acceptance";
  fs::create_directories(dir);
  std::string path = (dir / "roundtrip.tsv").string();
  write_dataset(ds, path);
  SpectrumDataset back = read_dataset(path);
  bool identical = back.labels == ds.labels &&
                   (back.axes - ds.axes).cwiseAbs().maxCoeff() == 0.0 &&
                   (back.values - ds.values).cwiseAbs().maxCoeff() == 0.0 &&
                   back.shots == ds.shots && back.pulse_time == ds.pulse_time;
  c.require(identical, "dataset write/read changed the data");

  cfg.threads = 3;
  SpectrumDataset dt3 = run_scan(cfg);
  c.require((dt3.values - ds.values).cwiseAbs().maxCoeff() == 0.0,
            "thread count changed the sampled counts");

  std::ostringstream verify_out;
  int bad = run_verification(verify_out);
  c.require(bad == 0, "verification suite reported " + std::to_string(bad) +
                          " failures:\n" + verify_out.str());

  c.note("round trip bit exact; threads 1 and 3 agree; verification clean");
  double dt = timer.seconds();
  c.note("runtime " + fmt(dt, 3) + " s");
  return c;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Criterion (*fn)();
  };
  const Entry entries[] = {
      {"narrowing factors from ideal scans", narrowing_factors},
      {"parity subspace invariances", subspace_invariances},
      {"full drive matches the effective model", full_drive_consistency},
      {"pi time calibration and scaling", pi_time_calibration},
      {"resonance loci in the 2d maps", resonance_loci},
      {"sqrt(2) estimation advantage", estimation_advantage},
      {"n-spin narrowing equals the spin count", n_spin_scaling},
      {"light shift calibration pipeline", calibration_pipeline},
      {"round trips, determinism, invariants", infrastructure},
  };

  int failures = 0;
  int id = 0;
  for (const Entry& e : entries) {
    ++id;
    Criterion c;
    try {
      c = e.fn();
    } catch (const std::exception& ex) {
      c.ok = false;
      c.detail << "  exception: " << ex.what() << "\n";
    }
    std::cout << (c.ok ? "[PASS] " : "[FAIL] ") << id << ". " << e.name << "\n"
              << c.detail.str();
    if (!c.ok) ++failures;
  }
  if (failures)
    std::cout << failures << " of 9 criteria failed\n";
  else
    std::cout << "all 9 criteria passed\n";
  return failures;
}
