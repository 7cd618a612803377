#include "ionspec/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "ionspec/rng.hpp"

namespace ionspec {

namespace {

const char* model_name(ScanModel m) {
  switch (m) {
    case ScanModel::effective_pair: return "effective_pair";
    case ScanModel::single_spin: return "single_spin";
    case ScanModel::n_spin: return "n_spin";
    case ScanModel::full_drive: return "full_drive";
  }
  return "?";
}

int model_spins(const ScanConfig& cfg) {
  switch (cfg.model) {
    case ScanModel::single_spin: return 1;
    case ScanModel::n_spin: return cfg.nspin.spins;
    default: return 2;
  }
}

std::string default_initial(const ScanConfig& cfg) {
  return std::string(model_spins(cfg), 'd');
}

bool axis_allowed(const ScanConfig& cfg, const std::string& param) {
  if (param == "delta1" || param == "time") return true;
  if (param == "delta2")
    return cfg.model == ScanModel::effective_pair ||
           cfg.model == ScanModel::full_drive;
  if (param == "light_shift")
    return cfg.model == ScanModel::effective_pair ||
           cfg.model == ScanModel::full_drive;
  return false;
}

double resolve_pulse_time(const ScanConfig& cfg) {
  if (cfg.pulse_time > 0) return cfg.pulse_time;
  double omega = 0.0;
  switch (cfg.model) {
    case ScanModel::effective_pair: omega = cfg.pair.omega; break;
    case ScanModel::single_spin: omega = cfg.single_ion.omega; break;
    case ScanModel::n_spin: omega = cfg.nspin.omega; break;
    case ScanModel::full_drive: omega = effective_params(cfg.ms).omega; break;
  }
  if (omega <= 0)
    throw std::invalid_argument("cannot infer a pi time from a zero coupling");
  return pi_time(omega);
}

struct ResolvedPoint {
  double common = 0.0;        // physical common detuning
  double differential = 0.0;  // physical half-splitting added on top of bases
  double light = 0.0;         // signed light shift
  double time = 0.0;
  double rabi_scale = 1.0;
};

void apply_axis(ResolvedPoint& pt, const std::string& param, double value) {
  if (param == "delta1") pt.common += value;
  else if (param == "delta2") pt.differential += value;
  else if (param == "time") pt.time = value;
  else if (param == "light_shift") pt.light = value;  // overrides the baseline
  else throw std::invalid_argument("unknown axis parameter: " + param);
}

ResolvedPoint resolve(const ScanConfig& cfg, double base_time, double a1,
                      const double* a2) {
  ResolvedPoint pt;
  pt.time = base_time;
  pt.light = cfg.light_shift;
  switch (cfg.model) {
    case ScanModel::effective_pair:
      pt.common = cfg.pair.common;
      pt.differential = cfg.pair.differential;
      break;
    case ScanModel::single_spin:
      pt.common = -cfg.single_ion.detuning;
      break;
    case ScanModel::n_spin:
      pt.common = cfg.nspin.common;
      break;
    case ScanModel::full_drive:
      break;  // baselines live in cfg.ms
  }
  apply_axis(pt, cfg.axis1.param, a1);
  if (a2) apply_axis(pt, cfg.axis2->param, *a2);
  return pt;
}

void apply_noise(ResolvedPoint& pt, const NoiseModel& nm, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  if (nm.sigma_common > 0) pt.common += nm.sigma_common * gauss(rng);
  if (nm.sigma_diff > 0) pt.differential += nm.sigma_diff * gauss(rng);
  if (nm.sigma_rabi_rel > 0) pt.rabi_scale *= 1.0 + nm.sigma_rabi_rel * gauss(rng);
}

// Basis-order spin populations after the pulse.
Eigen::VectorXd evaluate_point(const ScanConfig& cfg, const std::string& label,
                               const ResolvedPoint& pt) {
  switch (cfg.model) {
    case ScanModel::effective_pair: {
      double mean_shift = 0.5 * std::abs(pt.light);
      IsingParams ip;
      ip.omega = cfg.pair.omega * pt.rabi_scale;
      ip.delta1 = 0.5 * (pt.common - mean_shift);
      ip.delta2 = 0.5 * (pt.differential + 0.5 * pt.light);
      StateVector psi =
          propagate_static(ising_two_spin(ip), basis_state(label), pt.time);
      return populations(psi);
    }
    case ScanModel::single_spin: {
      Operator h = single_spin_rabi(cfg.single_ion.omega * pt.rabi_scale,
                                    0.5 * pt.common);
      StateVector psi = propagate_static(h, basis_state(label), pt.time);
      return populations(psi);
    }
    case ScanModel::n_spin: {
      NSpinParams np;
      np.omega = cfg.nspin.omega * pt.rabi_scale;
      np.deltas.assign(cfg.nspin.spins, 0.5 * pt.common);
      np.coupling_axis = cfg.nspin.coupling_axis;
      StateVector psi =
          propagate_static(correlated_n_spin(np), basis_state(label), pt.time);
      return populations(psi);
    }
    case ScanModel::full_drive: {
      MsParams m = cfg.ms;
      m.delta = cfg.ms.delta - pt.common;  // laser sits at w0 - delta
      m.rabi *= pt.rabi_scale;
      m.offsets[0] += pt.differential;
      m.offsets[1] -= pt.differential;
      if (pt.light >= 0) m.offsets[0] += pt.light;
      else m.offsets[1] -= pt.light;
      StateVector psi0 = ms_initial_state(m, label);
      StateVector psi = ms_propagate(m, psi0, pt.time, cfg.ode_tol);
      return spin_populations(psi);
    }
  }
  throw std::logic_error("unreachable");
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto worker = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

void validate_scan(const ScanConfig& cfg, bool need_axis2) {
  if (cfg.axis1.points < 1) throw std::invalid_argument("axis1 needs points");
  if (!axis_allowed(cfg, cfg.axis1.param))
    throw std::invalid_argument("axis parameter '" + cfg.axis1.param +
                                "' not supported by model " +
                                model_name(cfg.model));
  if (need_axis2) {
    if (!cfg.axis2 || cfg.axis2->points < 1)
      throw std::invalid_argument("2d scan needs a second axis");
    if (!axis_allowed(cfg, cfg.axis2->param))
      throw std::invalid_argument("axis parameter '" + cfg.axis2->param +
                                  "' not supported by model " +
                                  model_name(cfg.model));
    if (cfg.axis2->param == cfg.axis1.param)
      throw std::invalid_argument("both axes scan the same parameter");
  } else if (cfg.axis2) {
    throw std::invalid_argument("1d scan given a second axis; use run_2d_scan");
  }
  if (cfg.shots < 0) throw std::invalid_argument("shots must be >= 0");
  if (cfg.noise.any() && cfg.shots < 1)
    throw std::invalid_argument("noise is drawn per shot; set shots >= 1");
  if (cfg.threads < 1) throw std::invalid_argument("threads must be >= 1");
  int spins = model_spins(cfg);
  if (!cfg.initial_state.empty() &&
      static_cast<int>(cfg.initial_state.size()) != spins)
    throw std::invalid_argument("initial state label length does not match");
  if (cfg.model == ScanModel::n_spin &&
      (cfg.nspin.spins < 1 || cfg.nspin.spins > 10))
    throw std::invalid_argument("n_spin supports 1..10 spins");
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = (n == 1) ? a : a + (b - a) * i / double(n - 1);
  return v;
}

double axis_file_value(const std::string& param, double raw) {
  return param == "time" ? raw : to_hz(raw);
}

void presentation_labels(int spins, std::vector<std::string>& labels) {
  int S = 1 << spins;
  labels.resize(S);
  for (int j = 0; j < S; ++j) labels[j] = basis_label(S - 1 - j, spins);
}

// One grid point: exact probabilities, a multinomial draw, or the per-shot
// noise loop. Returns presentation-order values.
Eigen::VectorXd grid_point(const ScanConfig& cfg, const std::string& label,
                           double base_time, double a1, const double* a2,
                           std::uint64_t point_key) {
  int S = 1 << model_spins(cfg);
  Eigen::VectorXd basis_vals;
  if (!cfg.noise.any()) {
    ResolvedPoint pt = resolve(cfg, base_time, a1, a2);
    Eigen::VectorXd probs = evaluate_point(cfg, label, pt);
    if (cfg.shots == 0) {
      basis_vals = probs;
    } else {
      std::mt19937_64 rng = stream_rng(cfg.seed, point_key, 0);
      basis_vals = sample_counts(probs, cfg.shots, rng);
    }
  } else {
    basis_vals = Eigen::VectorXd::Zero(S);
    for (long s = 0; s < cfg.shots; ++s) {
      std::mt19937_64 rng = stream_rng(cfg.seed, point_key, 1 + s);
      ResolvedPoint pt = resolve(cfg, base_time, a1, a2);
      apply_noise(pt, cfg.noise, rng);
      Eigen::VectorXd probs = evaluate_point(cfg, label, pt);
      double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      double acc = 0.0;
      int cat = S - 1;
      for (int i = 0; i < S; ++i) {
        acc += probs(i);
        if (u < acc) {
          cat = i;
          break;
        }
      }
      basis_vals(cat) += 1.0;
    }
  }
  Eigen::VectorXd out(S);
  for (int j = 0; j < S; ++j) out(j) = basis_vals(S - 1 - j);
  return out;
}

}  // namespace

Eigen::VectorXd sample_counts(const Eigen::VectorXd& probs, long shots,
                              std::mt19937_64& rng) {
  int S = static_cast<int>(probs.size());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(S);
  long remaining = shots;
  double mass = 1.0;
  for (int i = 0; i < S - 1 && remaining > 0; ++i) {
    double p = std::clamp(probs(i) / std::max(mass, 1e-300), 0.0, 1.0);
    std::binomial_distribution<long> bin(remaining, p);
    long k = bin(rng);
    counts(i) = double(k);
    remaining -= k;
    mass -= probs(i);
  }
  counts(S - 1) = double(remaining);
  return counts;
}

SpectrumDataset run_scan(const ScanConfig& cfg) {
  validate_scan(cfg, /*need_axis2=*/false);
  std::string label =
      cfg.initial_state.empty() ? default_initial(cfg) : cfg.initial_state;
  double base_time =
      (cfg.axis1.param == "time") ? 0.0 : resolve_pulse_time(cfg);
  std::vector<double> grid = linspace(cfg.axis1.start, cfg.axis1.stop,
                                      cfg.axis1.points);
  int n = cfg.axis1.points;
  int S = 1 << model_spins(cfg);

  SpectrumDataset ds;
  ds.axis_names = {cfg.axis1.param};
  presentation_labels(model_spins(cfg), ds.labels);
  ds.axes.resize(n, 1);
  ds.values.resize(n, S);
  ds.shots = cfg.shots;
  ds.pulse_time = (cfg.axis1.param == "time") ? 0.0 : base_time;
  ds.seed = cfg.seed;
  ds.model = model_name(cfg.model);

  // A time scan of the full drive is one trajectory sampled along the way,
  // not n independent integrations.
  bool sampled_path = cfg.model == ScanModel::full_drive &&
                      cfg.axis1.param == "time" && !cfg.noise.any() &&
                      std::is_sorted(grid.begin(), grid.end()) &&
                      grid.front() >= 0.0;
  if (sampled_path) {
    MsParams m = cfg.ms;
    if (cfg.light_shift >= 0) m.offsets[0] += cfg.light_shift;
    else m.offsets[1] -= cfg.light_shift;
    std::vector<StateVector> snaps =
        ms_propagate_sampled(m, ms_initial_state(m, label), grid, cfg.ode_tol);
    for (int i = 0; i < n; ++i) {
      ds.axes(i, 0) = grid[i];  // time axis, already in seconds
      Eigen::VectorXd probs = spin_populations(snaps[i]);
      if (cfg.shots > 0) {
        std::mt19937_64 rng = stream_rng(cfg.seed, i, 0);
        probs = sample_counts(probs, cfg.shots, rng);
      }
      for (int j = 0; j < S; ++j) ds.values(i, j) = probs(S - 1 - j);
    }
    return ds;
  }

  parallel_for(n, cfg.threads, [&](int i) {
    ds.axes(i, 0) = axis_file_value(cfg.axis1.param, grid[i]);
    ds.values.row(i) =
        grid_point(cfg, label, base_time, grid[i], nullptr, i).transpose();
  });
  return ds;
}

SpectrumDataset run_2d_scan(const ScanConfig& cfg) {
  validate_scan(cfg, /*need_axis2=*/true);
  std::string label =
      cfg.initial_state.empty() ? default_initial(cfg) : cfg.initial_state;
  bool time_axis = cfg.axis1.param == "time" || cfg.axis2->param == "time";
  double base_time = time_axis ? 0.0 : resolve_pulse_time(cfg);
  std::vector<double> g1 = linspace(cfg.axis1.start, cfg.axis1.stop,
                                    cfg.axis1.points);
  std::vector<double> g2 = linspace(cfg.axis2->start, cfg.axis2->stop,
                                    cfg.axis2->points);
  int n1 = cfg.axis1.points, n2 = cfg.axis2->points;
  int S = 1 << model_spins(cfg);

  SpectrumDataset ds;
  ds.axis_names = {cfg.axis1.param, cfg.axis2->param};
  presentation_labels(model_spins(cfg), ds.labels);
  ds.axes.resize(n1 * n2, 2);
  ds.values.resize(n1 * n2, S);
  ds.shots = cfg.shots;
  ds.pulse_time = time_axis ? 0.0 : base_time;
  ds.seed = cfg.seed;
  ds.model = model_name(cfg.model);

  parallel_for(n1 * n2, cfg.threads, [&](int idx) {
    int i1 = idx % n1, i2 = idx / n1;
    double a2 = g2[i2];
    ds.axes(idx, 0) = axis_file_value(cfg.axis1.param, g1[i1]);
    ds.axes(idx, 1) = axis_file_value(cfg.axis2->param, a2);
    ds.values.row(idx) =
        grid_point(cfg, label, base_time, g1[i1], &a2, idx).transpose();
  });
  return ds;
}

SpectrumDataset run_uncorrelated_difference(const ScanConfig& cfg) {
  if (cfg.axis1.param != "delta2")
    throw std::invalid_argument("the uncorrelated protocol scans delta2");
  if (cfg.axis2) throw std::invalid_argument("protocol is one-dimensional");
  if (cfg.axis1.points < 1) throw std::invalid_argument("axis1 needs points");
  if (cfg.noise.any() && cfg.shots < 1)
    throw std::invalid_argument("noise is drawn per shot; set shots >= 1");
  double omega = cfg.single_ion.omega;
  if (omega <= 0) throw std::invalid_argument("single-ion coupling required");
  double base_time = cfg.pulse_time > 0 ? cfg.pulse_time : pi_time(omega);
  std::vector<double> grid = linspace(cfg.axis1.start, cfg.axis1.stop,
                                      cfg.axis1.points);
  int n = cfg.axis1.points;

  SpectrumDataset ds;
  ds.axis_names = {"delta2"};
  ds.labels = {"d", "u"};
  ds.axes.resize(n, 1);
  ds.values.resize(n, 2);
  ds.shots = cfg.shots > 0 ? 2 * cfg.shots : 0;
  ds.pulse_time = base_time;
  ds.seed = cfg.seed;
  ds.model = "uncorrelated_difference";

  parallel_for(n, cfg.threads, [&](int i) {
    ds.axes(i, 0) = to_hz(grid[i]);
    auto excite = [&](double det, double scale) {
      Operator h = single_spin_rabi(omega * scale, 0.5 * det);
      StateVector psi = propagate_static(h, basis_state("d"), base_time);
      return populations(psi)(0);  // |u> amplitude squared
    };
    if (!cfg.noise.any() && cfg.shots == 0) {
      double base = cfg.single_ion.detuning;
      double up = 0.5 * (excite(base + grid[i], 1.0) + excite(base - grid[i], 1.0));
      ds.values(i, 0) = 1.0 - up;
      ds.values(i, 1) = up;
      return;
    }
    long k_up = 0;
    for (long s = 0; s < cfg.shots; ++s) {
      std::mt19937_64 rng = stream_rng(cfg.seed, i, 1 + s);
      double common = cfg.single_ion.detuning, diff = grid[i], scale = 1.0;
      std::normal_distribution<double> gauss(0.0, 1.0);
      if (cfg.noise.sigma_common > 0) common += cfg.noise.sigma_common * gauss(rng);
      if (cfg.noise.sigma_diff > 0) diff += cfg.noise.sigma_diff * gauss(rng);
      if (cfg.noise.sigma_rabi_rel > 0)
        scale *= 1.0 + cfg.noise.sigma_rabi_rel * gauss(rng);
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      if (uni(rng) < excite(common + diff, scale)) ++k_up;
      if (uni(rng) < excite(common - diff, scale)) ++k_up;
    }
    ds.values(i, 1) = double(k_up);
    ds.values(i, 0) = double(2 * cfg.shots - k_up);
  });
  return ds;
}

FitData extract_fit_data(const SpectrumDataset& ds, const std::string& target,
                         int axis_index) {
  if (axis_index < 0 || axis_index >= static_cast<int>(ds.axis_names.size()))
    throw std::invalid_argument("axis index out of range");
  if (ds.axis_names[axis_index] == "time")
    throw std::invalid_argument("cannot fit the resonance profile on a time axis");
  long n = ds.axes.rows();
  FitData fd;
  fd.delta = hz(1.0) * ds.axes.col(axis_index);  // file stores Hz
  fd.y.resize(n);
  fd.shots = ds.shots;
  double denom = ds.shots > 0 ? double(ds.shots) : 1.0;

  if (target == "avg_u") {
    int width = static_cast<int>(ds.labels.front().size());
    for (long i = 0; i < n; ++i) {
      double up = 0.0;
      for (int j = 0; j < ds.values.cols(); ++j) {
        double ups_in_label =
            double(std::count(ds.labels[j].begin(), ds.labels[j].end(), 'u'));
        up += ds.values(i, j) / denom * ups_in_label / width;
      }
      fd.y(i) = up;
    }
    return fd;
  }
  auto it = std::find(ds.labels.begin(), ds.labels.end(), target);
  if (it == ds.labels.end())
    throw std::invalid_argument("dataset has no column for state " + target);
  int col = static_cast<int>(it - ds.labels.begin());
  for (long i = 0; i < n; ++i) fd.y(i) = ds.values(i, col) / denom;
  return fd;
}

SpectrumDataset slice_2d(const SpectrumDataset& ds, int vary_axis, int index) {
  if (ds.axis_names.size() != 2)
    throw std::invalid_argument("slice_2d expects a two-axis dataset");
  if (vary_axis != 0 && vary_axis != 1)
    throw std::invalid_argument("vary_axis must be 0 or 1");
  // Recover the inner grid length: axis1 varies fastest.
  long rows = ds.axes.rows();
  long n1 = 1;
  while (n1 < rows && ds.axes(n1, 1) == ds.axes(0, 1)) ++n1;
  long n2 = rows / n1;
  if (n1 * n2 != rows)
    throw std::invalid_argument("dataset rows do not form a grid");

  long count = vary_axis == 0 ? n1 : n2;
  long fixed_max = vary_axis == 0 ? n2 : n1;
  if (index < 0 || index >= fixed_max)
    throw std::invalid_argument("slice index out of range");

  SpectrumDataset out;
  out.axis_names = {ds.axis_names[vary_axis]};
  out.labels = ds.labels;
  out.axes.resize(count, 1);
  out.values.resize(count, ds.values.cols());
  out.shots = ds.shots;
  out.pulse_time = ds.pulse_time;
  out.seed = ds.seed;
  out.model = ds.model;
  for (long k = 0; k < count; ++k) {
    long row = vary_axis == 0 ? index * n1 + k : k * n1 + index;
    out.axes(k, 0) = ds.axes(row, vary_axis);
    out.values.row(k) = ds.values.row(row);
  }
  return out;
}

}  // namespace ionspec
