#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "ionspec/io.hpp"
#include "ionspec/verify.hpp"

namespace {

using namespace ionspec;

struct CommonOpts {
  std::string config;
  std::string out_dir = ".";
  long shots = -1;       // -1 = keep config value
  long long seed = -1;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool config_required = true) {
  auto* c = cmd->add_option("--config", o.config, "json config file");
  if (config_required) c->required();
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--shots", o.shots, "override shots for every scan");
  cmd->add_option("--seed", o.seed, "override the random seed");
  cmd->add_option("--threads", o.threads, "override the worker thread count");
}

void apply_overrides(ScanConfig& sc, const CommonOpts& o) {
  if (o.shots >= 0) sc.shots = o.shots;
  if (o.seed >= 0) sc.seed = static_cast<std::uint64_t>(o.seed);
  if (o.threads > 0) sc.threads = o.threads;
}

std::string dataset_path(const CommonOpts& o, const ScanFileConfig& cfg,
                         const ScanJob& job, std::size_t n_jobs) {
  std::string stem = cfg.output_prefix;
  if (n_jobs > 1 || !job.name.empty()) stem += "_" + job.name;
  return (std::filesystem::path(o.out_dir) / (stem + ".tsv")).string();
}

int run_scans(const CommonOpts& o, bool need_axis2, bool require_time_axis) {
  json echo;
  ScanFileConfig cfg = load_scan_config(o.config, need_axis2, &echo);
  std::filesystem::create_directories(o.out_dir);
  for (ScanJob& job : cfg.jobs) {
    apply_overrides(job.scan, o);
    if (require_time_axis && job.scan.axis1.param != "time")
      throw std::runtime_error("nutate expects axis1.param == \"time\"");
    SpectrumDataset ds;
    if (job.uncorrelated_protocol) ds = run_uncorrelated_difference(job.scan);
    else if (need_axis2) ds = run_2d_scan(job.scan);
    else ds = run_scan(job.scan);
    std::string path = dataset_path(o, cfg, job, cfg.jobs.size());
    write_dataset(ds, path, echo);
    std::cout << path << "  (" << ds.axes.rows() << " points, "
              << (ds.shots > 0 ? std::to_string(ds.shots) + " shots"
                               : std::string("exact")) << ")\n";
  }
  return 0;
}

int run_fit(const CommonOpts& o, const std::string& data_override) {
  FitFileConfig cfg = load_fit_config(o.config);
  if (!data_override.empty()) cfg.data_path = data_override;
  if (cfg.data_path.empty())
    throw std::runtime_error("no dataset given; set \"data\" or --data");
  SpectrumDataset ds = read_dataset(cfg.data_path);

  LineshapeParams init = cfg.init;
  if (cfg.tau_from_dataset) {
    if (ds.pulse_time <= 0)
      throw std::runtime_error(
          "dataset metadata has no pulse time; set init.tau explicitly");
    init.tau = ds.pulse_time;
  }
  if (cfg.omega_auto) init.omega = pi / init.tau;

  FitData fd = extract_fit_data(ds, cfg.target);
  FitResult res = fit_lineshape(fd, init, cfg.options);
  json j = to_json(res);
  j["data"] = cfg.data_path;
  j["target"] = cfg.target;
  std::cout << j.dump(2) << "\n";
  if (o.out_dir != ".") {
    std::filesystem::create_directories(o.out_dir);
    write_json_file(
        j, (std::filesystem::path(o.out_dir) / "fit.json").string());
  }
  return res.converged ? 0 : 1;
}

int run_fisher(const CommonOpts& o) {
  FisherFileConfig cfg = load_fisher_config(o.config);
  std::uint64_t seed = o.seed >= 0 ? o.seed : cfg.seed;
  ProtocolComparison cmp = compare_protocols(
      cfg.omega_line, cfg.tau, o.shots >= 0 ? o.shots : cfg.mc_shots,
      cfg.mc_replicas, seed);
  std::cout << to_json(cmp).dump(2) << "\n";
  return 0;
}

int run_calibrate(const CommonOpts& o) {
  CalibrateFileConfig cfg = load_calibrate_config(o.config);
  if (o.shots >= 0) cfg.base.shots = o.shots;
  if (o.seed >= 0) cfg.base.seed = static_cast<std::uint64_t>(o.seed);
  if (o.threads > 0) cfg.base.threads = o.threads;

  json out;
  out["branches"] = json::array();
  for (int ion : cfg.branches) {
    CalibrationConfig c = cfg.base;
    c.shifted_ion = ion;
    CalibrationCurve curve = build_calibration(c);
    out["branches"].push_back(to_json(curve));
    std::cout << "branch ion " << ion << ": slope "
              << to_hz(curve.diff_vs_power.slope) << " Hz/power, intercept "
              << to_hz(curve.diff_vs_power.intercept) << " Hz\n";
  }
  if (cfg.consistency_pair_omega > 0 && !cfg.consistency_powers.empty()) {
    CalibrationConfig c = cfg.base;
    c.shifted_ion = cfg.branches.front();
    auto checks = correlated_mean_consistency(c, cfg.consistency_pair_omega,
                                              cfg.consistency_powers);
    out["consistency"] = to_json(checks);
    for (const MeanShiftCheck& ch : checks)
      std::cout << "consistency p=" << ch.power << ": correlated center "
                << to_hz(ch.correlated_center) << " Hz vs expected "
                << to_hz(ch.mean_expected) << " Hz\n";
  }
  std::filesystem::create_directories(o.out_dir);
  std::string path =
      (std::filesystem::path(o.out_dir) / "calibration.json").string();
  write_json_file(out, path);
  std::cout << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-spin rabi spectroscopy toolkit"};
  app.require_subcommand(1);

  CommonOpts nutate_o, scan_o, scan2d_o, fit_o, fisher_o, cal_o;
  std::string fit_data;

  auto* nutate = app.add_subcommand("nutate", "time scans (rabi flopping)");
  add_common(nutate, nutate_o);
  auto* scan = app.add_subcommand("scan", "one-dimensional spectra");
  add_common(scan, scan_o);
  auto* scan2d = app.add_subcommand("scan2d", "two-dimensional spectra");
  add_common(scan2d, scan2d_o);
  auto* fit = app.add_subcommand("fit", "fit a resonance profile to a dataset");
  add_common(fit, fit_o);
  fit->add_option("--data", fit_data, "dataset file, overrides the config");
  auto* fisher = app.add_subcommand("fisher", "protocol uncertainty comparison");
  add_common(fisher, fisher_o);
  auto* calibrate = app.add_subcommand("calibrate", "light-shift calibration run");
  add_common(calibrate, cal_o);
  auto* verify = app.add_subcommand("verify", "run the invariant checks");
  (void)verify;

  CLI11_PARSE(app, argc, argv);

  try {
    if (nutate->parsed()) return run_scans(nutate_o, false, true);
    if (scan->parsed()) return run_scans(scan_o, false, false);
    if (scan2d->parsed()) return run_scans(scan2d_o, true, false);
    if (fit->parsed()) return run_fit(fit_o, fit_data);
    if (fisher->parsed()) return run_fisher(fisher_o);
    if (calibrate->parsed()) return run_calibrate(cal_o);
    if (verify->parsed()) return ionspec::run_verification(std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
