#include "ionspec/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ionspec {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double parse_tagged(const json& v, const std::string& field,
                    const std::map<std::string, double>& units,
                    const char* kind) {
  if (!v.is_string())
    throw std::runtime_error("field '" + field + "' must be a string with a " +
                             kind + " unit, e.g. \"" +
                             units.begin()->first + "\"");
  std::string s = trim(v.get<std::string>());
  const char* cs = s.c_str();
  char* end = nullptr;
  double num = std::strtod(cs, &end);
  if (end == cs)
    throw std::runtime_error("field '" + field + "' has no numeric part: " + s);
  std::string unit = trim(std::string(end));
  auto it = units.find(unit);
  if (it == units.end())
    throw std::runtime_error("field '" + field + "' has unknown " + kind +
                             " unit '" + unit + "'");
  return num * it->second;
}

}  // namespace

double parse_frequency(const json& v, const std::string& field) {
  static const std::map<std::string, double> units = {
      {"Hz", two_pi},        {"kHz", two_pi * 1e3}, {"MHz", two_pi * 1e6},
      {"GHz", two_pi * 1e9}, {"rad/s", 1.0},        {"krad/s", 1e3},
      {"Mrad/s", 1e6}};
  return parse_tagged(v, field, units, "frequency");
}

double parse_time(const json& v, const std::string& field) {
  static const std::map<std::string, double> units = {
      {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
  return parse_tagged(v, field, units, "time");
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object())
    throw std::runtime_error(where + " must be a json object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw std::runtime_error("unknown key '" + it.key() + "' in " + where);
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return j;
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------- datasets

namespace {

std::string axis_column(const std::string& name) {
  return name == "time" ? name + "_s" : name + "_hz";
}

void put(std::ostream& os, double v) {
  os << std::setprecision(17) << v;
}

}  // namespace

void write_dataset(const SpectrumDataset& ds, const std::string& path,
                   const json& config_echo) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");

  for (std::size_t a = 0; a < ds.axis_names.size(); ++a) {
    if (a) out << "\t";
    out << axis_column(ds.axis_names[a]);
  }
  const char* prefix = ds.shots > 0 ? "k_" : "p_";
  for (const std::string& l : ds.labels) out << "\t" << prefix << l;
  out << "\n";

  for (long i = 0; i < ds.axes.rows(); ++i) {
    for (long a = 0; a < ds.axes.cols(); ++a) {
      if (a) out << "\t";
      put(out, ds.axes(i, a));
    }
    for (long j = 0; j < ds.values.cols(); ++j) {
      out << "\t";
      put(out, ds.values(i, j));
    }
    out << "\n";
  }
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path);

  json meta;
  meta["version"] = version_string;
  meta["model"] = ds.model;
  meta["seed"] = ds.seed;
  meta["shots"] = ds.shots;
  meta["pulse_time_s"] = ds.pulse_time;
  meta["axis_names"] = ds.axis_names;
  meta["labels"] = ds.labels;
  if (!config_echo.is_null()) meta["config"] = config_echo;
  write_json_file(meta, path + ".meta.json");
}

SpectrumDataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error(path + ": empty file");

  SpectrumDataset ds;
  std::vector<bool> is_axis;
  bool counts = false, probs = false;
  {
    std::istringstream hs(header);
    std::string tok;
    while (hs >> tok) {
      if (tok.size() > 3 && tok.substr(tok.size() - 3) == "_hz") {
        ds.axis_names.push_back(tok.substr(0, tok.size() - 3));
        is_axis.push_back(true);
      } else if (tok.size() > 2 && tok.substr(tok.size() - 2) == "_s") {
        ds.axis_names.push_back(tok.substr(0, tok.size() - 2));
        is_axis.push_back(true);
      } else if (tok.rfind("p_", 0) == 0) {
        ds.labels.push_back(tok.substr(2));
        is_axis.push_back(false);
        probs = true;
      } else if (tok.rfind("k_", 0) == 0) {
        ds.labels.push_back(tok.substr(2));
        is_axis.push_back(false);
        counts = true;
      } else {
        throw std::runtime_error(path + ": unrecognized column '" + tok + "'");
      }
    }
  }
  if (ds.axis_names.empty() || ds.labels.empty())
    throw std::runtime_error(path + ": header needs axis and value columns");
  if (counts && probs)
    throw std::runtime_error(path + ": cannot mix count and probability columns");
  std::size_t ncol = is_axis.size();

  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (row.size() != ncol)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected " + std::to_string(ncol) +
                               " columns, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");

  long n = static_cast<long>(rows.size());
  ds.axes.resize(n, static_cast<long>(ds.axis_names.size()));
  ds.values.resize(n, static_cast<long>(ds.labels.size()));
  long shots_seen = -1;
  for (long i = 0; i < n; ++i) {
    long ia = 0, iv = 0;
    double row_sum = 0.0;
    for (std::size_t c = 0; c < ncol; ++c) {
      if (is_axis[c]) ds.axes(i, ia++) = rows[i][c];
      else {
        double x = rows[i][c];
        if (counts && (x < 0 || x != std::floor(x)))
          throw std::runtime_error(path + ": counts must be whole and >= 0");
        if (probs && (x < -1e-9 || x > 1.0 + 1e-9))
          throw std::runtime_error(path + ": probabilities must lie in [0,1]");
        row_sum += x;
        ds.values(i, iv++) = x;
      }
    }
    if (counts) {
      long s = static_cast<long>(std::llround(row_sum));
      if (shots_seen < 0) shots_seen = s;
      else if (s != shots_seen)
        throw std::runtime_error(path + ": rows disagree on the shot count");
    } else if (std::abs(row_sum - 1.0) > 1e-9) {
      throw std::runtime_error(path + ": probabilities do not sum to one");
    }
  }
  ds.shots = counts ? shots_seen : 0;

  std::string meta_path = path + ".meta.json";
  if (std::filesystem::exists(meta_path)) {
    json meta = load_json_file(meta_path);
    if (meta.contains("pulse_time_s"))
      ds.pulse_time = meta["pulse_time_s"].get<double>();
    if (meta.contains("seed")) ds.seed = meta["seed"].get<std::uint64_t>();
    if (meta.contains("model")) ds.model = meta["model"].get<std::string>();
  }
  return ds;
}

// ------------------------------------------------------------ scan configs

namespace {

ScanModel parse_model(const std::string& s) {
  if (s == "effective_pair") return ScanModel::effective_pair;
  if (s == "single_spin") return ScanModel::single_spin;
  if (s == "n_spin") return ScanModel::n_spin;
  if (s == "full_drive") return ScanModel::full_drive;
  throw std::runtime_error("unknown model '" + s + "'");
}

Axis parse_axis_letter(const std::string& s) {
  if (s == "x") return Axis::x;
  if (s == "y") return Axis::y;
  if (s == "z") return Axis::z;
  throw std::runtime_error("coupling axis must be x, y or z");
}

AxisSpec parse_axis(const json& j, const std::string& where) {
  check_keys(j, where, {"param", "start", "stop", "points"});
  AxisSpec ax;
  if (!j.contains("param") || !j.contains("start") || !j.contains("stop") ||
      !j.contains("points"))
    throw std::runtime_error(where + " needs param, start, stop, points");
  ax.param = j["param"].get<std::string>();
  if (ax.param == "time") {
    ax.start = parse_time(j["start"], where + ".start");
    ax.stop = parse_time(j["stop"], where + ".stop");
  } else {
    ax.start = parse_frequency(j["start"], where + ".start");
    ax.stop = parse_frequency(j["stop"], where + ".stop");
  }
  ax.points = j["points"].get<int>();
  return ax;
}

NoiseModel parse_noise(const json& j) {
  check_keys(j, "noise", {"sigma_common", "sigma_diff", "sigma_rabi_rel"});
  NoiseModel nm;
  if (j.contains("sigma_common"))
    nm.sigma_common = parse_frequency(j["sigma_common"], "noise.sigma_common");
  if (j.contains("sigma_diff"))
    nm.sigma_diff = parse_frequency(j["sigma_diff"], "noise.sigma_diff");
  if (j.contains("sigma_rabi_rel"))
    nm.sigma_rabi_rel = j["sigma_rabi_rel"].get<double>();
  return nm;
}

ScanJob parse_scan_job(const json& j, const std::string& name) {
  check_keys(j, "scan '" + name + "'",
             {"name", "model", "protocol", "initial_state", "pulse_time",
              "axis1", "axis2", "shots", "seed", "threads", "noise",
              "light_shift", "pair", "single", "nspin", "ms", "ode_tol"});
  ScanJob job;
  job.name = name;
  ScanConfig& sc = job.scan;

  if (j.contains("protocol")) {
    std::string p = j["protocol"].get<std::string>();
    if (p != "uncorrelated_difference")
      throw std::runtime_error("unknown protocol '" + p + "'");
    job.uncorrelated_protocol = true;
  }
  if (j.contains("model")) sc.model = parse_model(j["model"].get<std::string>());
  else if (!job.uncorrelated_protocol)
    throw std::runtime_error("scan '" + name + "' does not name a model");

  if (j.contains("initial_state"))
    sc.initial_state = j["initial_state"].get<std::string>();
  if (j.contains("pulse_time")) {
    const json& pt = j["pulse_time"];
    if (pt.is_string() && pt.get<std::string>() == "auto") sc.pulse_time = 0.0;
    else sc.pulse_time = parse_time(pt, "pulse_time");
  }
  if (!j.contains("axis1"))
    throw std::runtime_error("scan '" + name + "' needs axis1");
  sc.axis1 = parse_axis(j["axis1"], "axis1");
  if (j.contains("axis2")) sc.axis2 = parse_axis(j["axis2"], "axis2");
  if (j.contains("shots")) sc.shots = j["shots"].get<long>();
  if (j.contains("seed")) sc.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("threads")) sc.threads = j["threads"].get<int>();
  if (j.contains("noise")) sc.noise = parse_noise(j["noise"]);
  if (j.contains("light_shift"))
    sc.light_shift = parse_frequency(j["light_shift"], "light_shift");
  if (j.contains("ode_tol")) sc.ode_tol = j["ode_tol"].get<double>();

  if (j.contains("pair")) {
    const json& p = j["pair"];
    check_keys(p, "pair", {"omega", "common", "differential"});
    if (p.contains("omega"))
      sc.pair.omega = parse_frequency(p["omega"], "pair.omega");
    if (p.contains("common"))
      sc.pair.common = parse_frequency(p["common"], "pair.common");
    if (p.contains("differential"))
      sc.pair.differential =
          parse_frequency(p["differential"], "pair.differential");
  }
  if (j.contains("single")) {
    const json& p = j["single"];
    check_keys(p, "single", {"omega", "detuning"});
    if (p.contains("omega"))
      sc.single_ion.omega = parse_frequency(p["omega"], "single.omega");
    if (p.contains("detuning"))
      sc.single_ion.detuning = parse_frequency(p["detuning"], "single.detuning");
  }
  if (j.contains("nspin")) {
    const json& p = j["nspin"];
    check_keys(p, "nspin", {"omega", "spins", "common", "axis"});
    if (p.contains("omega"))
      sc.nspin.omega = parse_frequency(p["omega"], "nspin.omega");
    if (p.contains("spins")) sc.nspin.spins = p["spins"].get<int>();
    if (p.contains("common"))
      sc.nspin.common = parse_frequency(p["common"], "nspin.common");
    if (p.contains("axis"))
      sc.nspin.coupling_axis = parse_axis_letter(p["axis"].get<std::string>());
  }
  if (j.contains("ms")) {
    const json& p = j["ms"];
    check_keys(p, "ms", {"nu", "epsilon", "rabi", "eta", "delta", "offsets",
                         "n_max", "n_init"});
    if (p.contains("nu")) sc.ms.nu = parse_frequency(p["nu"], "ms.nu");
    if (p.contains("epsilon"))
      sc.ms.epsilon = parse_frequency(p["epsilon"], "ms.epsilon");
    if (p.contains("rabi")) sc.ms.rabi = parse_frequency(p["rabi"], "ms.rabi");
    if (p.contains("eta")) sc.ms.eta = p["eta"].get<double>();
    if (p.contains("delta")) sc.ms.delta = parse_frequency(p["delta"], "ms.delta");
    if (p.contains("offsets")) {
      const json& off = p["offsets"];
      if (!off.is_array() || off.size() != 2)
        throw std::runtime_error("ms.offsets must list two frequencies");
      sc.ms.offsets[0] = parse_frequency(off[0], "ms.offsets[0]");
      sc.ms.offsets[1] = parse_frequency(off[1], "ms.offsets[1]");
    }
    if (p.contains("n_max")) sc.ms.n_max = p["n_max"].get<int>();
    if (p.contains("n_init")) sc.ms.n_init = p["n_init"].get<int>();
  }
  return job;
}

}  // namespace

ScanFileConfig load_scan_config(const std::string& path, bool need_axis2,
                                json* echo) {
  json top = load_json_file(path);
  if (echo) *echo = top;
  check_keys(top, "config",
             {"output_prefix", "defaults", "scans", "model", "protocol",
              "initial_state", "pulse_time", "axis1", "axis2", "shots", "seed",
              "threads", "noise", "light_shift", "pair", "single", "nspin",
              "ms", "ode_tol"});

  ScanFileConfig out;
  if (top.contains("output_prefix"))
    out.output_prefix = top["output_prefix"].get<std::string>();

  json base = json::object();
  for (auto it = top.begin(); it != top.end(); ++it) {
    if (it.key() == "output_prefix" || it.key() == "defaults" ||
        it.key() == "scans")
      continue;
    base[it.key()] = it.value();
  }
  if (top.contains("defaults")) base.merge_patch(top["defaults"]);

  if (top.contains("scans")) {
    const json& scans = top["scans"];
    if (!scans.is_array() || scans.empty())
      throw std::runtime_error("'scans' must be a non-empty array");
    for (std::size_t k = 0; k < scans.size(); ++k) {
      json merged = base;
      merged.merge_patch(scans[k]);
      std::string name = merged.contains("name")
                             ? merged["name"].get<std::string>()
                             : "scan" + std::to_string(k);
      merged.erase("name");
      out.jobs.push_back(parse_scan_job(merged, name));
    }
  } else {
    out.jobs.push_back(parse_scan_job(base, "scan"));
  }

  for (const ScanJob& job : out.jobs) {
    if (need_axis2 && !job.scan.axis2)
      throw std::runtime_error("scan '" + job.name + "' needs axis2");
    if (!need_axis2 && job.scan.axis2)
      throw std::runtime_error("scan '" + job.name +
                               "' has axis2; use the 2d command");
  }
  return out;
}

// ---------------------------------------------------------- other configs

FitFileConfig load_fit_config(const std::string& path) {
  json j = load_json_file(path);
  check_keys(j, "fit config",
             {"data", "target", "init", "free", "alpha_range", "multistart"});
  FitFileConfig out;
  if (j.contains("data")) out.data_path = j["data"].get<std::string>();
  if (j.contains("target")) out.target = j["target"].get<std::string>();

  out.init.contrast = 1.0;
  out.init.alpha = 2.0;
  out.init.center = 0.0;
  if (j.contains("init")) {
    const json& in = j["init"];
    check_keys(in, "init", {"contrast", "omega_line", "tau", "alpha", "center"});
    if (in.contains("contrast")) out.init.contrast = in["contrast"].get<double>();
    if (in.contains("alpha")) out.init.alpha = in["alpha"].get<double>();
    if (in.contains("center"))
      out.init.center = parse_frequency(in["center"], "init.center");
    if (in.contains("omega_line")) {
      const json& w = in["omega_line"];
      if (w.is_string() && w.get<std::string>() == "auto") out.omega_auto = true;
      else {
        out.init.omega = parse_frequency(w, "init.omega_line");
        out.omega_auto = false;
      }
    }
    if (in.contains("tau")) {
      const json& t = in["tau"];
      if (t.is_string() && t.get<std::string>() == "auto")
        out.tau_from_dataset = true;
      else {
        out.init.tau = parse_time(t, "init.tau");
        out.tau_from_dataset = false;
      }
    }
  }
  if (j.contains("free")) {
    static const char* names[5] = {"contrast", "omega_line", "tau", "alpha",
                                   "center"};
    out.options.free = {false, false, false, false, false};
    for (const json& f : j["free"]) {
      std::string s = f.get<std::string>();
      bool found = false;
      for (int k = 0; k < 5; ++k)
        if (s == names[k]) {
          out.options.free[k] = true;
          found = true;
        }
      if (!found) throw std::runtime_error("unknown fit parameter '" + s + "'");
    }
  }
  if (j.contains("alpha_range")) {
    const json& r = j["alpha_range"];
    if (!r.is_array() || r.size() != 2)
      throw std::runtime_error("alpha_range must be [lo, hi]");
    out.options.alpha_min = r[0].get<double>();
    out.options.alpha_max = r[1].get<double>();
  }
  if (j.contains("multistart"))
    out.options.multistart = j["multistart"].get<int>();
  return out;
}

FisherFileConfig load_fisher_config(const std::string& path) {
  json j = load_json_file(path);
  check_keys(j, "fisher config",
             {"omega_line", "tau", "mc_shots", "mc_replicas", "seed"});
  FisherFileConfig out;
  if (!j.contains("omega_line"))
    throw std::runtime_error("fisher config needs omega_line");
  out.omega_line = parse_frequency(j["omega_line"], "omega_line");
  if (j.contains("tau")) {
    const json& t = j["tau"];
    if (!(t.is_string() && t.get<std::string>() == "auto"))
      out.tau = parse_time(t, "tau");
  }
  if (j.contains("mc_shots")) out.mc_shots = j["mc_shots"].get<long>();
  if (j.contains("mc_replicas")) out.mc_replicas = j["mc_replicas"].get<int>();
  if (j.contains("seed")) out.seed = j["seed"].get<std::uint64_t>();
  return out;
}

CalibrateFileConfig load_calibrate_config(const std::string& path) {
  json j = load_json_file(path);
  check_keys(j, "calibrate config",
             {"beam", "powers", "branches", "baseline_diff", "probe", "shots",
              "noise", "seed", "threads", "consistency"});
  CalibrateFileConfig out;
  if (!j.contains("beam")) throw std::runtime_error("calibrate config needs beam");
  {
    const json& b = j["beam"];
    check_keys(b, "beam", {"rabi", "detuning", "prefactor"});
    out.base.beam.rabi = parse_frequency(b.at("rabi"), "beam.rabi");
    out.base.beam.detuning = parse_frequency(b.at("detuning"), "beam.detuning");
    if (b.contains("prefactor"))
      out.base.beam.prefactor = b["prefactor"].get<double>();
  }
  if (!j.contains("powers")) throw std::runtime_error("calibrate config needs powers");
  out.base.powers = j["powers"].get<std::vector<double>>();
  out.branches = j.contains("branches") ? j["branches"].get<std::vector<int>>()
                                        : std::vector<int>{1};
  if (j.contains("baseline_diff"))
    out.base.baseline_diff = parse_frequency(j["baseline_diff"], "baseline_diff");
  if (!j.contains("probe")) throw std::runtime_error("calibrate config needs probe");
  {
    const json& p = j["probe"];
    check_keys(p, "probe", {"omega", "time", "span_factor", "points"});
    out.base.probe_omega = parse_frequency(p.at("omega"), "probe.omega");
    if (p.contains("time")) {
      const json& t = p["time"];
      if (!(t.is_string() && t.get<std::string>() == "auto"))
        out.base.probe_time = parse_time(t, "probe.time");
    }
    if (p.contains("span_factor"))
      out.base.span_factor = p["span_factor"].get<double>();
    if (p.contains("points")) out.base.points = p["points"].get<int>();
  }
  if (j.contains("shots")) out.base.shots = j["shots"].get<long>();
  if (j.contains("noise")) out.base.noise = parse_noise(j["noise"]);
  if (j.contains("seed")) out.base.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("threads")) out.base.threads = j["threads"].get<int>();
  if (j.contains("consistency")) {
    const json& c = j["consistency"];
    check_keys(c, "consistency", {"pair_omega", "powers"});
    out.consistency_pair_omega =
        parse_frequency(c.at("pair_omega"), "consistency.pair_omega");
    if (c.contains("powers"))
      out.consistency_powers = c["powers"].get<std::vector<double>>();
  }
  return out;
}

// ------------------------------------------------------------- serializers

json to_json(const FitResult& r) {
  json j;
  j["contrast"] = r.params.contrast;
  j["omega_line_hz"] = to_hz(r.params.omega);
  j["tau_s"] = r.params.tau;
  j["alpha"] = r.params.alpha;
  j["center_hz"] = to_hz(r.params.center);
  j["err_contrast"] = r.std_error[0];
  j["err_omega_line_hz"] = to_hz(r.std_error[1]);
  j["err_tau_s"] = r.std_error[2];
  j["err_alpha"] = r.std_error[3];
  j["err_center_hz"] = to_hz(r.std_error[4]);
  j["objective"] = r.objective;
  j["ssr"] = r.ssr;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  return j;
}

json to_json(const ProtocolComparison& c) {
  json j;
  j["omega_line_hz"] = to_hz(c.omega_line);
  j["tau_s"] = c.tau;
  j["delta_opt_single_hz"] = to_hz(c.delta_opt_single);
  j["delta_opt_corr_hz"] = to_hz(c.delta_opt_corr);
  j["sigma_single_hz"] = to_hz(c.sigma_single);
  j["sigma_pair_hz"] = to_hz(c.sigma_pair);
  j["sigma_corr_hz"] = to_hz(c.sigma_corr);
  j["ratio_corr_pair"] = c.ratio_corr_pair;
  j["ratio_corr_single"] = c.ratio_corr_single;
  j["fwhm_single_hz"] = to_hz(c.fwhm_single);
  j["fwhm_corr_hz"] = to_hz(c.fwhm_corr);
  j["fwhm_product_hz"] = to_hz(c.fwhm_product);
  if (c.mc_sigma_single > 0) {
    j["mc_sigma_single_hz"] = to_hz(c.mc_sigma_single);
    j["mc_sigma_pair_hz"] = to_hz(c.mc_sigma_pair);
    j["mc_sigma_corr_hz"] = to_hz(c.mc_sigma_corr);
    j["mc_ratio_corr_pair"] = c.mc_ratio_corr_pair;
    j["mc_ratio_corr_single"] = c.mc_ratio_corr_single;
  }
  return j;
}

json to_json(const PiTimeReport& r) {
  json j;
  j["measured_us"] = r.measured * 1e6;
  j["peak_population"] = r.peak_population;
  j["predicted_us"] = r.predicted * 1e6;
  j["candidate_full_us"] = r.candidate_full * 1e6;
  j["candidate_half_us"] = r.candidate_half * 1e6;
  j["prefactor"] = r.prefactor;
  return j;
}

json to_json(const CalibrationCurve& c) {
  json j;
  j["shifted_ion"] = c.shifted_ion;
  j["baseline_diff_hz"] = to_hz(c.baseline_diff);
  j["slope_hz_per_power"] = to_hz(c.diff_vs_power.slope);
  j["slope_err_hz_per_power"] = to_hz(c.diff_vs_power.slope_err);
  j["intercept_hz"] = to_hz(c.diff_vs_power.intercept);
  j["intercept_err_hz"] = to_hz(c.diff_vs_power.intercept_err);
  j["r2"] = c.diff_vs_power.r2;
  json pts = json::array();
  for (const CalibrationPoint& p : c.points) {
    json e;
    e["power"] = p.power;
    e["shift_programmed_hz"] = to_hz(p.shift_programmed);
    e["f1_hz"] = to_hz(p.freqs.f1);
    e["f2_hz"] = to_hz(p.freqs.f2);
    e["err1_hz"] = to_hz(p.freqs.err1);
    e["err2_hz"] = to_hz(p.freqs.err2);
    e["mean_hz"] = to_hz(p.freqs.mean);
    e["diff_hz"] = to_hz(p.freqs.diff);
    e["err_mean_hz"] = to_hz(p.freqs.err_mean);
    e["err_diff_hz"] = to_hz(p.freqs.err_diff);
    pts.push_back(e);
  }
  j["points"] = pts;
  return j;
}

json to_json(const std::vector<MeanShiftCheck>& checks) {
  json arr = json::array();
  for (const MeanShiftCheck& c : checks) {
    json e;
    e["power"] = c.power;
    e["shift_programmed_hz"] = to_hz(c.shift_programmed);
    e["mean_expected_hz"] = to_hz(c.mean_expected);
    e["correlated_center_hz"] = to_hz(c.correlated_center);
    e["correlated_err_hz"] = to_hz(c.correlated_err);
    arr.push_back(e);
  }
  return arr;
}

}  // namespace ionspec
