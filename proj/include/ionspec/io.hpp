#ifndef IONSPEC_IO_HPP
#define IONSPEC_IO_HPP

#include <json.hpp>
#include <string>

#include "ionspec/calibration.hpp"
#include "ionspec/ms_model.hpp"
#include "ionspec/protocols.hpp"
#include "ionspec/scan.hpp"

namespace ionspec {

inline constexpr const char* version_string = "0.1.0";

using nlohmann::json;

// Dataset files are whitespace-separated text: a header naming the columns,
// one row per scan point. Axis columns carry their unit in the name
// (delta1_hz, time_s); value columns are p_<label> for probabilities or
// k_<label> for counts (shots = row sum). Doubles print as %.17g so a
// write/read cycle is bit exact. A json sidecar <path>.meta.json records
// model, seed, pulse time and the originating config.
//
// Dataset axes are stored in file units: Hz for detunings, seconds for time.
void write_dataset(const SpectrumDataset& ds, const std::string& path,
                   const json& config_echo = json());

SpectrumDataset read_dataset(const std::string& path);

// Unit-tagged scalars. Frequencies must be strings like "25.5 kHz" or
// "-3 rad/s"; times like "1300 us". Bare numbers are rejected so nobody can
// feed a field in the wrong unit silently.
double parse_frequency(const json& v, const std::string& field);  // -> rad/s
double parse_time(const json& v, const std::string& field);       // -> s

// Throws on any key not in `allowed`, naming the offender.
void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed);

struct ScanJob {
  std::string name;
  ScanConfig scan;
  bool uncorrelated_protocol = false;
};

struct ScanFileConfig {
  std::string output_prefix = "scan";
  std::vector<ScanJob> jobs;
};

// One file describes one or more scans: shared fields at top level (or under
// "defaults"), per-scan overrides in a "scans" array. need_axis2 selects the
// 2d schema.
ScanFileConfig load_scan_config(const std::string& path, bool need_axis2,
                                json* echo = nullptr);

struct FitFileConfig {
  std::string data_path;
  std::string target = "uu";
  LineshapeParams init;
  FitOptions options;
  bool tau_from_dataset = true;
  bool omega_auto = true;  // init omega from pi / tau
};

FitFileConfig load_fit_config(const std::string& path);

struct FisherFileConfig {
  double omega_line = 0.0;
  double tau = 0.0;  // 0 = pi pulse
  long mc_shots = 0;
  int mc_replicas = 0;
  std::uint64_t seed = 1;
};

FisherFileConfig load_fisher_config(const std::string& path);

struct CalibrateFileConfig {
  CalibrationConfig base;
  std::vector<int> branches;  // which ions get the beam, in order
  double consistency_pair_omega = 0.0;
  std::vector<double> consistency_powers;
};

CalibrateFileConfig load_calibrate_config(const std::string& path);

json to_json(const FitResult& r);
json to_json(const ProtocolComparison& c);
json to_json(const PiTimeReport& r);
json to_json(const CalibrationCurve& c);
json to_json(const std::vector<MeanShiftCheck>& checks);

json load_json_file(const std::string& path);
void write_json_file(const json& j, const std::string& path);

}  // namespace ionspec

#endif
