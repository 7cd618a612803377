#ifndef IONSPEC_SCAN_HPP
#define IONSPEC_SCAN_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ionspec/fit.hpp"
#include "ionspec/ms_model.hpp"

namespace ionspec {

// Conventions owned by this layer:
//  * Scan axes and baselines are physical detunings in rad/s (what the
//    figure axes and the laser knobs read), not Hamiltonian coefficients.
//    A physical common detuning d enters the two-spin model as delta1 = d/2;
//    a physical half-splitting (w01 - w02)/2 = v enters as delta2 = v/2; the
//    full drive takes delta = -d directly.
//  * "light_shift" is a signed value s: s >= 0 raises ion 1's frequency by s,
//    s < 0 raises ion 2's by |s|. Both the mean (|s|/2, shifts the resonance
//    on the delta1 axis) and the difference (s/2 on the delta2 axis) follow.
//  * "time" axes are in seconds and override the pulse time per point.
enum class ScanModel { effective_pair, single_spin, n_spin, full_drive };

struct AxisSpec {
  std::string param;  // delta1, delta2, time, light_shift
  double start = 0.0;
  double stop = 0.0;
  int points = 0;
};

// Quasi-static run-to-run fluctuations, drawn once per shot.
struct NoiseModel {
  double sigma_common = 0.0;    // rad/s, on the physical common detuning
  double sigma_diff = 0.0;      // rad/s, on the physical half-splitting
  double sigma_rabi_rel = 0.0;  // relative, on the coupling strength
  bool any() const {
    return sigma_common > 0 || sigma_diff > 0 || sigma_rabi_rel > 0;
  }
};

struct PairSettings {
  double omega = 0.0;         // spin-spin coupling coefficient, rad/s
  double common = 0.0;        // baseline physical common detuning
  double differential = 0.0;  // baseline physical half-splitting
};

struct SingleSettings {
  double omega = 0.0;      // carrier coupling coefficient, rad/s
  double detuning = 0.0;   // resonance offset on the scan axis
};

struct NSpinSettings {
  double omega = 0.0;
  int spins = 2;
  double common = 0.0;
  Axis coupling_axis = Axis::x;
};

struct ScanConfig {
  ScanModel model = ScanModel::effective_pair;
  std::string initial_state;  // empty picks all-down for the model
  double pulse_time = 0.0;    // seconds; <= 0 means the model's pi time
  AxisSpec axis1;
  std::optional<AxisSpec> axis2;
  long shots = 0;  // 0 = exact probabilities
  NoiseModel noise;
  std::uint64_t seed = 1;
  int threads = 1;
  double light_shift = 0.0;  // baseline, same signed convention as the axis
  double ode_tol = 1e-8;

  PairSettings pair;
  SingleSettings single_ion;
  NSpinSettings nspin;
  MsParams ms;
};

struct SpectrumDataset {
  std::vector<std::string> axis_names;
  std::vector<std::string> labels;  // spin basis labels, dd..uu ordering
  // Axes are kept in file units, Hz for detunings and seconds for time, so
  // write/read cycles are bit exact; extract_fit_data converts back.
  Eigen::MatrixXd axes;   // points x n_axes
  Eigen::MatrixXd values; // points x n_labels; probabilities or counts
  long shots = 0;
  double pulse_time = 0.0;  // the resolved value, for downstream fits
  std::uint64_t seed = 0;
  std::string model;  // engine name string, echoed into metadata
};

SpectrumDataset run_scan(const ScanConfig& cfg);

// Requires axis2; grid is row-major with axis2 as the outer loop, so row
// i2 * n1 + i1 holds (axis1[i1], axis2[i2]).
SpectrumDataset run_2d_scan(const ScanConfig& cfg);

// Reference protocol for the difference axis: both ions driven on their own
// carriers with no coupling, readout averaged over the pair. Produces labels
// d/u where u is the mean excitation; counts pool both ions (2 * shots).
SpectrumDataset run_uncorrelated_difference(const ScanConfig& cfg);

// Multinomial draw, basis-order probabilities to same-order counts.
Eigen::VectorXd sample_counts(const Eigen::VectorXd& probs, long shots,
                              std::mt19937_64& rng);

// Column for `target` against scan axis `axis_index` (counts turn into
// fractions). target is a state label, or "avg_u" for the mean excitation.
FitData extract_fit_data(const SpectrumDataset& ds, const std::string& target,
                         int axis_index = 0);

// Fixes the other axis of a 2D dataset at grid index `index`.
SpectrumDataset slice_2d(const SpectrumDataset& ds, int vary_axis, int index);

}  // namespace ionspec

#endif
