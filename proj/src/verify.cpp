#include "ionspec/verify.hpp"

#include <cmath>
#include <filesystem>
#include <random>

#include "ionspec/io.hpp"
#include "ionspec/rng.hpp"

namespace ionspec {

namespace {

struct Reporter {
  std::ostream& os;
  int failures = 0;

  void check(const std::string& name, bool ok, const std::string& detail = "") {
    os << (ok ? "[ok]   " : "[FAIL] ") << name;
    if (!detail.empty()) os << " (" << detail << ")";
    os << "\n";
    if (!ok) ++failures;
  }
};

StateVector random_state(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  VectorXc v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(g(rng), g(rng));
  v /= v.norm();
  return StateVector{v, {2, 2}};
}

IsingParams random_ising(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  IsingParams p;
  p.omega = hz(100.0) * (1.2 + u(rng));
  p.delta1 = hz(150.0) * u(rng);
  p.delta2 = hz(150.0) * u(rng);
  return p;
}

std::string temp_path(const char* stem) {
  return (std::filesystem::temp_directory_path() / stem).string();
}

bool datasets_identical(const SpectrumDataset& a, const SpectrumDataset& b) {
  if (a.axis_names != b.axis_names || a.labels != b.labels) return false;
  if (a.shots != b.shots) return false;
  if (a.axes.rows() != b.axes.rows() || a.axes.cols() != b.axes.cols())
    return false;
  if (a.values.cols() != b.values.cols()) return false;
  for (long i = 0; i < a.axes.rows(); ++i) {
    for (long c = 0; c < a.axes.cols(); ++c)
      if (a.axes(i, c) != b.axes(i, c)) return false;
    for (long c = 0; c < a.values.cols(); ++c)
      if (a.values(i, c) != b.values(i, c)) return false;
  }
  return true;
}

ScanConfig noisy_scan_config(int threads) {
  ScanConfig sc;
  sc.model = ScanModel::effective_pair;
  sc.axis1 = {"delta1", -hz(800.0), hz(800.0), 9};
  sc.shots = 60;
  sc.noise.sigma_common = hz(40.0);
  sc.noise.sigma_rabi_rel = 0.02;
  sc.seed = 99;
  sc.threads = threads;
  sc.pair.omega = hz(255.0);
  return sc;
}

}  // namespace

int run_verification(std::ostream& os) {
  Reporter rep{os};
  std::mt19937_64 rng = stream_rng(0xfeed, 0, 0);

  {  // norm preservation under the closed-form propagator
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      Operator h = ising_two_spin(random_ising(rng));
      StateVector psi = random_state(4, rng);
      StateVector out = propagate_static(h, psi, 1e-3);
      worst = std::max(worst, std::abs(out.norm() - 1.0));
    }
    rep.check("propagation preserves the norm", worst < 1e-12,
              "max drift " + std::to_string(worst));
  }

  {  // composition: evolving t then s equals evolving t + s
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      Operator h = ising_two_spin(random_ising(rng));
      StateVector psi = random_state(4, rng);
      StateVector once = propagate_static(h, psi, 3.7e-3);
      StateVector twice =
          propagate_static(h, propagate_static(h, psi, 1.4e-3), 2.3e-3);
      worst = std::max(worst,
                       (once.amplitudes - twice.amplitudes).norm());
    }
    rep.check("propagators compose in time", worst < 1e-10,
              "max deviation " + std::to_string(worst));
  }

  {  // parity is conserved and the even block ignores delta2
    double worst_parity = 0.0, worst_even = 0.0, leak = 0.0;
    for (int k = 0; k < 20; ++k) {
      IsingParams p = random_ising(rng);
      StateVector from_dd = basis_state("dd");
      IsingParams p2 = p;
      p2.delta2 = p.delta2 + hz(321.0);
      StateVector a = propagate_static(ising_two_spin(p), from_dd, 2e-3);
      StateVector b = propagate_static(ising_two_spin(p2), from_dd, 2e-3);
      worst_parity = std::max(worst_parity,
                              std::abs(parity_expectation(a) - 1.0) +
                                  std::abs(parity_expectation(b) - 1.0));
      Eigen::VectorXd pa = populations(a), pb = populations(b);
      worst_even = std::max(worst_even, std::abs(pa(0) - pb(0)));
      leak = std::max(leak, pa(1) + pa(2));
    }
    rep.check("even block conserves parity", worst_parity < 1e-12);
    rep.check("even block ignores delta2", worst_even < 1e-12);
    rep.check("even block does not leak", leak < 1e-12);
  }

  {  // odd block ignores delta1 the same way
    double worst = 0.0, leak = 0.0;
    for (int k = 0; k < 20; ++k) {
      IsingParams p = random_ising(rng);
      IsingParams p2 = p;
      p2.delta1 = p.delta1 + hz(321.0);
      StateVector a = propagate_static(ising_two_spin(p), basis_state("ud"), 2e-3);
      StateVector b = propagate_static(ising_two_spin(p2), basis_state("ud"), 2e-3);
      Eigen::VectorXd pa = populations(a), pb = populations(b);
      worst = std::max(worst, (pa - pb).cwiseAbs().maxCoeff());
      leak = std::max(leak, pa(0) + pa(3));
    }
    rep.check("odd block ignores delta1", worst < 1e-12);
    rep.check("odd block does not leak", leak < 1e-12);
  }

  {  // time-dependent integrator against the closed form, constant generator
    Operator h = ising_two_spin({hz(255.0), hz(40.0), hz(-70.0)});
    StateVector psi = random_state(4, rng);
    ConstantGenerator gen(h);
    StateVector a = propagate_time_dependent(gen, psi, 4e-3, 1e-10);
    StateVector b = propagate_static(h, psi, 4e-3);
    double dev = (a.amplitudes - b.amplitudes).norm();
    rep.check("adaptive integrator matches the closed form", dev < 1e-8,
              "deviation " + std::to_string(dev));
  }

  {  // scan probabilities stay on the simplex
    ScanConfig sc;
    sc.model = ScanModel::effective_pair;
    sc.axis1 = {"delta1", -hz(2000.0), hz(2000.0), 21};
    sc.pair.omega = hz(255.0);
    SpectrumDataset ds = run_scan(sc);
    double worst = 0.0;
    for (long i = 0; i < ds.values.rows(); ++i)
      worst = std::max(worst, std::abs(ds.values.row(i).sum() - 1.0));
    rep.check("scan rows stay normalized", worst < 1e-9);
  }

  {  // dataset round trip, probabilities and counts
    ScanConfig sc;
    sc.model = ScanModel::effective_pair;
    sc.axis1 = {"delta1", -hz(777.7), hz(1234.5), 11};
    sc.pair.omega = hz(255.0);
    SpectrumDataset ds = run_scan(sc);
    std::string p1 = temp_path("ionspec_verify_p.tsv");
    write_dataset(ds, p1);
    rep.check("probability dataset round trip",
              datasets_identical(ds, read_dataset(p1)));

    sc.shots = 500;
    sc.seed = 4242;
    SpectrumDataset dk = run_scan(sc);
    std::string p2 = temp_path("ionspec_verify_k.tsv");
    write_dataset(dk, p2);
    rep.check("count dataset round trip",
              datasets_identical(dk, read_dataset(p2)));
  }

  {  // sampling does not depend on the thread count
    SpectrumDataset a = run_scan(noisy_scan_config(1));
    SpectrumDataset b = run_scan(noisy_scan_config(3));
    rep.check("noisy scans are thread deterministic", datasets_identical(a, b));
  }

  {  // config parsing: units required, unknown keys rejected
    bool units_ok = std::abs(parse_frequency(json("25.5 kHz"), "x") -
                             khz(25.5)) < 1e-9;
    bool bare_rejected = false;
    try {
      parse_frequency(json(25.5), "x");
    } catch (const std::exception&) {
      bare_rejected = true;
    }
    bool unknown_rejected = false;
    try {
      check_keys(json{{"shots", 1}, {"shoots", 2}}, "test", {"shots"});
    } catch (const std::exception&) {
      unknown_rejected = true;
    }
    rep.check("frequency units parse", units_ok);
    rep.check("bare numbers need units", bare_rejected);
    rep.check("unknown config keys are rejected", unknown_rejected);
  }

  os << (rep.failures == 0 ? "all checks passed" :
         std::to_string(rep.failures) + " check(s) failed") << "\n";
  return rep.failures;
}

}  // namespace ionspec
