#include "ionspec/ms_model.hpp"

#include <algorithm>
#include <cmath>

namespace ionspec {

void validate(const MsParams& p) {
  if (p.nu <= 0) throw std::invalid_argument("mode frequency must be positive");
  if (p.epsilon <= 0) throw std::invalid_argument("tone offset must be positive");
  if (p.rabi <= 0) throw std::invalid_argument("carrier rabi must be positive");
  if (p.eta <= 0 || p.eta >= 1)
    throw std::invalid_argument("lamb-dicke parameter must lie in (0, 1)");
  if (p.n_max < 2) throw std::invalid_argument("need at least fock levels 0..2");
  if (p.n_init < 0 || p.n_init > p.n_max)
    throw std::invalid_argument("initial fock level out of range");
  if (p.epsilon >= p.nu)
    throw std::invalid_argument("tone offset must stay well below the mode frequency");
}

namespace {

MatrixXc fock_identity(int levels) { return MatrixXc::Identity(levels, levels); }

MatrixXc fock_lower(int levels) {
  MatrixXc a = MatrixXc::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

MatrixXc kron3(const MatrixXc& a, const MatrixXc& b, const MatrixXc& c) {
  auto kron = [](const MatrixXc& x, const MatrixXc& y) {
    MatrixXc out(x.rows() * y.rows(), x.cols() * y.cols());
    for (int i = 0; i < x.rows(); ++i)
      for (int j = 0; j < x.cols(); ++j)
        out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
  };
  return kron(kron(a, b), c);
}

}  // namespace

MsGenerator::MsGenerator(const MsParams& p) : p_(p) {
  validate(p);
  int levels = p.n_max + 1;
  dim_ = 4 * levels;

  MatrixXc sp(2, 2);  // |u><d| in the u=0, d=1 ordering
  sp << 0, 1, 0, 0;
  MatrixXc id2 = MatrixXc::Identity(2, 2);
  MatrixXc idf = fock_identity(levels);
  MatrixXc a = fock_lower(levels);
  MatrixXc ad = a.adjoint();

  for (int j = 0; j < 2; ++j) {
    MatrixXc spin = (j == 0) ? kron3(sp, id2, idf) : kron3(id2, sp, idf);
    // Multiplying by I x I x {1, a, a^dag} permutes within the fock factor.
    MatrixXc mats[3] = {spin, kron3(j == 0 ? sp : id2, j == 0 ? id2 : sp, a),
                        kron3(j == 0 ? sp : id2, j == 0 ? id2 : sp, ad)};
    for (int k = 0; k < 3; ++k) {
      for (int r = 0; r < dim_; ++r)
        for (int c = 0; c < dim_; ++c)
          if (std::abs(mats[k](r, c)) > 0)
            terms_[j][k].push_back({r, c, mats[k](r, c)});
    }
    mu_[j][0] = +(p.nu + p.epsilon) - p.delta - p.offsets[j];
    mu_[j][1] = -(p.nu + p.epsilon) - p.delta - p.offsets[j];
  }
}

int MsGenerator::dim() const { return dim_; }

double MsGenerator::max_frequency() const {
  double m = 0.0;
  for (int j = 0; j < 2; ++j)
    for (int s = 0; s < 2; ++s)
      m = std::max(m, std::abs(mu_[j][s]) + p_.nu);
  return m;
}

void MsGenerator::apply(double t, const VectorXc& psi, VectorXc& out) const {
  out.setZero();
  Complex rot_nu = std::polar(1.0, -p_.nu * t);  // e^{-i nu t}
  for (int j = 0; j < 2; ++j) {
    Complex ph_p = std::polar(1.0, -mu_[j][0] * t);
    Complex ph_m = std::polar(1.0, -mu_[j][1] * t);
    Complex base = 0.5 * p_.rabi * (ph_p + ph_m);
    Complex sideband = ii * p_.eta * base;
    // carrier, a side, a^dag side of the lamb-dicke expansion
    Complex coeff[3] = {base, sideband * rot_nu, sideband * std::conj(rot_nu)};
    for (int k = 0; k < 3; ++k) {
      Complex cf = coeff[k];
      Complex cfc = std::conj(cf);
      for (const Triplet& tr : terms_[j][k]) {
        Complex v = cf * tr.val;
        out(tr.row) += v * psi(tr.col);
        out(tr.col) += cfc * std::conj(tr.val) * psi(tr.row);
      }
    }
  }
}

StateVector ms_initial_state(const MsParams& p, const std::string& label) {
  validate(p);
  return basis_state(label, p.n_max + 1, p.n_init);
}

namespace {

void check_truncation(const VectorXc& psi, int levels) {
  double top = 0.0;
  int dim = static_cast<int>(psi.size());
  for (int i = levels - 1; i < dim; i += levels) top += std::norm(psi(i));
  if (top > 1e-4)
    throw TruncationError("population reached the top fock level; raise n_max");
}

OdeOptions ms_options(const MsGenerator& gen, double tol) {
  OdeOptions opts;
  opts.tol = tol;
  opts.first_step = 0.05 * two_pi / gen.max_frequency();
  return opts;
}

}  // namespace

StateVector ms_propagate(const MsParams& p, const StateVector& psi0,
                         double t_final, double tol) {
  MsGenerator gen(p);
  StateVector out = psi0;
  integrate_schrodinger(gen, out.amplitudes, 0.0, t_final, ms_options(gen, tol));
  out.amplitudes /= out.amplitudes.norm();
  check_truncation(out.amplitudes, p.n_max + 1);
  return out;
}

std::vector<StateVector> ms_propagate_sampled(const MsParams& p,
                                              const StateVector& psi0,
                                              const std::vector<double>& times,
                                              double tol) {
  MsGenerator gen(p);
  std::vector<StateVector> snaps;
  snaps.reserve(times.size());
  VectorXc psi = psi0.amplitudes;
  integrate_schrodinger_sampled(
      gen, psi, 0.0, times,
      [&](int, double, const VectorXc& y) {
        check_truncation(y, p.n_max + 1);
        StateVector s{y / y.norm(), psi0.dims};
        snaps.push_back(std::move(s));
      },
      ms_options(gen, tol));
  return snaps;
}

IsingParams effective_params(const MsParams& p) {
  validate(p);
  // Rotating qubit j by Delta_j = delta + offset_j turns the slow sideband
  // pair into the standard spin-dependent force and leaves (Delta_j/2) sz_j
  // behind, so the sum and difference of the Delta_j set the two detuning
  // coefficients.
  double d0 = p.delta + p.offsets[0];
  double d1 = p.delta + p.offsets[1];
  IsingParams out;
  out.omega = p.eta * p.eta * p.rabi * p.rabi / (2.0 * p.epsilon);
  out.delta1 = (d0 + d1) / 4.0;
  out.delta2 = (d0 - d1) / 4.0;
  return out;
}

PiTimeReport measure_pi_time(const MsParams& p, double lo, double hi,
                             int n_probe, double tol) {
  PiTimeReport rep;
  IsingParams eff = effective_params(p);
  rep.predicted = pi_time(eff.omega);
  double naive = p.eta * p.eta * p.rabi * p.rabi / p.epsilon;
  rep.candidate_full = pi_time(naive);
  rep.candidate_half = pi_time(0.5 * naive);

  // Probe at multiples of 2 pi / epsilon where the spin-motion displacement
  // loop closes; there the samples sit on the slow flop envelope instead of
  // the micromotion ripple, which otherwise drags the argmax around.
  std::vector<double> times;
  double t_loop = two_pi / p.epsilon;
  long k_lo = std::max<long>(1, std::lround(std::ceil(lo * rep.predicted / t_loop)));
  long k_hi = std::lround(std::floor(hi * rep.predicted / t_loop));
  if (k_hi - k_lo + 1 >= 8) {
    long stride = 1 + (k_hi - k_lo) / (2 * std::max(n_probe, 2));
    for (long k = k_lo; k <= k_hi; k += stride) times.push_back(k * t_loop);
  } else {
    times.resize(n_probe);
    for (int i = 0; i < n_probe; ++i)
      times[i] = rep.predicted * (lo + (hi - lo) * i / double(n_probe - 1));
  }
  int n = static_cast<int>(times.size());
  StateVector psi0 = ms_initial_state(p);
  std::vector<StateVector> snaps = ms_propagate_sampled(p, psi0, times, tol);

  int best = 0;
  std::vector<double> puu(n);
  for (int i = 0; i < n; ++i) {
    puu[i] = spin_populations(snaps[i])(basis_index("uu"));
    if (puu[i] > puu[best]) best = i;
  }
  double t_best = times[best];
  double p_best = puu[best];
  if (best > 0 && best < n - 1) {
    // Parabola through the three samples around the maximum.
    double t0 = times[best - 1], t1 = times[best], t2 = times[best + 1];
    double y0 = puu[best - 1], y1 = puu[best], y2 = puu[best + 1];
    double denom = (y0 - 2 * y1 + y2);
    if (std::abs(denom) > 1e-15) {
      t_best = t1 + 0.5 * (t2 - t1) * (y0 - y2) / denom;
      StateVector s = ms_propagate(p, psi0, t_best, tol);
      p_best = spin_populations(s)(basis_index("uu"));
      if (p_best < y1) {  // refinement must not lose ground
        t_best = t1;
        p_best = y1;
      }
    }
  }
  rep.measured = t_best;
  rep.peak_population = p_best;
  rep.prefactor = (pi / (2.0 * t_best)) / naive;
  return rep;
}

}  // namespace ionspec
