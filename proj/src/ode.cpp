#include "ionspec/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ionspec {

ConstantGenerator::ConstantGenerator(const Operator& h) : h_(h.matrix) {
  if (!h.hermitian)
    throw std::invalid_argument("schroedinger generator must be hermitian");
}

void ConstantGenerator::apply(double, const VectorXc& psi, VectorXc& out) const {
  out.noalias() = h_ * psi;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Difference between 5th and 4th order weights, for the error estimate.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Stepper {
  const TimeDependentGenerator& gen;
  VectorXc k1, k2, k3, k4, k5, k6, k7, tmp, err;

  explicit Stepper(const TimeDependentGenerator& g) : gen(g) {
    int n = g.dim();
    for (VectorXc* v : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &tmp, &err})
      v->resize(n);
  }

  void rhs(double t, const VectorXc& y, VectorXc& out) {
    gen.apply(t, y, out);
    out *= Complex(0.0, -1.0);  // i psi' = H psi
  }

  // One trial step; returns scaled error norm, fills ynew. k1 must hold
  // rhs(t, y) on entry (FSAL: on acceptance caller copies k7 into k1).
  double attempt(double t, double h, const VectorXc& y, VectorXc& ynew,
                 double tol) {
    tmp = y + h * (a21 * k1);
    rhs(t + c2 * h, tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, tmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + h, ynew, k7);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    // Mixed norm: state amplitudes are O(1), so scale = tol * (1 + |y|).
    double sum = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      double sc = tol * (1.0 + std::max(std::abs(y(i)), std::abs(ynew(i))));
      double e = std::abs(err(i)) / sc;
      sum += e * e;
    }
    return std::sqrt(sum / y.size());
  }
};

double initial_step(Stepper& st, double t0, const VectorXc& y, double span,
                    double tol) {
  // Crude but serviceable: resolve the fastest scale visible in H(t0) psi.
  double rate = st.k1.norm() / std::max(1e-300, y.norm());
  double h = (rate > 0) ? 0.01 / rate : span / 100.0;
  return std::min(h, span);
}

OdeStats integrate_core(const TimeDependentGenerator& gen, VectorXc& psi,
                        double t0, double t1, const OdeOptions& opts) {
  if (!(t1 >= t0)) throw std::invalid_argument("integration must run forward");
  OdeStats stats;
  if (t1 == t0) return stats;
  if (psi.size() != gen.dim())
    throw std::invalid_argument("state dimension does not match generator");

  Stepper st(gen);
  double t = t0;
  st.rhs(t, psi, st.k1);
  double h = opts.first_step > 0 ? opts.first_step
                                 : initial_step(st, t0, psi, t1 - t0, opts.tol);
  VectorXc ynew(psi.size());

  while (t < t1) {
    h = std::min(h, t1 - t);
    double errn = st.attempt(t, h, psi, ynew, opts.tol);
    if (++stats.steps > opts.max_steps)
      throw std::runtime_error("integrator exceeded the step budget");
    if (errn <= 1.0) {
      t += h;
      psi.swap(ynew);
      st.k1.swap(st.k7);
      // The flow is unitary; project back onto the unit sphere each step so
      // drift cannot accumulate, and flag any single step that loses more
      // than 10x the tolerance (that means the generator or the error
      // estimate is broken, not just a long integration).
      double n = psi.norm();
      double drift = std::abs(n - 1.0);
      stats.norm_drift = std::max(stats.norm_drift, drift);
      if (drift > 10.0 * opts.tol)
        throw std::runtime_error("norm drift exceeded 10x the tolerance");
      psi /= n;
      st.k1 /= n;  // rhs is linear, keep FSAL consistent
    } else {
      ++stats.rejected;
    }
    double fac = 0.9 * std::pow(std::max(errn, 1e-10), -0.2);
    h *= std::clamp(fac, 0.2, 5.0);
  }
  return stats;
}

}  // namespace ode helpers

OdeStats integrate_schrodinger(const TimeDependentGenerator& gen, VectorXc& psi,
                               double t0, double t1, const OdeOptions& opts) {
  return integrate_core(gen, psi, t0, t1, opts);
}

OdeStats integrate_schrodinger_sampled(
    const TimeDependentGenerator& gen, VectorXc& psi, double t0,
    const std::vector<double>& times,
    const std::function<void(int, double, const VectorXc&)>& on_sample,
    const OdeOptions& opts) {
  OdeStats total;
  double t = t0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t)
      throw std::invalid_argument("sample times must be ascending from t0");
    OdeStats s = integrate_core(gen, psi, t, times[i], opts);
    total.steps += s.steps;
    total.rejected += s.rejected;
    total.norm_drift = std::max(total.norm_drift, s.norm_drift);
    t = times[i];
    on_sample(static_cast<int>(i), t, psi);
  }
  return total;
}

StateVector propagate_time_dependent(const TimeDependentGenerator& gen,
                                     const StateVector& psi, double t_final,
                                     double tol) {
  StateVector out = psi;
  OdeOptions opts;
  opts.tol = tol;
  integrate_schrodinger(gen, out.amplitudes, 0.0, t_final, opts);
  double n = out.amplitudes.norm();
  out.amplitudes /= n;
  return out;
}

}  // namespace ionspec
