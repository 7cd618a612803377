#ifndef IONSPEC_ODE_HPP
#define IONSPEC_ODE_HPP

#include <functional>

#include "ionspec/quantum.hpp"

namespace ionspec {

// Generator of Schroedinger dynamics: out = H(t) psi. Implementations should
// avoid allocating inside apply, it sits in the integrator's inner loop.
class TimeDependentGenerator {
 public:
  virtual ~TimeDependentGenerator() = default;
  virtual int dim() const = 0;
  virtual void apply(double t, const VectorXc& psi, VectorXc& out) const = 0;
};

class ConstantGenerator : public TimeDependentGenerator {
 public:
  explicit ConstantGenerator(const Operator& h);
  int dim() const override { return static_cast<int>(h_.rows()); }
  void apply(double t, const VectorXc& psi, VectorXc& out) const override;

 private:
  MatrixXc h_;
};

struct OdeOptions {
  double tol = 1e-8;        // relative and absolute, mixed norm
  double first_step = 0.0;  // 0 picks a heuristic
  long max_steps = 50'000'000;
};

struct OdeStats {
  long steps = 0;
  long rejected = 0;
  double norm_drift = 0.0;  // max |  ||psi|| - 1  | seen at step ends
};

// Dormand-Prince 5(4) on i d/dt psi = H(t) psi from t0 to t1 in place.
// Throws std::runtime_error if the step count explodes or the norm drifts
// by more than 10x the requested tolerance (the dynamics are unitary, so
// drift beyond that signals a broken generator or an unreachable tolerance).
OdeStats integrate_schrodinger(const TimeDependentGenerator& gen, VectorXc& psi,
                               double t0, double t1, const OdeOptions& opts = {});

// Same dynamics reported at a list of ascending sample times (first sample
// may equal t0). Callback receives (index, time, psi).
OdeStats integrate_schrodinger_sampled(
    const TimeDependentGenerator& gen, VectorXc& psi, double t0,
    const std::vector<double>& times,
    const std::function<void(int, double, const VectorXc&)>& on_sample,
    const OdeOptions& opts = {});

// Convenience wrapper keeping StateVector bookkeeping.
StateVector propagate_time_dependent(const TimeDependentGenerator& gen,
                                     const StateVector& psi, double t_final,
                                     double tol = 1e-8);

}  // namespace ionspec

#endif
