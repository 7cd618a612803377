#ifndef IONSPEC_HAMILTONIANS_HPP
#define IONSPEC_HAMILTONIANS_HPP

#include "ionspec/quantum.hpp"

namespace ionspec {

// Coefficients of the two-spin model
//   H = omega * sy(1) sy(2) + delta1 * (sz(1) + sz(2)) + delta2 * (sz(1) - sz(2)).
// These are bare Hamiltonian coefficients in rad/s. Physical detunings are
// twice these: a common laser detuning d gives delta1 = d/2, and a per-ion
// shift of +-(w01 - w02)/2 gives delta2 = (w01 - w02)/4. The scan engine owns
// that mapping; everything here takes coefficients at face value.
struct IsingParams {
  double omega = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
};

Operator ising_two_spin(const IsingParams& p);

// H = omega * sx + delta * sz for one spin driven on its carrier.
Operator single_spin_rabi(double omega, double delta);

// N-spin generalization: omega * s_axis^{(x)N} + sum_i delta_i * sz(i).
// Couples only |uu...u> and |dd...d> when all delta_i are equal in magnitude
// pattern-wise; used for the GHZ-type narrowing curves.
struct NSpinParams {
  double omega = 0.0;
  std::vector<double> deltas;  // one per spin, rad/s
  Axis coupling_axis = Axis::x;
};

Operator correlated_n_spin(const NSpinParams& p);

// The two-spin model conserves sz(1)sz(2); these pick out one 2x2 block.
// even: basis (|uu>, |dd>).  odd: basis (|ud>, |du>).
enum class Subspace { even, odd };

// Throws std::invalid_argument if any cross-parity element exceeds
// tol * max(1, |H|_max), i.e. if H does not actually block-diagonalize.
Operator subspace_reduce(const Operator& h, Subspace which, double tol = 1e-12);

}  // namespace ionspec

#endif
