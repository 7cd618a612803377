#ifndef IONSPEC_QUANTUM_HPP
#define IONSPEC_QUANTUM_HPP

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace ionspec {

using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

inline constexpr Complex ii{0.0, 1.0};

// Pure state over a list of subsystems. dims[0] is the leftmost tensor
// factor (spin 1); a motional mode, when present, is the last factor.
// Spin basis per site: index 0 = |u>, index 1 = |d>.
struct StateVector {
  VectorXc amplitudes;
  std::vector<int> dims;

  int dim() const { return static_cast<int>(amplitudes.size()); }
  double norm() const { return amplitudes.norm(); }
};

struct Operator {
  MatrixXc matrix;
  bool hermitian = false;

  int dim() const { return static_cast<int>(matrix.rows()); }
};

// Throws std::invalid_argument if dims do not multiply to the vector size or
// the norm is off by more than 1e-12.
StateVector make_state(VectorXc amplitudes, std::vector<int> dims);

// Computational basis state from a label like "dd" or "udu" (spin 1 first).
// fock_dim > 0 appends a motional factor in Fock state |fock_n>.
StateVector basis_state(const std::string& label, int fock_dim = 0, int fock_n = 0);

int basis_index(const std::string& label);
std::string basis_label(int index, int n_spins);

// Hermiticity is checked against tolerance when the flag is requested.
Operator make_operator(MatrixXc m, bool hermitian, double tol = 1e-12);

enum class Axis { x, y, z };

Operator pauli(Axis axis);
Operator identity(int dim);

Operator tensor(const std::vector<Operator>& factors);
StateVector tensor(const std::vector<StateVector>& factors);

// One-site operator extended with identities to n_sites spin-1/2 sites.
Operator embed(const Operator& op, int site, int n_sites);

// exp(-i H t) |psi> via eigendecomposition; H must carry the hermitian flag.
StateVector propagate_static(const Operator& h, const StateVector& psi, double t);

// Caches the eigendecomposition so sweeping t costs one rotation per call.
class StaticPropagator {
 public:
  explicit StaticPropagator(const Operator& h);
  StateVector apply(const StateVector& psi, double t) const;

 private:
  Eigen::VectorXd evals_;
  MatrixXc evecs_;
};

// |amplitude|^2 over the full joint basis.
Eigen::VectorXd populations(const StateVector& psi);

// Marginal over the kept subsystems (ascending indices), tracing the rest.
Eigen::VectorXd populations(const StateVector& psi, const std::vector<int>& keep);

// Marginal over all spin-1/2 factors, tracing out any motional mode.
Eigen::VectorXd spin_populations(const StateVector& psi);

// <sigma_z x sigma_z ... > over the spin factors (diagonal, so marginals do).
double parity_expectation(const StateVector& psi);

// Population left in the top Fock level of the last factor; 0 if no mode.
double top_fock_population(const StateVector& psi);

}  // namespace ionspec

#endif
