#include "ionspec/hamiltonians.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ionspec {

Operator ising_two_spin(const IsingParams& p) {
  Operator sy = pauli(Axis::y);
  Operator sz = pauli(Axis::z);
  MatrixXc h = p.omega * tensor({sy, sy}).matrix;
  MatrixXc z1 = embed(sz, 0, 2).matrix;
  MatrixXc z2 = embed(sz, 1, 2).matrix;
  h += p.delta1 * (z1 + z2) + p.delta2 * (z1 - z2);
  return Operator{std::move(h), true};
}

Operator single_spin_rabi(double omega, double delta) {
  MatrixXc h = omega * pauli(Axis::x).matrix + delta * pauli(Axis::z).matrix;
  return Operator{std::move(h), true};
}

Operator correlated_n_spin(const NSpinParams& p) {
  int n = static_cast<int>(p.deltas.size());
  if (n < 1) throw std::invalid_argument("need at least one spin");
  if (n > 12) throw std::invalid_argument("n-spin model capped at 12 spins");
  std::vector<Operator> coup(n, pauli(p.coupling_axis));
  MatrixXc h = p.omega * tensor(coup).matrix;
  Operator sz = pauli(Axis::z);
  for (int i = 0; i < n; ++i) h += p.deltas[i] * embed(sz, i, n).matrix;
  return Operator{std::move(h), true};
}

Operator subspace_reduce(const Operator& h, Subspace which, double tol) {
  if (h.dim() != 4)
    throw std::invalid_argument("subspace_reduce expects a two-spin operator");
  // Parity blocks in the uu, ud, du, dd ordering.
  const int even_idx[2] = {0, 3};
  const int odd_idx[2] = {1, 2};
  double scale = std::max(1.0, h.matrix.cwiseAbs().maxCoeff());
  for (int a : even_idx)
    for (int b : odd_idx) {
      double leak = std::max(std::abs(h.matrix(a, b)), std::abs(h.matrix(b, a)));
      if (leak > tol * scale)
        throw std::invalid_argument("operator couples the parity blocks");
    }
  const int* idx = (which == Subspace::even) ? even_idx : odd_idx;
  MatrixXc block(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) block(i, j) = h.matrix(idx[i], idx[j]);
  return Operator{std::move(block), h.hermitian};
}

}  // namespace ionspec
