#include "ionspec/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ionspec {

namespace {

int product(const std::vector<int>& dims) {
  int p = 1;
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("subsystem dimension must be >= 1");
    p *= d;
  }
  return p;
}

}  // namespace

StateVector make_state(VectorXc amplitudes, std::vector<int> dims) {
  if (product(dims) != amplitudes.size())
    throw std::invalid_argument("state dims do not match amplitude size");
  double n = amplitudes.norm();
  if (std::abs(n - 1.0) > 1e-12)
    throw std::invalid_argument("state vector is not normalized");
  return StateVector{std::move(amplitudes), std::move(dims)};
}

int basis_index(const std::string& label) {
  int idx = 0;
  for (char c : label) {
    if (c == 'u')
      idx = 2 * idx;
    else if (c == 'd')
      idx = 2 * idx + 1;
    else
      throw std::invalid_argument("basis label may only contain 'u' and 'd'");
  }
  return idx;
}

std::string basis_label(int index, int n_spins) {
  std::string s(n_spins, 'u');
  for (int k = n_spins - 1; k >= 0; --k) {
    if (index & 1) s[k] = 'd';
    index >>= 1;
  }
  return s;
}

StateVector basis_state(const std::string& label, int fock_dim, int fock_n) {
  int n = static_cast<int>(label.size());
  if (n < 1) throw std::invalid_argument("empty basis label");
  std::vector<int> dims(n, 2);
  int dim = 1 << n;
  int idx = basis_index(label);
  if (fock_dim > 0) {
    if (fock_n < 0 || fock_n >= fock_dim)
      throw std::invalid_argument("fock index out of range");
    dims.push_back(fock_dim);
    idx = idx * fock_dim + fock_n;
    dim *= fock_dim;
  }
  VectorXc amp = VectorXc::Zero(dim);
  amp(idx) = 1.0;
  return StateVector{std::move(amp), std::move(dims)};
}

Operator make_operator(MatrixXc m, bool hermitian, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("operator must be square");
  if (hermitian) {
    double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (dev > tol * scale)
      throw std::invalid_argument("matrix is not hermitian within tolerance");
  }
  return Operator{std::move(m), hermitian};
}

Operator pauli(Axis axis) {
  MatrixXc m(2, 2);
  switch (axis) {
    case Axis::x:
      m << 0, 1, 1, 0;
      break;
    case Axis::y:
      m << 0, -ii, ii, 0;
      break;
    case Axis::z:
      m << 1, 0, 0, -1;
      break;
  }
  return Operator{std::move(m), true};
}

Operator identity(int dim) {
  return Operator{MatrixXc::Identity(dim, dim), true};
}

namespace {

MatrixXc kron(const MatrixXc& a, const MatrixXc& b) {
  MatrixXc out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

Operator tensor(const std::vector<Operator>& factors) {
  if (factors.empty()) throw std::invalid_argument("tensor of no factors");
  MatrixXc m = factors[0].matrix;
  bool herm = factors[0].hermitian;
  for (std::size_t k = 1; k < factors.size(); ++k) {
    m = kron(m, factors[k].matrix);
    herm = herm && factors[k].hermitian;
  }
  return Operator{std::move(m), herm};
}

StateVector tensor(const std::vector<StateVector>& factors) {
  if (factors.empty()) throw std::invalid_argument("tensor of no factors");
  VectorXc v = factors[0].amplitudes;
  std::vector<int> dims = factors[0].dims;
  for (std::size_t k = 1; k < factors.size(); ++k) {
    const VectorXc& w = factors[k].amplitudes;
    VectorXc out(v.size() * w.size());
    for (int i = 0; i < v.size(); ++i)
      out.segment(i * w.size(), w.size()) = v(i) * w;
    v.swap(out);
    dims.insert(dims.end(), factors[k].dims.begin(), factors[k].dims.end());
  }
  return StateVector{std::move(v), std::move(dims)};
}

Operator embed(const Operator& op, int site, int n_sites) {
  if (op.dim() != 2) throw std::invalid_argument("embed expects a one-site operator");
  if (site < 0 || site >= n_sites) throw std::invalid_argument("site out of range");
  std::vector<Operator> factors;
  factors.reserve(n_sites);
  for (int k = 0; k < n_sites; ++k)
    factors.push_back(k == site ? op : identity(2));
  return tensor(factors);
}

StateVector propagate_static(const Operator& h, const StateVector& psi, double t) {
  StaticPropagator prop(h);
  return prop.apply(psi, t);
}

StaticPropagator::StaticPropagator(const Operator& h) {
  if (!h.hermitian)
    throw std::invalid_argument("propagation requires a hermitian generator");
  Eigen::SelfAdjointEigenSolver<MatrixXc> solver(h.matrix);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  evals_ = solver.eigenvalues();
  evecs_ = solver.eigenvectors();
}

StateVector StaticPropagator::apply(const StateVector& psi, double t) const {
  if (psi.dim() != evecs_.rows())
    throw std::invalid_argument("state dimension does not match generator");
  VectorXc c = evecs_.adjoint() * psi.amplitudes;
  for (int k = 0; k < c.size(); ++k) c(k) *= std::exp(-ii * evals_(k) * t);
  StateVector out{evecs_ * c, psi.dims};
  // Rotation by a unitary built from an orthonormal eigenbasis; renormalize
  // the last few ulps so chained propagations cannot accumulate drift.
  double n = out.amplitudes.norm();
  if (std::abs(n - 1.0) > 1e-12)
    throw std::runtime_error("propagation lost normalization");
  out.amplitudes /= n;
  return out;
}

Eigen::VectorXd populations(const StateVector& psi) {
  return psi.amplitudes.cwiseAbs2();
}

Eigen::VectorXd populations(const StateVector& psi, const std::vector<int>& keep) {
  int n_sub = static_cast<int>(psi.dims.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (keep[k] < 0 || keep[k] >= n_sub)
      throw std::invalid_argument("subsystem index out of range");
    if (k > 0 && keep[k] <= keep[k - 1])
      throw std::invalid_argument("subsystem indices must be strictly increasing");
  }
  // Strides of each subsystem in the flattened index, row-major convention.
  std::vector<int> stride(n_sub, 1);
  for (int k = n_sub - 2; k >= 0; --k) stride[k] = stride[k + 1] * psi.dims[k + 1];

  int out_dim = 1;
  for (int k : keep) out_dim *= psi.dims[k];
  Eigen::VectorXd out = Eigen::VectorXd::Zero(out_dim);
  for (int i = 0; i < psi.dim(); ++i) {
    int j = 0;
    for (int k : keep) j = j * psi.dims[k] + (i / stride[k]) % psi.dims[k];
    out(j) += std::norm(psi.amplitudes(i));
  }
  return out;
}

Eigen::VectorXd spin_populations(const StateVector& psi) {
  std::vector<int> keep;
  for (int k = 0; k < static_cast<int>(psi.dims.size()); ++k)
    if (psi.dims[k] == 2) keep.push_back(k);
  if (keep.empty()) throw std::invalid_argument("state has no spin factors");
  return populations(psi, keep);
}

double parity_expectation(const StateVector& psi) {
  Eigen::VectorXd p = spin_populations(psi);
  int n_spins = 0;
  while ((1 << n_spins) < p.size()) ++n_spins;
  double val = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    int bits = 0;
    for (int k = 0; k < n_spins; ++k) bits += (i >> k) & 1;
    val += (bits % 2 == 0 ? 1.0 : -1.0) * p(i);
  }
  return val;
}

double top_fock_population(const StateVector& psi) {
  if (psi.dims.empty() || psi.dims.back() == 2) return 0.0;
  int n_sub = static_cast<int>(psi.dims.size());
  Eigen::VectorXd p = populations(psi, {n_sub - 1});
  return p(p.size() - 1);
}

}  // namespace ionspec
