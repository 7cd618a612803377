#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ionspec/hamiltonians.hpp"
#include "ionspec/units.hpp"

using namespace ionspec;

namespace {

std::mt19937_64 test_rng(42);

double urand(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(test_rng);
}

// Two-level flopping through a static gap: coupling c, z-coefficient b,
// starting in the lower state. The classic generalized Rabi formula.
double two_level_flop(double c, double b, double t) {
  double w2 = c * c + b * b;
  double s = std::sin(std::sqrt(w2) * t);
  return c * c / w2 * s * s;
}

}  // namespace

TEST_CASE("pauli matrices have the frozen entries") {
  Operator sx = pauli(Axis::x), sy = pauli(Axis::y), sz = pauli(Axis::z);
  CHECK(sx.matrix(0, 1) == Complex(1, 0));
  CHECK(sy.matrix(0, 1) == Complex(0, -1));
  CHECK(sy.matrix(1, 0) == Complex(0, 1));
  CHECK(sz.matrix(0, 0) == Complex(1, 0));
  CHECK(sz.matrix(1, 1) == Complex(-1, 0));
  CHECK((sx.matrix * sx.matrix - MatrixXc::Identity(2, 2)).norm() == 0);
  CHECK((sy.matrix * sy.matrix - MatrixXc::Identity(2, 2)).norm() == 0);
}

TEST_CASE("basis labels map to indices with spin 1 leftmost") {
  CHECK(basis_index("uu") == 0);
  CHECK(basis_index("ud") == 1);
  CHECK(basis_index("du") == 2);
  CHECK(basis_index("dd") == 3);
  CHECK(basis_label(2, 2) == "du");
  CHECK(basis_index("udu") == 2);
  CHECK(basis_label(5, 3) == "dud");
  CHECK_THROWS(basis_index("ux"));
}

TEST_CASE("tensor product of sy sy has the antidiagonal structure") {
  Operator syy = tensor({pauli(Axis::y), pauli(Axis::y)});
  MatrixXc expect = MatrixXc::Zero(4, 4);
  expect(0, 3) = -1;
  expect(1, 2) = 1;
  expect(2, 1) = 1;
  expect(3, 0) = -1;
  CHECK((syy.matrix - expect).norm() == 0);
  CHECK(syy.hermitian);
}

TEST_CASE("embed places single-site operators with identities elsewhere") {
  Operator z0 = embed(pauli(Axis::z), 0, 2);
  Operator z1 = embed(pauli(Axis::z), 1, 2);
  Eigen::Vector4d d0 = z0.matrix.diagonal().real();
  Eigen::Vector4d d1 = z1.matrix.diagonal().real();
  CHECK(d0 == Eigen::Vector4d(1, 1, -1, -1));
  CHECK(d1 == Eigen::Vector4d(1, -1, 1, -1));
  CHECK_THROWS(embed(pauli(Axis::z), 2, 2));
}

TEST_CASE("state construction validates dims and norm") {
  VectorXc v = VectorXc::Zero(4);
  v(0) = 1.0;
  CHECK_NOTHROW(make_state(v, {2, 2}));
  CHECK_THROWS(make_state(v, {2, 3}));
  v(0) = 1.0 + 1e-6;
  CHECK_THROWS(make_state(v, {2, 2}));
}

TEST_CASE("single spin propagation reproduces the generalized Rabi formula") {
  for (int k = 0; k < 20; ++k) {
    double omega = hz(urand(50, 500));
    double delta = hz(urand(-800, 800));
    double t = urand(0.1e-3, 5e-3);
    Operator h = single_spin_rabi(omega, delta);
    StateVector psi = propagate_static(h, basis_state("d"), t);
    double p_u = populations(psi)(0);
    CHECK(p_u == doctest::Approx(two_level_flop(omega, delta, t)).epsilon(1e-12));
  }
}

TEST_CASE("two-spin model matrix is frozen") {
  double omega = hz(255), d1 = hz(40), d2 = hz(-15);
  Operator h = ising_two_spin({omega, d1, d2});
  MatrixXc m = h.matrix;
  CHECK(m(0, 0) == Complex(2 * d1, 0));
  CHECK(m(1, 1) == Complex(2 * d2, 0));
  CHECK(m(2, 2) == Complex(-2 * d2, 0));
  CHECK(m(3, 3) == Complex(-2 * d1, 0));
  CHECK(m(0, 3) == Complex(-omega, 0));
  CHECK(m(1, 2) == Complex(omega, 0));
  // parity blocks never talk to each other
  CHECK(std::abs(m(0, 1)) == 0);
  CHECK(std::abs(m(0, 2)) == 0);
  CHECK(std::abs(m(3, 1)) == 0);
  CHECK(std::abs(m(3, 2)) == 0);
}

TEST_CASE("subspace reduction extracts the two parity blocks") {
  double omega = hz(100), d1 = hz(30), d2 = hz(-70);
  Operator h = ising_two_spin({omega, d1, d2});
  Operator even = subspace_reduce(h, Subspace::even);
  Operator odd = subspace_reduce(h, Subspace::odd);
  CHECK(even.matrix(0, 0).real() == doctest::Approx(2 * d1).epsilon(1e-15));
  CHECK(even.matrix(0, 1).real() == doctest::Approx(-omega).epsilon(1e-15));
  CHECK(even.matrix(1, 1).real() == doctest::Approx(-2 * d1).epsilon(1e-15));
  CHECK(odd.matrix(0, 0).real() == doctest::Approx(2 * d2).epsilon(1e-15));
  CHECK(odd.matrix(0, 1).real() == doctest::Approx(omega).epsilon(1e-15));

  // a transverse single-spin term couples the blocks and must be refused
  Operator bad = make_operator(
      h.matrix + hz(1.0) * embed(pauli(Axis::x), 0, 2).matrix, true);
  CHECK_THROWS(subspace_reduce(bad, Subspace::even));
}

TEST_CASE("even-block flopping matches the closed form") {
  for (int k = 0; k < 20; ++k) {
    IsingParams p{hz(urand(100, 400)), hz(urand(-500, 500)), hz(urand(-500, 500))};
    double t = urand(0.2e-3, 4e-3);
    StateVector psi = propagate_static(ising_two_spin(p), basis_state("dd"), t);
    Eigen::VectorXd pops = populations(psi);
    CHECK(pops(0) == doctest::Approx(two_level_flop(p.omega, 2 * p.delta1, t))
                         .epsilon(1e-12));
    CHECK(pops(1) + pops(2) < 1e-24);  // stays in the even block
  }
}

TEST_CASE("odd-block flopping depends on delta2 only") {
  for (int k = 0; k < 20; ++k) {
    IsingParams p{hz(urand(100, 400)), hz(urand(-500, 500)), hz(urand(-500, 500))};
    double t = urand(0.2e-3, 4e-3);
    StateVector psi = propagate_static(ising_two_spin(p), basis_state("du"), t);
    Eigen::VectorXd pops = populations(psi);
    CHECK(pops(basis_index("ud")) ==
          doctest::Approx(two_level_flop(p.omega, 2 * p.delta2, t)).epsilon(1e-12));
    CHECK(pops(0) + pops(3) < 1e-24);
  }
}

TEST_CASE("n-spin stretched flopping closes in a two-level subspace") {
  for (int n : {2, 3, 4}) {
    NSpinParams p;
    p.omega = hz(180);
    p.deltas.assign(n, hz(120));
    double t = 1.7e-3;
    StateVector psi = propagate_static(correlated_n_spin(p),
                                       basis_state(std::string(n, 'd')), t);
    Eigen::VectorXd pops = populations(psi);
    // the stretched pair sees a z splitting of sum(deltas) on each side
    double expect = two_level_flop(p.omega, n * hz(120), t);
    CHECK(pops(0) == doctest::Approx(expect).epsilon(1e-12));
    double middle = pops.sum() - pops(0) - pops(pops.size() - 1);
    CHECK(middle < 1e-24);
  }
}

TEST_CASE("marginals trace out the unkept factors") {
  // (a|uu> + b|dd>) x |2> on a three-level mode
  VectorXc v = VectorXc::Zero(12);
  double a = std::sqrt(0.3), b = std::sqrt(0.7);
  v(0 * 3 + 2) = a;   // |uu>|2>
  v(3 * 3 + 2) = b;   // |dd>|2>
  StateVector psi = make_state(v, {2, 2, 3});
  Eigen::VectorXd spins = spin_populations(psi);
  CHECK(spins(0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(spins(3) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(spins(1) == 0.0);
  Eigen::VectorXd mode = populations(psi, {2});
  CHECK(mode(2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(top_fock_population(psi) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(parity_expectation(psi) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("parity expectation signs the odd states") {
  CHECK(parity_expectation(basis_state("ud")) == doctest::Approx(-1.0));
  CHECK(parity_expectation(basis_state("dd")) == doctest::Approx(1.0));
  CHECK(parity_expectation(basis_state("dud")) == doctest::Approx(1.0));
}

TEST_CASE("cached propagator matches the one-shot version") {
  Operator h = ising_two_spin({hz(255), hz(10), hz(-30)});
  StaticPropagator prop(h);
  for (double t : {0.3e-3, 1.1e-3, 2.9e-3}) {
    StateVector a = prop.apply(basis_state("dd"), t);
    StateVector b = propagate_static(h, basis_state("dd"), t);
    CHECK((a.amplitudes - b.amplitudes).norm() < 1e-13);
  }
}

TEST_CASE("non-hermitian generators are rejected") {
  MatrixXc m(2, 2);
  m << 0, 1, 0, 0;
  CHECK_THROWS(make_operator(m, true));
  Operator raw{m, false};
  CHECK_THROWS(propagate_static(raw, basis_state("d"), 1e-3));
}
