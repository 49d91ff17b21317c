#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "grasswig/dynamics.hpp"

using namespace grasswig;

namespace {

const cplx I(0, 1);
const double kRt = 1.0 / std::sqrt(2.0);

GeneratorMap gate_map(Gate g) { return evolve_generators(gate_hamiltonian(g)); }

Element x1(Kind k) { return xi(Algebra::state(1), 0, k); }

bool exact(const Element& a, const Element& b) { return approx_equal(a, b, 1e-12); }

}  // namespace

TEST(GateMaps, Hadamard) {
  GeneratorMap m = gate_map(Gate::H);
  EXPECT_TRUE(exact(m.images[0], x1(Kind::q))) << m.to_string();
  EXPECT_TRUE(exact(m.images[1], x1(Kind::p))) << m.to_string();
  EXPECT_TRUE(exact(m.images[2], -x1(Kind::r))) << m.to_string();
}

TEST(GateMaps, Phase) {
  GeneratorMap m = gate_map(Gate::P);
  EXPECT_TRUE(exact(m.images[0], -x1(Kind::r))) << m.to_string();
  EXPECT_TRUE(exact(m.images[1], x1(Kind::q))) << m.to_string();
  EXPECT_TRUE(exact(m.images[2], x1(Kind::p))) << m.to_string();
}

TEST(GateMaps, TGate) {
  GeneratorMap m = gate_map(Gate::T);
  EXPECT_TRUE(exact(m.images[0], (x1(Kind::p) - x1(Kind::r)) * kRt)) << m.to_string();
  EXPECT_TRUE(exact(m.images[1], x1(Kind::q))) << m.to_string();
  EXPECT_TRUE(exact(m.images[2], (x1(Kind::p) + x1(Kind::r)) * kRt)) << m.to_string();
}

// Control is qubit 0, target qubit 1.
class CnotMonomials : public ::testing::Test {
 protected:
  Algebra alg = Algebra::state(2);
  GateHamiltonian gh = gate_hamiltonian(Gate::CNOT);
  Element x(int q, Kind k) const { return xi(alg, q, k); }
  Element evolve(const Element& g) const { return evolve_symbol(gh.hamiltonian.symbol, g, gh.duration); }
};

TEST_F(CnotMonomials, SingleGeneratorLines) {
  const Kind p = Kind::p, q = Kind::q, r = Kind::r;
  EXPECT_TRUE(exact(evolve(x(1, r)), x(1, r) * x(0, r) * x(0, p) * I));
  EXPECT_TRUE(exact(evolve(x(1, q)), x(1, q) * x(0, r) * x(0, p) * I));
  EXPECT_TRUE(exact(evolve(x(0, r)), x(0, r) * x(1, q) * x(1, r) * I));
  EXPECT_TRUE(exact(evolve(x(0, p)), x(0, p) * x(1, q) * x(1, r) * I));
  EXPECT_TRUE(exact(evolve(x(0, q)), x(0, q)));
  EXPECT_TRUE(exact(evolve(x(1, p)), x(1, p)));
}

TEST_F(CnotMonomials, CubicLinesOnControlSide) {
  const Kind q = Kind::q, r = Kind::r;
  EXPECT_TRUE(exact(evolve(x(0, r) * x(1, q) * x(1, r)), x(0, r) * -I));
  EXPECT_TRUE(exact(evolve(x(0, Kind::p) * x(1, q) * x(1, r)), x(0, Kind::p) * -I));
}

// The two cubic lines that return to a target generator come back with +i.
// A -i here would make the flow square to -1 on xi_r1 and xi_q1, while the
// gate is an involution.
TEST_F(CnotMonomials, CubicLinesOnTargetSide) {
  const Kind p = Kind::p, r = Kind::r;
  Element back_r = evolve(x(1, r) * x(0, p) * x(0, r));
  Element back_q = evolve(x(1, Kind::q) * x(0, p) * x(0, r));
  EXPECT_TRUE(exact(back_r, x(1, r) * I)) << back_r.to_string();
  EXPECT_TRUE(exact(back_q, x(1, Kind::q) * I)) << back_q.to_string();
}

TEST_F(CnotMonomials, FlowIsAnInvolution) {
  for (int pos = 0; pos < alg.size(); ++pos) {
    Element g = Element::generator(alg, pos);
    EXPECT_TRUE(exact(evolve(evolve(g)), g)) << g.to_string();
  }
}

// Quartic flow: the image of a product is not the product of the images.
TEST_F(CnotMonomials, SubstitutionIsNotTheFlowOnProducts) {
  GeneratorMap m = evolve_generators(gh);
  Element mono = x(0, Kind::p) * x(0, Kind::r) * x(1, Kind::r);
  EXPECT_TRUE(m.apply(mono).terms().empty());
  EXPECT_FALSE(evolve(mono).terms().empty());
}

TEST(Flow, LabelFrameGivesHeisenbergConjugation) {
  std::mt19937 rng(31);
  const QuantizationMap& lf = QuantizationMap::label_frame();
  for (Gate g : {Gate::H, Gate::P, Gate::T, Gate::CNOT}) {
    GateHamiltonian gh = gate_hamiltonian(g);
    const int n = gh.hamiltonian.qubits;
    Mat u = gate_unitary(GateOp{g, 0, n == 2 ? 1 : -1}, n);
    for (int t = 0; t < 5; ++t) {
      Mat a = random_matrix(n, rng);
      Element s = symbol_from_operator({n, a}, lf).element;
      Mat out = operator_from_symbol(evolve_symbol(gh.hamiltonian.symbol, s, gh.duration), lf).matrix;
      EXPECT_LE(max_abs_diff(out, u.adjoint() * a * u), 1e-9) << gate_name(g);
    }
  }
}

TEST(Flow, EvolveSymbolMatchesLinearMapOnGenerators) {
  std::mt19937 rng(32);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 10; ++t) {
    Eigen::Vector3d b(nd(rng), nd(rng), nd(rng));
    double tt = nd(rng);
    Element h = harmonic_symbol(Algebra::state(1), 0, b);
    Eigen::MatrixXd e = exponential_evolution_matrix(h, tt).matrix;
    for (int l = 0; l < 3; ++l) {
      Element want(Algebra::state(1));
      for (int m = 0; m < 3; ++m) want += Element::generator(Algebra::state(1), m) * e(l, m);
      EXPECT_LE(max_abs_diff(evolve_symbol(h, Element::generator(Algebra::state(1), l), tt), want), 1e-10);
    }
  }
}

TEST(Cayley, MatchesMatrixExponential) {
  std::mt19937 rng(33);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 50; ++t) {
    Eigen::Vector3d b(nd(rng), nd(rng), nd(rng));
    double tt = 2 * nd(rng);
    Eigen::MatrixXd c = cayley_evolution_matrix(b, tt).matrix;
    Eigen::MatrixXd e = exponential_evolution_matrix(harmonic_symbol(Algebra::state(1), 0, b), tt).matrix;
    EXPECT_LE((c - e).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((c * c.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Cayley, HandlesTangentSingularity) {
  Eigen::Vector3d b(0, 0, 1);
  Eigen::MatrixXd c = cayley_evolution_matrix(b, M_PI).matrix;
  Eigen::MatrixXd e = exponential_evolution_matrix(harmonic_symbol(Algebra::state(1), 0, b), M_PI).matrix;
  EXPECT_LE((c - e).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Propagator, QuantizesToFieldUnitary) {
  std::mt19937 rng(34);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 20; ++t) {
    Eigen::Vector3d b(nd(rng), nd(rng), nd(rng));
    double tt = nd(rng);
    for (const auto& qm : {QuantizationMap::canonical(), QuantizationMap::label_frame()})
      EXPECT_LE(max_abs_diff(operator_from_symbol(propagator_symbol(b, tt), qm).matrix, field_unitary(b, tt, qm)), 1e-12);
  }
}

TEST(Propagator, VanVleckPrefactorIsAbsCosine) {
  std::mt19937 rng(35);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 20; ++t) {
    Eigen::Vector3d b(nd(rng), nd(rng), nd(rng));
    double tt = 0.5 * nd(rng);
    double want = std::abs(std::cos(b.norm() * tt / 2));
    EXPECT_NEAR(van_vleck_prefactor(b, tt), want, 1e-9);
    EXPECT_NEAR(van_vleck_determinant(b, tt), want, 1e-9);
  }
}

TEST(Classification, CliffordGatesArePermutations) {
  EXPECT_EQ(classify_order(gate_map(Gate::H)), Order::hbar0_permutation);
  EXPECT_EQ(classify_order(gate_map(Gate::P)), Order::hbar0_permutation);
  EXPECT_EQ(classify_order(gate_map(Gate::CNOT)), Order::hbar0_permutation);
  EXPECT_EQ(classify_order(identity_map(3)), Order::hbar0_permutation);
}

TEST(Classification, TGateIsGeneral) {
  GeneratorMap m = gate_map(Gate::T);
  EXPECT_EQ(classify_order(m), Order::hbar1_general);
  EXPECT_EQ(order_name(classify_order(m)), "hbar1_general");
  EXPECT_EQ(m.images[0].terms().size(), 2u);
}

TEST(Hamiltonians, RejectBadTargets) {
  EXPECT_THROW(gate_hamiltonian(GateOp{Gate::CNOT, 1, 1}, 2), ContractError);
  EXPECT_THROW(gate_hamiltonian(GateOp{Gate::H, 3, -1}, 2), ContractError);
}
