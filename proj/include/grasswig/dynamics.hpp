#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "grasswig/grassmann.hpp"
#include "grasswig/oracle.hpp"
#include "grasswig/weyl.hpp"

namespace grasswig {

// Field components are listed in the cyclic order (p, r, q), which is the
// order the Levi-Civita symbol runs over in the Hamiltonian.
inline constexpr Kind kCyclic[3] = {Kind::p, Kind::r, Kind::q};

struct HarmonicHamiltonian {
  int qubits = 1;
  Element symbol;
  // Per-qubit field b for quadratic Hamiltonians; empty for the quartic CNOT.
  std::vector<Eigen::Vector3d> fields;
  bool quadratic() const { return !fields.empty(); }
};

// -(i/2) sum eps_klm b_k xi_l xi_m = -i (b1 xi_r xi_q + b2 xi_q xi_p + b3 xi_p xi_r).
inline Element harmonic_symbol(Algebra alg, int qubit, const Eigen::Vector3d& b) {
  Element h(alg);
  for (int k = 0; k < 3; ++k) {
    if (b(k) == 0.0) continue;
    Element l = xi(alg, qubit, kCyclic[(k + 1) % 3]), m = xi(alg, qubit, kCyclic[(k + 2) % 3]);
    h += l * m * cplx(0, -b(k));
  }
  return h;
}

inline HarmonicHamiltonian harmonic_hamiltonian(int n, int qubit, const Eigen::Vector3d& b) {
  HarmonicHamiltonian h{n, harmonic_symbol(Algebra::state(n), qubit, b), {}};
  h.fields.assign(n, Eigen::Vector3d::Zero());
  h.fields[qubit] = b;
  return h;
}

// Generator of the linear flow on (xi_p, xi_q, xi_r): K_lm is the xi_m
// coefficient of i H with xi_l stripped off from the right.
inline Eigen::MatrixXd flow_generator(const Element& h) {
  const Algebra& alg = h.algebra();
  const int m = alg.size();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(m, m);
  for (int l = 0; l < m; ++l) {
    Element d = h.derivative(l, Side::right) * cplx(0, 1);
    for (auto& [mask, c] : d.terms()) {
      require(std::popcount(mask) == 1, "flow_generator needs a quadratic Hamiltonian");
      require(std::abs(c.imag()) < 1e-12, "flow_generator needs a real Hamiltonian");
      k(l, std::countr_zero(mask)) = c.real();
    }
  }
  return k;
}

inline Eigen::Matrix3d field_generator(const Eigen::Vector3d& b) {
  return flow_generator(harmonic_symbol(Algebra::state(1), 0, b));
}

struct EvolutionMatrix {
  Eigen::MatrixXd matrix;
  double duration = 0;
};

// exp(K t) through the Cayley form [I + A][I - A]^-1, A = tan(bt/2) K / b.
// At the tan singularity it falls back to the matrix exponential.
inline EvolutionMatrix cayley_evolution_matrix(const Eigen::Vector3d& b, double t) {
  const double bn = b.norm();
  Eigen::Matrix3d k = field_generator(b);
  if (bn == 0.0 || t == 0.0) return {Eigen::Matrix3d::Identity(), t};
  double c = std::cos(bn * t / 2);
  if (std::abs(c) < 1e-9) return {(k * t).exp(), t};
  Eigen::Matrix3d a = std::tan(bn * t / 2) * k / bn;
  Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
  return {(id + a) * (id - a).inverse(), t};
}

inline EvolutionMatrix exponential_evolution_matrix(const Element& h, double t) {
  Eigen::MatrixXd k = flow_generator(h);
  return {(k * t).exp(), t};
}

// Sum eps_klm n_k xi_l xi_m for a unit axis n.
inline Element axial_form(Algebra alg, int qubit, const Eigen::Vector3d& n) {
  return harmonic_symbol(alg, qubit, n) * cplx(0, 2);
}

// cos(bt/2) - (1/2) sin(bt/2) S with S the axial form of n = b/|b|. This is
// N exp(-(1/2) tan(bt/2) S) with N = cos(bt/2), written without the tangent
// so that bt = pi needs no special case.
inline WeylSymbol propagator_symbol(const Eigen::Vector3d& b, double t) {
  Algebra a1 = Algebra::state(1);
  const double bn = b.norm();
  if (bn == 0.0 || t == 0.0) return WeylSymbol::wrap(Element::scalar(a1, 1));
  Element s = axial_form(a1, 0, b / bn);
  Element u = Element::scalar(a1, std::cos(bn * t / 2)) - s * (0.5 * std::sin(bn * t / 2));
  return WeylSymbol::wrap(u);
}

// exp(-(i/2) b.sigma t) with sigma_k the image of kind k in the frame.
inline Mat field_unitary(const Eigen::Vector3d& b, double t, const QuantizationMap& qm) {
  Mat h = Mat::Zero(2, 2);
  for (int k = 0; k < 3; ++k) h += b(k) * qm.image(1, 0, kCyclic[k]).matrix();
  return (h * cplx(0, -0.5 * t)).exp();
}

// |N| from the unitarity condition. The scalar part of U0 * U0^* is a
// Gaussian integral over the two copies of the generators; its magnitude is
// 1/|N|^2.
inline double van_vleck_prefactor(const Eigen::Vector3d& b, double t) {
  const double bn = b.norm();
  if (bn == 0.0) return 1.0;
  double tn = std::tan(bn * t / 2);
  Eigen::Matrix3d k = field_generator(b / bn);
  // S = sum_lm s_lm xi_l xi_m with s = -K (antisymmetric).
  Eigen::Matrix3d s = -k;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
  // U0 = exp(-(tan/2) S(xi')), U0^* = exp(+(tan/2) S(xi'')), kernel sum xi' xi''.
  a.topLeftCorner(3, 3) = -0.5 * tn * s;
  a.bottomRightCorner(3, 3) = 0.5 * tn * s;
  a.topRightCorner(3, 3) = 0.5 * Eigen::Matrix3d::Identity();
  a.bottomLeftCorner(3, 3) = -0.5 * Eigen::Matrix3d::Identity();
  return std::pow(gaussian_magnitude(a), -0.5);
}

// Same prefactor from det(BB - I~)^(-1/4), BB = diag(B, B), I~ = offdiag(I, I).
inline double van_vleck_determinant(const Eigen::Vector3d& b, double t) {
  const double bn = b.norm();
  if (bn == 0.0) return 1.0;
  Eigen::Matrix3d bm = std::tan(bn * t / 2) * field_generator(b / bn);
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(6, 6);
  big.topLeftCorner(3, 3) = bm;
  big.bottomRightCorner(3, 3) = bm;
  big.topRightCorner(3, 3) -= Eigen::Matrix3d::Identity();
  big.bottomLeftCorner(3, 3) -= Eigen::Matrix3d::Identity();
  return std::pow(std::abs(big.determinant()), -0.25);
}

struct GateHamiltonian {
  HarmonicHamiltonian hamiltonian;
  double duration = 0;
};

// Hamiltonian and evolution time generating each gate. For CNOT, a is the
// control and b the target.
inline GateHamiltonian gate_hamiltonian(const GateOp& op, int n) {
  check_targets(op, n);
  const double s = 1.0 / std::sqrt(2.0);
  switch (op.gate) {
    case Gate::H: return {harmonic_hamiltonian(n, op.a, Eigen::Vector3d(s, 0, s)), M_PI};
    case Gate::P: return {harmonic_hamiltonian(n, op.a, Eigen::Vector3d(0, 0, 1)), M_PI / 2};
    case Gate::T: return {harmonic_hamiltonian(n, op.a, Eigen::Vector3d(0, 0, 0.5)), M_PI / 2};
    case Gate::CNOT: {
      Algebra alg = Algebra::state(n);
      auto x = [&](int q, Kind k) { return xi(alg, q, k); };
      Element cb = x(op.a, Kind::p) * x(op.a, Kind::r);
      Element ta = x(op.b, Kind::r) * x(op.b, Kind::q);
      Element h = (cb + ta + cb * ta * cplx(0, 1)) * cplx(0, -0.25);
      return {{n, h, {}}, 2 * M_PI};
    }
  }
  throw ContractError("unknown gate");
}
inline GateHamiltonian gate_hamiltonian(Gate g) {
  return gate_hamiltonian(GateOp{g, 0, g == Gate::CNOT ? 1 : -1}, g == Gate::CNOT ? 2 : 1);
}

// d g / dt = (i/2)(H * g - g * H) with * the star product.
inline Element moyal_bracket_flow(const Element& h, const Element& g) {
  return (moyal_product(h, g) - moyal_product(g, h)) * cplx(0, 0.5);
}

// Exact solution of the flow: close the monomial orbit of g, build the
// linear generator on that basis and exponentiate it.
inline Element evolve_symbol(const Element& h, const Element& g, double t) {
  std::vector<uint64_t> basis;
  std::map<uint64_t, int> where;
  auto add = [&](uint64_t m) {
    if (where.emplace(m, static_cast<int>(basis.size())).second) basis.push_back(m);
  };
  for (auto& [m, c] : g.terms()) add(m);
  std::vector<Element> images;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    Element img = moyal_bracket_flow(h, Element::monomial(g.algebra(), basis[i]));
    for (auto& [m, c] : img.terms()) add(m);
    images.push_back(std::move(img));
  }
  const Eigen::Index d = static_cast<Eigen::Index>(basis.size());
  Mat a = Mat::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (auto& [m, c] : images[j].terms()) a(where.at(m), j) = c;
  Eigen::VectorXcd v0 = Eigen::VectorXcd::Zero(d);
  for (auto& [m, c] : g.terms()) v0(where.at(m)) = c;
  Eigen::VectorXcd v = (a * t).exp() * v0;
  Element out(g.algebra());
  for (Eigen::Index i = 0; i < d; ++i) out.accumulate(basis[i], v(i));
  return out.prune();
}

struct GeneratorMap {
  std::vector<Element> images;  // one per state generator, in position order

  Element apply(const Element& g) const { return g.substitute(images); }

  bool operator==(const GeneratorMap& o) const {
    if (images.size() != o.images.size()) return false;
    for (std::size_t i = 0; i < images.size(); ++i)
      if (!approx_equal(images[i], o.images[i], 1e-9)) return false;
    return true;
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < images.size(); ++i) {
      const Element& e = images[i];
      s += e.generator_name(static_cast<int>(i)) + " -> " + e.to_string() + "\n";
    }
    return s;
  }
};

inline GeneratorMap identity_map(int n) {
  Algebra alg = Algebra::state(n);
  GeneratorMap g;
  for (int p = 0; p < alg.size(); ++p) g.images.push_back(Element::generator(alg, p));
  return g;
}

inline GeneratorMap evolve_generators(const HarmonicHamiltonian& h, double t) {
  Algebra alg = Algebra::state(h.qubits);
  GeneratorMap g;
  for (int p = 0; p < alg.size(); ++p) g.images.push_back(evolve_symbol(h.symbol, Element::generator(alg, p), t));
  return g;
}
inline GeneratorMap evolve_generators(const GateHamiltonian& gh) { return evolve_generators(gh.hamiltonian, gh.duration); }

enum class Order { hbar0_permutation, hbar1_general };

inline std::string order_name(Order o) { return o == Order::hbar0_permutation ? "hbar0_permutation" : "hbar1_general"; }

// Every image a unit-modulus multiple of one monomial.
inline Order classify_order(const GeneratorMap& map) {
  for (auto& e : map.images) {
    if (e.terms().size() != 1) return Order::hbar1_general;
    if (std::abs(std::abs(e.terms().begin()->second) - 1.0) > 1e-9) return Order::hbar1_general;
  }
  return Order::hbar0_permutation;
}

}  // namespace grasswig
