#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "grasswig/errors.hpp"
#include "grasswig/grassmann.hpp"
#include "grasswig/pauli.hpp"

namespace grasswig {

using Mat = Eigen::MatrixXcd;

struct DenseOperator {
  int qubits = 0;
  Mat matrix;

  static DenseOperator identity(int n) {
    std::size_t d = std::size_t{1} << n;
    return {n, Mat::Identity(d, d)};
  }
  // |0...0><0...0|
  static DenseOperator zero_state(int n) {
    std::size_t d = std::size_t{1} << n;
    Mat m = Mat::Zero(d, d);
    m(0, 0) = 1;
    return {n, m};
  }
  static DenseOperator from_ket(const Eigen::VectorXcd& v) {
    int n = 0;
    while ((std::size_t{1} << n) < static_cast<std::size_t>(v.size())) ++n;
    require((std::size_t{1} << n) == static_cast<std::size_t>(v.size()), "ket dimension is not a power of two");
    Eigen::VectorXcd u = v.normalized();
    return {n, u * u.adjoint()};
  }
  static DenseOperator maximally_mixed(int n) {
    std::size_t d = std::size_t{1} << n;
    return {n, Mat::Identity(d, d) / static_cast<double>(d)};
  }

  DenseOperator operator*(const DenseOperator& o) const {
    require(qubits == o.qubits, "operator qubit counts differ");
    return {qubits, matrix * o.matrix};
  }
  DenseOperator kron(const DenseOperator& o) const {
    Mat m(matrix.rows() * o.matrix.rows(), matrix.cols() * o.matrix.cols());
    for (Eigen::Index i = 0; i < matrix.rows(); ++i)
      for (Eigen::Index j = 0; j < matrix.cols(); ++j)
        m.block(i * o.matrix.rows(), j * o.matrix.cols(), o.matrix.rows(), o.matrix.cols()) = matrix(i, j) * o.matrix;
    return {qubits + o.qubits, m};
  }
};

inline Mat kron(const Mat& a, const Mat& b) {
  Mat m(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) m.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return m;
}

inline double max_abs_diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Equality up to a global phase.
inline bool equal_up_to_phase(const Mat& a, const Mat& b, double tol = 1e-9) {
  Eigen::Index r = 0, c = 0;
  b.cwiseAbs().maxCoeff(&r, &c);
  if (std::abs(b(r, c)) < tol) return a.cwiseAbs().maxCoeff() < tol;
  cplx ph = a(r, c) / b(r, c);
  if (std::abs(std::abs(ph) - 1.0) > tol) return false;
  return max_abs_diff(a, ph * b) < tol;
}

enum class Gate { H, P, CNOT, T };

inline std::string gate_name(Gate g) {
  switch (g) {
    case Gate::H: return "h";
    case Gate::P: return "p";
    case Gate::CNOT: return "cnot";
    case Gate::T: return "t";
  }
  return "?";
}

// For CNOT, a is the control and b the target.
struct GateOp {
  Gate gate = Gate::H;
  int a = 0;
  int b = -1;
  bool operator==(const GateOp&) const = default;
};

struct Circuit {
  int qubits = 0;
  std::vector<GateOp> gates;
  bool operator==(const Circuit&) const = default;

  bool clifford_only() const {
    for (auto& g : gates)
      if (g.gate == Gate::T) return false;
    return true;
  }
};

inline Mat single_qubit_matrix(Gate g) {
  const double s = 1.0 / std::sqrt(2.0);
  Mat m(2, 2);
  switch (g) {
    case Gate::H: m << s, s, s, -s; break;
    case Gate::P: m << 1, 0, 0, cplx(0, 1); break;
    case Gate::T: m << 1, 0, 0, std::polar(1.0, M_PI / 4); break;
    default: throw ContractError("not a single-qubit gate");
  }
  return m;
}

inline Mat embed_single(int n, int q, const Mat& u) {
  Mat m = Mat::Identity(1, 1);
  for (int j = 0; j < n; ++j) m = kron(m, j == q ? u : Mat::Identity(2, 2));
  return m;
}

inline Mat cnot_matrix(int n, int control, int target) {
  require(control != target, "cnot control equals target");
  std::size_t d = std::size_t{1} << n;
  Mat m = Mat::Zero(d, d);
  std::size_t cb = std::size_t{1} << (n - 1 - control), tb = std::size_t{1} << (n - 1 - target);
  for (std::size_t c = 0; c < d; ++c) m((c & cb) ? (c ^ tb) : c, c) = 1;
  return m;
}

inline void check_targets(const GateOp& op, int n) {
  require(op.a >= 0 && op.a < n, "gate target out of range");
  if (op.gate == Gate::CNOT) {
    require(op.b >= 0 && op.b < n, "cnot target out of range");
    require(op.a != op.b, "cnot control equals target");
  }
}

inline Mat gate_unitary(const GateOp& op, int n) {
  check_targets(op, n);
  if (op.gate == Gate::CNOT) return cnot_matrix(n, op.a, op.b);
  return embed_single(n, op.a, single_qubit_matrix(op.gate));
}

inline DenseOperator dense_apply(const DenseOperator& rho, const GateOp& op) {
  Mat u = gate_unitary(op, rho.qubits);
  return {rho.qubits, u * rho.matrix * u.adjoint()};
}

inline Mat circuit_unitary(const Circuit& c) {
  std::size_t d = std::size_t{1} << c.qubits;
  Mat u = Mat::Identity(d, d);
  for (auto& g : c.gates) u = gate_unitary(g, c.qubits) * u;
  return u;
}

inline DenseOperator run_dense(const Circuit& c) {
  DenseOperator rho = DenseOperator::zero_state(c.qubits);
  for (auto& g : c.gates) rho = dense_apply(rho, g);
  return rho;
}

// Signed Pauli term of a matrix that is +-1 times a Pauli string, if any.
inline std::optional<PauliString> as_signed_pauli(const Mat& m, int n, double tol = 1e-9) {
  Eigen::VectorXcd tr = pauli_traces(m, n);
  const double dim = static_cast<double>(std::size_t{1} << n);
  std::optional<PauliString> hit;
  for (Eigen::Index w = 0; w < tr.size(); ++w) {
    cplx c = tr(w) / dim;
    if (std::abs(c) < tol) continue;
    if (hit) return std::nullopt;
    if (std::abs(c.imag()) > tol || std::abs(std::abs(c.real()) - 1.0) > tol) return std::nullopt;
    PauliString p = pauli_from_flat(n, static_cast<std::size_t>(w));
    p.phase = c.real() > 0 ? 0 : 2;
    hit = p;
  }
  return hit;
}

struct ConjugationResult {
  std::optional<PauliString> image;
  std::string failure;
};

// U P U^dagger for a signed Pauli string.
inline ConjugationResult conjugate_pauli(const GateOp& op, const PauliString& point) {
  Mat u = gate_unitary(op, point.n);
  Mat img = u * point.matrix() * u.adjoint();
  auto p = as_signed_pauli(img, point.n);
  if (!p) return {std::nullopt, "conjugation of " + point.str() + " by " + gate_name(op.gate) + " is not a signed Pauli string"};
  return {p, ""};
}

// Non-identity signed Pauli strings with expectation +1 in a pure stabilizer state.
inline std::vector<PauliString> stabilizer_group(const DenseOperator& rho, double tol = 1e-9) {
  const int n = rho.qubits;
  double purity = (rho.matrix * rho.matrix).trace().real();
  if (std::abs(purity - 1.0) > tol) throw StateError("stabilizer_group: state is not pure");
  Eigen::VectorXcd tr = pauli_traces(rho.matrix, n);
  std::vector<PauliString> out;
  for (Eigen::Index w = 1; w < tr.size(); ++w) {
    double v = tr(w).real();
    if (std::abs(v) < tol) continue;
    if (std::abs(std::abs(v) - 1.0) > tol || std::abs(tr(w).imag()) > tol)
      throw StateError("stabilizer_group: expectation outside {0, +-1}");
    PauliString p = pauli_from_flat(n, static_cast<std::size_t>(w));
    p.phase = v > 0 ? 0 : 2;
    out.push_back(p);
  }
  if (out.size() + 1 != (std::size_t{1} << n)) throw StateError("stabilizer_group: wrong group order");
  return out;
}

// Projector (1/2^n) sum over a stabilizer group (identity included).
inline Mat projector_from_group(const std::vector<PauliString>& group, int n) {
  std::size_t d = std::size_t{1} << n;
  Mat m = Mat::Identity(d, d);
  for (auto& p : group) m += p.matrix();
  return m / static_cast<double>(d);
}

// Matrix representation of the three generators of one triple acting on
// (C^2)^{x3}, ordered (p, r, q) along the Jordan-Wigner string.
struct CliffordRep {
  Mat p, q, r;

  Mat of(Kind k) const { return k == Kind::p ? p : (k == Kind::q ? q : r); }

  // Image of an element of a one-qubit state algebra.
  Mat represent(const Element& e) const {
    require(e.algebra() == Algebra::state(1), "clifford_rep expects a one-qubit state element");
    Mat out = Mat::Zero(8, 8);
    for (auto& [m, c] : e.terms()) {
      Mat prod = Mat::Identity(8, 8);
      for (int k = 0; k < 3; ++k)
        if ((m >> k) & 1) prod = prod * of(static_cast<Kind>(k));
      out += c * prod;
    }
    return out;
  }
};

inline CliffordRep clifford_rep(int m = 3) {
  require(m == 3, "clifford_rep supports the three-generator case only");
  Mat I = Mat::Identity(2, 2);
  Mat X = PauliString::parse("X").matrix(), Y = PauliString::parse("Y").matrix(), Z = PauliString::parse("Z").matrix();
  const cplx i(0, 1);
  CliffordRep rep;
  rep.p = kron(kron(X, I), I) + i * kron(kron(Y, I), I);
  rep.r = kron(kron(Z, X), I) + i * kron(kron(Z, Y), I);
  rep.q = kron(kron(Z, Z), X) + i * kron(kron(Z, Z), Y);
  return rep;
}

// Haar-ish random density operator of given rank (1 = pure).
template <class Rng>
DenseOperator random_density(int n, Rng& rng, int rank = 0) {
  std::normal_distribution<double> nd;
  std::size_t d = std::size_t{1} << n;
  if (rank <= 0) rank = static_cast<int>(d);
  Mat a(d, rank);
  for (std::size_t i = 0; i < d; ++i)
    for (int j = 0; j < rank; ++j) a(i, j) = cplx(nd(rng), nd(rng));
  Mat rho = a * a.adjoint();
  return {n, rho / rho.trace()};
}

template <class Rng>
Mat random_matrix(int n, Rng& rng) {
  std::normal_distribution<double> nd;
  std::size_t d = std::size_t{1} << n;
  Mat a(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) a(i, j) = cplx(nd(rng), nd(rng));
  return a;
}

template <class Rng>
Circuit random_clifford_circuit(int n, int length, Rng& rng, bool allow_t = false) {
  Circuit c{n, {}};
  int kinds = (n >= 2 ? 3 : 2) + (allow_t ? 1 : 0);
  std::uniform_int_distribution<int> pick_q(0, n - 1);
  for (int k = 0; k < length; ++k) {
    int g = std::uniform_int_distribution<int>(0, kinds - 1)(rng);
    Gate gate = g == 0 ? Gate::H : g == 1 ? Gate::P : (g == 2 && n >= 2) ? Gate::CNOT : Gate::T;
    GateOp op{gate, pick_q(rng), -1};
    if (gate == Gate::CNOT) {
      do op.b = pick_q(rng);
      while (op.b == op.a);
    }
    c.gates.push_back(op);
  }
  return c;
}

}  // namespace grasswig
