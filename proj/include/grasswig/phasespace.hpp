#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "grasswig/dynamics.hpp"
#include "grasswig/errors.hpp"
#include "grasswig/oracle.hpp"
#include "grasswig/pauli.hpp"
#include "grasswig/twogen.hpp"
#include "grasswig/weyl.hpp"

namespace grasswig {

// A phase-space point is a signed non-identity Pauli word with phase 0 or 2.
using PhasePoint = PauliString;

namespace detail {

// Base-4 digit per qubit, qubit 0 most significant: I=0, X=1, Y=2, Z=3.
inline std::size_t word_rank(const PauliString& p) {
  std::size_t w = 0;
  for (int j = 0; j < p.n; ++j) {
    char c = p.letter(j);
    w = 4 * w + (c == 'I' ? 0 : c == 'X' ? 1 : c == 'Y' ? 2 : 3);
  }
  return w;
}

inline PauliString word_from_rank(int n, std::size_t w) {
  PauliString p = PauliString::identity(n);
  for (int j = n - 1; j >= 0; --j) {
    p.set(j, "IXYZ"[w % 4]);
    w /= 4;
  }
  return p;
}

}  // namespace detail

inline std::size_t point_count(int n) { return 2 * ((std::size_t{1} << (2 * n)) - 1); }

// One qubit: (+X, +Y, +Z, -X, -Y, -Z), i.e. (p, r, q, -p, -r, -q). More
// qubits: words in lexicographic order over I < X < Y < Z, + before -.
inline std::size_t point_index(const PhasePoint& p) {
  require(p.phase == 0 || p.phase == 2, "phase-space points carry a real sign");
  require(!p.is_identity_word(), "the identity word is not a phase-space point");
  std::size_t w = detail::word_rank(p);
  bool neg = p.phase == 2;
  if (p.n == 1) return (w - 1) + (neg ? 3 : 0);
  return 2 * (w - 1) + (neg ? 1 : 0);
}

inline PhasePoint point_at(int n, std::size_t i) {
  require(i < point_count(n), "phase-space index out of range");
  std::size_t w;
  bool neg;
  if (n == 1) {
    w = i % 3 + 1;
    neg = i >= 3;
  } else {
    w = i / 2 + 1;
    neg = i % 2;
  }
  PhasePoint p = detail::word_from_rank(n, w);
  p.phase = neg ? 2 : 0;
  return p;
}

inline std::vector<PhasePoint> enumerate_points(int n) {
  require(n >= 1 && n <= kMaxQubits, "qubit count out of range");
  std::vector<PhasePoint> pts;
  pts.reserve(point_count(n));
  for (std::size_t i = 0; i < point_count(n); ++i) pts.push_back(point_at(n, i));
  return pts;
}

struct GBar {
  int qubits = 0;
  std::vector<double> values;
  bool zero = false;  // no non-identity content

  double total() const {
    double s = 0;
    for (double v : values) s += v;
    return s;
  }
  std::size_t support() const {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return v != 0.0; }));
  }
  bool non_negative() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0; });
  }
  bool operator==(const GBar& o) const { return qubits == o.qubits && values == o.values; }
  bool operator<(const GBar& o) const { return values < o.values; }

  // Nonzero entries as (label, mass), in point order.
  std::vector<std::pair<std::string, double>> entries() const {
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] != 0.0) out.emplace_back(point_at(qubits, i).str(), values[i]);
    return out;
  }

  std::string to_json() const {
    std::string s = "{";
    char buf[64];
    bool first = true;
    for (auto& [k, v] : entries()) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      s += (first ? "\"" : ", \"") + k + "\": " + buf;
      first = false;
    }
    return s + "}";
  }
};

// rho = 2^-n (I + sum c_P P); mass max(+-c_P, 0) on +-P, then normalized.
// Coefficients within 1e-12 of an integer are snapped to it so that
// stabilizer states give bit-exact masses.
inline GBar gbar_from_state(const DenseOperator& rho) {
  const int n = rho.qubits;
  require(n >= 1 && n <= kMaxQubits, "qubit count out of range");
  GBar g{n, std::vector<double>(point_count(n), 0.0), false};
  Eigen::VectorXcd tr = pauli_traces(rho.matrix, n);
  for (Eigen::Index w = 1; w < tr.size(); ++w) {
    double c = tr(w).real();
    if (std::abs(c - std::round(c)) < 1e-12) c = std::round(c);
    if (c == 0.0) continue;
    PhasePoint p = pauli_from_flat(n, static_cast<std::size_t>(w));
    p.phase = c > 0 ? 0 : 2;
    g.values[point_index(p)] = std::abs(c);
  }
  double s = g.total();
  if (s == 0.0) {
    g.zero = true;
    return g;
  }
  for (double& v : g.values) v /= s;
  return g;
}

// |0...0>: equal mass on every word built from I and Z only.
inline GBar zero_state_gbar(int n) {
  require(n >= 1 && n <= kMaxQubits, "qubit count out of range");
  GBar g{n, std::vector<double>(point_count(n), 0.0), false};
  const double m = 1.0 / static_cast<double>((std::size_t{1} << n) - 1);
  for (uint32_t s = 1; s < (1u << n); ++s) g.values[point_index(PauliString{n, 0, s, 0})] = m;
  return g;
}

// new[x] = old[source[x]].
struct Permutation {
  std::vector<std::size_t> source;

  std::size_t size() const { return source.size(); }
  bool is_bijection() const {
    std::vector<bool> seen(source.size(), false);
    for (auto s : source) {
      if (s >= source.size() || seen[s]) return false;
      seen[s] = true;
    }
    return true;
  }
  // (this then o) as one permutation: apply this first.
  Permutation then(const Permutation& o) const {
    require(size() == o.size(), "permutation sizes differ");
    Permutation r{std::vector<std::size_t>(size())};
    for (std::size_t x = 0; x < size(); ++x) r.source[x] = source[o.source[x]];
    return r;
  }
  static Permutation identity(std::size_t m) {
    Permutation p{std::vector<std::size_t>(m)};
    for (std::size_t i = 0; i < m; ++i) p.source[i] = i;
    return p;
  }
  Eigen::MatrixXi matrix() const {
    Eigen::MatrixXi m = Eigen::MatrixXi::Zero(size(), size());
    for (std::size_t x = 0; x < size(); ++x) m(x, source[x]) = 1;
    return m;
  }
  bool operator==(const Permutation&) const = default;
};

namespace detail {

// Odd per-qubit symbol of a Pauli word in the label frame, evolved by the
// gate flow and quantized back.
inline std::optional<PhasePoint> heisenberg_image(const GateHamiltonian& gh, const PhasePoint& p) {
  const QuantizationMap& lf = QuantizationMap::label_frame();
  Element sym = dual_symbol_from_operator({p.n, p.matrix()}, lf).element;
  Element ev = evolve_symbol(gh.hamiltonian.symbol, sym, gh.duration);
  return as_signed_pauli(operator_from_symbol(ev, lf).matrix, p.n);
}

}  // namespace detail

// Order of the gate's flow, from the one- or two-qubit generator map.
inline Order gate_order(Gate g) {
  static const std::map<Gate, Order> cache = [] {
    std::map<Gate, Order> m;
    for (Gate x : {Gate::H, Gate::P, Gate::CNOT, Gate::T}) m[x] = classify_order(evolve_generators(gate_hamiltonian(x)));
    return m;
  }();
  return cache.at(g);
}

// Built from the gate flow and checked point by point against the oracle
// conjugation; any disagreement is a hard failure.
inline Permutation permutation_for_gate(const GateOp& op, int n) {
  check_targets(op, n);
  if (gate_order(op.gate) != Order::hbar0_permutation)
    throw ClassificationError(gate_name(op.gate) + " gate flow is hbar1_general: images are not single monomials");
  static std::mutex mu;
  static std::map<std::tuple<int, int, int, int>, Permutation> cache;
  auto key = std::make_tuple(static_cast<int>(op.gate), op.a, op.gate == Gate::CNOT ? op.b : -1, n);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  GateHamiltonian gh = gate_hamiltonian(op, n);
  const std::size_t m = point_count(n);
  Permutation perm{std::vector<std::size_t>(m)};
  for (std::size_t x = 0; x < m; ++x) {
    PhasePoint y = point_at(n, x);
    auto img = detail::heisenberg_image(gh, y);
    if (!img) throw std::logic_error("gate flow does not map " + y.str() + " to a signed Pauli string");
    auto check = conjugate_pauli(op, *img);
    if (!check.image || !(*check.image == y))
      throw std::logic_error("flow permutation disagrees with oracle conjugation at " + y.str());
    perm.source[x] = point_index(*img);
  }
  require(perm.is_bijection(), "gate permutation is not a bijection");
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, perm);
  return perm;
}

inline GBar apply_gate(const GBar& g, const Permutation& perm) {
  require(g.values.size() == perm.size(), "permutation size does not match the distribution");
  GBar out{g.qubits, std::vector<double>(g.values.size()), g.zero};
  for (std::size_t x = 0; x < perm.size(); ++x) out.values[x] = g.values[perm.source[x]];
  return out;
}

inline GBar simulate_circuit(const Circuit& c) {
  GBar g = zero_state_gbar(c.qubits);
  for (auto& op : c.gates) g = apply_gate(g, permutation_for_gate(op, c.qubits));
  return g;
}

inline Permutation circuit_permutation(const Circuit& c) {
  Permutation p = Permutation::identity(point_count(c.qubits));
  for (auto& op : c.gates) p = p.then(permutation_for_gate(op, c.qubits));
  return p;
}

// Two-generator negativity of the state's grid.
inline double negativity(const DenseOperator& rho) { return wigner_negativity(wigner2(rho)); }

// Every single-qubit gate on each qubit and CNOT on each ordered pair.
inline std::vector<GateOp> clifford_generators(int n) {
  std::vector<GateOp> ops;
  for (int q = 0; q < n; ++q) {
    ops.push_back({Gate::H, q, -1});
    ops.push_back({Gate::P, q, -1});
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b) ops.push_back({Gate::CNOT, a, b});
  return ops;
}

// Distinct distributions reachable from |0...0> under the permutation action.
inline std::set<GBar> stabilizer_census(int n) {
  std::vector<Permutation> perms;
  for (auto& op : clifford_generators(n)) perms.push_back(permutation_for_gate(op, n));
  std::set<GBar> seen{zero_state_gbar(n)};
  std::vector<GBar> frontier{zero_state_gbar(n)};
  while (!frontier.empty()) {
    std::vector<GBar> next;
    for (auto& g : frontier)
      for (auto& p : perms) {
        GBar h = apply_gate(g, p);
        if (seen.insert(h).second) next.push_back(h);
      }
    frontier.swap(next);
  }
  return seen;
}

// Same census on dense states, keyed by the rounded density matrix.
inline std::size_t oracle_census(int n) {
  auto key = [](const DenseOperator& r) {
    std::vector<long long> k;
    for (Eigen::Index i = 0; i < r.matrix.size(); ++i) {
      k.push_back(std::llround(r.matrix.data()[i].real() * 1e6));
      k.push_back(std::llround(r.matrix.data()[i].imag() * 1e6));
    }
    return k;
  };
  auto ops = clifford_generators(n);
  std::set<std::vector<long long>> seen;
  std::vector<DenseOperator> frontier{DenseOperator::zero_state(n)};
  seen.insert(key(frontier.front()));
  while (!frontier.empty()) {
    std::vector<DenseOperator> next;
    for (auto& r : frontier)
      for (auto& op : ops) {
        DenseOperator s = dense_apply(r, op);
        if (seen.insert(key(s)).second) next.push_back(s);
      }
    frontier.swap(next);
  }
  return seen.size();
}

}  // namespace grasswig
