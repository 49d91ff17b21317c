#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "grasswig/errors.hpp"
#include "grasswig/oracle.hpp"
#include "grasswig/pauli.hpp"
#include "grasswig/weyl.hpp"

namespace grasswig {

// A product of single-qubit observables sigma_{kind, qubit}, kept in
// {p, q, r} labels until a quantization map fixes the Pauli letters. The
// default is the label frame, where sigma_p is +X.
struct Observable {
  std::vector<std::pair<int, Kind>> factors;

  PauliString concrete(int n, const QuantizationMap& qm = QuantizationMap::label_frame()) const {
    PauliString out = PauliString::identity(n);
    for (auto& [q, k] : factors) out = out * qm.image(n, q, k);
    return out;
  }

  // 1-based qubit labels, e.g. "s_p1 s_r2".
  std::string label() const {
    std::string s;
    for (auto& [q, k] : factors) {
      if (!s.empty()) s += ' ';
      s += "s_" + std::string(1, kind_char(k)) + std::to_string(q + 1);
    }
    return s;
  }
};

struct PMSquare {
  static constexpr int qubits = 2;
  std::array<std::array<Observable, 3>, 3> cells;

  static PMSquare standard() {
    auto one = [](int q, Kind k) { return Observable{{{q, k}}}; };
    auto two = [](int q1, Kind k1, int q2, Kind k2) { return Observable{{{q1, k1}, {q2, k2}}}; };
    PMSquare s;
    s.cells[0] = {one(0, Kind::p), one(1, Kind::p), two(0, Kind::p, 1, Kind::p)};
    s.cells[1] = {one(1, Kind::r), one(0, Kind::r), two(0, Kind::r, 1, Kind::r)};
    s.cells[2] = {two(0, Kind::p, 1, Kind::r), two(0, Kind::r, 1, Kind::p), two(0, Kind::q, 1, Kind::q)};
    return s;
  }

  PauliString op(int row, int col, const QuantizationMap& qm = QuantizationMap::label_frame()) const {
    return cells.at(row).at(col).concrete(qubits, qm);
  }

  // Cells in row-major order.
  std::vector<PauliString> flat(const QuantizationMap& qm = QuantizationMap::label_frame()) const {
    std::vector<PauliString> v;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) v.push_back(op(i, j, qm));
    return v;
  }
};

struct Line {
  bool column = false;
  int index = 0;

  std::array<std::pair<int, int>, 3> cells() const {
    std::array<std::pair<int, int>, 3> c;
    for (int k = 0; k < 3; ++k) c[k] = column ? std::pair{k, index} : std::pair{index, k};
    return c;
  }
  std::string name() const { return std::string(column ? "column " : "row ") + std::to_string(index + 1); }
  static std::array<Line, 6> all() {
    return {Line{false, 0}, Line{false, 1}, Line{false, 2}, Line{true, 0}, Line{true, 1}, Line{true, 2}};
  }
};

// Do two cells commute exactly when they share a row or column?
inline bool commutation_pattern_holds(const PMSquare& sq, const QuantizationMap& qm = QuantizationMap::label_frame()) {
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b) {
      if (a == b) continue;
      bool same_line = a / 3 == b / 3 || a % 3 == b % 3;
      if (sq.op(a / 3, a % 3, qm).commutes(sq.op(b / 3, b % 3, qm)) != same_line) return false;
    }
  return true;
}

// +1 or -1: the line's three operators multiply to that multiple of identity.
inline int line_product(const PMSquare& sq, Line line, const QuantizationMap& qm = QuantizationMap::label_frame()) {
  PauliString prod = PauliString::identity(PMSquare::qubits);
  for (auto [i, j] : line.cells()) prod = prod * sq.op(i, j, qm);
  require(prod.is_identity_word(), "line operators do not multiply to a multiple of identity");
  return prod.sign();
}

// Symbol of (1 + m P) / 2 for a signed Pauli observable P.
inline WeylSymbol eigenprojector_symbol(const PauliString& p, int m, const QuantizationMap& qm = QuantizationMap::label_frame()) {
  Mat proj = (Mat::Identity(p.matrix().rows(), p.matrix().cols()) + static_cast<double>(m) * p.matrix()) / 2.0;
  return symbol_from_operator({p.n, proj}, qm);
}

inline int outcome_sign(int idx) { return idx == 0 ? 1 : -1; }

// Symbols for one line of the square. Single contexts are indexed by
// outcome (0 -> +1, 1 -> -1); the joint context simulates the first two
// observables together, indexed 2*i1 + i2.
struct LineProjectors {
  Line line;
  std::array<PauliString, 3> observables;
  std::array<std::array<WeylSymbol, 2>, 3> single;
  std::array<WeylSymbol, 4> joint;
};

inline LineProjectors projector_symbols(const PMSquare& sq, Line line,
                                        const QuantizationMap& qm = QuantizationMap::label_frame()) {
  LineProjectors lp;
  lp.line = line;
  auto cells = line.cells();
  for (int k = 0; k < 3; ++k) {
    lp.observables[k] = sq.op(cells[k].first, cells[k].second, qm);
    for (int m = 0; m < 2; ++m) lp.single[k][m] = eigenprojector_symbol(lp.observables[k], outcome_sign(m), qm);
  }
  // Joint projector (1 + m1 A + m2 B + m1 m2 AB) / 4, summed term by term.
  const int n = lp.observables[0].n;
  auto sym = [&](const PauliString& p) { return symbol_from_operator({n, p.matrix()}, qm).element; };
  Element a = sym(lp.observables[0]), b = sym(lp.observables[1]);
  Element ab = sym(lp.observables[0] * lp.observables[1]);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double m1 = outcome_sign(i), m2 = outcome_sign(j);
      Element e = (Element::scalar(a.algebra(), 1) + a * m1 + b * m2 + ab * (m1 * m2)) * 0.25;
      lp.joint[2 * i + j] = WeylSymbol::wrap(e.prune());
    }
  return lp;
}

// Born probability of a projector symbol: its integral against the state's
// dual symbol.
inline double symbol_probability(const WeylSymbol& projector, const WeylSymbol& state_dual) {
  return expectation(projector, state_dual).real();
}

struct ContextExpectations {
  Line line;
  std::array<std::array<double, 2>, 3> single{};
  std::array<double, 4> joint{};
  std::array<double, 4> product_of_singles{};  // <Pi_1^{m1} * Pi_2^{m2}> via the Moyal product
  std::array<double, 4> oracle_joint{};

  // Largest violation of joint = product-of-singles, joint marginals = singles,
  // and joint = oracle.
  double consistency_error() const {
    double e = 0;
    for (int k = 0; k < 4; ++k) {
      e = std::max(e, std::abs(joint[k] - product_of_singles[k]));
      e = std::max(e, std::abs(joint[k] - oracle_joint[k]));
    }
    for (int m = 0; m < 2; ++m) {
      e = std::max(e, std::abs(joint[2 * m] + joint[2 * m + 1] - single[0][m]));
      e = std::max(e, std::abs(joint[m] + joint[2 + m] - single[1][m]));
    }
    return e;
  }
};

inline ContextExpectations context_expectations(const DenseOperator& rho, const PMSquare& sq, Line line,
                                                const QuantizationMap& qm = QuantizationMap::label_frame()) {
  require(rho.qubits == PMSquare::qubits, "context_expectations needs a two-qubit state");
  LineProjectors lp = projector_symbols(sq, line, qm);
  WeylSymbol dual = dual_symbol_from_operator(rho, qm);
  ContextExpectations ce;
  ce.line = line;
  for (int k = 0; k < 3; ++k)
    for (int m = 0; m < 2; ++m) ce.single[k][m] = symbol_probability(lp.single[k][m], dual);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      int idx = 2 * a + b;
      ce.joint[idx] = symbol_probability(lp.joint[idx], dual);
      ce.product_of_singles[idx] = symbol_probability(moyal_product(lp.single[0][a], lp.single[1][b]), dual);
      Mat pa = (Mat::Identity(4, 4) + outcome_sign(a) * lp.observables[0].matrix()) / 2.0;
      Mat pb = (Mat::Identity(4, 4) + outcome_sign(b) * lp.observables[1].matrix()) / 2.0;
      ce.oracle_joint[idx] = (pa * pb * rho.matrix).trace().real();
    }
  return ce;
}

enum class Scheme { rowwise, columnwise };

inline std::string scheme_name(Scheme s) { return s == Scheme::rowwise ? "rowwise" : "columnwise"; }

struct MeasurementRecord {
  Scheme scheme = Scheme::rowwise;
  std::array<std::array<int, 3>, 3> outcomes{};  // [line][position]
  std::array<int, 3> line_products{};
  int total_product() const { return line_products[0] * line_products[1] * line_products[2]; }
};

// Projective measurement of a +-1 observable on a density operator; returns
// the outcome and collapses rho.
template <class Rng>
int measure_observable(DenseOperator& rho, const PauliString& obs, Rng& rng) {
  Mat id = Mat::Identity(rho.matrix.rows(), rho.matrix.cols());
  Mat plus = (id + obs.matrix()) / 2.0;
  double p = std::clamp((plus * rho.matrix).trace().real(), 0.0, 1.0);
  int m = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p ? 1 : -1;
  Mat proj = m == 1 ? plus : Mat(id - plus);
  Mat next = proj * rho.matrix * proj;
  rho.matrix = next / next.trace().real();
  return m;
}

inline MeasurementRecord sequential_measure(DenseOperator rho, Scheme scheme, uint64_t seed, const PMSquare& sq = PMSquare::standard(),
                                            const QuantizationMap& qm = QuantizationMap::label_frame()) {
  require(rho.qubits == PMSquare::qubits, "sequential_measure needs a two-qubit state");
  std::mt19937_64 rng(seed);
  MeasurementRecord rec;
  rec.scheme = scheme;
  for (int l = 0; l < 3; ++l) {
    Line line{scheme == Scheme::columnwise, l};
    auto cells = line.cells();
    int prod = 1;
    for (int k = 0; k < 3; ++k) {
      rec.outcomes[l][k] = measure_observable(rho, sq.op(cells[k].first, cells[k].second, qm), rng);
      prod *= rec.outcomes[l][k];
    }
    rec.line_products[l] = prod;
  }
  return rec;
}

// A context's outcome constraint: the product of the assigned values of its
// members must equal `product`.
struct ProductConstraint {
  std::vector<int> members;
  int product = 1;
};

// Every pairwise-commuting subset of two or more observables whose operator
// product is +-identity.
inline std::vector<ProductConstraint> context_constraints(const std::vector<PauliString>& obs) {
  const int k = static_cast<int>(obs.size());
  require(k <= 20, "too many observables for subset enumeration");
  std::vector<ProductConstraint> out;
  for (uint32_t s = 1; s < (1u << k); ++s) {
    if (std::popcount(s) < 2) continue;
    std::vector<int> members;
    for (int i = 0; i < k; ++i)
      if ((s >> i) & 1) members.push_back(i);
    bool commuting = true;
    for (std::size_t a = 0; a < members.size() && commuting; ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b)
        if (!obs[members[a]].commutes(obs[members[b]])) {
          commuting = false;
          break;
        }
    if (!commuting) continue;
    PauliString prod = PauliString::identity(obs[0].n);
    for (int i : members) prod = prod * obs[i];
    if (!prod.is_identity_word()) continue;
    out.push_back({members, prod.sign()});
  }
  return out;
}

// Assignments are bitmasks: bit i set means observable i is assigned -1.
struct AssignmentSearch {
  int observables = 0;
  std::size_t examined = 0;
  std::vector<uint32_t> satisfying;
};

inline AssignmentSearch search_assignments(int observables, const std::vector<ProductConstraint>& constraints) {
  require(observables <= 24, "too many observables for exhaustive search");
  AssignmentSearch res;
  res.observables = observables;
  for (uint32_t a = 0; a < (1u << observables); ++a) {
    ++res.examined;
    bool ok = true;
    for (auto& c : constraints) {
      int v = 1;
      for (int i : c.members) v *= ((a >> i) & 1) ? -1 : 1;
      if (v != c.product) {
        ok = false;
        break;
      }
    }
    if (ok) res.satisfying.push_back(a);
  }
  return res;
}

// The six line constraints of the square, rows first.
inline std::vector<ProductConstraint> square_constraints(const PMSquare& sq, const QuantizationMap& qm = QuantizationMap::label_frame()) {
  std::vector<ProductConstraint> out;
  for (Line l : Line::all()) {
    ProductConstraint c;
    for (auto [i, j] : l.cells()) c.members.push_back(3 * i + j);
    c.product = line_product(sq, l, qm);
    out.push_back(c);
  }
  return out;
}

inline AssignmentSearch noncontextual_assignment_search(const PMSquare& sq = PMSquare::standard(),
                                                        const QuantizationMap& qm = QuantizationMap::label_frame()) {
  return search_assignments(9, square_constraints(sq, qm));
}

// Same search with constraint `dropped` (0..5, rows then columns) removed.
inline AssignmentSearch relaxed_assignment_search(int dropped, const PMSquare& sq = PMSquare::standard(),
                                                  const QuantizationMap& qm = QuantizationMap::label_frame()) {
  auto cs = square_constraints(sq, qm);
  require(dropped >= 0 && dropped < static_cast<int>(cs.size()), "no such constraint");
  cs.erase(cs.begin() + dropped);
  return search_assignments(9, cs);
}

// One row on its own: three values, one parity constraint.
inline AssignmentSearch single_row_search(int row, const PMSquare& sq = PMSquare::standard(),
                                          const QuantizationMap& qm = QuantizationMap::label_frame()) {
  return search_assignments(3, {ProductConstraint{{0, 1, 2}, line_product(sq, Line{false, row}, qm)}});
}

// Single-qubit analog: the six signed Paulis +-X, +-Y, +-Z with every
// commuting-context constraint derived from the operators themselves.
inline std::vector<PauliString> single_qubit_observables() {
  std::vector<PauliString> v;
  for (char c : {'X', 'Y', 'Z'}) {
    v.push_back(PauliString::single(1, 0, c, 1));
    v.push_back(PauliString::single(1, 0, c, -1));
  }
  return v;
}

inline AssignmentSearch single_qubit_assignment_search() {
  auto obs = single_qubit_observables();
  return search_assignments(static_cast<int>(obs.size()), context_constraints(obs));
}

}  // namespace grasswig
