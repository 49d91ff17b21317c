#pragma once

#include <array>
#include <bit>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "grasswig/grassmann.hpp"
#include "grasswig/oracle.hpp"
#include "grasswig/pauli.hpp"

namespace grasswig {

struct WeylSymbol {
  Element element;
  Parity parity = Parity::even;
  int qubits = 0;

  static WeylSymbol wrap(const Element& e) {
    require(!e.algebra().aux && !e.algebra().plain, "weyl symbols live on state generators");
    return {e, e.parity(), e.algebra().qubits};
  }
};

// Signed Pauli image of each generator kind, shared by every qubit.
struct QuantizationMap {
  std::array<int, 3> sign{1, 1, 1};
  std::array<char, 3> letter{'X', 'Z', 'Y'};

  PauliString image(int n, int qubit, Kind k) const {
    int i = static_cast<int>(k);
    return PauliString::single(n, qubit, letter[i], sign[i]);
  }

  std::string describe() const {
    std::string s;
    for (int i = 0; i < 3; ++i) {
      if (i) s += ", ";
      s += std::string(1, "pqr"[i]) + " -> " + (sign[i] < 0 ? "-" : "+") + letter[i];
    }
    return s;
  }

  bool operator==(const QuantizationMap&) const = default;

  // Every signed assignment of distinct Pauli letters (48 candidates)
  // satisfying the structural constraints.
  static std::vector<QuantizationMap> search();

  // The unique solution of search(), computed once.
  static const QuantizationMap& canonical() {
    static const QuantizationMap m = [] {
      auto all = search();
      require(all.size() == 1, "quantization constraints do not pin a unique map");
      return all.front();
    }();
    return m;
  }

  // Same letters, all signs +: the frame in which phase-space points are labelled.
  static QuantizationMap label_frame() { return {{1, 1, 1}, canonical().letter}; }
};

// Dense operator of a symbol: each canonical monomial becomes the ordered
// product of its generator images.
inline DenseOperator operator_from_symbol(const Element& s, const QuantizationMap& qm = QuantizationMap::canonical()) {
  const Algebra& alg = s.algebra();
  require(!alg.plain && !alg.aux, "operator_from_symbol expects a state-generator element");
  const int n = alg.qubits;
  std::map<PauliString, cplx> acc;
  for (auto& [m, c] : s.terms()) {
    PauliString prod = PauliString::identity(n);
    for (uint64_t b = m; b; b &= b - 1) {
      GeneratorIndex g = alg.index_of(std::countr_zero(b));
      prod = prod * qm.image(n, g.qubit, g.kind);
    }
    cplx coef = c * PauliString::ipow(prod.phase);
    acc[prod.unsigned_word()] += coef;
  }
  std::size_t d = std::size_t{1} << n;
  Mat out = Mat::Zero(d, d);
  for (auto& [p, c] : acc)
    if (std::abs(c) > kPruneTol) out += c * p.matrix();
  return {n, out};
}
inline DenseOperator operator_from_symbol(const WeylSymbol& s, const QuantizationMap& qm = QuantizationMap::canonical()) {
  return operator_from_symbol(s.element, qm);
}

namespace detail {

// For one qubit: which even bilinear i xi_k xi_l (k<l) quantizes to +-letter,
// and which single generator quantizes to +-letter.
struct LetterTable {
  std::array<uint64_t, 4> even_mask{};  // indexed by I, X, Z, Y via (x | z<<1)
  std::array<int, 4> even_sign{};
  std::array<uint64_t, 4> odd_mask{};
  std::array<cplx, 4> odd_coeff{};
};

inline int letter_slot(char c) { return c == 'I' ? 0 : c == 'X' ? 1 : c == 'Z' ? 2 : 3; }

inline LetterTable letter_table(const QuantizationMap& qm) {
  LetterTable t;
  t.even_mask[0] = 0;
  t.even_sign[0] = 1;
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (auto& pr : pairs) {
    PauliString prod = qm.image(1, 0, static_cast<Kind>(pr[0])) * qm.image(1, 0, static_cast<Kind>(pr[1]));
    // i * i^phase must be real: i xi_k xi_l -> (i * i^phase) letter.
    cplx f = cplx(0, 1) * PauliString::ipow(prod.phase);
    int slot = letter_slot(prod.letter(0));
    t.even_mask[slot] = (1ULL << pr[0]) | (1ULL << pr[1]);
    t.even_sign[slot] = f.real() > 0 ? 1 : -1;
  }
  // Odd: generator k -> sign_k letter_k, and the cubic term covers I.
  for (int k = 0; k < 3; ++k) {
    int slot = letter_slot(qm.letter[k]);
    t.odd_mask[slot] = 1ULL << k;
    t.odd_coeff[slot] = static_cast<double>(qm.sign[k]);
  }
  PauliString cube = qm.image(1, 0, Kind::p) * qm.image(1, 0, Kind::q) * qm.image(1, 0, Kind::r);
  require(cube.is_identity_word(), "quantization map is not orientation consistent");
  t.odd_mask[0] = 7;
  t.odd_coeff[0] = 1.0 / PauliString::ipow(cube.phase);
  return t;
}

}  // namespace detail

inline std::vector<QuantizationMap> QuantizationMap::search() {
  std::vector<QuantizationMap> hits;
  const char letters[3] = {'X', 'Y', 'Z'};
  int perm[3] = {0, 1, 2};
  const cplx i(0, 1);
  const Algebra a1 = Algebra::state(1);
  auto x = [&](Kind k) { return xi(a1, 0, k); };
  Mat P0 = (Mat(2, 2) << 1, 0, 0, 0).finished(), P1 = (Mat(2, 2) << 0, 0, 0, 1).finished();
  Mat Xp = (Mat(2, 2) << 0.5, 0.5, 0.5, 0.5).finished(), Xm = (Mat(2, 2) << 0.5, -0.5, -0.5, 0.5).finished();
  Mat Yp = (Mat(2, 2) << 0.5, -0.5 * i, 0.5 * i, 0.5).finished(), Ym = (Mat(2, 2) << 0.5, 0.5 * i, -0.5 * i, 0.5).finished();
  (void)P0;
  do {
    for (int s = 0; s < 8; ++s) {
      QuantizationMap qm;
      for (int k = 0; k < 3; ++k) {
        qm.letter[k] = letters[perm[k]];
        qm.sign[k] = (s >> k) & 1 ? -1 : 1;
      }
      PauliString cube = qm.image(1, 0, Kind::p) * qm.image(1, 0, Kind::q) * qm.image(1, 0, Kind::r);
      if (!(cube.is_identity_word() && PauliString::ipow(cube.phase + 1) == cplx(1))) continue;
      auto proj = [&](const Element& e) { return operator_from_symbol(e, qm).matrix; };
      auto half = [&](cplx sgn, Kind a, Kind b) { return (Element::scalar(a1, 1) + x(a) * x(b) * (sgn * i)) * 0.5; };
      bool ok = max_abs_diff(proj(half(-1, Kind::p, Kind::r)), P1) < 1e-12 &&
                max_abs_diff(proj(half(1, Kind::r, Kind::q)), Xp) < 1e-12 &&
                max_abs_diff(proj(half(-1, Kind::r, Kind::q)), Xm) < 1e-12 &&
                max_abs_diff(proj(half(1, Kind::p, Kind::q)), Yp) < 1e-12 &&
                max_abs_diff(proj(half(-1, Kind::p, Kind::q)), Ym) < 1e-12;
      if (ok) hits.push_back(qm);
    }
  } while (std::next_permutation(perm, perm + 3));
  return hits;
}

// Even (center) symbol of an operator.
inline WeylSymbol symbol_from_operator(const DenseOperator& op, const QuantizationMap& qm = QuantizationMap::canonical()) {
  const int n = op.qubits;
  auto lt = detail::letter_table(qm);
  Eigen::VectorXcd tr = pauli_traces(op.matrix, n);
  const double dim = static_cast<double>(std::size_t{1} << n);
  Algebra alg = Algebra::state(n);
  Element e(alg);
  for (Eigen::Index w = 0; w < tr.size(); ++w) {
    cplx c = tr(w) / dim;
    if (std::abs(c) < kPruneTol) continue;
    PauliString p = pauli_from_flat(n, static_cast<std::size_t>(w));
    uint64_t mask = 0;
    for (int j = 0; j < n; ++j) {
      int slot = detail::letter_slot(p.letter(j));
      if (slot == 0) continue;
      mask |= lt.even_mask[slot] << (3 * j);
      c *= cplx(0, static_cast<double>(lt.even_sign[slot]));
    }
    e.accumulate(mask, c);
  }
  e.prune();
  return WeylSymbol::wrap(e);
}

// Per-qubit odd (chord-dual) symbol: each tensor factor of the Pauli
// expansion is written with odd monomials only.
inline WeylSymbol dual_symbol_from_operator(const DenseOperator& op,
                                            const QuantizationMap& qm = QuantizationMap::canonical()) {
  const int n = op.qubits;
  auto lt = detail::letter_table(qm);
  Eigen::VectorXcd tr = pauli_traces(op.matrix, n);
  const double dim = static_cast<double>(std::size_t{1} << n);
  Algebra alg = Algebra::state(n);
  Element e(alg);
  for (Eigen::Index w = 0; w < tr.size(); ++w) {
    cplx c = tr(w) / dim;
    if (std::abs(c) < kPruneTol) continue;
    PauliString p = pauli_from_flat(n, static_cast<std::size_t>(w));
    uint64_t mask = 0;
    for (int j = 0; j < n; ++j) {
      int slot = detail::letter_slot(p.letter(j));
      mask |= lt.odd_mask[slot] << (3 * j);
      c *= lt.odd_coeff[slot];
    }
    e.accumulate(mask, c);
  }
  e.prune();
  return {e, e.parity(), n};
}

inline std::pair<Element, Element> parity_split(const Element& g) { return {g.even_part(), g.odd_part()}; }

// (2i)^n times the integral of state * dual over every state generator,
// highest qubit first, each triple as d xi_p d xi_q d xi_r.
inline cplx expectation(const Element& state, const Element& dual) {
  require(state.algebra() == dual.algebra(), "expectation needs symbols on the same qubits");
  const Algebra& alg = state.algebra();
  const int n = alg.qubits;
  std::vector<int> order;
  for (int j = n - 1; j >= 0; --j)
    for (Kind k : {Kind::p, Kind::q, Kind::r}) order.push_back(alg.position({j, k, Space::state}));
  return std::pow(cplx(0, 2), n) * (state * dual).integrate(order).scalar_part();
}
inline cplx expectation(const WeylSymbol& state, const WeylSymbol& dual) {
  return expectation(state.element, dual.element);
}

namespace detail {

// One-qubit star-product table: entry [a][b] is monomial a star monomial b,
// from the Berezin double integral with kernel e^{Delta_3}.
struct MoyalTable {
  std::array<std::array<std::vector<std::pair<uint64_t, cplx>>, 8>, 8> entry;
};

inline Element moyal_kernel(const Element& a, const Element& b) {
  const Algebra s9 = Algebra::scratch(9);
  Element d3(s9);
  for (int k = 0; k < 3; ++k) {
    Element x0 = Element::generator(s9, k), x1 = Element::generator(s9, 3 + k), x2 = Element::generator(s9, 6 + k);
    d3 += x1 * x2 + x2 * x0 + x0 * x1;
  }
  Element fa = a.embed(s9, [](int p) { return 3 + p; });
  Element fb = b.embed(s9, [](int p) { return 6 + p; });
  Element integrand = fa * fb * d3.exp();
  Element res = integrand.integrate({5, 4, 3, 8, 7, 6});
  Element out(Algebra::state(1));
  for (auto& [m, c] : res.terms()) out.accumulate(m, c);
  return out.prune();
}

inline const MoyalTable& moyal_table() {
  static const MoyalTable t = [] {
    MoyalTable tab;
    const Algebra a1 = Algebra::state(1);
    for (uint64_t a = 0; a < 8; ++a)
      for (uint64_t b = 0; b < 8; ++b) {
        Element r = moyal_kernel(Element::monomial(a1, a), Element::monomial(a1, b));
        for (auto& [m, c] : r.terms()) tab.entry[a][b].emplace_back(m, c);
      }
    return tab;
  }();
  return t;
}

}  // namespace detail

// Star product. Qubit factors are combined with the graded tensor rule
// (A0 A1) * (B0 B1) = (-1)^{|A1||B0|} (A0*B0)(A1*B1).
inline Element moyal_product(const Element& a, const Element& b) {
  require(a.algebra() == b.algebra(), "moyal_product needs symbols on the same qubits");
  const Algebra& alg = a.algebra();
  require(!alg.plain && !alg.aux, "moyal_product expects state-generator symbols");
  const int n = alg.qubits;
  const auto& tab = detail::moyal_table();
  Element out(alg);
  std::vector<std::pair<uint64_t, cplx>> cur, next;
  for (auto& [ma, ca] : a.terms()) {
    for (auto& [mb, cb] : b.terms()) {
      int parity = 0;
      int seen_b = 0;  // parity of B factors on lower qubits
      for (int j = 0; j < n; ++j) {
        int da = std::popcount((ma >> (3 * j)) & 7), db = std::popcount((mb >> (3 * j)) & 7);
        parity ^= (da & seen_b) & 1;
        seen_b ^= db & 1;
      }
      cur.assign(1, {0, ca * cb * (parity ? -1.0 : 1.0)});
      for (int j = 0; j < n && !cur.empty(); ++j) {
        const auto& e = tab.entry[(ma >> (3 * j)) & 7][(mb >> (3 * j)) & 7];
        next.clear();
        for (auto& [m0, c0] : cur)
          for (auto& [m1, c1] : e) next.emplace_back(m0 | (m1 << (3 * j)), c0 * c1);
        cur.swap(next);
      }
      for (auto& [m, c] : cur) out.accumulate(m, c);
    }
  }
  return out.prune();
}
inline WeylSymbol moyal_product(const WeylSymbol& a, const WeylSymbol& b) {
  return WeylSymbol::wrap(moyal_product(a.element, b.element));
}

// 2x2 matrix with Grassmann entries; entries commute with the matrix factors.
struct GrassmannMatrix {
  std::array<std::array<Element, 2>, 2> e;

  static GrassmannMatrix from(const Mat& m, const Element& s) {
    GrassmannMatrix g;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g.e[i][j] = s * m(i, j);
    return g;
  }
  static GrassmannMatrix identity(Algebra alg) { return from(Mat::Identity(2, 2), Element::scalar(alg, 1)); }

  GrassmannMatrix operator+(const GrassmannMatrix& o) const {
    GrassmannMatrix g;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g.e[i][j] = e[i][j] + o.e[i][j];
    return g;
  }
  GrassmannMatrix operator-(const GrassmannMatrix& o) const {
    GrassmannMatrix g;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g.e[i][j] = e[i][j] - o.e[i][j];
    return g;
  }
  GrassmannMatrix operator*(const GrassmannMatrix& o) const {
    GrassmannMatrix g;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g.e[i][j] = e[i][0] * o.e[0][j] + e[i][1] * o.e[1][j];
    return g;
  }
  // Left multiplication by a scalar Grassmann element.
  friend GrassmannMatrix operator*(const Element& s, const GrassmannMatrix& m) {
    GrassmannMatrix g;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g.e[i][j] = s * m.e[i][j];
    return g;
  }
  Element trace() const { return e[0][0] + e[1][1]; }
  // Tr(this * op) for an ordinary matrix op.
  Element trace_with(const Mat& op) const {
    Element t = e[0][0] * op(0, 0);
    t += e[0][1] * op(1, 0);
    t += e[1][0] * op(0, 1);
    t += e[1][1] * op(1, 1);
    return t;
  }
  GrassmannMatrix integrate(const std::vector<int>& order) const {
    GrassmannMatrix g;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g.e[i][j] = e[i][j].integrate(order);
    return g;
  }
  double max_abs() const {
    double r = 0;
    for (auto& row : e)
      for (auto& x : row) r = std::max(r, x.max_abs());
    return r;
  }
};

inline GrassmannMatrix grassmann_exp(const GrassmannMatrix& a) {
  Algebra alg = a.e[0][0].algebra();
  GrassmannMatrix result = GrassmannMatrix::identity(alg), term = result;
  for (int k = 1; k <= alg.size() + 1; ++k) {
    GrassmannMatrix t = term * a;
    for (auto& row : t.e)
      for (auto& x : row) x *= cplx(1.0 / k);
    term = t;
    if (term.max_abs() == 0.0) break;
    result = result + term;
  }
  return result;
}

using Triple = std::array<Element, 3>;

inline Triple aux_triple(Algebra alg, int qubit) {
  return {rho(alg, qubit, Kind::p), rho(alg, qubit, Kind::q), rho(alg, qubit, Kind::r)};
}
inline Triple state_triple(Algebra alg, int qubit) {
  return {xi(alg, qubit, Kind::p), xi(alg, qubit, Kind::q), xi(alg, qubit, Kind::r)};
}

// exp(i sum_k xi^_k rho_k) with xi^_k the quantized generator of kind k.
inline GrassmannMatrix translation_operator(const Triple& r, const QuantizationMap& qm = QuantizationMap::canonical()) {
  Algebra alg = r[0].algebra();
  GrassmannMatrix a = GrassmannMatrix::from(Mat::Zero(2, 2), Element::zero(alg));
  for (int k = 0; k < 3; ++k)
    a = a + GrassmannMatrix::from(qm.image(1, 0, static_cast<Kind>(k)).matrix() * cplx(0, 1), r[k]);
  return grassmann_exp(a);
}

// Integral of exp(-i sum xi_k rho'_k) T(rho') over the auxiliary triple rho'
// (differentials d rho'_r d rho'_q d rho'_p).
inline GrassmannMatrix reflection_operator(const Triple& x, const Triple& rp, const QuantizationMap& qm = QuantizationMap::canonical()) {
  Algebra alg = x[0].algebra();
  Element expo(alg);
  for (int k = 0; k < 3; ++k) expo += x[k] * rp[k] * cplx(0, -1);
  GrassmannMatrix t = translation_operator(rp, qm);
  std::vector<int> order;
  for (int k : {2, 1, 0}) {
    require(rp[k].terms().size() == 1 && std::popcount(rp[k].terms().begin()->first) == 1,
            "reflection_operator needs single-generator auxiliaries");
    order.push_back(std::countr_zero(rp[k].terms().begin()->first));
  }
  return (expo.exp() * t).integrate(order);
}

}  // namespace grasswig
