#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "grasswig/errors.hpp"
#include "grasswig/grassmann.hpp"
#include "grasswig/oracle.hpp"
#include "grasswig/pauli.hpp"

namespace grasswig {

// Binary n-vectors are stored as bitmasks, qubit j at bit j.
using BitVec = uint32_t;

namespace detail {
inline int dot2(BitVec a, BitVec b) { return std::popcount(a & b) & 1; }
}  // namespace detail

// i^{-lp.lq} Z^lp X^lq.
inline DenseOperator translation2(BitVec lp, BitVec lq, int n) {
  PauliString z{n, 0, lp, 0}, x{n, lq, 0, 0};
  PauliString t = z * x;
  t.phase = ((t.phase - std::popcount(lp & lq)) % 4 + 4) % 4;
  return {n, t.matrix()};
}

// Symplectic Fourier transform of the translations:
// R(x) = 2^-n sum_l (-1)^{l_p.x_q + l_q.x_p} T(l).
inline DenseOperator reflection2(BitVec xp, BitVec xq, int n) {
  std::size_t d = std::size_t{1} << n;
  Mat acc = Mat::Zero(d, d);
  for (BitVec lp = 0; lp < (1u << n); ++lp)
    for (BitVec lq = 0; lq < (1u << n); ++lq) {
      double s = (detail::dot2(lp, xq) ^ detail::dot2(lq, xp)) ? -1.0 : 1.0;
      acc += s * translation2(lp, lq, n).matrix;
    }
  return {n, acc / static_cast<double>(d)};
}

// Closed form for one qubit: 1/2[I + (-1)^xq Z + (-1)^xp X + i(-1)^{xp+xq} X Z].
inline Mat reflection2_closed(int xp, int xq) {
  Mat I = Mat::Identity(2, 2);
  Mat X = PauliString::parse("X").matrix(), Z = PauliString::parse("Z").matrix();
  double sq = xq ? -1.0 : 1.0, sp = xp ? -1.0 : 1.0;
  return 0.5 * (I + sq * Z + sp * X + cplx(0, sp * sq) * X * Z);
}

// Grid over (x_p, x_q): row index x_q, column index x_p, each an n-bit mask
// with qubit j at bit j.
struct Wigner2 {
  int qubits = 0;
  Eigen::MatrixXd values;

  double at(BitVec xp, BitVec xq) const { return values(xq, xp); }
  double& at(BitVec xp, BitVec xq) { return values(xq, xp); }
  double total() const { return values.sum(); }
  double min() const { return values.minCoeff(); }

  std::string to_csv() const {
    std::ostringstream os;
    os.precision(12);
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      for (Eigen::Index j = 0; j < values.cols(); ++j) {
        double v = std::abs(values(i, j)) < 1e-15 ? 0.0 : values(i, j);
        os << (j ? "," : "") << v;
      }
      os << "\n";
    }
    return os.str();
  }

  bool approx_equal(const Wigner2& o, double tol = 1e-12) const {
    return qubits == o.qubits && (values - o.values).cwiseAbs().maxCoeff() <= tol;
  }
};

inline Wigner2 wigner2(const DenseOperator& rho) {
  const int n = rho.qubits;
  const std::size_t d = std::size_t{1} << n;
  Wigner2 w{n, Eigen::MatrixXd::Zero(d, d)};
  for (BitVec xp = 0; xp < d; ++xp)
    for (BitVec xq = 0; xq < d; ++xq)
      w.at(xp, xq) = (reflection2(xp, xq, n).matrix.adjoint() * rho.matrix).trace().real() / static_cast<double>(d);
  return w;
}

// Sum of the magnitudes of the negative cells.
inline double wigner_negativity(const Wigner2& w) { return (-w.values).cwiseMax(0.0).sum(); }

// The six one-qubit stabilizer supports of the two-generator grid.
enum class Support { p0, p1, q0, q1, p_eq_q, p_ne_q };

inline std::string support_name(Support s) {
  switch (s) {
    case Support::p0: return "delta(p,0)";
    case Support::p1: return "delta(p,1)";
    case Support::q0: return "delta(q,0)";
    case Support::q1: return "delta(q,1)";
    case Support::p_eq_q: return "delta(p,q)";
    case Support::p_ne_q: return "delta(p,1+q)";
  }
  return "?";
}

inline bool support_contains(Support s, int xp, int xq) {
  switch (s) {
    case Support::p0: return xp == 0;
    case Support::p1: return xp == 1;
    case Support::q0: return xq == 0;
    case Support::q1: return xq == 1;
    case Support::p_eq_q: return xp == xq;
    case Support::p_ne_q: return xp != xq;
  }
  return false;
}

// Unnormalized even symbol 1 + s i xi_k xi_l for each support, matched by
// quantizing the symbol and reading its two-generator grid.
struct TwoThreeEntry {
  Support support;
  Kind k, l;
  int sign;
};

inline const std::array<TwoThreeEntry, 6>& two_three_table() {
  static const std::array<TwoThreeEntry, 6> t{{
      {Support::p1, Kind::r, Kind::q, -1},
      {Support::p0, Kind::r, Kind::q, +1},
      {Support::q1, Kind::p, Kind::r, -1},
      {Support::q0, Kind::p, Kind::r, +1},
      {Support::p_eq_q, Kind::p, Kind::q, +1},
      {Support::p_ne_q, Kind::p, Kind::q, -1},
  }};
  return t;
}

inline Element two_three_map(Support s) {
  Algebra a1 = Algebra::state(1);
  for (auto& e : two_three_table())
    if (e.support == s) return Element::scalar(a1, 1) + xi(a1, 0, e.k) * xi(a1, 0, e.l) * cplx(0, e.sign);
  throw ContractError("unknown support");
}

inline Support three_two_map(const Element& g) {
  for (auto& e : two_three_table())
    if (approx_equal(g, two_three_map(e.support))) return e.support;
  throw ContractError("symbol is not one of the six stabilizer bilinears");
}

inline std::optional<Support> support_of(const Wigner2& w, double tol = 1e-12) {
  require(w.qubits == 1, "support_of expects a one-qubit grid");
  for (auto& e : two_three_table()) {
    bool ok = true;
    for (int xp = 0; xp < 2; ++xp)
      for (int xq = 0; xq < 2; ++xq) {
        double expect = support_contains(e.support, xp, xq) ? 0.5 : 0.0;
        ok &= std::abs(w.at(xp, xq) - expect) <= tol;
      }
    if (ok) return e.support;
  }
  return std::nullopt;
}

// Per-qubit stabilizer class: p (X-like), q (Z-like), r (Y-like), or '?'
// when the reduced state has no single-qubit stabilizer.
using StateClass = std::string;

inline char qubit_class(const DenseOperator& rho, int qubit, double tol = 1e-9) {
  const char letters[3] = {'X', 'Z', 'Y'};
  const char kinds[3] = {'p', 'q', 'r'};
  for (int i = 0; i < 3; ++i) {
    PauliString s = PauliString::single(rho.qubits, qubit, letters[i]);
    double v = (s.matrix() * rho.matrix).trace().real();
    if (std::abs(std::abs(v) - 1.0) < tol) return kinds[i];
  }
  return '?';
}

inline StateClass classify_state(const DenseOperator& rho) {
  StateClass c;
  for (int j = 0; j < rho.qubits; ++j) c += qubit_class(rho, j);
  return c;
}

// Affine map W'(x) = W(M x + r) on the coordinates of the touched qubits.
struct AffineRule {
  std::string gate;
  std::vector<std::vector<int>> matrix;  // mod-2 entries
  std::vector<int> r;
  bool translated() const { return std::any_of(r.begin(), r.end(), [](int v) { return v != 0; }); }
  std::string describe() const {
    std::string s = gate + (translated() ? " M+r r=(" : " M r=(");
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + std::to_string(r[i]);
    return s + ")";
  }
  bool operator<(const AffineRule& o) const { return describe() < o.describe(); }
  bool operator==(const AffineRule& o) const { return describe() == o.describe(); }
};

inline const std::vector<std::vector<int>>& stability_matrix(Gate g) {
  static const std::vector<std::vector<int>> h{{0, 1}, {-1, 0}};
  static const std::vector<std::vector<int>> p{{1, 1}, {0, 1}};
  // Coordinates (x_p control, x_p target, x_q control, x_q target).
  static const std::vector<std::vector<int>> c{{1, -1, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 1, 1}};
  switch (g) {
    case Gate::H: return h;
    case Gate::P: return p;
    case Gate::CNOT: return c;
    default: throw ClassificationError("no stability matrix for a non-Clifford gate");
  }
}

// Translation demanded by the (target class, control class) pair for CNOT.
inline bool cnot_table_translates(char target, char control) {
  return (target == 'p' && control == 'r') || (target == 'r' && control == 'q');
}

// Rule for a gate given the classes of the qubits it touches. variant picks
// among the equivalent unit translations.
inline AffineRule state_dependent_rule(const GateOp& op, const StateClass& classes, int variant = 0) {
  auto cls = [&](int q) {
    require(q >= 0 && q < static_cast<int>(classes.size()), "state class missing for qubit");
    char c = classes[q];
    if (c != 'p' && c != 'q' && c != 'r') throw StateError("qubit " + std::to_string(q) + " has no single-qubit stabilizer");
    return c;
  };
  AffineRule rule{gate_name(op.gate), stability_matrix(op.gate), {}};
  if (op.gate == Gate::CNOT) {
    rule.r.assign(4, 0);
    if (cnot_table_translates(cls(op.b), cls(op.a))) rule.r[variant % 4] = 1;
  } else {
    rule.r.assign(2, 0);
    if (cls(op.a) == 'r') rule.r[variant % 2] = 1;
  }
  return rule;
}

inline Wigner2 apply_rule(const Wigner2& w, const GateOp& op, const AffineRule& rule) {
  const int n = w.qubits;
  check_targets(op, n);
  std::vector<int> qs = op.gate == Gate::CNOT ? std::vector<int>{op.a, op.b} : std::vector<int>{op.a};
  const int m = static_cast<int>(qs.size());
  Wigner2 out = w;
  const BitVec d = 1u << n;
  for (BitVec xp = 0; xp < d; ++xp)
    for (BitVec xq = 0; xq < d; ++xq) {
      std::vector<int> v(2 * m);
      for (int i = 0; i < m; ++i) {
        v[i] = (xp >> qs[i]) & 1;
        v[m + i] = (xq >> qs[i]) & 1;
      }
      BitVec yp = xp, yq = xq;
      for (int i = 0; i < 2 * m; ++i) {
        int s = rule.r[i];
        for (int j = 0; j < 2 * m; ++j) s += rule.matrix[i][j] * v[j];
        int bit = ((s % 2) + 2) % 2;
        BitVec mask = 1u << qs[i % m];
        BitVec& tgt = i < m ? yp : yq;
        tgt = bit ? (tgt | mask) : (tgt & ~mask);
      }
      out.at(xp, xq) = w.at(yp, yq);
    }
  return out;
}

inline Wigner2 evolve_state_dependent(const Wigner2& w, const GateOp& op, const StateClass& classes, int variant = 0) {
  return apply_rule(w, op, state_dependent_rule(op, classes, variant));
}

// Binary stabilizer tableau, stabilizer rows only.
struct Tableau {
  int n = 0;
  std::vector<BitVec> x, z;
  std::vector<int> r;

  static Tableau zero_state(int n) {
    require(n >= 1 && n <= 32, "tableau qubit count out of range");
    Tableau t{n, std::vector<BitVec>(n, 0), std::vector<BitVec>(n, 0), std::vector<int>(n, 0)};
    for (int i = 0; i < n; ++i) t.z[i] = 1u << i;
    return t;
  }

  PauliString row(int i) const { return {n, x[i], z[i], 2 * r[i]}; }

  // All 2^n - 1 non-identity signed elements of the generated group.
  std::vector<PauliString> group() const {
    std::vector<PauliString> out;
    for (uint64_t s = 1; s < (uint64_t{1} << n); ++s) {
      PauliString p = PauliString::identity(n);
      for (int i = 0; i < n; ++i)
        if ((s >> i) & 1) p = p * row(i);
      out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  bool rows_commute() const {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (!row(i).commutes(row(j))) return false;
    return true;
  }
};

inline void tableau_apply_inplace(Tableau& t, const GateOp& op) {
  check_targets(op, t.n);
  const BitVec a = 1u << op.a;
  for (int i = 0; i < t.n; ++i) {
    int xa = (t.x[i] & a) != 0, za = (t.z[i] & a) != 0;
    switch (op.gate) {
      case Gate::H:
        t.r[i] ^= xa & za;
        t.x[i] = (t.x[i] & ~a) | (za ? a : 0);
        t.z[i] = (t.z[i] & ~a) | (xa ? a : 0);
        break;
      case Gate::P:
        t.r[i] ^= xa & za;
        if (xa) t.z[i] ^= a;
        break;
      case Gate::CNOT: {
        const BitVec b = 1u << op.b;
        int xb = (t.x[i] & b) != 0, zb = (t.z[i] & b) != 0;
        t.r[i] ^= xa & zb & (xb ^ za ^ 1);
        if (xa) t.x[i] ^= b;
        if (zb) t.z[i] ^= a;
        break;
      }
      case Gate::T: throw ClassificationError("tableau engine refuses t: not a Clifford gate (hbar1_general)");
    }
  }
}

inline Tableau tableau_apply(Tableau t, const GateOp& op) {
  tableau_apply_inplace(t, op);
  return t;
}

inline Tableau run_tableau(const Circuit& c) {
  Tableau t = Tableau::zero_state(c.qubits);
  for (auto& g : c.gates) tableau_apply_inplace(t, g);
  return t;
}

// One-qubit projectors onto the +-1 eigenstates of X, Y, Z.
inline DenseOperator eigenprojector(char letter, int sign) {
  Mat p = PauliString::parse(std::string(1, letter)).matrix();
  return {1, 0.5 * (Mat::Identity(2, 2) + static_cast<double>(sign) * p)};
}

struct EnsembleMember {
  std::string label;  // "X+", "Z-", ...
  double weight = 0;
  DenseOperator state;
};

struct ContextCoefficients {
  double x_plus = 0.25, x_minus = 0.25, z_plus = 0.25, z_minus = 0.25, y = 0.125;
};

inline std::vector<EnsembleMember> xz_decomposition(const ContextCoefficients& c) {
  return {{"X+", c.x_plus, eigenprojector('X', 1)},
          {"X-", c.x_minus, eigenprojector('X', -1)},
          {"Z+", c.z_plus, eigenprojector('Z', 1)},
          {"Z-", c.z_minus, eigenprojector('Z', -1)}};
}

inline std::vector<EnsembleMember> xyz_decomposition(const ContextCoefficients& c) {
  return {{"X+", c.x_plus, eigenprojector('X', 1)},
          {"X-", c.x_minus, eigenprojector('X', -1)},
          {"Y+", c.y, eigenprojector('Y', 1)},
          {"Y-", c.y, eigenprojector('Y', -1)},
          {"Z+", c.z_plus - c.y, eigenprojector('Z', 1)},
          {"Z-", c.z_minus - c.y, eigenprojector('Z', -1)}};
}

inline DenseOperator ensemble_density(const std::vector<EnsembleMember>& e) {
  Mat m = Mat::Zero(2, 2);
  for (auto& k : e) m += k.weight * k.state.matrix;
  return {1, m};
}

struct ContextReport {
  Gate gate = Gate::H;
  double density_difference = 0;
  double evolved_difference = 0;
  double wigner_mismatch = 0;  // worst member: rule output vs oracle grid
  std::vector<std::string> rules_first, rules_second;
  bool rule_sets_differ = false;
};

// Evolves both ensembles member by member with the state-dependent rules.
inline ContextReport preparation_context_demo(const ContextCoefficients& c, Gate gate = Gate::H) {
  const double tol = 1e-12;
  require(c.x_plus >= 0 && c.x_minus >= 0 && c.z_plus >= 0 && c.z_minus >= 0 && c.y >= 0,
          "ensemble coefficients must be non-negative");
  require(std::abs(c.x_plus + c.x_minus + c.z_plus + c.z_minus - 1.0) < 1e-12, "ensemble coefficients must sum to one");
  require(c.z_plus >= c.y && c.z_minus >= c.y, "second decomposition needs c_Z+- >= c_Y");
  require(gate == Gate::H || gate == Gate::P, "demo gate must be a one-qubit Clifford gate");
  GateOp op{gate, 0, -1};
  ContextReport rep;
  rep.gate = gate;
  auto run = [&](const std::vector<EnsembleMember>& e, std::vector<std::string>& rules) {
    Mat evolved = Mat::Zero(2, 2);
    for (auto& m : e) {
      if (m.weight <= tol) continue;
      AffineRule rule = state_dependent_rule(op, classify_state(m.state));
      rules.push_back(rule.describe());
      Wigner2 w = apply_rule(wigner2(m.state), op, rule);
      DenseOperator out = dense_apply(m.state, op);
      rep.wigner_mismatch = std::max(rep.wigner_mismatch, (w.values - wigner2(out).values).cwiseAbs().maxCoeff());
      evolved += m.weight * out.matrix;
    }
    std::sort(rules.begin(), rules.end());
    return evolved;
  };
  auto a = xz_decomposition(c), b = xyz_decomposition(c);
  rep.density_difference = max_abs_diff(ensemble_density(a).matrix, ensemble_density(b).matrix);
  Mat ea = run(a, rep.rules_first), eb = run(b, rep.rules_second);
  rep.evolved_difference = max_abs_diff(ea, eb);
  rep.rule_sets_differ = rep.rules_first != rep.rules_second;
  return rep;
}

// Amplitudes of a one-qubit ket in the computational (q) basis or the X (p)
// basis, whichever has both amplitudes of modulus 1/sqrt(2); phases are
// reported relative to the first amplitude.
struct MixedRepresentation {
  char basis = '?';
  std::array<cplx, 2> amplitudes{};
};

inline std::optional<MixedRepresentation> mixed_representation(const Eigen::Vector2cd& ket, double tol = 1e-12) {
  const double s = 1.0 / std::sqrt(2.0);
  Mat hm = single_qubit_matrix(Gate::H);
  for (char basis : {'q', 'p'}) {
    Eigen::Vector2cd v = basis == 'q' ? Eigen::Vector2cd(ket) : Eigen::Vector2cd(hm * ket);
    if (std::abs(std::abs(v(0)) - s) > tol || std::abs(std::abs(v(1)) - s) > tol) continue;
    cplx g = std::conj(v(0)) / std::abs(v(0));
    return MixedRepresentation{basis, {v(0) * g, v(1) * g}};
  }
  return std::nullopt;
}

}  // namespace grasswig
