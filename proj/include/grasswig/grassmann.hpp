#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "grasswig/errors.hpp"

namespace grasswig {

using cplx = std::complex<double>;

inline constexpr double kPruneTol = 1e-12;
inline constexpr int kMaxQubits = 10;

enum class Kind : int { p = 0, q = 1, r = 2 };
enum class Space : int { state = 0, auxiliary = 1 };
enum class Side { left, right };
enum class Parity { even, odd, mixed };
enum class Direction { forward, inverse };

inline char kind_char(Kind k) { return "pqr"[static_cast<int>(k)]; }

struct GeneratorIndex {
  int qubit = 0;
  Kind kind = Kind::p;
  Space space = Space::state;
};

// Generator layout. Qubit algebras put the state triple of qubit j at
// 3j+{p,q,r}; with auxiliaries enabled the same layout repeats from 3n.
// State and auxiliary generators commute with each other and anticommute
// within their own block. A plain algebra has m generators in one block.
struct Algebra {
  int qubits = 0;
  bool aux = false;
  int plain = 0;

  static Algebra state(int n) { return {n, false, 0}; }
  static Algebra extended(int n) { return {n, true, 0}; }
  static Algebra scratch(int m) { return {0, false, m}; }

  int size() const { return plain ? plain : (aux ? 6 * qubits : 3 * qubits); }
  int split() const { return plain ? plain : 3 * qubits; }
  uint64_t full_mask() const { return size() >= 64 ? ~0ULL : ((1ULL << size()) - 1); }
  uint64_t state_mask() const { return split() >= 64 ? ~0ULL : ((1ULL << split()) - 1); }
  uint64_t aux_mask() const { return full_mask() & ~state_mask(); }

  int position(GeneratorIndex g) const {
    require(!plain, "generator index on a plain algebra");
    require(g.qubit >= 0 && g.qubit < qubits, "qubit index out of range");
    if (g.space == Space::auxiliary) require(aux, "auxiliary generators not allocated");
    return (g.space == Space::auxiliary ? 3 * qubits : 0) + 3 * g.qubit + static_cast<int>(g.kind);
  }

  GeneratorIndex index_of(int pos) const {
    GeneratorIndex g;
    g.space = pos >= 3 * qubits ? Space::auxiliary : Space::state;
    int local = pos - (g.space == Space::auxiliary ? 3 * qubits : 0);
    g.qubit = local / 3;
    g.kind = static_cast<Kind>(local % 3);
    return g;
  }

  bool operator==(const Algebra&) const = default;
};

namespace detail {

// Parity of the number of transpositions needed to sort the concatenation
// of monomial a followed by monomial b, counting only pairs in one block.
inline int inversion_parity(uint64_t a, uint64_t b) {
  int s = 0;
  while (b) {
    int j = std::countr_zero(b);
    s += std::popcount(j >= 63 ? 0ULL : (a >> (j + 1)));
    b &= b - 1;
  }
  return s & 1;
}

inline int reorder_sign(uint64_t a, uint64_t b, uint64_t lo_mask) {
  int par = inversion_parity(a & lo_mask, b & lo_mask) ^ inversion_parity(a & ~lo_mask, b & ~lo_mask);
  return par ? -1 : 1;
}

inline std::string format_coeff(cplx c) {
  char buf[96];
  double re = std::abs(c.real()) < kPruneTol ? 0.0 : c.real();
  double im = std::abs(c.imag()) < kPruneTol ? 0.0 : c.imag();
  if (im == 0.0) {
    std::snprintf(buf, sizeof buf, "%.12g", re);
  } else if (re == 0.0) {
    std::snprintf(buf, sizeof buf, "%.12gi", im);
  } else {
    std::snprintf(buf, sizeof buf, "(%.12g%+.12gi)", re, im);
  }
  return buf;
}

}  // namespace detail

class Element {
 public:
  Element() = default;
  explicit Element(Algebra alg) : alg_(alg) {
    require(alg.size() <= 64, "generator capacity exceeded");
  }

  static Element zero(Algebra alg) { return Element(alg); }
  static Element scalar(Algebra alg, cplx c) {
    Element e(alg);
    e.add_term(0, c);
    return e;
  }
  static Element generator(Algebra alg, int pos, cplx c = 1.0) {
    require(pos >= 0 && pos < alg.size(), "generator position out of range");
    Element e(alg);
    e.add_term(1ULL << pos, c);
    return e;
  }
  static Element generator(Algebra alg, GeneratorIndex g, cplx c = 1.0) {
    return generator(alg, alg.position(g), c);
  }
  // Canonical monomial with the given mask and coefficient.
  static Element monomial(Algebra alg, uint64_t mask, cplx c = 1.0) {
    require((mask & ~alg.full_mask()) == 0, "monomial outside algebra");
    Element e(alg);
    e.add_term(mask, c);
    return e;
  }

  const Algebra& algebra() const { return alg_; }
  const std::map<uint64_t, cplx>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  cplx coeff(uint64_t mask) const {
    auto it = terms_.find(mask);
    return it == terms_.end() ? cplx(0.0) : it->second;
  }
  cplx scalar_part() const { return coeff(0); }

  // Accumulate without pruning; call prune() once done.
  void accumulate(uint64_t mask, cplx c) { terms_[mask] += c; }
  void add_term(uint64_t mask, cplx c) {
    accumulate(mask, c);
    prune();
  }
  Element& prune() {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (std::abs(it->second) < kPruneTol) {
        it = terms_.erase(it);
      } else {
        ++it;
      }
    }
    return *this;
  }

  Parity parity() const {
    bool ev = false, od = false;
    for (auto& [m, c] : terms_) (std::popcount(m) % 2 ? od : ev) = true;
    if (ev && od) return Parity::mixed;
    return od ? Parity::odd : Parity::even;
  }

  Element filtered(const std::function<bool(uint64_t)>& keep) const {
    Element e(alg_);
    for (auto& [m, c] : terms_)
      if (keep(m)) e.terms_.emplace(m, c);
    return e;
  }
  Element even_part() const {
    return filtered([](uint64_t m) { return std::popcount(m) % 2 == 0; });
  }
  Element odd_part() const {
    return filtered([](uint64_t m) { return std::popcount(m) % 2 == 1; });
  }

  Element operator-() const {
    Element e(alg_);
    for (auto& [m, c] : terms_) e.terms_.emplace(m, -c);
    return e;
  }
  Element& operator+=(const Element& o) {
    check_same(o);
    for (auto& [m, c] : o.terms_) terms_[m] += c;
    return prune();
  }
  Element& operator-=(const Element& o) {
    check_same(o);
    for (auto& [m, c] : o.terms_) terms_[m] -= c;
    return prune();
  }
  Element& operator*=(cplx s) {
    for (auto& [m, c] : terms_) c *= s;
    return prune();
  }
  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(Element a, cplx s) { return a *= s; }
  friend Element operator*(cplx s, Element a) { return a *= s; }
  friend Element operator+(Element a, cplx s) {
    a.add_term(0, s);
    return a;
  }
  friend Element operator+(cplx s, Element a) { return a + s; }
  friend Element operator-(Element a, cplx s) { return a + (-s); }
  friend Element operator-(cplx s, const Element& a) { return (-a) + s; }

  friend Element operator*(const Element& a, const Element& b) {
    a.check_same(b);
    Element e(a.alg_);
    uint64_t lo = a.alg_.state_mask();
    for (auto& [ma, ca] : a.terms_) {
      for (auto& [mb, cb] : b.terms_) {
        if (ma & mb) continue;
        e.terms_[ma | mb] += static_cast<double>(detail::reorder_sign(ma, mb, lo)) * ca * cb;
      }
    }
    return e.prune();
  }

  Element derivative(int pos, Side side) const {
    require(pos >= 0 && pos < alg_.size(), "derivative index out of range");
    uint64_t bit = 1ULL << pos;
    uint64_t block = (bit & alg_.state_mask()) ? alg_.state_mask() : alg_.aux_mask();
    uint64_t below = bit - 1;
    uint64_t above = ~(below | bit);
    Element e(alg_);
    for (auto& [m, c] : terms_) {
      if (!(m & bit)) continue;
      uint64_t pass = (side == Side::left ? (m & below) : (m & above)) & block;
      e.terms_[m & ~bit] += (std::popcount(pass) % 2 ? -c : c);
    }
    return e.prune();
  }
  Element derivative(GeneratorIndex g, Side side) const { return derivative(alg_.position(g), side); }

  // Differentials are listed as written, left to right; each acts as a right
  // derivative in that sequence, so the innermost (rightmost in the integrand)
  // variable must come first.
  Element integrate(const std::vector<int>& order) const {
    std::set<int> seen;
    for (int p : order) require(seen.insert(p).second, "duplicate generator in integration order");
    Element e = *this;
    for (int p : order) e = e.derivative(p, Side::right);
    return e;
  }

  Element conjugate() const {
    Element e(alg_);
    uint64_t lo = alg_.state_mask();
    for (auto& [m, c] : terms_) {
      int ks = std::popcount(m & lo), ka = std::popcount(m & ~lo);
      int rev = (ks * (ks - 1) / 2 + ka * (ka - 1) / 2) % 2;
      e.terms_.emplace(m, rev ? -std::conj(c) : std::conj(c));
    }
    return e;
  }

  // exp of an element: e^{c0} times the truncating series of the rest.
  Element exp() const {
    cplx c0 = scalar_part();
    Element nil = filtered([](uint64_t m) { return m != 0; });
    Element result = scalar(alg_, 1.0);
    Element term = scalar(alg_, 1.0);
    for (int k = 1; k <= alg_.size() + 1; ++k) {
      term = term * nil * cplx(1.0 / k);
      if (term.is_zero()) break;
      result += term;
    }
    return result * std::exp(c0);
  }

  // Algebra homomorphism fixed by the images of the generators, applied to
  // each canonical monomial in ascending order.
  Element substitute(const std::vector<Element>& images) const {
    require(static_cast<int>(images.size()) == alg_.size(), "substitute needs one image per generator");
    Algebra target = images.empty() ? alg_ : images.front().algebra();
    Element out(target);
    for (auto& [m, c] : terms_) {
      Element prod = scalar(target, c);
      for (uint64_t b = m; b; b &= b - 1) prod = prod * images[std::countr_zero(b)];
      out += prod;
    }
    return out;
  }

  // Relabel generators into another algebra; reorder signs are recomputed.
  Element embed(Algebra target, const std::function<int(int)>& posmap) const {
    Element out(target);
    uint64_t lo = target.state_mask();
    for (auto& [m, c] : terms_) {
      uint64_t acc = 0;
      int sign = 1;
      for (uint64_t b = m; b; b &= b - 1) {
        uint64_t nb = 1ULL << posmap(std::countr_zero(b));
        sign *= detail::reorder_sign(acc, nb, lo);
        acc |= nb;
      }
      out.terms_[acc] += static_cast<double>(sign) * c;
    }
    return out.prune();
  }

  // Same masks, different algebra tag (state <-> extended with no aux terms).
  Element retag(Algebra target) const {
    Element e(target);
    for (auto& [m, c] : terms_) {
      require((m & ~target.full_mask()) == 0, "retag would drop generators");
      e.terms_.emplace(m, c);
    }
    return e;
  }

  double max_abs() const {
    double r = 0;
    for (auto& [m, c] : terms_) r = std::max(r, std::abs(c));
    return r;
  }

  std::string generator_name(int pos) const {
    if (alg_.plain) return "ξ[" + std::to_string(pos) + "]";
    GeneratorIndex g = alg_.index_of(pos);
    return std::string(g.space == Space::state ? "ξ[" : "ρ[") + kind_char(g.kind) + std::to_string(g.qubit) + "]";
  }

  // Canonical text form, terms sorted by mask: coeff*ξ[p0]ξ[q0] + ...
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto& [m, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += detail::format_coeff(c);
      for (uint64_t b = m; b; b &= b - 1) s += (b == m ? "*" : "") + generator_name(std::countr_zero(b));
    }
    return s;
  }

 private:
  void check_same(const Element& o) const { require(alg_ == o.alg_, "elements over different generator sets"); }

  Algebra alg_;
  std::map<uint64_t, cplx> terms_;
};

inline Element multiply(const Element& a, const Element& b) { return a * b; }
inline Element derivative(const Element& g, GeneratorIndex l, Side side) { return g.derivative(l, side); }
inline Element conjugate(const Element& g) { return g.conjugate(); }

inline Element berezin_integrate(const Element& g, const std::vector<GeneratorIndex>& order) {
  std::vector<int> pos;
  pos.reserve(order.size());
  for (auto& gi : order) pos.push_back(g.algebra().position(gi));
  return g.integrate(pos);
}

inline double max_abs_diff(const Element& a, const Element& b) { return (a - b).max_abs(); }
inline bool approx_equal(const Element& a, const Element& b, double tol = 1e-12) {
  return max_abs_diff(a, b) <= tol;
}

// Shorthand for state generators of an n-qubit algebra.
inline Element xi(Algebra alg, int qubit, Kind k) { return Element::generator(alg, GeneratorIndex{qubit, k, Space::state}); }
inline Element rho(Algebra alg, int qubit, Kind k) {
  return Element::generator(alg, GeneratorIndex{qubit, k, Space::auxiliary});
}

// Differentials d xi_r d xi_q d xi_p for one triple, in application order.
inline std::vector<int> triple_rqp(const Algebra& alg, int qubit, Space sp) {
  return {alg.position({qubit, Kind::r, sp}), alg.position({qubit, Kind::q, sp}), alg.position({qubit, Kind::p, sp})};
}

// Grassmann Fourier transform between auxiliary-generator elements g~(rho)
// and state-generator elements g(xi). Forward: integral of e^{i xi.rho} g~
// over each auxiliary triple. Inverse: (-i)^n times the integral of
// e^{-i xi.rho} g over each state triple. The (-i) per triple is what makes
// the pair mutually inverse. Results live in the extended algebra.
inline Element fourier(const Element& g, Direction dir) {
  const Algebra& a0 = g.algebra();
  require(!a0.plain, "fourier needs a qubit algebra");
  int n = a0.qubits;
  Algebra ext = Algebra::extended(n);
  Element h = a0.aux ? g : g.retag(ext);
  bool has_state = false, has_aux = false;
  for (auto& [m, c] : h.terms()) {
    has_state |= (m & ext.state_mask()) != 0;
    has_aux |= (m & ext.aux_mask()) != 0;
  }
  require(!(has_state && has_aux), "fourier input mixes state and auxiliary generators");
  if (dir == Direction::forward) require(!has_state, "forward fourier expects an auxiliary-generator element");
  if (dir == Direction::inverse) require(!has_aux, "inverse fourier expects a state-generator element");

  cplx phase = dir == Direction::forward ? cplx(0, 1) : cplx(0, -1);
  Element expo = Element::zero(ext);
  for (int j = 0; j < n; ++j)
    for (Kind k : {Kind::p, Kind::q, Kind::r}) expo += xi(ext, j, k) * rho(ext, j, k) * phase;
  Element integrand = expo.exp() * h;
  std::vector<int> order;
  Space sp = dir == Direction::forward ? Space::auxiliary : Space::state;
  for (int j = 0; j < n; ++j)
    for (int p : triple_rqp(ext, j, sp)) order.push_back(p);
  if (dir == Direction::forward) return integrand.integrate(order);
  // Odd inputs on an odd number of triples pick up one extra sign.
  cplx f = std::pow(cplx(0, -1), n);
  Element ev = (expo.exp() * h.even_part()).integrate(order) * f;
  Element od = (expo.exp() * h.odd_part()).integrate(order) * (n % 2 ? -f : f);
  return ev + od;
}

// Pfaffian by skew-symmetric Gaussian elimination with pivoting.
inline double pfaffian(Eigen::MatrixXd a) {
  const int m = static_cast<int>(a.rows());
  if (m % 2) return 0.0;
  double pf = 1.0;
  for (int k = 0; k < m - 1; k += 2) {
    int piv = k + 1;
    for (int i = k + 2; i < m; ++i)
      if (std::abs(a(k, i)) > std::abs(a(k, piv))) piv = i;
    if (piv != k + 1) {
      a.row(k + 1).swap(a.row(piv));
      a.col(k + 1).swap(a.col(piv));
      pf = -pf;
    }
    if (a(k, k + 1) == 0.0) return 0.0;
    pf *= a(k, k + 1);
    if (k + 2 < m) {
      Eigen::VectorXd tau = a.row(k).tail(m - k - 2) / a(k, k + 1);
      Eigen::VectorXd u = a.col(k + 1).tail(m - k - 2);
      Eigen::MatrixXd upd = tau * u.transpose();
      a.bottomRightCorner(m - k - 2, m - k - 2) += upd - upd.transpose();
    }
  }
  return pf;
}

inline void require_antisymmetric(const Eigen::MatrixXd& a) {
  require(a.rows() == a.cols(), "gaussian_integral needs a square matrix");
  require((a + a.transpose()).cwiseAbs().maxCoeff() <= 1e-12, "gaussian_integral needs an antisymmetric matrix");
}

// Integral of exp(sum_jk a_jk xi_j xi_k) d xi_m ... d xi_1, closed form.
// Equals Pf(2a); its magnitude is sqrt(det 2a).
inline double gaussian_integral(const Eigen::MatrixXd& a) {
  require_antisymmetric(a);
  if (a.rows() == 0) return 1.0;
  return pfaffian(2.0 * a);
}

// Same integral by expanding the exponential in the kernel.
inline double gaussian_integral_expansion(const Eigen::MatrixXd& a) {
  require_antisymmetric(a);
  const int m = static_cast<int>(a.rows());
  require(m <= 16, "expansion limited to 16 generators");
  Algebra alg = Algebra::scratch(m);
  Element expo = Element::zero(alg);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      if (j != k && a(j, k) != 0.0) expo += Element::generator(alg, j) * Element::generator(alg, k) * a(j, k);
  std::vector<int> order;
  for (int j = m - 1; j >= 0; --j) order.push_back(j);
  return expo.exp().integrate(order).scalar_part().real();
}

inline double gaussian_magnitude(const Eigen::MatrixXd& a) {
  require_antisymmetric(a);
  if (a.rows() % 2) return 0.0;  // exact; the numeric determinant is only roundoff
  return std::sqrt(std::abs((2.0 * a).determinant()));
}

}  // namespace grasswig
