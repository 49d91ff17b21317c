#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "grasswig/errors.hpp"

namespace grasswig {

// i^phase * P_0 (x) P_1 (x) ... with qubit 0 as the most significant tensor
// factor. Per qubit, (x,z) = (0,0) I, (1,0) X, (0,1) Z, (1,1) Y.
struct PauliString {
  int n = 0;
  uint32_t x = 0;
  uint32_t z = 0;
  int phase = 0;

  static PauliString identity(int n) { return {n, 0, 0, 0}; }

  static PauliString single(int n, int qubit, char letter, int sign = 1) {
    PauliString p = identity(n);
    p.set(qubit, letter);
    p.phase = sign < 0 ? 2 : 0;
    return p;
  }

  // "+XZI", "-Y", "iZ"; letters left to right are qubits 0..n-1.
  static PauliString parse(const std::string& s) {
    std::size_t pos = 0;
    int ph = 0;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ph = s[pos++] == '-' ? 2 : 0;
    if (pos < s.size() && s[pos] == 'i') {
      ph = (ph + 1) % 4;
      ++pos;
    }
    PauliString p = identity(static_cast<int>(s.size() - pos));
    require(p.n <= 32, "pauli string too long");
    for (int j = 0; j < p.n; ++j) p.set(j, s[pos + j]);
    p.phase = ph;
    return p;
  }

  void set(int qubit, char letter) {
    require(qubit >= 0 && qubit < n, "pauli qubit out of range");
    uint32_t b = 1u << qubit;
    x &= ~b;
    z &= ~b;
    switch (letter) {
      case 'I': case 'i': case '_': break;
      case 'X': case 'x': x |= b; break;
      case 'Z': case 'z': z |= b; break;
      case 'Y': case 'y': x |= b; z |= b; break;
      default: throw ContractError(std::string("bad pauli letter ") + letter);
    }
  }

  char letter(int qubit) const {
    bool bx = (x >> qubit) & 1, bz = (z >> qubit) & 1;
    return bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I');
  }

  bool is_identity_word() const { return x == 0 && z == 0; }
  int weight() const { return std::popcount(x | z); }
  int sign() const {
    require(phase % 2 == 0, "pauli string has imaginary phase");
    return phase == 0 ? 1 : -1;
  }
  PauliString unsigned_word() const { return {n, x, z, 0}; }
  PauliString negated() const { return {n, x, z, (phase + 2) % 4}; }

  std::string word() const {
    std::string s;
    for (int j = 0; j < n; ++j) s += letter(j);
    return s;
  }
  std::string str() const {
    static const char* pre[] = {"+", "+i", "-", "-i"};
    return pre[phase] + word();
  }

  bool commutes(const PauliString& o) const { return (std::popcount((x & o.z) ^ (z & o.x)) % 2) == 0; }

  friend PauliString operator*(const PauliString& a, const PauliString& b) {
    require(a.n == b.n, "pauli strings of different length");
    // X^a1 Z^b1 X^a2 Z^b2 = (-1)^{b1.a2} X^{a1+a2} Z^{b1+b2}; Y = i X Z.
    int ya = std::popcount(a.x & a.z), yb = std::popcount(b.x & b.z);
    uint32_t nx = a.x ^ b.x, nz = a.z ^ b.z;
    int yn = std::popcount(nx & nz);
    int ph = a.phase + b.phase + ya + yb - yn + 2 * std::popcount(a.z & b.x);
    return {a.n, nx, nz, ((ph % 4) + 4) % 4};
  }

  bool operator==(const PauliString&) const = default;
  bool operator<(const PauliString& o) const {
    if (x != o.x) return x < o.x;
    if (z != o.z) return z < o.z;
    return phase < o.phase;
  }

  Eigen::MatrixXcd matrix() const {
    const std::size_t dim = std::size_t{1} << n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    uint32_t xm = bitmask_index(x), zm = bitmask_index(z);
    std::complex<double> base = ipow(phase + std::popcount(x & z));
    for (std::size_t c = 0; c < dim; ++c) {
      double s = std::popcount(static_cast<uint32_t>(c) & zm) % 2 ? -1.0 : 1.0;
      m(c ^ xm, c) = base * s;
    }
    return m;
  }

  // Qubit j sits at bit n-1-j of a basis index.
  uint32_t bitmask_index(uint32_t qubit_mask) const {
    uint32_t r = 0;
    for (int j = 0; j < n; ++j)
      if ((qubit_mask >> j) & 1) r |= 1u << (n - 1 - j);
    return r;
  }

  static std::complex<double> ipow(int k) {
    static const std::complex<double> v[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return v[((k % 4) + 4) % 4];
  }
};

// Tr(P M) for every unsigned Pauli word, indexed by (x, z) as x * 4^n... via
// a flat index x | (z << n).
inline Eigen::VectorXcd pauli_traces(const Eigen::MatrixXcd& m, int n) {
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t words = std::size_t{1} << (2 * n);
  Eigen::VectorXcd out(words);
  for (std::size_t w = 0; w < words; ++w) {
    PauliString p{n, static_cast<uint32_t>(w & (dim - 1)), static_cast<uint32_t>(w >> n), 0};
    uint32_t xm = p.bitmask_index(p.x), zm = p.bitmask_index(p.z);
    std::complex<double> base = PauliString::ipow(std::popcount(p.x & p.z));
    std::complex<double> t = 0;
    for (std::size_t c = 0; c < dim; ++c) {
      double s = std::popcount(static_cast<uint32_t>(c) & zm) % 2 ? -1.0 : 1.0;
      t += base * s * m(c, c ^ xm);
    }
    out(w) = t;
  }
  return out;
}

inline PauliString pauli_from_flat(int n, std::size_t w) {
  return {n, static_cast<uint32_t>(w & ((std::size_t{1} << n) - 1)), static_cast<uint32_t>(w >> n), 0};
}

}  // namespace grasswig
