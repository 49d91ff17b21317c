// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "grasswig/grasswig.hpp"
#include "test_util.hpp"

using namespace grasswig;
using grasswig::testing::random_antisymmetric;
using grasswig::testing::random_element;

namespace {

const cplx I(0, 1);

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (!pass) note << "; ";
      note << what;
      pass = false;
    }
  }
};

bool homogeneous(uint64_t m, int parity) { return std::popcount(m) % 2 == parity; }

std::vector<std::string> words(const std::vector<PauliString>& g) {
  std::vector<std::string> out;
  for (auto& p : g) out.push_back(p.str());
  std::sort(out.begin(), out.end());
  return out;
}

// 1. Grassmann kernel.
void grassmann_kernel(Outcome& o) {
  std::mt19937 rng(1001);
  double worst = 0;
  for (Algebra alg : {Algebra::state(2), Algebra::extended(1), Algebra::scratch(6)})
    for (int j = 0; j < alg.size(); ++j)
      for (int k = 0; k < alg.size(); ++k) {
        Element a = Element::generator(alg, j), b = Element::generator(alg, k);
        bool cross = alg.aux && (((1ULL << j) & alg.state_mask()) != 0) != (((1ULL << k) & alg.state_mask()) != 0);
        worst = std::max(worst, (cross ? a * b - b * a : a * b + b * a).max_abs());
      }
  o.require(worst <= 1e-12, "anticommutation");

  worst = 0;
  for (int t = 0; t < 30; ++t) {
    Algebra alg = Algebra::scratch(6);
    Element a = random_element(alg, rng), b = random_element(alg, rng), c = random_element(alg, rng);
    worst = std::max(worst, max_abs_diff((a * b) * c, a * (b * c)));
  }
  o.require(worst <= 1e-12, "associativity");

  worst = 0;
  Algebra s6 = Algebra::scratch(6);
  for (int parity : {0, 1})
    for (int t = 0; t < 20; ++t) {
      Element a = random_element(s6, rng, [&](uint64_t m) { return homogeneous(m, parity); });
      Element b = random_element(s6, rng);
      for (int l = 0; l < s6.size(); ++l) {
        Element da = a.derivative(l, Side::left) * b;
        Element db = a * b.derivative(l, Side::left);
        worst = std::max(worst, max_abs_diff((a * b).derivative(l, Side::left), parity ? da - db : da + db));
      }
    }
  o.require(worst <= 1e-12, "graded Leibniz");

  worst = 0;
  for (int n : {1, 2}) {
    Algebra st = Algebra::state(n), ex = Algebra::extended(n);
    for (int t = 0; t < 30; ++t) {
      Element g = random_element(st, rng).retag(ex);
      worst = std::max(worst, max_abs_diff(fourier(fourier(g, Direction::inverse), Direction::forward), g));
      Element h = random_element(ex, rng, [&](uint64_t m) { return (m & ex.state_mask()) == 0; });
      worst = std::max(worst, max_abs_diff(fourier(fourier(h, Direction::forward), Direction::inverse), h));
    }
  }
  o.require(worst <= 1e-12, "Fourier round trip");

  // Vector/axial and scalar/pseudoscalar coefficient duality.
  worst = 0;
  const uint64_t P = 1, Q = 2, R = 4, shift = 3;
  for (int t = 0; t < 100; ++t) {
    Element g = random_element(Algebra::state(1), rng, [](uint64_t m) { return homogeneous(m, 0); });
    Element gt = fourier(g, Direction::inverse);
    worst = std::max({worst, std::abs(gt.coeff(P << shift) + g.coeff(Q | R)), std::abs(gt.coeff(Q << shift) - g.coeff(P | R)),
                      std::abs(gt.coeff(R << shift) + g.coeff(P | Q)), std::abs(gt.coeff((P | Q | R) << shift) - g.coeff(0))});
  }
  o.require(worst <= 1e-12, "coefficient duality");

  worst = 0;
  for (int m : {2, 3, 4, 6})
    for (int t = 0; t < 20; ++t) {
      Eigen::MatrixXd a = random_antisymmetric(m, rng);
      worst = std::max({worst, std::abs(gaussian_integral(a) - gaussian_integral_expansion(a)),
                        std::abs(std::abs(gaussian_integral(a)) - gaussian_magnitude(a))});
    }
  o.require(worst <= 1e-12, "Gaussian closed form");
}

// 2. Star product against matrix product.
void star_product(Outcome& o) {
  std::mt19937 rng(1002);
  double worst = 0;
  for (auto [n, pairs] : {std::pair{1, 100}, std::pair{2, 50}})
    for (int t = 0; t < pairs; ++t) {
      Mat a = random_matrix(n, rng), b = random_matrix(n, rng);
      Element s = moyal_product(symbol_from_operator({n, a}).element, symbol_from_operator({n, b}).element);
      worst = std::max(worst, max_abs_diff(operator_from_symbol(s).matrix, a * b));
    }
  o.note << "worst " << worst;
  o.require(worst <= 1e-9, "homomorphism");
}

// 3. Gate generator maps and the eight CNOT monomial lines as printed.
void gate_maps(Outcome& o) {
  const Algebra a1 = Algebra::state(1);
  auto x = [&](Kind k) { return xi(a1, 0, k); };
  const double s = 1 / std::sqrt(2.0);
  auto check = [&](Gate g, std::array<Element, 3> want) {
    GeneratorMap m = evolve_generators(gate_hamiltonian(g));
    for (int k = 0; k < 3; ++k) o.require(approx_equal(m.images[k], want[k], 1e-12), gate_name(g) + " map " + m.to_string());
  };
  check(Gate::H, {x(Kind::q), x(Kind::p), -x(Kind::r)});
  check(Gate::P, {-x(Kind::r), x(Kind::q), x(Kind::p)});
  check(Gate::T, {(x(Kind::p) - x(Kind::r)) * s, x(Kind::q), (x(Kind::p) + x(Kind::r)) * s});

  // Control qubit 0, target qubit 1.
  const Algebra a2 = Algebra::state(2);
  auto y = [&](int q, Kind k) { return xi(a2, q, k); };
  GateHamiltonian gh = gate_hamiltonian(Gate::CNOT);
  const Kind p = Kind::p, q = Kind::q, r = Kind::r;
  struct Line {
    Element from, to;
  } lines[] = {
      {y(1, r), y(1, r) * y(0, r) * y(0, p) * I},
      {y(1, r) * y(0, p) * y(0, r), y(1, r) * -I},
      {y(1, q), y(1, q) * y(0, r) * y(0, p) * I},
      {y(1, q) * y(0, p) * y(0, r), y(1, q) * -I},
      {y(0, r), y(0, r) * y(1, q) * y(1, r) * I},
      {y(0, r) * y(1, q) * y(1, r), y(0, r) * -I},
      {y(0, p), y(0, p) * y(1, q) * y(1, r) * I},
      {y(0, p) * y(1, q) * y(1, r), y(0, p) * -I},
  };
  int matched = 0;
  for (int i = 0; i < 8; ++i) {
    Element got = evolve_symbol(gh.hamiltonian.symbol, lines[i].from, gh.duration);
    if (approx_equal(got, lines[i].to, 1e-12))
      ++matched;
    else
      o.require(false, "CNOT line " + std::to_string(i + 1) + " gives " + got.to_string());
  }
  o.note << (o.pass ? "" : "; ") << matched << "/8 CNOT lines";
}

Permutation from_sources(std::vector<std::size_t> src) { return Permutation{std::move(src)}; }

// 4. Printed permutation matrices and the CNOT permutation.
void printed_permutations(Outcome& o) {
  o.require(permutation_for_gate({Gate::H, 0, -1}, 1) == from_sources({2, 4, 0, 5, 1, 3}), "Hadamard matrix");
  o.require(permutation_for_gate({Gate::P, 0, -1}, 1) == from_sources({4, 0, 2, 1, 3, 5}), "phase matrix");
  for (auto [a, b] : {std::pair{0, 1}, std::pair{1, 0}}) {
    GateOp op{Gate::CNOT, a, b};
    Permutation perm = permutation_for_gate(op, 2);
    o.require(perm.size() == 30 && perm.is_bijection(), "CNOT not a bijection on 30 points");
    Mat u = gate_unitary(op, 2);
    for (std::size_t x = 0; x < perm.size(); ++x)
      if (max_abs_diff(u * point_at(2, perm.source[x]).matrix() * u.adjoint(), point_at(2, x).matrix()) != 0.0)
        o.require(false, "CNOT point " + point_at(2, x).str());
  }
}

// 5. Permutation engine on random Clifford circuits.
void permutation_engine(Outcome& o) {
  std::mt19937 rng(1005);
  std::uniform_int_distribution<int> len(0, 50), nq(1, 3);
  int bad = 0;
  for (int t = 0; t < 200; ++t) {
    Circuit c = random_clifford_circuit(nq(rng), len(rng), rng);
    GBar g = simulate_circuit(c);
    const std::size_t masses = (std::size_t{1} << c.qubits) - 1;
    bool ok = g == gbar_from_state(run_dense(c)) && g.non_negative() && g.support() == masses;
    for (double v : g.values) ok = ok && (v == 0.0 || v == 1.0 / static_cast<double>(masses));
    bad += !ok;
  }
  o.note << bad << " of 200 mismatched";
  o.require(bad == 0, "engine disagrees");
}

// 6. Stabilizer census.
void census(Outcome& o) {
  std::size_t one = stabilizer_census(1).size(), two = stabilizer_census(2).size();
  o.note << one << " and " << two << " states";
  o.require(one == 6 && oracle_census(1) == 6, "n=1");
  o.require(two == 60 && oracle_census(2) == 60, "n=2");
}

// 7. T gate classification and refusal.
void t_gate(Outcome& o) {
  GateHamiltonian gh = gate_hamiltonian(Gate::T);
  o.require(classify_order(evolve_generators(gh)) == Order::hbar1_general, "classification");
  bool refused = false;
  try {
    permutation_for_gate({Gate::T, 0, -1}, 1);
  } catch (const ClassificationError&) {
    refused = true;
  }
  o.require(refused, "permutation built for T");

  // The linear flow mixes two generators with weight 1/sqrt2.
  Eigen::MatrixXd m = exponential_evolution_matrix(gh.hamiltonian.symbol, gh.duration).matrix;
  bool signed_perm = true;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    double v = std::abs(m.data()[i]);
    signed_perm = signed_perm && (v < 1e-12 || std::abs(v - 1) < 1e-12);
  }
  o.require(!signed_perm, "flow matrix is a signed permutation");
  Mat prop = operator_from_symbol(propagator_symbol(gh.hamiltonian.fields[0], gh.duration), QuantizationMap::label_frame()).matrix;
  o.require(!equal_up_to_phase(prop, Mat::Identity(2, 2)) && equal_up_to_phase(prop, single_qubit_matrix(Gate::T)),
            "propagator is not T");
  o.require(!conjugate_pauli({Gate::T, 0, -1}, PauliString::parse("X")).image.has_value(), "T maps a point to a point");
}

// 8. Two-generator reflections, stabilizer grids and the magic-state cell.
void two_generator(Outcome& o) {
  const cplx a = (1.0 - I) / 2.0, b = (1.0 + I) / 2.0;
  struct Case {
    int xp, xq;
    Eigen::Vector2cd printed;
  } cases[] = {{0, 0, {1, a}}, {0, 1, {0, b}}, {1, 0, {1, -a}}, {1, 1, {0, a}}};
  for (auto& c : cases) {
    Eigen::Vector2cd got = reflection2(c.xp, c.xq, 1).matrix * Eigen::Vector2cd(1, 0);
    if ((got - c.printed).norm() > 1e-12) {
      std::ostringstream s;
      s << "R(" << c.xp << "," << c.xq << ")|0> = (" << got(0) << ", " << got(1) << ")";
      o.require(false, s.str());
    }
  }
  const char letters[3] = {'X', 'Y', 'Z'};
  for (char l : letters)
    for (int s : {1, -1}) {
      Wigner2 w = wigner2(eigenprojector(l, s));
      for (Eigen::Index i = 0; i < w.values.size(); ++i) {
        double v = w.values.data()[i];
        o.require(std::abs(v) < 1e-12 || std::abs(v - 0.5) < 1e-12, std::string("grid of ") + l);
      }
    }
  Eigen::Vector2cd plus(1 / std::sqrt(2.0), 1 / std::sqrt(2.0));
  Wigner2 w = wigner2(DenseOperator::from_ket(single_qubit_matrix(Gate::T) * plus));
  int negative = 0;
  for (Eigen::Index i = 0; i < w.values.size(); ++i)
    if (w.values.data()[i] < 0) {
      ++negative;
      o.require(std::abs(w.values.data()[i] - 0.25 * (1 - std::sqrt(2.0))) <= 1e-12, "negative cell value");
    }
  o.require(negative == 1, "negative cell count");
}

// 9. State-dependent rules against the oracle, then the tableau engine.
void state_dependent(Outcome& o) {
  const char letters[3] = {'X', 'Z', 'Y'};
  auto matches = [](const DenseOperator& rho, const GateOp& op) {
    try {
      AffineRule rule = state_dependent_rule(op, classify_state(rho));
      return apply_rule(wigner2(rho), op, rule).approx_equal(wigner2(dense_apply(rho, op)));
    } catch (const StateError&) {
      return false;
    }
  };
  int single_bad = 0;
  for (Gate g : {Gate::H, Gate::P})
    for (char l : letters)
      for (int s : {1, -1}) single_bad += !matches(eigenprojector(l, s), {g, 0, -1});
  o.require(single_bad == 0, std::to_string(single_bad) + " single-qubit cases");

  std::set<std::string> failing;
  int cnot_bad = 0;
  for (char c : letters)
    for (char t : letters)
      for (int sc : {1, -1})
        for (int st : {1, -1}) {
          DenseOperator rho = eigenprojector(c, sc).kron(eigenprojector(t, st));
          if (!matches(rho, {Gate::CNOT, 0, 1})) {
            ++cnot_bad;
            failing.insert(std::string("control ") + c + " target " + t);
          }
        }
  if (cnot_bad) {
    std::string list;
    for (auto& f : failing) list += (list.empty() ? "" : ", ") + f;
    o.require(false, std::to_string(cnot_bad) + "/36 CNOT inputs (" + list + ")");
  }

  std::mt19937 rng(1009);
  std::uniform_int_distribution<int> len(0, 50), nq(1, 4);
  int tab_bad = 0;
  for (int k = 0; k < 200; ++k) {
    Circuit c = random_clifford_circuit(nq(rng), len(rng), rng);
    tab_bad += words(run_tableau(c).group()) != words(stabilizer_group(run_dense(c)));
  }
  o.require(tab_bad == 0, std::to_string(tab_bad) + " tableau mismatches");
  if (tab_bad == 0) o.note << "; tableau 200/200";
}

// 10. Preparation contextuality.
void preparation(Outcome& o) {
  std::vector<ContextCoefficients> sweep{{}, {0.1, 0.3, 0.25, 0.35, 0.01}, {0.1, 0.3, 0.25, 0.35, 0.2}};
  sweep.push_back(sweep[0]);
  sweep.back().y = 0;
  for (const auto& c : sweep) {
    const double y = c.y;
    ContextReport rep = preparation_context_demo(c);
    o.require(rep.density_difference <= 1e-12, "density operators differ at c_Y=" + std::to_string(y));
    o.require(rep.rule_sets_differ == (y > 0), "rule sets at c_Y=" + std::to_string(y));
  }
}

// 11. Peres-Mermin square.
void peres_mermin(Outcome& o) {
  PMSquare sq = PMSquare::standard();
  std::vector<int> products;
  for (Line l : Line::all()) products.push_back(line_product(sq, l));
  o.require(products == std::vector<int>{1, 1, 1, 1, 1, -1}, "line products");
  std::mt19937 rng(1011);
  for (int t = 0; t < 20; ++t) {
    DenseOperator rho = random_density(2, rng, t % 2);
    MeasurementRecord rows = sequential_measure(rho, Scheme::rowwise, 500 + t);
    MeasurementRecord cols = sequential_measure(rho, Scheme::columnwise, 600 + t);
    o.require(rows.line_products == std::array<int, 3>{1, 1, 1}, "row outcomes");
    o.require(cols.total_product() == -1, "column outcomes");
  }
  AssignmentSearch s = noncontextual_assignment_search();
  AssignmentSearch one = single_qubit_assignment_search();
  o.note << s.examined << " assignments, " << s.satisfying.size() << " satisfying; single qubit " << one.satisfying.size();
  o.require(s.examined == 512 && s.satisfying.empty(), "square search");
  o.require(!one.satisfying.empty(), "single-qubit search");
}

// 12. Matrix representation of the algebra.
void representation(Outcome& o) {
  CliffordRep rep = clifford_rep();
  const Kind ks[3] = {Kind::p, Kind::q, Kind::r};
  double worst = 0;
  for (int a = 0; a < 3; ++a) {
    worst = std::max(worst, (rep.of(ks[a]) * rep.of(ks[a])).cwiseAbs().maxCoeff());
    for (int b = a + 1; b < 3; ++b) worst = std::max(worst, (rep.of(ks[a]) * rep.of(ks[b]) + rep.of(ks[b]) * rep.of(ks[a])).cwiseAbs().maxCoeff());
  }
  o.require(worst <= 1e-12, "nilpotent anticommuting generators");
  std::mt19937 rng(1012);
  worst = 0;
  for (int t = 0; t < 200; ++t) {
    Element a = random_element(Algebra::state(1), rng), b = random_element(Algebra::state(1), rng);
    worst = std::max(worst, max_abs_diff(rep.represent(a * b), rep.represent(a) * rep.represent(b)));
  }
  o.require(worst <= 1e-12, "homomorphism");
}

struct Criterion {
  const char* name;
  std::function<void(Outcome&)> body;
  double limit_seconds;  // 0 means untimed
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"grassmann kernel", grassmann_kernel, 5},
      {"star product homomorphism", star_product, 30},
      {"gate generator maps", gate_maps, 0},
      {"printed permutation matrices", printed_permutations, 0},
      {"permutation engine", permutation_engine, 60},
      {"stabilizer census", census, 0},
      {"t gate classification", t_gate, 0},
      {"two-generator reflections and grids", two_generator, 0},
      {"state-dependent evolution", state_dependent, 0},
      {"preparation contextuality", preparation, 0},
      {"peres-mermin square", peres_mermin, 5},
      {"algebra representation", representation, 0},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].body(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("threw: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (criteria[i].limit_seconds > 0 && secs >= criteria[i].limit_seconds) o.require(false, "over time limit");
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].name << " (" << std::fixed
              << std::setprecision(2) << secs << " s)";
    std::string note = o.note.str();
    if (!note.empty()) std::cout << " " << note;
    std::cout << "\n";
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed ? 1 : 0;
}
