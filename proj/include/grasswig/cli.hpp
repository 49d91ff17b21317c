#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "grasswig/errors.hpp"
#include "grasswig/measurement.hpp"
#include "grasswig/oracle.hpp"
#include "grasswig/phasespace.hpp"
#include "grasswig/twogen.hpp"

namespace grasswig {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitRefusal = 3;
inline constexpr int kExitDisagree = 4;

using json = nlohmann::json;

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

namespace detail {

struct Token {
  std::string text;
  int column = 0;  // 1-based
};

inline std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != '#') ++j;
    std::string t = line.substr(i, j - i);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    out.push_back({t, static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

inline int parse_index(const Token& t, int line, int limit, const char* what) {
  if (t.text.empty() || !std::all_of(t.text.begin(), t.text.end(), [](unsigned char c) { return std::isdigit(c); }) ||
      t.text.size() > 6)
    throw ParseError(line, t.column, std::string("bad ") + what + " '" + t.text + "'");
  int v = std::stoi(t.text);
  if (v >= limit)
    throw ParseError(line, t.column, std::string(what) + " " + std::to_string(v) + " out of range (limit " + std::to_string(limit) + ")");
  return v;
}

}  // namespace detail

// Line-oriented, whitespace separated, case-insensitive:
//   qubits N / h q / p q / t q / cnot c t, with # comments.
inline Circuit parse_circuit(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::optional<Circuit> c;
  while (std::getline(in, raw)) {
    ++lineno;
    auto toks = detail::tokenize(raw);
    if (toks.empty()) continue;
    const detail::Token& head = toks[0];
    auto arity = [&](std::size_t want) {
      if (toks.size() != want + 1) {
        int col = toks.size() > want + 1 ? toks[want + 1].column : static_cast<int>(raw.size()) + 1;
        throw ParseError(lineno, col, "'" + head.text + "' takes " + std::to_string(want) + " argument" + (want == 1 ? "" : "s"));
      }
    };
    if (head.text == "qubits") {
      if (c) throw ParseError(lineno, head.column, "duplicate qubits header");
      arity(1);
      int n = detail::parse_index(toks[1], lineno, kMaxQubits + 1, "qubit count");
      if (n < 1) throw ParseError(lineno, toks[1].column, "qubit count must be at least 1");
      c = Circuit{n, {}};
      continue;
    }
    if (head.text != "h" && head.text != "p" && head.text != "t" && head.text != "cnot")
      throw ParseError(lineno, head.column, "unknown gate '" + head.text + "'");
    if (!c) throw ParseError(lineno, head.column, "missing 'qubits N' header before first gate");
    GateOp op;
    if (head.text == "cnot") {
      arity(2);
      op.gate = Gate::CNOT;
      op.a = detail::parse_index(toks[1], lineno, c->qubits, "qubit index");
      op.b = detail::parse_index(toks[2], lineno, c->qubits, "qubit index");
      if (op.a == op.b) throw ParseError(lineno, toks[2].column, "cnot control and target must differ");
    } else {
      arity(1);
      op.gate = head.text == "h" ? Gate::H : head.text == "p" ? Gate::P : Gate::T;
      op.a = detail::parse_index(toks[1], lineno, c->qubits, "qubit index");
    }
    c->gates.push_back(op);
  }
  if (!c) throw ParseError(std::max(lineno, 1), 1, "missing 'qubits N' header");
  return *c;
}

inline std::string serialize_circuit(const Circuit& c) {
  std::string s = "qubits " + std::to_string(c.qubits) + "\n";
  for (auto& g : c.gates) {
    s += gate_name(g.gate) + " " + std::to_string(g.a);
    if (g.gate == Gate::CNOT) s += " " + std::to_string(g.b);
    s += "\n";
  }
  return s;
}

enum class Engine { threegen, tableau, dense, all };

inline std::string engine_name(Engine e) {
  switch (e) {
    case Engine::threegen: return "threegen";
    case Engine::tableau: return "tableau";
    case Engine::dense: return "dense";
    case Engine::all: return "all";
  }
  return "?";
}

inline Engine parse_engine(const std::string& s) {
  for (Engine e : {Engine::threegen, Engine::tableau, Engine::dense, Engine::all})
    if (engine_name(e) == s) return e;
  throw ContractError("unknown engine '" + s + "'");
}

inline json gbar_json(const GBar& g) {
  json j = json::object();
  for (auto& [k, v] : g.entries()) j[k] = v;
  return j;
}

inline json paulis_json(const std::vector<PauliString>& ps) {
  json j = json::array();
  for (auto& p : ps) j.push_back(p.str());
  return j;
}

inline std::vector<PauliString> sorted_group(const DenseOperator& rho) {
  auto g = stabilizer_group(rho);
  std::sort(g.begin(), g.end());
  return g;
}

struct RunReport {
  Engine engine = Engine::all;
  json data;
  std::optional<bool> agreement;
  double seconds = 0;

  int exit_code() const { return agreement && !*agreement ? kExitDisagree : kExitOk; }
};

// Engine refusals surface as ClassificationError.
inline RunReport run(const Circuit& c, Engine engine) {
  auto t0 = std::chrono::steady_clock::now();
  const bool want3 = engine == Engine::threegen || engine == Engine::all;
  const bool wantT = engine == Engine::tableau || engine == Engine::all;
  const bool wantD = engine == Engine::dense || engine == Engine::all;
  if ((want3 || wantT) && !c.clifford_only()) {
    for (auto& g : c.gates)
      if (g.gate == Gate::T) {
        Order o = classify_order(evolve_generators(gate_hamiltonian(g, c.qubits)));
        throw ClassificationError("engine " + engine_name(engine) + " refuses t gate: classification " + order_name(o) +
                                  ", not a phase-space permutation");
      }
  }
  RunReport rep;
  rep.engine = engine;
  rep.data["engine"] = engine_name(engine);
  rep.data["qubits"] = c.qubits;
  rep.data["gates"] = c.gates.size();
  std::optional<GBar> g3;
  std::optional<Tableau> tab;
  if (want3) {
    g3 = simulate_circuit(c);
    rep.data["threegen"]["gbar"] = gbar_json(*g3);
    rep.data["threegen"]["non_negative"] = g3->non_negative();
  }
  if (wantT) {
    tab = run_tableau(c);
    json rows = json::array();
    for (int i = 0; i < tab->n; ++i) rows.push_back(tab->row(i).str());
    rep.data["tableau"]["generators"] = rows;
    rep.data["tableau"]["group"] = paulis_json(tab->group());
  }
  if (wantD) {
    DenseOperator rho = run_dense(c);
    json d;
    GBar gd = gbar_from_state(rho);
    d["gbar"] = gbar_json(gd);
    d["negativity"] = negativity(rho);
    try {
      d["stabilizers"] = paulis_json(sorted_group(rho));
      d["stabilizer_state"] = true;
    } catch (const StateError&) {
      d["stabilizer_state"] = false;
    }
    rep.data["dense"] = d;
    if (engine == Engine::all) {
      bool gbar_ok = *g3 == gd;
      bool tab_ok = d["stabilizer_state"].get<bool>() && paulis_json(tab->group()) == d["stabilizers"];
      rep.data["agreement"] = {{"threegen_vs_dense", gbar_ok}, {"tableau_vs_dense", tab_ok}};
      rep.agreement = gbar_ok && tab_ok;
      rep.data["verdict"] = *rep.agreement ? "PASS" : "FAIL";
    }
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.data["seconds"] = rep.seconds;
  return rep;
}

struct ContextualityOptions {
  int states = 20;
  uint64_t seed = 1;
  ContextCoefficients demo{};
};

inline json assignment_json(const AssignmentSearch& s) {
  return {{"observables", s.observables}, {"examined", s.examined}, {"found", s.satisfying.size()}};
}

inline json context_report_json(const ContextReport& r) {
  return {{"gate", gate_name(r.gate)},
          {"density_difference", r.density_difference},
          {"evolved_difference", r.evolved_difference},
          {"wigner_mismatch", r.wigner_mismatch},
          {"rules_first", r.rules_first},
          {"rules_second", r.rules_second},
          {"verdict", r.rule_sets_differ ? "rule sets differ" : "rule sets identical"}};
}

// Peres-Mermin suite plus the preparation-context demo.
inline RunReport report_contextuality(const ContextualityOptions& opt = {}) {
  auto t0 = std::chrono::steady_clock::now();
  PMSquare sq = PMSquare::standard();
  RunReport rep;
  json& d = rep.data;
  json grid = json::array();
  for (int i = 0; i < 3; ++i) {
    json row = json::array();
    for (int j = 0; j < 3; ++j) row.push_back({{"label", sq.cells[i][j].label()}, {"operator", sq.op(i, j).str()}});
    grid.push_back(row);
  }
  d["square"] = grid;
  d["commutation_pattern"] = commutation_pattern_holds(sq);
  json ops = json::object();
  for (Line l : Line::all()) ops[l.name()] = line_product(sq, l);
  d["operator_line_products"] = ops;

  std::mt19937_64 rng(opt.seed);
  bool rows_ok = true, cols_ok = true;
  double worst = 0;
  std::array<int, 3> first_rows{}, first_cols{};
  for (int s = 0; s < opt.states; ++s) {
    DenseOperator rho = random_density(2, rng, 1);
    uint64_t seed = rng();
    auto r = sequential_measure(rho, Scheme::rowwise, seed, sq);
    auto c = sequential_measure(rho, Scheme::columnwise, seed, sq);
    if (s == 0) {
      first_rows = r.line_products;
      first_cols = c.line_products;
    }
    rows_ok = rows_ok && r.line_products == std::array<int, 3>{1, 1, 1};
    cols_ok = cols_ok && c.total_product() == -1;
    for (Line l : Line::all()) worst = std::max(worst, context_expectations(rho, sq, l).consistency_error());
  }
  d["sampled_states"] = opt.states;
  d["rows"] = first_rows;
  d["columns"] = first_cols;
  d["column_product"] = first_cols[0] * first_cols[1] * first_cols[2];
  d["rows_all_plus_one"] = rows_ok;
  d["column_product_always_minus_one"] = cols_ok;
  d["context_consistency_error"] = worst;
  auto full = noncontextual_assignment_search(sq);
  d["assignments"] = assignment_json(full);
  d["assignments_found"] = full.satisfying.size();
  json relaxed = json::array();
  for (int k = 0; k < 6; ++k) relaxed.push_back(relaxed_assignment_search(k, sq).satisfying.size());
  d["relaxed_assignments_found"] = relaxed;
  d["single_row_assignments_found"] = single_row_search(0, sq).satisfying.size();
  d["single_qubit_assignments_found"] = single_qubit_assignment_search().satisfying.size();

  d["preparation_demo"] = context_report_json(preparation_context_demo(opt.demo));
  ContextCoefficients flat = opt.demo;
  flat.y = 0;
  d["preparation_demo_no_y"] = context_report_json(preparation_context_demo(flat));

  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  d["seconds"] = rep.seconds;
  return rep;
}

struct SelftestOptions {
  int circuits = 100;
  int qubits = 3;
  int max_gates = 50;
  uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
};

// Random Clifford circuits through all three engines, checked concurrently.
inline RunReport selftest(const SelftestOptions& opt) {
  require(opt.circuits >= 0, "circuit count must be non-negative");
  require(opt.qubits >= 1 && opt.qubits <= kMaxQubits, "qubit count out of range");
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(opt.seed);
  std::vector<Circuit> batch;
  for (int k = 0; k < opt.circuits; ++k) {
    int len = std::uniform_int_distribution<int>(0, opt.max_gates)(rng);
    batch.push_back(random_clifford_circuit(opt.qubits, len, rng));
  }
  std::vector<int> ok(batch.size(), 0);
  unsigned workers = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, std::max<std::size_t>(batch.size(), 1));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < batch.size(); i += workers) ok[i] = run(batch[i], Engine::all).agreement.value_or(false);
    });
  for (auto& t : pool) t.join();
  RunReport rep;
  json failures = json::array();
  for (std::size_t i = 0; i < batch.size(); ++i)
    if (!ok[i]) failures.push_back({{"index", i}, {"circuit", serialize_circuit(batch[i])}});
  rep.agreement = failures.empty();
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.data = {{"circuits", opt.circuits}, {"qubits", opt.qubits}, {"seed", opt.seed},     {"threads", workers},
              {"failures", failures},     {"verdict", *rep.agreement ? "PASS" : "FAIL"}, {"seconds", rep.seconds}};
  return rep;
}

}  // namespace grasswig
