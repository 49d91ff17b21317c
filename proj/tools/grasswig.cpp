#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "grasswig/cli.hpp"

using namespace grasswig;

namespace {

bool emit_json(const json& j, const std::string& path) {
  if (path.empty()) return true;
  if (path == "-") {
    std::cout << j.dump(2) << "\n";
    return true;
  }
  std::ofstream out(path);
  if (!out) {
    std::cerr << "grasswig: cannot write " << path << "\n";
    return false;
  }
  out << j.dump(2) << "\n";
  return true;
}

void print_gbar(const json& g) {
  for (auto& [k, v] : g.items()) std::printf("    %-12s %.6f\n", k.c_str(), v.get<double>());
}

void print_run(const RunReport& rep) {
  const json& d = rep.data;
  std::printf("engine %s, %d qubit(s), %zu gate(s)\n", d["engine"].get<std::string>().c_str(), d["qubits"].get<int>(),
              d["gates"].get<std::size_t>());
  if (d.contains("threegen")) {
    std::printf("  threegen gbar:\n");
    print_gbar(d["threegen"]["gbar"]);
  }
  if (d.contains("tableau")) {
    std::printf("  tableau generators:");
    for (auto& r : d["tableau"]["generators"]) std::printf(" %s", r.get<std::string>().c_str());
    std::printf("\n");
  }
  if (d.contains("dense")) {
    const json& dd = d["dense"];
    std::printf("  dense gbar:\n");
    print_gbar(dd["gbar"]);
    if (dd["stabilizer_state"].get<bool>()) {
      std::printf("  dense stabilizers:");
      for (auto& r : dd["stabilizers"]) std::printf(" %s", r.get<std::string>().c_str());
      std::printf("\n");
    } else {
      std::printf("  dense state is not a stabilizer state\n");
    }
    std::printf("  two-generator negativity %.6g\n", dd["negativity"].get<double>());
  }
  if (d.contains("verdict")) std::printf("agreement %s\n", d["verdict"].get<std::string>().c_str());
  std::printf("time %.3f s\n", rep.seconds);
}

void print_contextuality(const RunReport& rep) {
  const json& d = rep.data;
  std::printf("Peres-Mermin square:\n");
  for (auto& row : d["square"]) {
    for (auto& cell : row) std::printf("  %-12s", cell["operator"].get<std::string>().c_str());
    std::printf("\n");
  }
  auto r = d["rows"].get<std::array<int, 3>>();
  auto c = d["columns"].get<std::array<int, 3>>();
  std::printf("row products     %+d %+d %+d\n", r[0], r[1], r[2]);
  std::printf("column products  %+d %+d %+d  (product %+d)\n", c[0], c[1], c[2], d["column_product"].get<int>());
  std::printf("states sampled %d: rows always +1 %s, column product always -1 %s\n", d["sampled_states"].get<int>(),
              d["rows_all_plus_one"].get<bool>() ? "yes" : "no", d["column_product_always_minus_one"].get<bool>() ? "yes" : "no");
  std::printf("context consistency error %.3g\n", d["context_consistency_error"].get<double>());
  std::printf("noncontextual assignments found: %zu of %zu\n", d["assignments_found"].get<std::size_t>(),
              d["assignments"]["examined"].get<std::size_t>());
  std::printf("single-qubit analog assignments found: %zu\n", d["single_qubit_assignments_found"].get<std::size_t>());
  std::printf("preparation demo: %s; with c_Y = 0: %s\n", d["preparation_demo"]["verdict"].get<std::string>().c_str(),
              d["preparation_demo_no_y"]["verdict"].get<std::string>().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grasswig: three- and two-generator qubit phase-space engines"};
  app.require_subcommand(1);

  std::string file, engine = "all", json_path;
  auto* run_cmd = app.add_subcommand("run", "run a circuit file");
  run_cmd->add_option("file", file, "circuit file")->required();
  run_cmd->add_option("--engine", engine, "threegen, tableau, dense or all")
      ->check(CLI::IsMember({"threegen", "tableau", "dense", "all"}));
  run_cmd->add_option("--json", json_path, "write the JSON report here ('-' for stdout)");

  ContextualityOptions copt;
  std::string cjson;
  auto* ctx_cmd = app.add_subcommand("contextuality", "Peres-Mermin and preparation-context report");
  ctx_cmd->add_option("--json", cjson, "write the JSON report here ('-' for stdout)");
  ctx_cmd->add_option("--states", copt.states, "random input states")->check(CLI::PositiveNumber);
  ctx_cmd->add_option("--seed", copt.seed, "sampling seed");

  SelftestOptions sopt;
  std::string sjson;
  auto* self_cmd = app.add_subcommand("selftest", "random Clifford circuits through every engine");
  self_cmd->add_option("--circuits", sopt.circuits, "number of circuits")->check(CLI::NonNegativeNumber);
  self_cmd->add_option("--qubits", sopt.qubits, "qubits per circuit")->check(CLI::Range(1, 4));
  self_cmd->add_option("--seed", sopt.seed, "generator seed");
  self_cmd->add_option("--max-gates", sopt.max_gates, "longest circuit")->check(CLI::NonNegativeNumber);
  self_cmd->add_option("--json", sjson, "write the JSON report here ('-' for stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      std::ifstream in(file);
      if (!in) {
        std::cerr << "grasswig: cannot read " << file << "\n";
        return 1;
      }
      std::stringstream ss;
      ss << in.rdbuf();
      Circuit c;
      try {
        c = parse_circuit(ss.str());
      } catch (const ParseError& e) {
        std::cerr << file << ": " << e.what() << "\n";
        return kExitParse;
      }
      RunReport rep;
      try {
        rep = run(c, parse_engine(engine));
      } catch (const ClassificationError& e) {
        std::cerr << "grasswig: " << e.what() << "\n";
        emit_json({{"engine", engine}, {"refused", true}, {"classification", "hbar1_general"}, {"message", e.what()}}, json_path);
        return kExitRefusal;
      }
      if (json_path != "-") print_run(rep);
      if (!emit_json(rep.data, json_path)) return 1;
      return rep.exit_code();
    }
    if (*ctx_cmd) {
      RunReport rep = report_contextuality(copt);
      if (cjson != "-") print_contextuality(rep);
      if (!emit_json(rep.data, cjson)) return 1;
      return kExitOk;
    }
    if (*self_cmd) {
      RunReport rep = selftest(sopt);
      if (sjson != "-")
        std::printf("selftest: %d circuit(s) on %d qubit(s), seed %llu: %zu failure(s), %s in %.2f s\n", sopt.circuits,
                    sopt.qubits, static_cast<unsigned long long>(sopt.seed), rep.data["failures"].size(),
                    rep.data["verdict"].get<std::string>().c_str(), rep.seconds);
      if (!emit_json(rep.data, sjson)) return 1;
      return rep.exit_code();
    }
  } catch (const std::exception& e) {
    std::cerr << "grasswig: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
