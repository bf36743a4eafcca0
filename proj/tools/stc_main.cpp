#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "stc/parser.hpp"
#include "stc/rewriter.hpp"
#include "stc/solver.hpp"
#include "stc/termination.hpp"
#include "stc/typecheck.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitInputError = 2;
constexpr int kExitResource = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_check(const std::string& path, bool explain, bool json,
              long long budget) {
  stc::Program program;
  try {
    program = stc::parse_program(read_file(path));
  } catch (const stc::ParseError& e) {
    std::cerr << path << ":" << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitInputError;
  }
  stc::Verdict v = stc::check_program(program, {budget});
  std::cout << (json ? stc::render_json(v) : stc::render_text(v, explain));
  if (v.resource_exhausted) return kExitResource;
  switch (v.status) {
    case stc::Status::Terminating: return kExitOk;
    case stc::Status::Unknown: return kExitNegative;
    case stc::Status::Error: return kExitInputError;
  }
  return kExitNegative;
}

int cmd_typecheck(const std::string& path, const std::string& constraint_text,
                  const std::string& env_text, const std::string& term_text,
                  const std::string& type_text, bool trace, long long budget) {
  try {
    stc::Program program;
    if (!path.empty()) program = stc::parse_program(read_file(path));
    stc::SymbolTable syms = stc::symbol_table(program);
    stc::ConstraintPtr hyp = constraint_text.empty()
                                 ? stc::c_true()
                                 : stc::parse_constraint(constraint_text);
    stc::Environment env = stc::parse_environment(env_text);
    stc::TermPtr term = stc::parse_term(term_text, syms);
    stc::TypePtr type = stc::parse_type(type_text);

    stc::TypeAssignment tau;
    for (const auto& [name, sig] : program.signatures)
      tau.types[name] = sig.type;

    stc::Solver solver({budget});
    stc::GateResult r =
        stc::typecheck_gate(solver, tau, hyp, env, term, type);
    if (trace) {
      int i = 0;
      for (const auto& entry : r.trace)
        std::cout << "RULE " << entry.rule << " AT " << entry.path << " => c"
                  << i++ << "\n";
    }
    if (r.obligation)
      std::cout << "obligation: " << stc::to_string(r.obligation) << "\n";
    switch (r.status) {
      case stc::GateResult::Status::Accepted:
        std::cout << "accepted\n";
        return kExitOk;
      case stc::GateResult::Status::Rejected:
        std::cout << "rejected: " << r.reason << "\n";
        return kExitNegative;
      case stc::GateResult::Status::Unknown:
        std::cout << "unknown: " << r.reason << "\n";
        return kExitResource;
    }
    return kExitNegative;
  } catch (const stc::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitInputError;
  }
}

int cmd_solve(const std::string& text, long long budget) {
  try {
    stc::ConstraintPtr c = stc::parse_constraint(text);
    stc::Solver solver({budget});
    if (solver.is_valid(c)) {
      std::cout << "VALID\n";
      return kExitOk;
    }
    if (solver.is_satisfiable(c)) {
      std::cout << "SATISFIABLE-ONLY\n";
      return kExitOk;
    }
    std::cout << "UNSATISFIABLE\n";
    return kExitNegative;
  } catch (const stc::SolverLimit&) {
    std::cout << "RESOURCE-EXHAUSTED\n";
    return kExitResource;
  } catch (const stc::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitInputError;
  }
}

int cmd_eval(const std::string& path, const std::string& term_text,
             long long fuel, bool trace) {
  try {
    stc::Program program = stc::parse_program(read_file(path));
    stc::SymbolTable syms = stc::symbol_table(program);
    stc::TermPtr term = stc::parse_term(term_text, syms);
    stc::RewriteSystem rs = stc::rewrite_system(program);
    stc::ReductionOutcome o = stc::normalize(term, rs, fuel, trace);
    for (const auto& line : o.trace) std::cout << line << "\n";
    if (o.normal_form) {
      std::cout << stc::to_string(o.result) << "\n";
      std::cout << "steps: " << o.steps << "\n";
      return kExitOk;
    }
    std::cout << "fuel exhausted after " << o.steps
              << " steps; partial term: " << stc::to_string(o.result) << "\n";
    return kExitNegative;
  } catch (const stc::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sized-type termination checker for conditional rewriting"};
  app.require_subcommand(1);

  long long budget = 10'000'000;
  long long fuel = 100'000;

  auto* check = app.add_subcommand("check", "check a program for termination");
  std::string check_file;
  bool explain = false, json = false;
  check->add_option("file", check_file, "input .hrs file")->required();
  check->add_flag("--explain", explain, "dump solver obligations");
  check->add_flag("--json", json, "machine-readable report");
  check->add_option("--budget", budget, "solver node budget");

  auto* typecheck =
      app.add_subcommand("typecheck", "decide one typing judgment");
  std::string tc_file, tc_constraint, tc_env, tc_term, tc_type;
  bool tc_trace = false;
  typecheck->add_option("file", tc_file, "signature file (optional)");
  typecheck->add_option("--constraint", tc_constraint, "hypothesis constraint");
  typecheck->add_option("--env", tc_env, "environment, e.g. \"x : nat^a\"");
  typecheck->add_option("--term", tc_term, "the term")->required();
  typecheck->add_option("--type", tc_type, "the target type")->required();
  typecheck->add_flag("--trace", tc_trace, "print the applied-rule trace");
  typecheck->add_option("--budget", budget, "solver node budget");

  auto* solve = app.add_subcommand("solve", "decide a size constraint");
  std::string solve_text;
  solve->add_option("constraint", solve_text, "constraint text")->required();
  solve->add_option("--budget", budget, "solver node budget");

  auto* eval = app.add_subcommand("eval", "normalize a term under the rules");
  std::string eval_file, eval_term;
  bool eval_trace = false;
  eval->add_option("file", eval_file, "input .hrs file")->required();
  eval->add_option("term", eval_term, "term to normalize")->required();
  eval->add_option("--fuel", fuel, "step budget");
  eval->add_flag("--trace", eval_trace, "print each reduction step");

  CLI11_PARSE(app, argc, argv);

  if (check->parsed()) return cmd_check(check_file, explain, json, budget);
  if (typecheck->parsed())
    return cmd_typecheck(tc_file, tc_constraint, tc_env, tc_term, tc_type,
                         tc_trace, budget);
  if (solve->parsed()) return cmd_solve(solve_text, budget);
  if (eval->parsed()) return cmd_eval(eval_file, eval_term, fuel, eval_trace);
  return kExitInputError;
}
