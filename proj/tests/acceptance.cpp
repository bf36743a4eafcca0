// Acceptance suite: drives the CLI and the library against the shipped
// fixture corpus and prints one PASS/FAIL line per criterion.

#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stc/parser.hpp"
#include "stc/rewriter.hpp"
#include "stc/solver.hpp"
#include "stc/subtyping.hpp"
#include "stc/termination.hpp"
#include "../tests/generators.hpp"

using namespace stc;

namespace {

std::string g_cli;
std::string g_fixtures;
int g_failures = 0;

void report(int criterion, const std::string& what, bool ok,
            const std::string& detail = "") {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << criterion << ": "
            << what;
  if (!detail.empty()) std::cout << " [" << detail << "]";
  std::cout << std::endl;
  if (!ok) ++g_failures;
}

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  CliResult r;
  std::string cmd = g_cli + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  while (size_t n = fread(buf.data(), 1, buf.size(), pipe))
    r.output.append(buf.data(), n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Program load_fixture(const std::string& name) {
  return parse_program(slurp(g_fixtures + "/" + name));
}

// ---------------------------------------------------------------------------

void criterion1_fixture_acceptance() {
  for (const char* name :
       {"minus_div.hrs", "pivot.hrs", "filter.hrs", "mc91.hrs"}) {
    auto start = std::chrono::steady_clock::now();
    CliResult r = run_cli("check " + g_fixtures + "/" + name);
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    bool ok = r.exit_code == 0 &&
              r.output.find("program: TERMINATING") != std::string::npos &&
              secs < 5.0;
    report(1, std::string("check ") + name + " reports TERMINATING", ok,
           "exit " + std::to_string(r.exit_code) + ", " +
               std::to_string(secs).substr(0, 5) + "s");
  }
}

void criterion2_obligation_replay() {
  Verdict v = check_program(load_fixture("pivot.hrs"));
  const Obligation* ob = nullptr;
  for (const auto& f : v.functions)
    if (f.name == "pivot")
      for (const auto& r : f.rules)
        if (r.index == 2 && !r.obligations.empty()) ob = &r.obligations.back();
  if (!ob) {
    report(2, "pivot rule 2 obligation present", false);
    return;
  }
  Solver s;
  ConstraintPtr expected = parse_constraint(
      "a = l+1 -> l < a /\\ (exists b g. a = b+g) /\\ "
      "(forall b g. l = b+g -> a = b+g+1)");
  bool valid = s.is_valid(ob->constraint);
  bool equivalent = s.equiv(ob->constraint, expected);
  report(2, "pivot rule 2 obligation is valid", valid);
  report(2, "pivot rule 2 obligation equivalent to the published form",
         equivalent);
}

void criterion3_negative_fixtures() {
  struct Case {
    const char* file;
    const char* fun;
  };
  for (const Case& c : {Case{"loop.hrs", "f"}, Case{"loop2.hrs", "f"},
                        Case{"mc91_noguard.hrs", "ff"}}) {
    CliResult r = run_cli("check " + g_fixtures + "/" + c.file);
    bool ok = r.exit_code == 1 &&
              r.output.find(std::string(c.fun) + ": UNKNOWN") !=
                  std::string::npos &&
              r.output.find("condition (") != std::string::npos;
    report(3, std::string("check ") + c.file +
                  " rejects with the failing condition named",
           ok, "exit " + std::to_string(r.exit_code));
  }
}

void criterion4_solver_differential() {
  Solver s;
  testgen::ConstraintGen gen(0xACCE97);
  long long agree = 0, total = 0;
  for (int i = 0; i < 1000; ++i) {
    int k = gen.pick(0, 2);
    ConstraintPtr c = gen.bounded_formula(k, 3);
    std::vector<unsigned long long> point(k, 0);
    while (true) {
      Valuation mu;
      for (int j = 0; j < k; ++j) mu["x" + std::to_string(j)] = point[j];
      bool oracle = evaluate(c, mu, 8);
      bool solver = s.is_valid(testgen::at_point(c, point));
      ++total;
      if (oracle == solver) ++agree;
      int j = 0;
      for (; j < k; ++j) {
        if (point[j] < 8) {
          ++point[j];
          break;
        }
        point[j] = 0;
      }
      if (j == k) break;
    }
  }
  report(4, "solver agrees with bounded enumeration on 1000 formulas",
         agree == total,
         std::to_string(agree) + "/" + std::to_string(total) + " points");
}

void criterion5_subtyping_properties() {
  Solver s;
  testgen::TypeGen gen(0x5B17);
  int refl_ok = 0;
  for (int i = 0; i < 500; ++i) {
    TypePtr t = gen.random_type(4);
    FreshSupply fresh;
    fresh.reserve("a");
    fresh.reserve("b");
    if (s.is_valid(gen_sub(t, t, fresh))) ++refl_ok;
  }
  report(5, "reflexivity on 500 random types", refl_ok == 500,
         std::to_string(refl_ok) + "/500");

  int trans_ok = 0;
  for (int i = 0; i < 200; ++i) {
    auto [t, u, v] = gen.compatible_triple(3);
    FreshSupply fresh;
    fresh.reserve("a");
    fresh.reserve("b");
    ConstraintPtr tu = gen_sub(t, u, fresh);
    ConstraintPtr uv = gen_sub(u, v, fresh);
    ConstraintPtr tv = gen_sub(t, v, fresh);
    if (s.entails(c_and(tu, uv), tv)) ++trans_ok;
  }
  report(5, "transitivity entailment on 200 compatible triples",
         trans_ok == 200, std::to_string(trans_ok) + "/200");
}

void criterion6_matching_soundness() {
  Solver s;
  Program p = parse_program(R"(
type nat;
type list > nat;
constructor 0 : nat^0;
constructor s : forall a. nat^a -> nat^(a+1);
constructor nil : list^0;
constructor cons : nat -> forall a. list^a -> list^(a+1);
)");
  SymbolTable syms = symbol_table(p);
  std::map<std::string, CtorShape> ctors;
  for (const auto& [n, sig] : p.signatures)
    if (sig.kind == SymbolSignature::Kind::Constructor)
      ctors.emplace(n, validate_constructor_signature(sig, s).shape);

  auto nats = [&](int up) {
    std::vector<TermPtr> out;
    for (int n = 0; n <= up; ++n)
      out.push_back(parse_term(std::to_string(n), syms));
    return out;
  };
  auto lists = [&](int len) {
    std::vector<TermPtr> out = {mk_ctor("nil")};
    std::vector<TermPtr> prev = out;
    for (int l = 0; l < len; ++l) {
      std::vector<TermPtr> next;
      for (const auto& t : prev)
        for (const auto& e : nats(1))
          next.push_back(mk_app(mk_app(mk_ctor("cons"), e), t));
      out.insert(out.end(), next.begin(), next.end());
      prev = next;
    }
    return out;
  };

  struct Case {
    PatternPtr pattern;
    std::string base;
  };
  std::vector<Case> cases = {
      {p_var("x"), "nat"},
      {p_ctor("nil", {}), "list"},
      {p_ctor("cons", {p_var("y"), p_var("l")}), "list"},
      {p_ctor("cons", {p_var("y"), p_ctor("cons", {p_var("z"), p_var("l")})}),
       "list"},
      {p_ctor("s", {p_var("x")}), "nat"},
      {p_ctor("s", {p_ctor("s", {p_var("x")})}), "nat"},
      {p_ctor("true", {}), "bool"},
      {p_ctor("false", {}), "bool"},
  };
  int checked = 0, good = 0;
  for (const auto& c : cases) {
    std::map<std::string, std::string> eps;
    FreshSupply fresh;
    fresh.reserve("alpha");
    auto r = derive_matching(c.pattern, c.base, ctors, eps, fresh);
    if (std::holds_alternative<MatchFailure>(r)) continue;
    auto& d = std::get<MatchDerivation>(r);
    ConstraintPtr match_eq =
        c_eq(size_var("alpha", annot_sort(c.base)), d.size);
    std::vector<TermPtr> ground =
        c.base == "nat" ? nats(4)
        : c.base == "list" ? lists(4)
                           : std::vector<TermPtr>{mk_ctor("true"),
                                                  mk_ctor("false")};
    for (const auto& g : ground) {
      auto sigma = match_pattern(c.pattern, g);
      if (!sigma) continue;
      Valuation mu;
      mu["alpha"] = ground_size(g, ctors);
      for (const auto& [x, e] : d.eps) mu[e] = ground_size(sigma->at(x), ctors);
      ++checked;
      if (evaluate(match_eq, mu)) ++good;
    }
  }
  report(6, "syntactic-size valuations satisfy every matching constraint",
         checked >= 70 && good == checked,
         std::to_string(good) + "/" + std::to_string(checked) + " instances");
}

void criterion7_rewriter_oracles() {
  auto nat_of = [](const TermPtr& t) -> long long {
    long long n = 0;
    TermPtr cur = t;
    while (cur->kind == Term::Kind::App && cur->a->kind == Term::Kind::Ctor &&
           cur->a->name == "s") {
      ++n;
      cur = cur->b;
    }
    if (!(cur->kind == Term::Kind::Ctor && cur->name == "0")) return -1;
    return n;
  };

  // direct recursive oracles
  std::function<long long(long long, long long)> om = [&](long long a,
                                                          long long b) {
    if (a == 0) return 0LL;
    if (b == 0) return a;
    return om(a - 1, b - 1);
  };
  std::function<long long(long long)> mc91 = [&](long long n) {
    if (n > 100) return n - 10;
    return mc91(mc91(n + 11));
  };

  {
    Program p = load_fixture("minus_div.hrs");
    SymbolTable syms = symbol_table(p);
    RewriteSystem rs = rewrite_system(p);
    ReductionOutcome d = normalize(parse_term("div 4 2", syms), rs, 100000);
    report(7, "div 4 2 normalizes to 2",
           d.normal_form && nat_of(d.result) == 2,
           std::to_string(d.steps) + " steps");
    ReductionOutcome m = normalize(parse_term("minus 3 2", syms), rs, 100000);
    report(7, "minus 3 2 normalizes to 1",
           m.normal_form && nat_of(m.result) == 1 &&
               nat_of(m.result) == om(3, 2));
  }
  {
    Program p = load_fixture("mc91.hrs");
    SymbolTable syms = symbol_table(p);
    RewriteSystem rs = rewrite_system(p);
    ReductionOutcome a = normalize(parse_term("ff 100", syms), rs, 100000);
    ReductionOutcome b = normalize(parse_term("ff 105", syms), rs, 100000);
    report(7, "mc91 100 normalizes to 91",
           a.normal_form && nat_of(a.result) == 91 &&
               nat_of(a.result) == mc91(100),
           std::to_string(a.steps) + " steps");
    report(7, "mc91 105 normalizes to 95",
           b.normal_form && nat_of(b.result) == 95 &&
               nat_of(b.result) == mc91(105));
  }
  {
    Program p = load_fixture("filter.hrs");
    SymbolTable syms = symbol_table(p);
    RewriteSystem rs = rewrite_system(p);
    ReductionOutcome r = normalize(
        parse_term("filter even (cons 0 (cons 1 (cons 2 (cons 3 nil))))",
                   syms),
        rs, 100000);
    TermPtr expected = parse_term("cons 0 (cons 2 nil)", syms);
    report(7, "filter of the parity predicate keeps the evens",
           r.normal_form && alpha_equal(r.result, expected));
  }
}

void criterion8_empirical_sn() {
  std::mt19937 rng(0x5EED);
  std::uniform_int_distribution<int> nat(0, 6);
  auto nat_term = [&](int n) { return std::to_string(n); };
  auto list_term = [&](int len) {
    std::string t = "nil";
    for (int i = 0; i < len; ++i)
      t = "cons " + nat_term(nat(rng)) + " (" + t + ")";
    return t;
  };

  struct FixtureCalls {
    const char* file;
    std::function<std::string()> call;
  };
  std::vector<FixtureCalls> fixtures;
  fixtures.push_back({"minus_div.hrs", [&]() {
    std::string f = rng() % 2 ? "minus" : "div";
    return f + " " + nat_term(nat(rng)) + " " + nat_term(nat(rng));
  }});
  fixtures.push_back({"pivot.hrs", [&]() {
    switch (rng() % 3) {
      case 0:
        return "app (" + list_term(rng() % 4) + ") (" + list_term(rng() % 4) +
               ")";
      case 1:
        return "pivot " + nat_term(nat(rng)) + " (" + list_term(rng() % 5) +
               ")";
      default:
        return "inf " + nat_term(nat(rng)) + " " + nat_term(nat(rng));
    }
  }});
  fixtures.push_back({"filter.hrs", [&]() {
    switch (rng() % 3) {
      case 0:
        return "filter even (" + list_term(rng() % 5) + ")";
      case 1:
        return "filter (fun x -> true) (" + list_term(rng() % 5) + ")";
      default:
        return "even " + nat_term(nat(rng));
    }
  }});
  fixtures.push_back({"mc91.hrs", [&]() {
    switch (rng() % 4) {
      case 0:
        return "ff " + nat_term(nat(rng));
      case 1:
        return "plus " + nat_term(nat(rng)) + " " + nat_term(nat(rng));
      case 2:
        return "minus " + nat_term(nat(rng)) + " " + nat_term(nat(rng));
      default:
        return "inf " + nat_term(nat(rng)) + " " + nat_term(nat(rng));
    }
  }});

  for (const auto& fc : fixtures) {
    Program p = load_fixture(fc.file);
    SymbolTable syms = symbol_table(p);
    RewriteSystem rs = rewrite_system(p);
    int ok = 0;
    for (int i = 0; i < 500; ++i) {
      TermPtr t = parse_term(fc.call(), syms);
      ReductionOutcome r = normalize(t, rs, 100000);
      if (r.normal_form) ++ok;
    }
    report(8, std::string("500 random ground calls into ") + fc.file +
                  " normalize",
           ok == 500, std::to_string(ok) + "/500");
  }
}

void criterion9_determinism() {
  for (const char* name : {"minus_div.hrs", "pivot.hrs", "filter.hrs",
                           "mc91.hrs", "loop.hrs", "loop2.hrs",
                           "mc91_noguard.hrs"}) {
    std::string args = "check " + g_fixtures + "/" + name + " --explain --json";
    CliResult a = run_cli(args);
    CliResult b = run_cli(args);
    report(9, std::string("byte-identical reports for ") + name,
           a.output == b.output && a.exit_code == b.exit_code);
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <cli-binary> <fixtures-dir>\n";
    return 2;
  }
  g_cli = argv[1];
  g_fixtures = argv[2];

  criterion1_fixture_acceptance();
  criterion2_obligation_replay();
  criterion3_negative_fixtures();
  criterion4_solver_differential();
  criterion5_subtyping_properties();
  criterion6_matching_soundness();
  criterion7_rewriter_oracles();
  criterion8_empirical_sn();
  criterion9_determinism();

  if (g_failures == 0) {
    std::cout << "acceptance: all criteria passed" << std::endl;
    return 0;
  }
  std::cout << "acceptance: " << g_failures << " criterion checks failed"
            << std::endl;
  return 1;
}
