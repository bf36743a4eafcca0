#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stc/parser.hpp"
#include "stc/typecheck.hpp"

using namespace stc;

namespace {

TypePtr T(const std::string& s) { return parse_type(s); }
ConstraintPtr P(const std::string& s) { return parse_constraint(s); }

SymbolTable list_syms() {
  SymbolTable s;
  s.symbols = {{"0", SymbolSignature::Kind::Constructor},
               {"s", SymbolSignature::Kind::Constructor},
               {"nil", SymbolSignature::Kind::Constructor},
               {"cons", SymbolSignature::Kind::Constructor},
               {"true", SymbolSignature::Kind::Constructor},
               {"false", SymbolSignature::Kind::Constructor},
               {"inf", SymbolSignature::Kind::Function},
               {"app", SymbolSignature::Kind::Function},
               {"pivot", SymbolSignature::Kind::Function}};
  return s;
}

TermPtr term_of(const std::string& s) { return parse_term(s, list_syms()); }

// The signatures of the pivot development.
TypeAssignment tau_pivot() {
  TypeAssignment tau;
  tau.types["0"] = T("nat^0");
  tau.types["s"] = T("forall a. nat^a -> nat^(a+1)");
  tau.types["nil"] = T("list^0");
  tau.types["cons"] = T("nat -> forall a. list^a -> list^(a+1)");
  tau.types["true"] = T("bool^tt");
  tau.types["false"] = T("bool^ff");
  tau.types["inf"] = T("nat -> nat -> bool");
  tau.types["app"] = T("forall b g. list^b -> list^g -> list^(b+g)");
  tau.types["pivot"] =
      T("nat -> forall a. list^a -> exists b g [a = b+g]. list^b * list^g");
  return tau;
}

// tau< for checking pivot's own rules: the recursive pivot only applies at
// sizes strictly below the rigid a.
TypeAssignment tau_pivot_less() {
  TypeAssignment tau = tau_pivot();
  tau.types["pivot"] =
      T("nat -> forall a' [a' < a]. list^a' -> "
        "exists b g [a' = b+g]. list^b * list^g");
  return tau;
}

}  // namespace

TEST_CASE("inference base cases") {
  Solver solver;
  TypeAssignment tau = tau_pivot();
  Environment env = {{"x", T("nat^e")}};
  InferResult r = infer_type(solver, tau, env, term_of("x"));
  CHECK(r.constraint->kind == Constraint::Kind::Truth);
  CHECK(type_alpha_equal(r.type, T("nat^e")));

  InferResult s = infer_type(solver, tau, {}, term_of("nil"));
  CHECK(type_alpha_equal(s.type, T("list^0")));
}

TEST_CASE("abstractions and conditionals are not inferable") {
  Solver solver;
  TypeAssignment tau = tau_pivot();
  FreshSupply fresh;
  Checker ch(tau, solver, fresh);
  CHECK_THROWS_AS(ch.infer({}, term_of("fun x -> x")), TypeError);
  CHECK_THROWS_AS(
      ch.infer({{"b", T("bool")}}, term_of("if b then nil else nil")),
      TypeError);
}

TEST_CASE("the condition of the worked example infers bool") {
  Solver solver;
  TypeAssignment tau = tau_pivot();
  Environment delta = {{"x", T("nat")}, {"y", T("nat")}, {"l", T("list^d")}};
  InferResult r = infer_type(solver, tau, delta, term_of("inf y x"));
  CHECK(type_alpha_equal(r.type, T("bool")));
  CHECK(solver.is_valid(r.constraint));
}

TEST_CASE("recursive pivot call infers the guarded instantiation") {
  Solver solver;
  TypeAssignment tau = tau_pivot_less();
  Environment env = {{"x", T("nat")}, {"l", T("list^d")}};
  InferResult r = infer_type(solver, tau, env, term_of("pivot x l"));
  // Constraint carries the instantiation guard: equivalent to d < a once the
  // inferred type's instantiation variable is pinned to d.
  FreshSupply fresh;
  fresh.reserve("a");
  fresh.reserve("d");
  ConstraintPtr link = gen_sub(
      r.type, T("exists b g [d = b+g]. list^b * list^g"), fresh);
  std::map<std::string, SizeSort> fv;
  free_size_vars(r.constraint, fv);
  free_size_vars(link, fv);
  SortedVars close;
  for (const auto& [n, s] : fv)
    if (n != "a" && n != "d") close.emplace_back(n, s);
  CHECK(solver.equiv(c_exists(close, c_and(r.constraint, link)), P("d < a")));
}

TEST_CASE("checking the conditional against the packaged pair type") {
  Solver solver;
  TypeAssignment tau = tau_pivot_less();
  FreshSupply fresh;
  std::map<std::string, SizeSort> reserved{{"a", SizeSort::Nat},
                                           {"b", SizeSort::Nat},
                                           {"g", SizeSort::Nat},
                                           {"d", SizeSort::Nat}};
  fresh.reserve_all(reserved);
  Checker ch(tau, solver, fresh);
  Environment delta = {{"x", T("nat")},
                       {"y", T("nat")},
                       {"z", T("list^b * list^g")}};
  TermPtr branch_then = term_of("(cons y (fst z), snd z)");
  TermPtr branch_else = term_of("(fst z, cons y (snd z))");
  TermPtr cond = mk_if(term_of("inf y x"), branch_then, branch_else);
  Judgment j = ch.check(delta, cond, T("exists b g [a = b+g]. list^b * list^g"));
  std::map<std::string, SizeSort> minted = j.minted;
  SortedVars close;
  for (const auto& [n, s] : minted) close.emplace_back(n, s);
  CHECK(solver.equiv(c_exists(close, j.constraint), P("a = b+g+1")));
}

TEST_CASE("the let-packaged judgment of the introduction accepts") {
  Solver solver;
  TypeAssignment tau = tau_pivot();
  Environment env = {{"x", T("nat")}, {"l", T("list^a")}};
  TermPtr u = term_of("let z = pivot x l in app (fst z) (snd z)");
  GateResult r = typecheck_gate(solver, tau, c_true(), env, u, T("list^a"));
  CHECK(r.status == GateResult::Status::Accepted);
}

TEST_CASE("identity checks against its arrow type") {
  Solver solver;
  TypeAssignment tau = tau_pivot();
  GateResult r = typecheck_gate(solver, tau, c_true(), {}, term_of("fun x -> x"),
                                T("nat^a -> nat^a"));
  CHECK(r.status == GateResult::Status::Accepted);
  CHECK(solver.is_valid(r.obligation));
}

TEST_CASE("abstraction against an existential arrow uses exists-intro") {
  Solver solver;
  TypeAssignment tau = tau_pivot();
  GateResult r = typecheck_gate(solver, tau, c_true(), {}, term_of("fun x -> x"),
                                T("exists a. nat^a -> nat^a"));
  CHECK(r.status == GateResult::Status::Accepted);
}

TEST_CASE("gate rejects unsatisfiable hypotheses and bad obligations") {
  Solver solver;
  TypeAssignment tau = tau_pivot();
  GateResult bottom = typecheck_gate(solver, tau, c_false(), {{"x", T("nat")}},
                                     term_of("x"), T("nat"));
  CHECK(bottom.status == GateResult::Status::Rejected);

  // s x : nat^a under x : nat^a forces a+1 = a.
  for (unsigned long long a = 0; a <= 20; ++a) CHECK(a + 1 != a);
  GateResult bad = typecheck_gate(solver, tau, c_true(), {{"x", T("nat^a")}},
                                  term_of("s x"), T("nat^a"));
  CHECK(bad.status == GateResult::Status::Rejected);

  GateResult mismatch = typecheck_gate(
      solver, tau, c_true(), {{"x", T("nat")}}, term_of("fun y -> y"), T("nat"));
  CHECK(mismatch.status == GateResult::Status::Rejected);
}

TEST_CASE("worked derivation end-to-end: pivot rule 2 right-hand side") {
  Solver solver;
  TypeAssignment tau = tau_pivot_less();
  Environment delta = {{"x", T("nat")}, {"y", T("nat")}, {"l", T("list^d")}};
  TermPtr r = term_of(
      "let z = pivot x l in "
      "if inf y x then (cons y (fst z), snd z) else (fst z, cons y (snd z))");
  TypePtr target = T("exists b g [a = b+g]. list^b * list^g");
  ConstraintPtr hyp = P("a = d+1");
  GateResult g = typecheck_gate(solver, tau, hyp, delta, r, target);
  REQUIRE(g.status == GateResult::Status::Accepted);
  // The closed obligation is logically equivalent to the published F.
  ConstraintPtr f = P(
      "d < a /\\ (exists b g. a = b+g) /\\ "
      "(forall b g. d = b+g -> a = b+g+1)");
  CHECK(solver.equiv(c_implies(hyp, g.obligation), c_implies(hyp, f)));
}

TEST_CASE("gate monotonicity under strengthened hypotheses") {
  Solver solver;
  TypeAssignment tau = tau_pivot_less();
  Environment delta = {{"x", T("nat")}, {"y", T("nat")}, {"l", T("list^d")}};
  TermPtr r = term_of("pivot x l");
  TypePtr target = T("exists b g [d = b+g]. list^b * list^g");
  ConstraintPtr weak = P("a = d+1");
  ConstraintPtr strong = P("a = d+1 /\\ d < 50");
  GateResult g1 = typecheck_gate(solver, tau, weak, delta, r, target);
  REQUIRE(g1.status == GateResult::Status::Accepted);
  CHECK(solver.entails(strong, weak));
  CHECK(solver.is_satisfiable(strong));
  GateResult g2 = typecheck_gate(solver, tau, strong, delta, r, target);
  CHECK(g2.status == GateResult::Status::Accepted);
}

TEST_CASE("satisfiable conclusions have satisfiable premises on the trace") {
  Solver solver;
  TypeAssignment tau = tau_pivot_less();
  Environment delta = {{"x", T("nat")}, {"y", T("nat")}, {"l", T("list^d")}};
  TermPtr r = term_of(
      "let z = pivot x l in "
      "if inf y x then (cons y (fst z), snd z) else (fst z, cons y (snd z))");
  TypePtr target = T("exists b g [a = b+g]. list^b * list^g");
  GateResult g = typecheck_gate(solver, tau, P("a = d+1"), delta, r, target);
  REQUIRE(g.status == GateResult::Status::Accepted);
  REQUIRE(g.trace.size() > 4);
  auto is_ancestor = [](const std::string& anc, const std::string& desc) {
    if (anc.size() >= desc.size()) return false;
    if (desc.compare(0, anc.size(), anc) != 0) return false;
    return desc[anc.size()] == '/';
  };
  for (size_t j = 0; j < g.trace.size(); ++j) {
    if (!solver.is_satisfiable(g.trace[j].constraint)) continue;
    for (size_t i = 0; i < j; ++i) {
      if (!is_ancestor(g.trace[j].path, g.trace[i].path)) continue;
      CHECK(solver.is_satisfiable(g.trace[i].constraint));
    }
  }
}

TEST_CASE("weakening on sizes: closed instances stay accepted") {
  Solver solver;
  TypeAssignment tau = tau_pivot();
  Environment env = {{"x", T("nat")}, {"l", T("list^a")}};
  TermPtr u = term_of("let z = pivot x l in app (fst z) (snd z)");
  TypePtr target = T("list^a");
  REQUIRE(typecheck_gate(solver, tau, c_true(), env, u, target).status ==
          GateResult::Status::Accepted);
  for (unsigned long long n : {0ull, 1ull, 5ull}) {
    SizeSubst phi = {{"a", size_literal(n)}};
    Environment env2;
    for (const auto& [k, t] : env) env2[k] = substitute_size(t, phi);
    GateResult g =
        typecheck_gate(solver, tau, c_true(), env2, u, substitute_size(target, phi));
    CHECK(g.status == GateResult::Status::Accepted);
  }
}
