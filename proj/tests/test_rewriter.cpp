#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <random>
#include <sstream>

#include "stc/parser.hpp"
#include "stc/rewriter.hpp"
#include "stc/solver.hpp"

using namespace stc;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Program load_fixture(const std::string& name) {
  return parse_program(slurp(std::string(FIXTURE_DIR) + "/" + name));
}

// Direct recursive oracles, independent of the rewriting engine.
unsigned long long oracle_minus(unsigned long long a, unsigned long long b) {
  return a <= b ? (a == 0 ? 0 : (b == 0 ? a : oracle_minus(a - 1, b - 1)))
                : (b == 0 ? a : oracle_minus(a - 1, b - 1));
}

unsigned long long oracle_div(unsigned long long a, unsigned long long b) {
  if (a == 0) return 0;
  return 1 + oracle_div(oracle_minus(a - 1, b), b);
}

unsigned long long oracle_mc91(unsigned long long n) {
  if (n <= 100) return oracle_mc91(oracle_mc91(n + 11));
  return n - 10;
}

unsigned long long nat_of(const TermPtr& t) {
  unsigned long long n = 0;
  TermPtr cur = t;
  while (cur->kind == Term::Kind::App) {
    REQUIRE(cur->a->kind == Term::Kind::Ctor);
    REQUIRE(cur->a->name == "s");
    ++n;
    cur = cur->b;
  }
  REQUIRE(cur->kind == Term::Kind::Ctor);
  REQUIRE(cur->name == "0");
  return n;
}

}  // namespace

TEST_CASE("head beta steps implement exactly the six rules") {
  SymbolTable syms;
  syms.symbols = {{"true", SymbolSignature::Kind::Constructor},
                  {"false", SymbolSignature::Kind::Constructor}};
  auto t = [&](const std::string& s) { return parse_term(s, syms); };

  TermPtr r1 = head_beta_step(t("(fun x -> (x, x)) y"));
  REQUIRE(r1);
  CHECK(alpha_equal(r1, t("(y, y)")));

  TermPtr r2 = head_beta_step(t("let z = y in (z, z)"));
  REQUIRE(r2);
  CHECK(alpha_equal(r2, t("(y, y)")));

  CHECK(alpha_equal(head_beta_step(t("fst (u, v)")), t("u")));
  CHECK(alpha_equal(head_beta_step(t("snd (u, v)")), t("v")));
  CHECK(alpha_equal(head_beta_step(t("if true then u else v")), t("u")));
  CHECK(alpha_equal(head_beta_step(t("if false then u else v")), t("v")));

  CHECK(head_beta_step(t("x")) == nullptr);
  CHECK(head_beta_step(t("fst x")) == nullptr);
  CHECK(head_beta_step(t("if x then u else v")) == nullptr);
}

TEST_CASE("pattern matching binds variables and rejects mismatches") {
  SymbolTable syms;
  syms.symbols = {{"0", SymbolSignature::Kind::Constructor},
                  {"s", SymbolSignature::Kind::Constructor},
                  {"nil", SymbolSignature::Kind::Constructor},
                  {"cons", SymbolSignature::Kind::Constructor}};
  auto t = [&](const std::string& s) { return parse_term(s, syms); };

  auto m1 = match_pattern(p_ctor("cons", {p_var("y"), p_var("l")}),
                          t("cons 0 nil"));
  REQUIRE(m1);
  CHECK(alpha_equal(m1->at("y"), t("0")));
  CHECK(alpha_equal(m1->at("l"), t("nil")));

  CHECK_FALSE(match_pattern(p_ctor("s", {p_var("x")}), t("0")));

  auto m2 = match_pattern(p_var("x"), t("fun y -> y"));
  REQUIRE(m2);
  CHECK(alpha_equal(m2->at("x"), t("fun y -> y")));

  // nonlinear patterns need equal bindings
  auto nl = p_ctor("cons", {p_var("x"), p_ctor("cons", {p_var("x"), p_var("l")})});
  CHECK(match_pattern(nl, t("cons 0 (cons 0 nil)")));
  CHECK_FALSE(match_pattern(nl, t("cons 0 (cons (s 0) nil)")));
}

TEST_CASE("single steps follow declaration order, leftmost-outermost") {
  Program p = load_fixture("minus_div.hrs");
  SymbolTable syms = symbol_table(p);
  RewriteSystem rs = rewrite_system(p);
  auto t = [&](const std::string& s) { return parse_term(s, syms); };

  auto s1 = step(t("minus (s (s (s 0))) (s (s 0))"), rs, 1000);
  REQUIRE(s1);
  CHECK(alpha_equal(s1->term, t("minus (s (s 0)) (s 0)")));
  CHECK(s1->rule == "minus/rule3");

  CHECK_FALSE(step(t("s 0"), rs, 1000));
  CHECK_FALSE(step(t("x"), rs, 1000));

  // leftmost-outermost: the outer redex fires first
  auto s2 = step(t("minus (minus 0 0) (minus 0 0)"), rs, 1000);
  REQUIRE(s2);
  CHECK(s2->position == "./0/1");  // left argument in the application spine
}

TEST_CASE("conditions gate rule firing") {
  Program p = load_fixture("filter.hrs");
  SymbolTable syms = symbol_table(p);
  RewriteSystem rs = rewrite_system(p);
  auto t = [&](const std::string& s) { return parse_term(s, syms); };

  // even 0 normalizes to true, so the keep-branch fires
  ReductionOutcome keep = normalize(t("filter even (cons 0 nil)"), rs, 1000);
  CHECK(keep.normal_form);
  CHECK(alpha_equal(keep.result, t("cons 0 nil")));

  ReductionOutcome drop = normalize(t("filter even (cons (s 0) nil)"), rs, 1000);
  CHECK(drop.normal_form);
  CHECK(alpha_equal(drop.result, t("nil")));

  // λ-valued predicates work through beta
  ReductionOutcome all = normalize(
      t("filter (fun x -> true) (cons 0 (cons (s 0) nil))"), rs, 1000);
  CHECK(all.normal_form);
  CHECK(alpha_equal(all.result, t("cons 0 (cons (s 0) nil)")));
}

TEST_CASE("normalize reproduces the arithmetic oracles") {
  Program p = load_fixture("minus_div.hrs");
  SymbolTable syms = symbol_table(p);
  RewriteSystem rs = rewrite_system(p);
  auto t = [&](const std::string& s) { return parse_term(s, syms); };

  ReductionOutcome d = normalize(t("div 4 2"), rs, 100000);
  REQUIRE(d.normal_form);
  CHECK(nat_of(d.result) == 2);
  CHECK(nat_of(d.result) == oracle_div(4, 2));

  ReductionOutcome m = normalize(t("minus 3 2"), rs, 100000);
  REQUIRE(m.normal_form);
  CHECK(nat_of(m.result) == 1);

  ReductionOutcome x = normalize(t("x"), rs, 10);
  CHECK(x.normal_form);
  CHECK(alpha_equal(x.result, t("x")));

  for (unsigned long long a = 0; a <= 6; ++a)
    for (unsigned long long b = 0; b <= 6; ++b) {
      ReductionOutcome r = normalize(
          t("minus " + std::to_string(a) + " " + std::to_string(b)), rs,
          100000);
      REQUIRE(r.normal_form);
      CHECK(nat_of(r.result) == oracle_minus(a, b));
    }
}

TEST_CASE("mc91 normalizes to the oracle values") {
  Program p = load_fixture("mc91.hrs");
  SymbolTable syms = symbol_table(p);
  RewriteSystem rs = rewrite_system(p);
  auto t = [&](const std::string& s) { return parse_term(s, syms); };

  ReductionOutcome a = normalize(t("ff 100"), rs, 100000);
  REQUIRE(a.normal_form);
  CHECK(nat_of(a.result) == 91);
  CHECK(nat_of(a.result) == oracle_mc91(100));

  ReductionOutcome b = normalize(t("ff 105"), rs, 100000);
  REQUIRE(b.normal_form);
  CHECK(nat_of(b.result) == 95);
  CHECK(nat_of(b.result) == oracle_mc91(105));
}

TEST_CASE("ground sizes mirror the constructor annotations") {
  Solver solver;
  Program p = parse_program(R"(
type nat;
type tree > nat;
constructor 0 : nat^0;
constructor s : forall a. nat^a -> nat^(a+1);
constructor leaf : nat -> tree^0;
constructor node : forall a b. tree^a -> tree^b -> tree^(1+max(a, b));
)");
  SymbolTable syms = symbol_table(p);
  std::map<std::string, CtorShape> ctors;
  for (const auto& [n, sig] : p.signatures)
    if (sig.kind == SymbolSignature::Kind::Constructor)
      ctors.emplace(n, validate_constructor_signature(sig, solver).shape);
  auto t = [&](const std::string& s) { return parse_term(s, syms); };

  CHECK(std::get<unsigned long long>(ground_size(t("s (s 0)"), ctors)) == 2);
  CHECK(std::get<unsigned long long>(ground_size(
            t("node (leaf 0) (node (leaf 0) (leaf 0))"), ctors)) == 2);
  CHECK(std::get<bool>(ground_size(t("true"), ctors)) == true);
  CHECK_THROWS_AS(ground_size(t("x"), ctors), std::invalid_argument);
  CHECK_THROWS_AS(ground_size(t("s x"), ctors), std::invalid_argument);
}

TEST_CASE("determinism: normalize is a pure function of its inputs") {
  Program p = load_fixture("minus_div.hrs");
  SymbolTable syms = symbol_table(p);
  RewriteSystem rs = rewrite_system(p);
  TermPtr t = parse_term("div 6 2", syms);
  ReductionOutcome r1 = normalize(t, rs, 100000, true);
  ReductionOutcome r2 = normalize(t, rs, 100000, true);
  CHECK(alpha_equal(r1.result, r2.result));
  CHECK(r1.steps == r2.steps);
  CHECK(r1.trace == r2.trace);
}

TEST_CASE("fuel exhaustion reports a partial term") {
  Program p = load_fixture("loop.hrs");
  SymbolTable syms = symbol_table(p);
  RewriteSystem rs = rewrite_system(p);
  ReductionOutcome r = normalize(parse_term("f 0", syms), rs, 25);
  CHECK_FALSE(r.normal_form);
  CHECK(r.steps == 25);
}

TEST_CASE("size soundness of minus against its declared package") {
  Program p = load_fixture("minus_div.hrs");
  SymbolTable syms = symbol_table(p);
  RewriteSystem rs = rewrite_system(p);
  Solver solver;
  std::map<std::string, CtorShape> ctors;
  for (const auto& [n, sig] : p.signatures)
    if (sig.kind == SymbolSignature::Kind::Constructor)
      ctors.emplace(n, validate_constructor_signature(sig, solver).shape);
  for (unsigned long long a = 0; a <= 10; ++a)
    for (unsigned long long b = 0; b <= 10; ++b) {
      TermPtr t = parse_term("minus " + std::to_string(a) + " " +
                                 std::to_string(b), syms);
      ReductionOutcome r = normalize(t, rs, 100000);
      REQUIRE(r.normal_form);
      unsigned long long size =
          std::get<unsigned long long>(ground_size(r.result, ctors));
      CHECK(size <= a);  // the result never exceeds the first argument
    }
}

TEST_CASE("random ground calls reach normal forms quickly") {
  std::mt19937 rng(20250809);
  std::uniform_int_distribution<int> nat(0, 6);

  Program p = load_fixture("minus_div.hrs");
  SymbolTable syms = symbol_table(p);
  RewriteSystem rs = rewrite_system(p);
  for (int i = 0; i < 100; ++i) {
    std::string f = rng() % 2 ? "minus" : "div";
    TermPtr t = parse_term(
        f + " " + std::to_string(nat(rng)) + " " + std::to_string(nat(rng)),
        syms);
    ReductionOutcome r = normalize(t, rs, 100000);
    CHECK(r.normal_form);
  }
}
