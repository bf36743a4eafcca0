#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "generators.hpp"
#include "stc/parser.hpp"
#include "stc/subtyping.hpp"

using namespace stc;

namespace {

TypePtr T(const std::string& s) { return parse_type(s); }

}  // namespace

TEST_CASE("base clause is size equality") {
  FreshSupply fresh;
  ConstraintPtr c = gen_sub(T("nat^a"), T("nat^b"), fresh);
  CHECK(constraint_alpha_equal(c, parse_constraint("a = b")));
}

TEST_CASE("the worked pair-against-existential instance") {
  Solver s;
  FreshSupply fresh;
  fresh.reserve("a");
  fresh.reserve("b");
  fresh.reserve("g");
  ConstraintPtr c =
      gen_sub(T("list^(b+1) * list^g"),
              T("exists b' g' [a = b'+g']. list^b' * list^g'"), fresh);
  // exists b' g' (a = b'+g' /\ b+1 = b' /\ g = g'), up to freshening
  CHECK(s.equiv(c, parse_constraint("a = b+g+1")));
}

TEST_CASE("subsumption direction and failures") {
  Solver s;
  FreshSupply fresh;
  CHECK(check_sub(s, c_true(), T("nat^a"), T("nat"), fresh));
  CHECK(check_sub(s, parse_constraint("a = b"), T("nat^a"), T("nat^b"), fresh));
  CHECK_FALSE(check_sub(s, c_true(), T("nat^a"), T("nat^(a+1)"), fresh));
  // oracle for the last: a = a+1 has no solution in [0,20]
  for (unsigned long long a = 0; a <= 20; ++a) CHECK(a != a + 1);

  CHECK_THROWS_AS(gen_sub(T("nat -> nat"), T("nat * nat"), fresh),
                  SubtypeError);
  CHECK_THROWS_AS(gen_sub(T("nat^a"), T("list^a"), fresh), SubtypeError);
}

TEST_CASE("quantifier clause dispatch keeps both orders equivalent") {
  Solver s;
  // When both sides carry outer quantifiers the fixed order applies; the
  // other order must produce a logically equivalent constraint.
  TypePtr l = T("exists a [a <= 4]. nat^a");
  TypePtr r = T("exists b [b <= 9]. nat^b");
  FreshSupply f1;
  ConstraintPtr fixed = gen_sub(l, r, f1);
  // left-exists first: forall a (a<=4 -> exists b (b<=9 /\ a=b))
  CHECK(s.is_valid(fixed));
  // manual right-exists-first version
  ConstraintPtr other =
      parse_constraint("exists b. b <= 9 /\\ (forall a. a <= 4 -> a = b)");
  CHECK_FALSE(s.is_valid(other));  // the orders differ; dispatch matters
  ConstraintPtr left_first =
      parse_constraint("forall a. a <= 4 -> (exists b. b <= 9 /\\ a = b)");
  CHECK(s.equiv(fixed, left_first));
}

TEST_CASE("contravariance splits into the two halves syntactically") {
  TypePtr arrow1 = T("nat^x -> exists c. list^c");
  TypePtr arrow2 = T("nat^y -> list^y");
  FreshSupply combined;
  ConstraintPtr whole = gen_sub(arrow1, arrow2, combined);
  FreshSupply split;
  ConstraintPtr dom = gen_sub(arrow2->l, arrow1->l, split);
  ConstraintPtr cod = gen_sub(arrow1->r, arrow2->r, split);
  CHECK(constraint_alpha_equal(whole, c_and(dom, cod)));
}

TEST_CASE("reflexivity on random well-formed types") {
  Solver s;
  testgen::TypeGen gen(424242);
  int done = 0;
  for (int i = 0; i < 200; ++i) {
    TypePtr t = gen.random_type(4);
    FreshSupply fresh;
    fresh.reserve("a");
    fresh.reserve("b");
    bool ok;
    try {
      ok = s.is_valid(gen_sub(t, t, fresh));
    } catch (const SolverLimit&) {
      continue;
    }
    CHECK(ok);
    ++done;
  }
  CHECK(done >= 190);
}

TEST_CASE("transitivity entailment on compatible triples") {
  Solver s;
  testgen::TypeGen gen(7);
  int done = 0;
  for (int i = 0; i < 80; ++i) {
    auto [t, u, v] = gen.compatible_triple(3);
    FreshSupply fresh;
    fresh.reserve("a");
    fresh.reserve("b");
    bool ok;
    try {
      ConstraintPtr tu = gen_sub(t, u, fresh);
      ConstraintPtr uv = gen_sub(u, v, fresh);
      ConstraintPtr tv = gen_sub(t, v, fresh);
      ok = s.entails(c_and(tu, uv), tv);
    } catch (const SolverLimit&) {
      continue;
    }
    CHECK(ok);
    ++done;
  }
  CHECK(done >= 60);
}
