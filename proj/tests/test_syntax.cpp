#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <functional>
#include <random>

#include "stc/syntax.hpp"

using namespace stc;

namespace {

TermPtr v(const char* n) { return mk_var(n); }

// Random closed-ish terms for the substitution composition property.
TermPtr random_term(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
  static const char* names[] = {"x", "y", "z", "w"};
  std::uniform_int_distribution<int> nm(0, 3);
  switch (pick(rng)) {
    case 0:
      return mk_var(names[nm(rng)]);
    case 1:
      return mk_ctor("c");
    case 2:
      return mk_abs(names[nm(rng)], random_term(rng, depth - 1));
    case 3:
      return mk_app(random_term(rng, depth - 1), random_term(rng, depth - 1));
    case 4:
      return mk_pair(random_term(rng, depth - 1), random_term(rng, depth - 1));
    case 5:
      return mk_fst(random_term(rng, depth - 1));
    case 6:
      return mk_let(names[nm(rng)], random_term(rng, depth - 1),
                    random_term(rng, depth - 1));
    default:
      return mk_if(random_term(rng, depth - 1), random_term(rng, depth - 1),
                   random_term(rng, depth - 1));
  }
}

}  // namespace

TEST_CASE("substitution leaves bound occurrences alone") {
  // (fun x -> x y){y := 0} = fun x -> x 0
  TermPtr t = mk_abs("x", mk_app(v("x"), v("y")));
  TermPtr r = substitute_term(t, {{"y", mk_ctor("0")}});
  CHECK(alpha_equal(r, mk_abs("x", mk_app(v("x"), mk_ctor("0")))));
}

TEST_CASE("substitution replaces a variable") {
  TermPtr sz = mk_app(mk_ctor("s"), v("z"));
  CHECK(alpha_equal(substitute_term(v("x"), {{"x", sz}}), sz));
}

TEST_CASE("substitution avoids capture") {
  // (fun x -> y){y := x} must rename the binder
  TermPtr t = mk_abs("x", v("y"));
  TermPtr r = substitute_term(t, {{"y", v("x")}});
  CHECK(r->kind == Term::Kind::Abs);
  CHECK(r->name != "x");
  CHECK(alpha_equal(r, mk_abs("q", v("x"))));
  CHECK_FALSE(alpha_equal(r, mk_abs("q", v("q"))));
}

TEST_CASE("alpha equality ignores binder names") {
  CHECK(alpha_equal(mk_abs("x", v("x")), mk_abs("y", v("y"))));
  CHECK_FALSE(alpha_equal(mk_abs("x", v("x")), mk_abs("y", v("x"))));
  CHECK(alpha_equal(mk_let("a", v("z"), v("a")), mk_let("b", v("z"), v("b"))));
}

TEST_CASE("substitution composition") {
  std::mt19937 rng(7);
  for (int i = 0; i < 300; ++i) {
    TermPtr t = random_term(rng, 4);
    TermSubst sigma = {{"x", random_term(rng, 2)}};
    TermSubst tau = {{"y", random_term(rng, 2)}};
    // Composition: apply sigma, then tau == apply (tau . sigma) in one pass.
    TermPtr lhs = substitute_term(substitute_term(t, sigma), tau);
    TermSubst composed = tau;
    for (const auto& [k, val] : sigma) composed[k] = substitute_term(val, tau);
    TermPtr rhs = substitute_term(t, composed);
    CHECK(alpha_equal(lhs, rhs));
  }
}

TEST_CASE("size substitution respects binders and sorts") {
  // nat^a {a := b+1}
  TypePtr t = t_base("nat", size_var("a", SizeSort::Nat));
  TypePtr r = substitute_size(
      t, {{"a", size_sum(size_var("b", SizeSort::Nat), size_one())}});
  CHECK(to_string(r) == "nat^(b+1)");

  // forall a [a < g]. nat^a {g := d}
  TypePtr q = t_forall({{"a", SizeSort::Nat}},
                       c_less(size_var("a", SizeSort::Nat),
                              size_var("g", SizeSort::Nat)),
                       t_base("nat", size_var("a", SizeSort::Nat)));
  TypePtr qr = substitute_size(q, {{"g", size_var("d", SizeSort::Nat)}});
  CHECK(type_alpha_equal(
      qr, t_forall({{"a", SizeSort::Nat}},
                   c_less(size_var("a", SizeSort::Nat),
                          size_var("d", SizeSort::Nat)),
                   t_base("nat", size_var("a", SizeSort::Nat)))));

  // bound variable shielded
  TypePtr e = t_exists({{"b", SizeSort::Nat}}, c_true(),
                       t_base("list", size_var("b", SizeSort::Nat)));
  CHECK(type_alpha_equal(substitute_size(e, {{"b", size_zero()}}), e));

  // sort mismatch rejected
  CHECK_THROWS_AS(
      substitute_size(t, SizeSubst{{"a", size_tt()}}),
      std::invalid_argument);
}

TEST_CASE("erase produces simple types and is idempotent") {
  TypePtr nat_a = t_base("nat", size_var("a", SizeSort::Nat));
  TypePtr nat_b = t_base("nat", size_var("b", SizeSort::Nat));
  TypePtr tau_minus = t_forall({{"a", SizeSort::Nat}, {"b", SizeSort::Nat}},
                               c_true(), t_arrow(nat_a, t_arrow(nat_b, nat_a)));
  TypePtr er = erase(tau_minus);
  CHECK(type_alpha_equal(
      er, t_arrow(t_bare("nat"), t_arrow(t_bare("nat"), t_bare("nat")))));
  CHECK(is_simple(er));
  CHECK(type_alpha_equal(erase(er), er));

  TypePtr prod = t_exists(
      {{"b", SizeSort::Nat}, {"g", SizeSort::Nat}},
      c_eq(size_var("a", SizeSort::Nat),
           size_sum(size_var("b", SizeSort::Nat), size_var("g", SizeSort::Nat))),
      t_product(t_base("list", size_var("b", SizeSort::Nat)),
                t_base("list", size_var("g", SizeSort::Nat))));
  CHECK(type_alpha_equal(erase(prod),
                         t_product(t_bare("list"), t_bare("list"))));
  CHECK(type_alpha_equal(erase(t_base("bool", size_tt())), t_bare("bool")));
}

TEST_CASE("environment compatibility") {
  TypePtr nat_e = t_base("nat", size_var("ex", SizeSort::Nat));
  TypePtr list_d = t_base("list", size_var("d", SizeSort::Nat));
  Environment g1 = {{"x", nat_e}};
  Environment g2 = {{"x", nat_e}, {"y", list_d}};
  CHECK(check_compatible(g1, g2).ok);
  CHECK(check_compatible({}, g2).ok);

  Environment g3 = {{"x", t_base("nat", size_var("a", SizeSort::Nat))}};
  Environment g4 = {{"x", t_base("nat", size_var("b", SizeSort::Nat))}};
  auto r = check_compatible(g3, g4);
  CHECK_FALSE(r.ok);
  CHECK(r.var == "x");
}

TEST_CASE("erase idempotence on random types") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> pick(0, 4);
  std::function<TypePtr(int)> gen = [&](int depth) -> TypePtr {
    if (depth <= 0) return t_base("nat", size_var("a", SizeSort::Nat));
    switch (pick(rng)) {
      case 0:
        return t_base("list", size_var("b", SizeSort::Nat));
      case 1:
        return t_arrow(gen(depth - 1), gen(depth - 1));
      case 2:
        return t_product(gen(depth - 1), gen(depth - 1));
      case 3:
        return t_forall({{"a", SizeSort::Nat}}, c_true(), gen(depth - 1));
      default:
        return t_exists({{"b", SizeSort::Nat}},
                        c_leq(size_var("b", SizeSort::Nat), size_literal(4)),
                        gen(depth - 1));
    }
  };
  for (int i = 0; i < 200; ++i) {
    TypePtr t = gen(3);
    CHECK(type_alpha_equal(erase(erase(t)), erase(t)));
    CHECK(is_simple(erase(t)));
  }
}

TEST_CASE("printing round-trips basic forms") {
  CHECK(to_string(t_bare("nat")) == "nat");
  CHECK(to_string(t_base("bool", size_tt())) == "bool^tt");
  TypePtr nat_a = t_base("nat", size_var("a", SizeSort::Nat));
  CHECK(to_string(t_arrow(nat_a, nat_a)) == "nat^a -> nat^a");
  CHECK(to_string(mk_app(mk_fun("minus"), mk_var("x"))) == "minus x");
  CHECK(to_string(mk_abs("x", mk_var("x"))) == "fun x -> x");
}
