#include "stc/subtyping.hpp"

namespace stc {

namespace {

// Renames the outer binder of a quantified type apart, returning the
// renamed variable list plus the substituted guard and body.
struct Opened {
  SortedVars vars;
  ConstraintPtr guard;
  TypePtr body;
};

Opened open_quant(const TypePtr& t, FreshSupply& fresh) {
  Opened o;
  SizeSubst s;
  for (const auto& [n, srt] : t->vars) {
    std::string nn = fresh.fresh(n);
    o.vars.emplace_back(nn, srt);
    s[n] = size_var(nn, srt);
  }
  o.guard = substitute_size(t->guard, s);
  o.body = substitute_size(t->body, s);
  return o;
}

}  // namespace

ConstraintPtr gen_sub(const TypePtr& t, const TypePtr& u, FreshSupply& fresh) {
  // Quantifier clauses, in the fixed dispatch order.
  if (u->kind == Type::Kind::Forall) {
    Opened o = open_quant(u, fresh);
    return c_forall(o.vars, c_implies(o.guard, gen_sub(t, o.body, fresh)));
  }
  if (t->kind == Type::Kind::Exists) {
    Opened o = open_quant(t, fresh);
    return c_forall(o.vars, c_implies(o.guard, gen_sub(o.body, u, fresh)));
  }
  if (u->kind == Type::Kind::Exists) {
    Opened o = open_quant(u, fresh);
    return c_exists(o.vars, c_and(o.guard, gen_sub(t, o.body, fresh)));
  }
  if (t->kind == Type::Kind::Forall) {
    Opened o = open_quant(t, fresh);
    return c_exists(o.vars, c_and(o.guard, gen_sub(o.body, u, fresh)));
  }
  if (t->kind != u->kind)
    throw SubtypeError("structural mismatch: " + to_string(t) + " vs " +
                       to_string(u));
  switch (t->kind) {
    case Type::Kind::Base:
      if (t->base != u->base)
        throw SubtypeError("base type mismatch: " + t->base + " vs " + u->base);
      return c_eq(t->annot, u->annot);
    case Type::Kind::Arrow:
      return c_and(gen_sub(u->l, t->l, fresh), gen_sub(t->r, u->r, fresh));
    case Type::Kind::Product:
      return c_and(gen_sub(t->l, u->l, fresh), gen_sub(t->r, u->r, fresh));
    default:
      throw SubtypeError("unreachable subtyping case");
  }
}

bool check_sub(Solver& solver, const ConstraintPtr& c, const TypePtr& t,
               const TypePtr& u, FreshSupply& fresh) {
  return solver.entails(c, gen_sub(t, u, fresh));
}

}  // namespace stc
