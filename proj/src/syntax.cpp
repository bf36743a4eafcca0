#include "stc/syntax.hpp"

#include <algorithm>
#include <sstream>

namespace stc {

std::string to_string(SizeSort s) {
  return s == SizeSort::Nat ? "nat" : "bool";
}

// ---------------------------------------------------------------------------
// Size expressions

SizeSort SizeExpr::sort() const {
  switch (kind) {
    case Kind::Var: return var_sort;
    case Kind::Zero:
    case Kind::One:
    case Kind::Literal:
    case Kind::Sum:
    case Kind::Max: return SizeSort::Nat;
    case Kind::TT:
    case Kind::FF:
    case Kind::Le: return SizeSort::Bool;
  }
  return SizeSort::Nat;
}

static SizePtr mk_size(SizeExpr e) {
  return std::make_shared<const SizeExpr>(std::move(e));
}

SizePtr size_var(std::string name, SizeSort sort) {
  SizeExpr e;
  e.kind = SizeExpr::Kind::Var;
  e.name = std::move(name);
  e.var_sort = sort;
  return mk_size(std::move(e));
}

SizePtr size_zero() {
  SizeExpr e;
  e.kind = SizeExpr::Kind::Zero;
  return mk_size(std::move(e));
}

SizePtr size_one() {
  SizeExpr e;
  e.kind = SizeExpr::Kind::One;
  return mk_size(std::move(e));
}

SizePtr size_literal(unsigned long long n) {
  SizeExpr e;
  e.kind = SizeExpr::Kind::Literal;
  e.value = n;
  return mk_size(std::move(e));
}

static void require_nat(const SizePtr& a, const char* who) {
  if (a->sort() != SizeSort::Nat)
    throw std::invalid_argument(std::string(who) + " takes nat arguments");
}

SizePtr size_sum(SizePtr a, SizePtr b) {
  require_nat(a, "sum");
  require_nat(b, "sum");
  SizeExpr e;
  e.kind = SizeExpr::Kind::Sum;
  e.lhs = std::move(a);
  e.rhs = std::move(b);
  return mk_size(std::move(e));
}

SizePtr size_max(SizePtr a, SizePtr b) {
  require_nat(a, "max");
  require_nat(b, "max");
  SizeExpr e;
  e.kind = SizeExpr::Kind::Max;
  e.lhs = std::move(a);
  e.rhs = std::move(b);
  return mk_size(std::move(e));
}

SizePtr size_tt() {
  SizeExpr e;
  e.kind = SizeExpr::Kind::TT;
  return mk_size(std::move(e));
}

SizePtr size_ff() {
  SizeExpr e;
  e.kind = SizeExpr::Kind::FF;
  return mk_size(std::move(e));
}

SizePtr size_le(SizePtr a, SizePtr b) {
  require_nat(a, "le");
  require_nat(b, "le");
  SizeExpr e;
  e.kind = SizeExpr::Kind::Le;
  e.lhs = std::move(a);
  e.rhs = std::move(b);
  return mk_size(std::move(e));
}

bool size_equal(const SizePtr& a, const SizePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case SizeExpr::Kind::Var:
      return a->name == b->name && a->var_sort == b->var_sort;
    case SizeExpr::Kind::Zero:
    case SizeExpr::Kind::One:
    case SizeExpr::Kind::TT:
    case SizeExpr::Kind::FF:
      return true;
    case SizeExpr::Kind::Literal:
      return a->value == b->value;
    case SizeExpr::Kind::Sum:
    case SizeExpr::Kind::Max:
    case SizeExpr::Kind::Le:
      return size_equal(a->lhs, b->lhs) && size_equal(a->rhs, b->rhs);
  }
  return false;
}

void free_size_vars(const SizePtr& e, std::map<std::string, SizeSort>& out) {
  if (!e) return;
  if (e->kind == SizeExpr::Kind::Var) {
    out.emplace(e->name, e->var_sort);
    return;
  }
  free_size_vars(e->lhs, out);
  free_size_vars(e->rhs, out);
}

// ---------------------------------------------------------------------------
// Constraints

static ConstraintPtr mk_con(Constraint c) {
  return std::make_shared<const Constraint>(std::move(c));
}

ConstraintPtr c_true() {
  Constraint c;
  c.kind = Constraint::Kind::Truth;
  return mk_con(std::move(c));
}

ConstraintPtr c_false() {
  Constraint c;
  c.kind = Constraint::Kind::Falsity;
  return mk_con(std::move(c));
}

ConstraintPtr c_eq(SizePtr a, SizePtr b) {
  if (a->sort() != b->sort())
    throw std::invalid_argument("equality between different size sorts");
  Constraint c;
  c.kind = Constraint::Kind::Equal;
  c.a = std::move(a);
  c.b = std::move(b);
  return mk_con(std::move(c));
}

ConstraintPtr c_less(SizePtr a, SizePtr b) {
  require_nat(a, "<");
  require_nat(b, "<");
  Constraint c;
  c.kind = Constraint::Kind::Less;
  c.a = std::move(a);
  c.b = std::move(b);
  return mk_con(std::move(c));
}

ConstraintPtr c_leq(SizePtr a, SizePtr b) {
  require_nat(a, "<=");
  require_nat(b, "<=");
  Constraint c;
  c.kind = Constraint::Kind::Leq;
  c.a = std::move(a);
  c.b = std::move(b);
  return mk_con(std::move(c));
}

static ConstraintPtr binop(Constraint::Kind k, ConstraintPtr l, ConstraintPtr r) {
  Constraint c;
  c.kind = k;
  c.l = std::move(l);
  c.r = std::move(r);
  return mk_con(std::move(c));
}

ConstraintPtr c_and(ConstraintPtr l, ConstraintPtr r) {
  if (l->kind == Constraint::Kind::Truth) return r;
  if (r->kind == Constraint::Kind::Truth) return l;
  return binop(Constraint::Kind::And, std::move(l), std::move(r));
}

ConstraintPtr c_or(ConstraintPtr l, ConstraintPtr r) {
  return binop(Constraint::Kind::Or, std::move(l), std::move(r));
}

ConstraintPtr c_not(ConstraintPtr c) {
  Constraint n;
  n.kind = Constraint::Kind::Not;
  n.l = std::move(c);
  return mk_con(std::move(n));
}

ConstraintPtr c_implies(ConstraintPtr l, ConstraintPtr r) {
  if (l->kind == Constraint::Kind::Truth) return r;
  return binop(Constraint::Kind::Implies, std::move(l), std::move(r));
}

ConstraintPtr c_iff(ConstraintPtr l, ConstraintPtr r) {
  return binop(Constraint::Kind::Iff, std::move(l), std::move(r));
}

ConstraintPtr c_exists(SortedVars vars, ConstraintPtr body) {
  // Size sorts are inhabited, so quantified constants collapse.
  if (vars.empty() || body->kind == Constraint::Kind::Truth ||
      body->kind == Constraint::Kind::Falsity)
    return body;
  Constraint c;
  c.kind = Constraint::Kind::Exists;
  c.vars = std::move(vars);
  c.l = std::move(body);
  return mk_con(std::move(c));
}

ConstraintPtr c_forall(SortedVars vars, ConstraintPtr body) {
  if (vars.empty() || body->kind == Constraint::Kind::Truth ||
      body->kind == Constraint::Kind::Falsity)
    return body;
  Constraint c;
  c.kind = Constraint::Kind::Forall;
  c.vars = std::move(vars);
  c.l = std::move(body);
  return mk_con(std::move(c));
}

ConstraintPtr c_and_all(const std::vector<ConstraintPtr>& cs) {
  ConstraintPtr acc = c_true();
  for (const auto& c : cs) acc = c_and(acc, c);
  return acc;
}

void free_size_vars(const ConstraintPtr& c, std::map<std::string, SizeSort>& out) {
  if (!c) return;
  switch (c->kind) {
    case Constraint::Kind::Truth:
    case Constraint::Kind::Falsity:
      return;
    case Constraint::Kind::Equal:
    case Constraint::Kind::Less:
    case Constraint::Kind::Leq:
      free_size_vars(c->a, out);
      free_size_vars(c->b, out);
      return;
    case Constraint::Kind::Not:
      free_size_vars(c->l, out);
      return;
    case Constraint::Kind::And:
    case Constraint::Kind::Or:
    case Constraint::Kind::Implies:
    case Constraint::Kind::Iff:
      free_size_vars(c->l, out);
      free_size_vars(c->r, out);
      return;
    case Constraint::Kind::Exists:
    case Constraint::Kind::Forall: {
      std::map<std::string, SizeSort> inner;
      free_size_vars(c->l, inner);
      for (const auto& [n, s] : c->vars) inner.erase(n);
      for (const auto& [n, s] : inner) out.emplace(n, s);
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Types

static TypePtr mk_type(Type t) {
  return std::make_shared<const Type>(std::move(t));
}

SizeSort annot_sort(const std::string& base_name) {
  return base_name == "bool" ? SizeSort::Bool : SizeSort::Nat;
}

TypePtr t_base(std::string name, SizePtr annot) {
  if (annot->sort() != annot_sort(name))
    throw std::invalid_argument("annotation sort mismatch on " + name);
  Type t;
  t.kind = Type::Kind::Base;
  t.base = std::move(name);
  t.annot = std::move(annot);
  return mk_type(std::move(t));
}

TypePtr t_arrow(TypePtr dom, TypePtr cod) {
  Type t;
  t.kind = Type::Kind::Arrow;
  t.l = std::move(dom);
  t.r = std::move(cod);
  return mk_type(std::move(t));
}

TypePtr t_product(TypePtr l, TypePtr r) {
  Type t;
  t.kind = Type::Kind::Product;
  t.l = std::move(l);
  t.r = std::move(r);
  return mk_type(std::move(t));
}

TypePtr t_forall(SortedVars vars, ConstraintPtr guard, TypePtr body) {
  if (vars.empty()) return body;
  Type t;
  t.kind = Type::Kind::Forall;
  t.vars = std::move(vars);
  t.guard = std::move(guard);
  t.body = std::move(body);
  return mk_type(std::move(t));
}

TypePtr t_exists(SortedVars vars, ConstraintPtr guard, TypePtr body) {
  if (vars.empty()) return body;
  Type t;
  t.kind = Type::Kind::Exists;
  t.vars = std::move(vars);
  t.guard = std::move(guard);
  t.body = std::move(body);
  return mk_type(std::move(t));
}

TypePtr t_bare(const std::string& base_name) {
  SizeSort s = annot_sort(base_name);
  return t_exists({{"a", s}}, c_true(), t_base(base_name, size_var("a", s)));
}

void free_size_vars(const TypePtr& t, std::map<std::string, SizeSort>& out) {
  if (!t) return;
  switch (t->kind) {
    case Type::Kind::Base:
      free_size_vars(t->annot, out);
      return;
    case Type::Kind::Arrow:
    case Type::Kind::Product:
      free_size_vars(t->l, out);
      free_size_vars(t->r, out);
      return;
    case Type::Kind::Forall:
    case Type::Kind::Exists: {
      std::map<std::string, SizeSort> inner;
      free_size_vars(t->guard, inner);
      free_size_vars(t->body, inner);
      for (const auto& [n, s] : t->vars) inner.erase(n);
      for (const auto& [n, s] : inner) out.emplace(n, s);
      return;
    }
  }
}

TypePtr erase(const TypePtr& t) {
  switch (t->kind) {
    case Type::Kind::Base:
      return t_bare(t->base);
    case Type::Kind::Arrow:
      return t_arrow(erase(t->l), erase(t->r));
    case Type::Kind::Product:
      return t_product(erase(t->l), erase(t->r));
    case Type::Kind::Forall:
    case Type::Kind::Exists:
      return erase(t->body);
  }
  return t;
}

bool is_simple(const TypePtr& t) {
  return type_alpha_equal(t, erase(t));
}

// ---------------------------------------------------------------------------
// Alpha equivalence for sizes/constraints/types via bound-variable maps.

namespace {

using NameMap = std::map<std::string, std::string>;

bool size_aeq(const SizePtr& a, const SizePtr& b, const NameMap& ma, const NameMap& mb) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case SizeExpr::Kind::Var: {
      auto ia = ma.find(a->name);
      auto ib = mb.find(b->name);
      if ((ia != ma.end()) != (ib != mb.end())) return false;
      if (ia != ma.end()) return ia->second == ib->second;
      return a->name == b->name && a->var_sort == b->var_sort;
    }
    case SizeExpr::Kind::Zero:
    case SizeExpr::Kind::One:
    case SizeExpr::Kind::TT:
    case SizeExpr::Kind::FF:
      return true;
    case SizeExpr::Kind::Literal:
      return a->value == b->value;
    case SizeExpr::Kind::Sum:
    case SizeExpr::Kind::Max:
    case SizeExpr::Kind::Le:
      return size_aeq(a->lhs, b->lhs, ma, mb) && size_aeq(a->rhs, b->rhs, ma, mb);
  }
  return false;
}

bool con_aeq(const ConstraintPtr& a, const ConstraintPtr& b, NameMap ma, NameMap mb,
             long long& counter) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Constraint::Kind::Truth:
    case Constraint::Kind::Falsity:
      return true;
    case Constraint::Kind::Equal:
    case Constraint::Kind::Less:
    case Constraint::Kind::Leq:
      return size_aeq(a->a, b->a, ma, mb) && size_aeq(a->b, b->b, ma, mb);
    case Constraint::Kind::Not:
      return con_aeq(a->l, b->l, ma, mb, counter);
    case Constraint::Kind::And:
    case Constraint::Kind::Or:
    case Constraint::Kind::Implies:
    case Constraint::Kind::Iff:
      return con_aeq(a->l, b->l, ma, mb, counter) && con_aeq(a->r, b->r, ma, mb, counter);
    case Constraint::Kind::Exists:
    case Constraint::Kind::Forall: {
      if (a->vars.size() != b->vars.size()) return false;
      for (size_t i = 0; i < a->vars.size(); ++i) {
        if (a->vars[i].second != b->vars[i].second) return false;
        std::string canon = "#" + std::to_string(counter++);
        ma[a->vars[i].first] = canon;
        mb[b->vars[i].first] = canon;
      }
      return con_aeq(a->l, b->l, ma, mb, counter);
    }
  }
  return false;
}

bool type_aeq(const TypePtr& a, const TypePtr& b, NameMap ma, NameMap mb,
              long long& counter) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Type::Kind::Base:
      return a->base == b->base && size_aeq(a->annot, b->annot, ma, mb);
    case Type::Kind::Arrow:
    case Type::Kind::Product:
      return type_aeq(a->l, b->l, ma, mb, counter) && type_aeq(a->r, b->r, ma, mb, counter);
    case Type::Kind::Forall:
    case Type::Kind::Exists: {
      if (a->vars.size() != b->vars.size()) return false;
      for (size_t i = 0; i < a->vars.size(); ++i) {
        if (a->vars[i].second != b->vars[i].second) return false;
        std::string canon = "#" + std::to_string(counter++);
        ma[a->vars[i].first] = canon;
        mb[b->vars[i].first] = canon;
      }
      return con_aeq(a->guard, b->guard, ma, mb, counter) &&
             type_aeq(a->body, b->body, ma, mb, counter);
    }
  }
  return false;
}

}  // namespace

bool constraint_alpha_equal(const ConstraintPtr& a, const ConstraintPtr& b) {
  long long counter = 0;
  return con_aeq(a, b, {}, {}, counter);
}

bool type_alpha_equal(const TypePtr& a, const TypePtr& b) {
  long long counter = 0;
  return type_aeq(a, b, {}, {}, counter);
}

// ---------------------------------------------------------------------------
// Terms

static TermPtr mk_term(Term t) {
  return std::make_shared<const Term>(std::move(t));
}

TermPtr mk_var(std::string name) {
  Term t;
  t.kind = Term::Kind::Var;
  t.name = std::move(name);
  return mk_term(std::move(t));
}

TermPtr mk_ctor(std::string name) {
  Term t;
  t.kind = Term::Kind::Ctor;
  t.name = std::move(name);
  return mk_term(std::move(t));
}

TermPtr mk_fun(std::string name) {
  Term t;
  t.kind = Term::Kind::Fun;
  t.name = std::move(name);
  return mk_term(std::move(t));
}

TermPtr mk_abs(std::string var, TermPtr body) {
  Term t;
  t.kind = Term::Kind::Abs;
  t.name = std::move(var);
  t.a = std::move(body);
  return mk_term(std::move(t));
}

TermPtr mk_app(TermPtr f, TermPtr arg) {
  Term t;
  t.kind = Term::Kind::App;
  t.a = std::move(f);
  t.b = std::move(arg);
  return mk_term(std::move(t));
}

TermPtr mk_pair(TermPtr a, TermPtr b) {
  Term t;
  t.kind = Term::Kind::Pair;
  t.a = std::move(a);
  t.b = std::move(b);
  return mk_term(std::move(t));
}

TermPtr mk_fst(TermPtr a) {
  Term t;
  t.kind = Term::Kind::Fst;
  t.a = std::move(a);
  return mk_term(std::move(t));
}

TermPtr mk_snd(TermPtr a) {
  Term t;
  t.kind = Term::Kind::Snd;
  t.a = std::move(a);
  return mk_term(std::move(t));
}

TermPtr mk_let(std::string var, TermPtr bound, TermPtr body) {
  Term t;
  t.kind = Term::Kind::Let;
  t.name = std::move(var);
  t.a = std::move(bound);
  t.b = std::move(body);
  return mk_term(std::move(t));
}

TermPtr mk_if(TermPtr cond, TermPtr then_br, TermPtr else_br) {
  Term t;
  t.kind = Term::Kind::If;
  t.a = std::move(cond);
  t.b = std::move(then_br);
  t.c = std::move(else_br);
  return mk_term(std::move(t));
}

static void collect_fv(const TermPtr& t, std::set<std::string>& bound,
                       std::set<std::string>& out) {
  switch (t->kind) {
    case Term::Kind::Var:
      if (!bound.count(t->name)) out.insert(t->name);
      return;
    case Term::Kind::Ctor:
    case Term::Kind::Fun:
      return;
    case Term::Kind::Abs: {
      bool added = bound.insert(t->name).second;
      collect_fv(t->a, bound, out);
      if (added) bound.erase(t->name);
      return;
    }
    case Term::Kind::App:
    case Term::Kind::Pair:
      collect_fv(t->a, bound, out);
      collect_fv(t->b, bound, out);
      return;
    case Term::Kind::Fst:
    case Term::Kind::Snd:
      collect_fv(t->a, bound, out);
      return;
    case Term::Kind::Let: {
      collect_fv(t->a, bound, out);
      bool added = bound.insert(t->name).second;
      collect_fv(t->b, bound, out);
      if (added) bound.erase(t->name);
      return;
    }
    case Term::Kind::If:
      collect_fv(t->a, bound, out);
      collect_fv(t->b, bound, out);
      collect_fv(t->c, bound, out);
      return;
  }
}

std::set<std::string> free_vars(const TermPtr& t) {
  std::set<std::string> bound, out;
  collect_fv(t, bound, out);
  return out;
}

static bool term_aeq(const TermPtr& a, const TermPtr& b, NameMap ma, NameMap mb,
                     long long& counter) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Term::Kind::Var: {
      auto ia = ma.find(a->name);
      auto ib = mb.find(b->name);
      if ((ia != ma.end()) != (ib != mb.end())) return false;
      if (ia != ma.end()) return ia->second == ib->second;
      return a->name == b->name;
    }
    case Term::Kind::Ctor:
    case Term::Kind::Fun:
      return a->name == b->name;
    case Term::Kind::Abs: {
      std::string canon = "#" + std::to_string(counter++);
      ma[a->name] = canon;
      mb[b->name] = canon;
      return term_aeq(a->a, b->a, ma, mb, counter);
    }
    case Term::Kind::App:
    case Term::Kind::Pair:
      return term_aeq(a->a, b->a, ma, mb, counter) &&
             term_aeq(a->b, b->b, ma, mb, counter);
    case Term::Kind::Fst:
    case Term::Kind::Snd:
      return term_aeq(a->a, b->a, ma, mb, counter);
    case Term::Kind::Let: {
      if (!term_aeq(a->a, b->a, ma, mb, counter)) return false;
      std::string canon = "#" + std::to_string(counter++);
      ma[a->name] = canon;
      mb[b->name] = canon;
      return term_aeq(a->b, b->b, ma, mb, counter);
    }
    case Term::Kind::If:
      return term_aeq(a->a, b->a, ma, mb, counter) &&
             term_aeq(a->b, b->b, ma, mb, counter) &&
             term_aeq(a->c, b->c, ma, mb, counter);
  }
  return false;
}

bool alpha_equal(const TermPtr& a, const TermPtr& b) {
  long long counter = 0;
  return term_aeq(a, b, {}, {}, counter);
}

namespace {

std::string rename_away(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (long long i = 1;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

TermPtr subst_rec(const TermPtr& t, const TermSubst& s,
                  const std::set<std::string>& range_fv) {
  switch (t->kind) {
    case Term::Kind::Var: {
      auto it = s.find(t->name);
      return it == s.end() ? t : it->second;
    }
    case Term::Kind::Ctor:
    case Term::Kind::Fun:
      return t;
    case Term::Kind::Abs: {
      TermSubst inner = s;
      inner.erase(t->name);
      std::string v = t->name;
      TermPtr body = t->a;
      if (range_fv.count(v)) {
        std::set<std::string> avoid = range_fv;
        for (const auto& fv : free_vars(body)) avoid.insert(fv);
        v = rename_away(v, avoid);
        inner[t->name] = mk_var(v);
      }
      if (inner.empty()) return t;
      return mk_abs(v, subst_rec(body, inner, range_fv));
    }
    case Term::Kind::App:
      return mk_app(subst_rec(t->a, s, range_fv), subst_rec(t->b, s, range_fv));
    case Term::Kind::Pair:
      return mk_pair(subst_rec(t->a, s, range_fv), subst_rec(t->b, s, range_fv));
    case Term::Kind::Fst:
      return mk_fst(subst_rec(t->a, s, range_fv));
    case Term::Kind::Snd:
      return mk_snd(subst_rec(t->a, s, range_fv));
    case Term::Kind::Let: {
      TermPtr bound = subst_rec(t->a, s, range_fv);
      TermSubst inner = s;
      inner.erase(t->name);
      std::string v = t->name;
      TermPtr body = t->b;
      if (range_fv.count(v)) {
        std::set<std::string> avoid = range_fv;
        for (const auto& fv : free_vars(body)) avoid.insert(fv);
        v = rename_away(v, avoid);
        inner[t->name] = mk_var(v);
      }
      return mk_let(v, bound, subst_rec(body, inner, range_fv));
    }
    case Term::Kind::If:
      return mk_if(subst_rec(t->a, s, range_fv), subst_rec(t->b, s, range_fv),
                   subst_rec(t->c, s, range_fv));
  }
  return t;
}

}  // namespace

TermPtr substitute_term(const TermPtr& t, const TermSubst& subst) {
  if (subst.empty()) return t;
  std::set<std::string> range_fv;
  for (const auto& [k, v] : subst)
    for (const auto& fv : free_vars(v)) range_fv.insert(fv);
  return subst_rec(t, subst, range_fv);
}

std::vector<TermPtr> spine(const TermPtr& t, TermPtr& head) {
  std::vector<TermPtr> args;
  TermPtr cur = t;
  while (cur->kind == Term::Kind::App) {
    args.push_back(cur->b);
    cur = cur->a;
  }
  head = cur;
  std::reverse(args.begin(), args.end());
  return args;
}

// ---------------------------------------------------------------------------
// Patterns

PatternPtr p_var(std::string name) {
  Pattern p;
  p.kind = Pattern::Kind::Var;
  p.name = std::move(name);
  return std::make_shared<const Pattern>(std::move(p));
}

PatternPtr p_ctor(std::string name, std::vector<PatternPtr> args) {
  Pattern p;
  p.kind = Pattern::Kind::Ctor;
  p.name = std::move(name);
  p.args = std::move(args);
  return std::make_shared<const Pattern>(std::move(p));
}

TermPtr pattern_to_term(const PatternPtr& p) {
  if (p->kind == Pattern::Kind::Var) return mk_var(p->name);
  TermPtr t = mk_ctor(p->name);
  for (const auto& a : p->args) t = mk_app(t, pattern_to_term(a));
  return t;
}

std::set<std::string> pattern_vars(const PatternPtr& p) {
  std::set<std::string> out;
  if (p->kind == Pattern::Kind::Var) {
    out.insert(p->name);
    return out;
  }
  for (const auto& a : p->args) {
    auto sub = pattern_vars(a);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Size substitution

SizePtr substitute_size(const SizePtr& e, const SizeSubst& s) {
  switch (e->kind) {
    case SizeExpr::Kind::Var: {
      auto it = s.find(e->name);
      if (it == s.end()) return e;
      if (it->second->sort() != e->var_sort)
        throw std::invalid_argument("sort mismatch substituting " + e->name);
      return it->second;
    }
    case SizeExpr::Kind::Zero:
    case SizeExpr::Kind::One:
    case SizeExpr::Kind::Literal:
    case SizeExpr::Kind::TT:
    case SizeExpr::Kind::FF:
      return e;
    case SizeExpr::Kind::Sum:
      return size_sum(substitute_size(e->lhs, s), substitute_size(e->rhs, s));
    case SizeExpr::Kind::Max:
      return size_max(substitute_size(e->lhs, s), substitute_size(e->rhs, s));
    case SizeExpr::Kind::Le:
      return size_le(substitute_size(e->lhs, s), substitute_size(e->rhs, s));
  }
  return e;
}

namespace {

// Renames binder vars that would capture substitution-range variables.
SortedVars freshen_binders(const SortedVars& vars, SizeSubst& inner,
                           const std::set<std::string>& range_fv,
                           const std::set<std::string>& body_fv) {
  SortedVars out;
  for (const auto& [n, srt] : vars) {
    inner.erase(n);
    std::string v = n;
    if (range_fv.count(n)) {
      std::set<std::string> avoid = range_fv;
      avoid.insert(body_fv.begin(), body_fv.end());
      for (const auto& [on, os] : out) avoid.insert(on);
      v = rename_away(n, avoid);
      inner[n] = size_var(v, srt);
    }
    out.emplace_back(v, srt);
  }
  return out;
}

std::set<std::string> subst_range_fv(const SizeSubst& s) {
  std::set<std::string> out;
  for (const auto& [k, v] : s) {
    std::map<std::string, SizeSort> fv;
    free_size_vars(v, fv);
    for (const auto& [n, srt] : fv) out.insert(n);
  }
  return out;
}

}  // namespace

ConstraintPtr substitute_size(const ConstraintPtr& c, const SizeSubst& s) {
  if (s.empty()) return c;
  switch (c->kind) {
    case Constraint::Kind::Truth:
    case Constraint::Kind::Falsity:
      return c;
    case Constraint::Kind::Equal:
      return c_eq(substitute_size(c->a, s), substitute_size(c->b, s));
    case Constraint::Kind::Less:
      return c_less(substitute_size(c->a, s), substitute_size(c->b, s));
    case Constraint::Kind::Leq:
      return c_leq(substitute_size(c->a, s), substitute_size(c->b, s));
    case Constraint::Kind::Not:
      return c_not(substitute_size(c->l, s));
    case Constraint::Kind::And:
      return c_and(substitute_size(c->l, s), substitute_size(c->r, s));
    case Constraint::Kind::Or:
      return c_or(substitute_size(c->l, s), substitute_size(c->r, s));
    case Constraint::Kind::Implies:
      return c_implies(substitute_size(c->l, s), substitute_size(c->r, s));
    case Constraint::Kind::Iff:
      return c_iff(substitute_size(c->l, s), substitute_size(c->r, s));
    case Constraint::Kind::Exists:
    case Constraint::Kind::Forall: {
      SizeSubst inner = s;
      std::map<std::string, SizeSort> body_vars;
      free_size_vars(c->l, body_vars);
      std::set<std::string> body_fv;
      for (const auto& [n, srt] : body_vars) body_fv.insert(n);
      SortedVars vars = freshen_binders(c->vars, inner, subst_range_fv(s), body_fv);
      ConstraintPtr body = inner.empty() ? c->l : substitute_size(c->l, inner);
      return c->kind == Constraint::Kind::Exists ? c_exists(vars, body)
                                                 : c_forall(vars, body);
    }
  }
  return c;
}

TypePtr substitute_size(const TypePtr& t, const SizeSubst& s) {
  if (s.empty()) return t;
  switch (t->kind) {
    case Type::Kind::Base:
      return t_base(t->base, substitute_size(t->annot, s));
    case Type::Kind::Arrow:
      return t_arrow(substitute_size(t->l, s), substitute_size(t->r, s));
    case Type::Kind::Product:
      return t_product(substitute_size(t->l, s), substitute_size(t->r, s));
    case Type::Kind::Forall:
    case Type::Kind::Exists: {
      SizeSubst inner = s;
      std::map<std::string, SizeSort> body_vars;
      free_size_vars(t->guard, body_vars);
      free_size_vars(t->body, body_vars);
      std::set<std::string> body_fv;
      for (const auto& [n, srt] : body_vars) body_fv.insert(n);
      SortedVars vars = freshen_binders(t->vars, inner, subst_range_fv(s), body_fv);
      ConstraintPtr guard = inner.empty() ? t->guard : substitute_size(t->guard, inner);
      TypePtr body = inner.empty() ? t->body : substitute_size(t->body, inner);
      return t->kind == Type::Kind::Forall ? t_forall(vars, guard, body)
                                           : t_exists(vars, guard, body);
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Environments

CompatResult check_compatible(const Environment& a, const Environment& b) {
  for (const auto& [x, ta] : a) {
    auto it = b.find(x);
    if (it == b.end()) continue;
    if (!type_alpha_equal(ta, it->second)) {
      CompatResult r;
      r.ok = false;
      r.var = x;
      r.left = ta;
      r.right = it->second;
      return r;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Fresh supply

void FreshSupply::reserve(const std::string& name) { used_.insert(name); }

void FreshSupply::reserve_all(const std::map<std::string, SizeSort>& vars) {
  for (const auto& [n, s] : vars) used_.insert(n);
}

bool FreshSupply::claim(const std::string& name) {
  return used_.insert(name).second;
}

std::string FreshSupply::fresh(const std::string& base) {
  std::string stem = base;
  // Strip an existing prime suffix so repeated freshening stays readable.
  auto pos = stem.find('\'');
  if (pos != std::string::npos) stem = stem.substr(0, pos);
  if (stem.empty()) stem = "a";
  for (long long i = 1;; ++i) {
    std::string cand = stem + "'" + (i == 1 ? "" : std::to_string(i));
    if (used_.insert(cand).second) return cand;
  }
}

// ---------------------------------------------------------------------------
// Printing

namespace {

bool size_atomic(const SizePtr& e) {
  switch (e->kind) {
    case SizeExpr::Kind::Sum:
      return false;
    default:
      return true;
  }
}

void print_size(std::ostringstream& os, const SizePtr& e) {
  switch (e->kind) {
    case SizeExpr::Kind::Var: os << e->name; return;
    case SizeExpr::Kind::Zero: os << "0"; return;
    case SizeExpr::Kind::One: os << "1"; return;
    case SizeExpr::Kind::Literal: os << e->value; return;
    case SizeExpr::Kind::Sum:
      print_size(os, e->lhs);
      os << "+";
      print_size(os, e->rhs);
      return;
    case SizeExpr::Kind::Max:
      os << "max(";
      print_size(os, e->lhs);
      os << ", ";
      print_size(os, e->rhs);
      os << ")";
      return;
    case SizeExpr::Kind::TT: os << "tt"; return;
    case SizeExpr::Kind::FF: os << "ff"; return;
    case SizeExpr::Kind::Le:
      os << "le(";
      print_size(os, e->lhs);
      os << ", ";
      print_size(os, e->rhs);
      os << ")";
      return;
  }
}

// Precedence levels: 0 quantifier, 1 iff, 2 implies, 3 or, 4 and, 5 not, 6 atom.
void print_con(std::ostringstream& os, const ConstraintPtr& c, int prec) {
  auto wrap = [&](int mine, auto&& body) {
    if (mine < prec) {
      os << "(";
      body();
      os << ")";
    } else {
      body();
    }
  };
  switch (c->kind) {
    case Constraint::Kind::Truth: os << "true"; return;
    case Constraint::Kind::Falsity: os << "false"; return;
    case Constraint::Kind::Equal:
      print_size(os, c->a);
      os << " = ";
      print_size(os, c->b);
      return;
    case Constraint::Kind::Less:
      print_size(os, c->a);
      os << " < ";
      print_size(os, c->b);
      return;
    case Constraint::Kind::Leq:
      print_size(os, c->a);
      os << " <= ";
      print_size(os, c->b);
      return;
    case Constraint::Kind::Not:
      wrap(5, [&] {
        os << "~";
        print_con(os, c->l, 6);
      });
      return;
    case Constraint::Kind::And:
      wrap(4, [&] {
        print_con(os, c->l, 4);
        os << " /\\ ";
        print_con(os, c->r, 5);
      });
      return;
    case Constraint::Kind::Or:
      wrap(3, [&] {
        print_con(os, c->l, 3);
        os << " \\/ ";
        print_con(os, c->r, 4);
      });
      return;
    case Constraint::Kind::Implies:
      wrap(2, [&] {
        print_con(os, c->l, 3);
        os << " -> ";
        print_con(os, c->r, 2);
      });
      return;
    case Constraint::Kind::Iff:
      wrap(1, [&] {
        print_con(os, c->l, 2);
        os << " <-> ";
        print_con(os, c->r, 2);
      });
      return;
    case Constraint::Kind::Exists:
    case Constraint::Kind::Forall:
      wrap(0, [&] {
        os << (c->kind == Constraint::Kind::Exists ? "exists" : "forall");
        for (const auto& [n, s] : c->vars) os << " " << n;
        os << ". ";
        print_con(os, c->l, 0);
      });
      return;
  }
}

bool is_bare_abbrev(const TypePtr& t) {
  if (t->kind != Type::Kind::Exists) return false;
  if (t->vars.size() != 1) return false;
  if (t->guard->kind != Constraint::Kind::Truth) return false;
  if (t->body->kind != Type::Kind::Base) return false;
  const auto& a = t->body->annot;
  return a->kind == SizeExpr::Kind::Var && a->name == t->vars[0].first;
}

// Precedence: 0 quantifier, 1 arrow, 2 product, 3 atom.
void print_type_rec(std::ostringstream& os, const TypePtr& t, int prec) {
  auto wrap = [&](int mine, auto&& body) {
    if (mine < prec) {
      os << "(";
      body();
      os << ")";
    } else {
      body();
    }
  };
  if (is_bare_abbrev(t)) {
    os << t->body->base;
    return;
  }
  switch (t->kind) {
    case Type::Kind::Base:
      os << t->base << "^";
      if (size_atomic(t->annot)) {
        print_size(os, t->annot);
      } else {
        os << "(";
        print_size(os, t->annot);
        os << ")";
      }
      return;
    case Type::Kind::Arrow:
      wrap(1, [&] {
        print_type_rec(os, t->l, 2);
        os << " -> ";
        print_type_rec(os, t->r, 1);
      });
      return;
    case Type::Kind::Product:
      wrap(2, [&] {
        print_type_rec(os, t->l, 3);
        os << " * ";
        print_type_rec(os, t->r, 3);
      });
      return;
    case Type::Kind::Forall:
    case Type::Kind::Exists:
      wrap(0, [&] {
        os << (t->kind == Type::Kind::Forall ? "forall" : "exists");
        for (const auto& [n, s] : t->vars) os << " " << n;
        if (t->guard->kind != Constraint::Kind::Truth) {
          os << " [";
          print_con(os, t->guard, 0);
          os << "]";
        }
        os << ". ";
        print_type_rec(os, t->body, 0);
      });
      return;
  }
}

// Precedence: 0 full (fun/let/if extend right), 1 application, 2 atom.
void print_term_rec(std::ostringstream& os, const TermPtr& t, int prec) {
  auto wrap = [&](int mine, auto&& body) {
    if (mine < prec) {
      os << "(";
      body();
      os << ")";
    } else {
      body();
    }
  };
  switch (t->kind) {
    case Term::Kind::Var:
    case Term::Kind::Ctor:
    case Term::Kind::Fun:
      os << t->name;
      return;
    case Term::Kind::Abs:
      wrap(0, [&] {
        os << "fun " << t->name << " -> ";
        print_term_rec(os, t->a, 0);
      });
      return;
    case Term::Kind::App:
      wrap(1, [&] {
        print_term_rec(os, t->a, 1);
        os << " ";
        print_term_rec(os, t->b, 2);
      });
      return;
    case Term::Kind::Pair:
      os << "(";
      print_term_rec(os, t->a, 0);
      os << ", ";
      print_term_rec(os, t->b, 0);
      os << ")";
      return;
    case Term::Kind::Fst:
      wrap(1, [&] {
        os << "fst ";
        print_term_rec(os, t->a, 2);
      });
      return;
    case Term::Kind::Snd:
      wrap(1, [&] {
        os << "snd ";
        print_term_rec(os, t->a, 2);
      });
      return;
    case Term::Kind::Let:
      wrap(0, [&] {
        os << "let " << t->name << " = ";
        print_term_rec(os, t->a, 0);
        os << " in ";
        print_term_rec(os, t->b, 0);
      });
      return;
    case Term::Kind::If:
      wrap(0, [&] {
        os << "if ";
        print_term_rec(os, t->a, 0);
        os << " then ";
        print_term_rec(os, t->b, 0);
        os << " else ";
        print_term_rec(os, t->c, 0);
      });
      return;
  }
}

}  // namespace

std::string to_string(const SizePtr& e) {
  std::ostringstream os;
  print_size(os, e);
  return os.str();
}

std::string to_string(const ConstraintPtr& c) {
  std::ostringstream os;
  print_con(os, c, 0);
  return os.str();
}

std::string to_string(const TypePtr& t) {
  std::ostringstream os;
  print_type_rec(os, t, 0);
  return os.str();
}

std::string to_string(const TermPtr& t) {
  std::ostringstream os;
  print_term_rec(os, t, 0);
  return os.str();
}

std::string to_string(const PatternPtr& p) {
  return to_string(pattern_to_term(p));
}

}  // namespace stc
