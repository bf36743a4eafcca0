#include "stc/solver.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <numeric>
#include <sstream>
#include <vector>

namespace stc {

// ---------------------------------------------------------------------------
// Checked integer helpers

namespace {

long long mul_checked(long long a, long long b) {
  __int128 r = static_cast<__int128>(a) * b;
  if (r > INT64_MAX / 4 || r < INT64_MIN / 4) throw SolverLimit();
  return static_cast<long long>(r);
}

long long add_checked(long long a, long long b) {
  __int128 r = static_cast<__int128>(a) + b;
  if (r > INT64_MAX / 4 || r < INT64_MIN / 4) throw SolverLimit();
  return static_cast<long long>(r);
}

long long floor_div(long long a, long long b) {
  // b > 0
  long long q = a / b;
  if (a % b != 0 && a < 0) --q;
  return q;
}

long long mod_pos(long long a, long long d) {
  long long m = a % d;
  return m < 0 ? m + d : m;
}

LinTerm lin_add(const LinTerm& a, const LinTerm& b) {
  LinTerm r = a;
  r.k = add_checked(r.k, b.k);
  for (const auto& [v, c] : b.coeff) {
    long long nc = add_checked(r.coeff[v], c);
    if (nc == 0)
      r.coeff.erase(v);
    else
      r.coeff[v] = nc;
  }
  return r;
}

LinTerm lin_scale(const LinTerm& a, long long s) {
  LinTerm r;
  if (s == 0) return r;
  r.k = mul_checked(a.k, s);
  for (const auto& [v, c] : a.coeff) r.coeff[v] = mul_checked(c, s);
  return r;
}

LinTerm lin_sub(const LinTerm& a, const LinTerm& b) {
  return lin_add(a, lin_scale(b, -1));
}

LinTerm lin_const(long long k) {
  LinTerm r;
  r.k = k;
  return r;
}

LinTerm lin_var(const std::string& v) {
  LinTerm r;
  r.coeff[v] = 1;
  return r;
}

long long coeff_of(const LinTerm& t, const std::string& v) {
  auto it = t.coeff.find(v);
  return it == t.coeff.end() ? 0 : it->second;
}

LinTerm lin_drop(const LinTerm& t, const std::string& v) {
  LinTerm r = t;
  r.coeff.erase(v);
  return r;
}

// t with x replaced by s.
LinTerm lin_subst(const LinTerm& t, const std::string& x, const LinTerm& s) {
  long long c = coeff_of(t, x);
  if (c == 0) return t;
  return lin_add(lin_drop(t, x), lin_scale(s, c));
}

}  // namespace

// ---------------------------------------------------------------------------
// Printing

namespace {

void print_lin(std::ostringstream& os, const LinTerm& t) {
  bool first = true;
  for (const auto& [v, c] : t.coeff) {
    if (!first) os << (c >= 0 ? " + " : " - ");
    else if (c < 0) os << "-";
    long long a = c >= 0 ? c : -c;
    if (a != 1) os << a << "*";
    os << v;
    first = false;
  }
  if (first) {
    os << t.k;
  } else if (t.k != 0) {
    os << (t.k > 0 ? " + " : " - ") << (t.k > 0 ? t.k : -t.k);
  }
}

void print_core(std::ostringstream& os, const CoreP& f) {
  switch (f->k) {
    case Core::K::True: os << "T"; return;
    case Core::K::False: os << "F"; return;
    case Core::K::Le:
      os << "(";
      print_lin(os, f->t);
      os << " <= 0)";
      return;
    case Core::K::Eq:
      os << "(";
      print_lin(os, f->t);
      os << " = 0)";
      return;
    case Core::K::Div:
      os << "(" << f->d << " | ";
      print_lin(os, f->t);
      os << ")";
      return;
    case Core::K::NDiv:
      os << "~(" << f->d << " | ";
      print_lin(os, f->t);
      os << ")";
      return;
    case Core::K::And:
      os << "(";
      print_core(os, f->a);
      os << " & ";
      print_core(os, f->b);
      os << ")";
      return;
    case Core::K::Or:
      os << "(";
      print_core(os, f->a);
      os << " | ";
      print_core(os, f->b);
      os << ")";
      return;
    case Core::K::Not:
      os << "~";
      print_core(os, f->a);
      return;
    case Core::K::Exists:
      os << "(E " << f->var << ". ";
      print_core(os, f->a);
      os << ")";
      return;
    case Core::K::Forall:
      os << "(A " << f->var << ". ";
      print_core(os, f->a);
      os << ")";
      return;
  }
}

}  // namespace

std::string to_string(const CoreP& f) {
  std::ostringstream os;
  print_core(os, f);
  return os.str();
}

// ---------------------------------------------------------------------------
// Node construction

Solver::Solver(SolverOptions opts) : opts_(opts) {}

void Solver::charge(long long n) {
  nodes_ += n;
  if (nodes_ > opts_.node_budget) throw SolverLimit();
}

CoreP Solver::mk(Core c) {
  charge();
  return std::make_shared<const Core>(std::move(c));
}

CoreP Solver::mk_true() {
  Core c;
  c.k = Core::K::True;
  return mk(std::move(c));
}

CoreP Solver::mk_false() {
  Core c;
  c.k = Core::K::False;
  return mk(std::move(c));
}

CoreP Solver::mk_le(LinTerm t) {
  if (t.coeff.empty()) return t.k <= 0 ? mk_true() : mk_false();
  long long g = 0;
  for (const auto& [v, c] : t.coeff) g = std::gcd(g, c < 0 ? -c : c);
  if (g > 1) {
    LinTerm r;
    for (const auto& [v, c] : t.coeff) r.coeff[v] = c / g;
    r.k = -floor_div(-t.k, g);
    t = std::move(r);
  }
  Core c;
  c.k = Core::K::Le;
  c.t = std::move(t);
  return mk(std::move(c));
}

CoreP Solver::mk_eq(LinTerm t) {
  if (t.coeff.empty()) return t.k == 0 ? mk_true() : mk_false();
  long long g = 0;
  for (const auto& [v, c] : t.coeff) g = std::gcd(g, c < 0 ? -c : c);
  if (g > 1) {
    if (t.k % g != 0) return mk_false();
    LinTerm r;
    for (const auto& [v, c] : t.coeff) r.coeff[v] = c / g;
    r.k = t.k / g;
    t = std::move(r);
  }
  // Canonical sign: first coefficient positive.
  if (!t.coeff.empty() && t.coeff.begin()->second < 0) t = lin_scale(t, -1);
  Core c;
  c.k = Core::K::Eq;
  c.t = std::move(t);
  return mk(std::move(c));
}

CoreP Solver::mk_div(long long d, LinTerm t, bool negated) {
  if (d < 0) d = -d;
  if (d == 0) throw std::logic_error("divisibility by zero");
  LinTerm r;
  for (const auto& [v, c] : t.coeff) {
    long long m = mod_pos(c, d);
    if (m != 0) r.coeff[v] = m;
  }
  r.k = mod_pos(t.k, d);
  if (d == 1 || r.coeff.empty()) {
    bool holds = d == 1 || r.k % d == 0;
    return holds != negated ? mk_true() : mk_false();
  }
  Core c;
  c.k = negated ? Core::K::NDiv : Core::K::Div;
  c.t = std::move(r);
  c.d = d;
  return mk(std::move(c));
}

CoreP Solver::mk_and(CoreP a, CoreP b) {
  if (a->k == Core::K::False || b->k == Core::K::False) return mk_false();
  if (a->k == Core::K::True) return b;
  if (b->k == Core::K::True) return a;
  Core c;
  c.k = Core::K::And;
  c.a = std::move(a);
  c.b = std::move(b);
  return mk(std::move(c));
}

CoreP Solver::mk_or(CoreP a, CoreP b) {
  if (a->k == Core::K::True || b->k == Core::K::True) return mk_true();
  if (a->k == Core::K::False) return b;
  if (b->k == Core::K::False) return a;
  Core c;
  c.k = Core::K::Or;
  c.a = std::move(a);
  c.b = std::move(b);
  return mk(std::move(c));
}

CoreP Solver::mk_not(CoreP a) {
  if (a->k == Core::K::True) return mk_false();
  if (a->k == Core::K::False) return mk_true();
  Core c;
  c.k = Core::K::Not;
  c.a = std::move(a);
  return mk(std::move(c));
}

CoreP Solver::mk_quant(Core::K k, std::string var, CoreP body) {
  if (body->k == Core::K::True || body->k == Core::K::False) return body;
  Core c;
  c.k = k;
  c.var = std::move(var);
  c.a = std::move(body);
  return mk(std::move(c));
}

std::string Solver::fresh_internal(const char* stem) {
  return std::string("$") + stem + std::to_string(++fresh_counter_);
}

// ---------------------------------------------------------------------------
// Translation from constraints

LinTerm Solver::lin_of_size(const SizePtr& e, std::vector<MaxDef>& defs) {
  switch (e->kind) {
    case SizeExpr::Kind::Var:
      if (e->var_sort != SizeSort::Nat)
        throw std::logic_error("bool-sorted variable in arithmetic position");
      return lin_var(e->name);
    case SizeExpr::Kind::Zero:
      return lin_const(0);
    case SizeExpr::Kind::One:
      return lin_const(1);
    case SizeExpr::Kind::Literal:
      if (e->value > static_cast<unsigned long long>(INT64_MAX / 8))
        throw SolverLimit();
      return lin_const(static_cast<long long>(e->value));
    case SizeExpr::Kind::Sum:
      return lin_add(lin_of_size(e->lhs, defs), lin_of_size(e->rhs, defs));
    case SizeExpr::Kind::Max: {
      LinTerm a = lin_of_size(e->lhs, defs);
      LinTerm b = lin_of_size(e->rhs, defs);
      std::string m = fresh_internal("m");
      defs.push_back({m, std::move(a), std::move(b)});
      return lin_var(m);
    }
    default:
      throw std::logic_error("bool-sorted expression in arithmetic position");
  }
}

CoreP Solver::wrap_max_defs(std::vector<MaxDef> defs, CoreP atom) {
  CoreP result = std::move(atom);
  for (auto it = defs.rbegin(); it != defs.rend(); ++it) {
    LinTerm m = lin_var(it->var);
    // (a >= b /\ m = a) \/ (a < b /\ m = b), with m >= 0 at its binder.
    CoreP take_a = mk_and(mk_le(lin_sub(it->b, it->a)), mk_eq(lin_sub(m, it->a)));
    CoreP take_b = mk_and(mk_le(lin_add(lin_sub(it->a, it->b), lin_const(1))),
                          mk_eq(lin_sub(m, it->b)));
    CoreP def = mk_or(std::move(take_a), std::move(take_b));
    CoreP guard = mk_le(lin_scale(m, -1));
    result = mk_quant(Core::K::Exists, it->var,
                      mk_and(guard, mk_and(std::move(def), std::move(result))));
  }
  return result;
}

CoreP Solver::bool_holds(const SizePtr& e) {
  switch (e->kind) {
    case SizeExpr::Kind::TT:
      return mk_true();
    case SizeExpr::Kind::FF:
      return mk_false();
    case SizeExpr::Kind::Le:
      return atom_cmp(e->lhs, e->rhs, 2);
    case SizeExpr::Kind::Var: {
      // Free bool variable: 0/1 integer encoding, "holds" means = 1.
      return mk_eq(lin_sub(lin_var(e->name), lin_const(1)));
    }
    default:
      throw std::logic_error("nat expression in bool position");
  }
}

CoreP Solver::atom_cmp(const SizePtr& a, const SizePtr& b, int rel) {
  std::vector<MaxDef> defs;
  LinTerm la = lin_of_size(a, defs);
  LinTerm lb = lin_of_size(b, defs);
  LinTerm diff = lin_sub(la, lb);
  CoreP atom;
  switch (rel) {
    case 0: atom = mk_eq(std::move(diff)); break;
    case 1: atom = mk_le(lin_add(std::move(diff), lin_const(1))); break;
    default: atom = mk_le(std::move(diff)); break;
  }
  return wrap_max_defs(std::move(defs), std::move(atom));
}

CoreP Solver::to_core(const ConstraintPtr& c) {
  switch (c->kind) {
    case Constraint::Kind::Truth:
      return mk_true();
    case Constraint::Kind::Falsity:
      return mk_false();
    case Constraint::Kind::Equal:
      if (c->a->sort() == SizeSort::Nat) return atom_cmp(c->a, c->b, 0);
      else {
        CoreP l = bool_holds(c->a);
        CoreP r = bool_holds(c->b);
        return mk_or(mk_and(l, r), mk_and(mk_not(l), mk_not(r)));
      }
    case Constraint::Kind::Less:
      return atom_cmp(c->a, c->b, 1);
    case Constraint::Kind::Leq:
      return atom_cmp(c->a, c->b, 2);
    case Constraint::Kind::Not:
      return mk_not(to_core(c->l));
    case Constraint::Kind::And:
      return mk_and(to_core(c->l), to_core(c->r));
    case Constraint::Kind::Or:
      return mk_or(to_core(c->l), to_core(c->r));
    case Constraint::Kind::Implies:
      return mk_or(mk_not(to_core(c->l)), to_core(c->r));
    case Constraint::Kind::Iff: {
      CoreP l = to_core(c->l);
      CoreP r = to_core(c->r);
      return mk_or(mk_and(l, r), mk_and(mk_not(l), mk_not(r)));
    }
    case Constraint::Kind::Exists:
    case Constraint::Kind::Forall: {
      bool ex = c->kind == Constraint::Kind::Exists;
      auto [name, sort] = c->vars.front();
      SortedVars rest(c->vars.begin() + 1, c->vars.end());
      ConstraintPtr inner = ex ? c_exists(rest, c->l) : c_forall(rest, c->l);
      if (sort == SizeSort::Bool) {
        CoreP tt_case = to_core(substitute_size(inner, {{name, size_tt()}}));
        CoreP ff_case = to_core(substitute_size(inner, {{name, size_ff()}}));
        return ex ? mk_or(tt_case, ff_case) : mk_and(tt_case, ff_case);
      }
      CoreP body = to_core(inner);
      CoreP guard = mk_le(lin_scale(lin_var(name), -1));  // 0 <= name
      if (ex)
        return mk_quant(Core::K::Exists, name, mk_and(guard, body));
      return mk_quant(Core::K::Forall, name, mk_or(mk_not(guard), body));
    }
  }
  return mk_true();
}

CoreP Solver::normalize(const ConstraintPtr& c) {
  nodes_ = 0;
  CoreP f = to_core(c);
  std::map<std::string, SizeSort> fv;
  free_size_vars(c, fv);
  for (const auto& [n, s] : fv) {
    f = mk_and(mk_le(lin_scale(lin_var(n), -1)), f);
    if (s == SizeSort::Bool)
      f = mk_and(mk_le(lin_sub(lin_var(n), lin_const(1))), f);
  }
  return simplify(f);
}

// ---------------------------------------------------------------------------
// Negation normal form

CoreP Solver::nnf(const CoreP& f, bool neg) {
  switch (f->k) {
    case Core::K::True:
      return neg ? mk_false() : mk_true();
    case Core::K::False:
      return neg ? mk_true() : mk_false();
    case Core::K::Le:
      if (!neg) return f;
      // ~(t <= 0)  <=>  -t + 1 <= 0
      return mk_le(lin_add(lin_scale(f->t, -1), lin_const(1)));
    case Core::K::Eq:
      if (!neg) return f;
      return mk_or(mk_le(lin_add(f->t, lin_const(1))),
                   mk_le(lin_add(lin_scale(f->t, -1), lin_const(1))));
    case Core::K::Div:
      return neg ? mk_div(f->d, f->t, true) : f;
    case Core::K::NDiv:
      return neg ? mk_div(f->d, f->t, false) : f;
    case Core::K::And: {
      CoreP a = nnf(f->a, neg);
      CoreP b = nnf(f->b, neg);
      return neg ? mk_or(a, b) : mk_and(a, b);
    }
    case Core::K::Or: {
      CoreP a = nnf(f->a, neg);
      CoreP b = nnf(f->b, neg);
      return neg ? mk_and(a, b) : mk_or(a, b);
    }
    case Core::K::Not:
      return nnf(f->a, !neg);
    case Core::K::Exists:
      return mk_quant(neg ? Core::K::Forall : Core::K::Exists, f->var,
                      nnf(f->a, neg));
    case Core::K::Forall:
      return mk_quant(neg ? Core::K::Exists : Core::K::Forall, f->var,
                      nnf(f->a, neg));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Simplification

namespace {

void flatten(Core::K k, const CoreP& f, std::vector<CoreP>& out) {
  if (f->k == k) {
    flatten(k, f->a, out);
    flatten(k, f->b, out);
  } else {
    out.push_back(f);
  }
}

bool free_in(const CoreP& f, const std::string& x) {
  switch (f->k) {
    case Core::K::True:
    case Core::K::False:
      return false;
    case Core::K::Le:
    case Core::K::Eq:
    case Core::K::Div:
    case Core::K::NDiv:
      return f->t.coeff.count(x) != 0;
    case Core::K::And:
    case Core::K::Or:
      return free_in(f->a, x) || free_in(f->b, x);
    case Core::K::Not:
      return free_in(f->a, x);
    case Core::K::Exists:
    case Core::K::Forall:
      if (f->var == x) return false;
      return free_in(f->a, x);
  }
  return false;
}

}  // namespace

CoreP Solver::simplify(const CoreP& f) {
  switch (f->k) {
    case Core::K::True:
    case Core::K::False:
      return f;
    case Core::K::Le:
      return mk_le(f->t);
    case Core::K::Eq:
      return mk_eq(f->t);
    case Core::K::Div:
      return mk_div(f->d, f->t, false);
    case Core::K::NDiv:
      return mk_div(f->d, f->t, true);
    case Core::K::And:
    case Core::K::Or: {
      bool conj = f->k == Core::K::And;
      std::vector<CoreP> kids;
      flatten(f->k, f, kids);
      std::vector<CoreP> out;
      std::set<std::string> seen;
      for (const auto& kid : kids) {
        CoreP s = simplify(kid);
        if (s->k == Core::K::True) {
          if (!conj) return mk_true();
          continue;
        }
        if (s->k == Core::K::False) {
          if (conj) return mk_false();
          continue;
        }
        std::string key = stc::to_string(s);
        if (seen.insert(key).second) out.push_back(std::move(s));
      }
      if (out.empty()) return conj ? mk_true() : mk_false();
      CoreP acc = out.front();
      for (size_t i = 1; i < out.size(); ++i)
        acc = conj ? mk_and(acc, out[i]) : mk_or(acc, out[i]);
      return acc;
    }
    case Core::K::Not: {
      CoreP a = simplify(f->a);
      if (a->k == Core::K::Not) return a->a;
      return mk_not(a);
    }
    case Core::K::Exists:
    case Core::K::Forall: {
      CoreP a = simplify(f->a);
      if (!free_in(a, f->var)) return a;
      return mk_quant(f->k, f->var, a);
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Substitution of a linear term for a variable (quantifier-free bodies)

CoreP Solver::subst_var(const CoreP& f, const std::string& x, const LinTerm& t) {
  switch (f->k) {
    case Core::K::True:
    case Core::K::False:
      return f;
    case Core::K::Le:
      return mk_le(lin_subst(f->t, x, t));
    case Core::K::Eq:
      return mk_eq(lin_subst(f->t, x, t));
    case Core::K::Div:
      return mk_div(f->d, lin_subst(f->t, x, t), false);
    case Core::K::NDiv:
      return mk_div(f->d, lin_subst(f->t, x, t), true);
    case Core::K::And:
      return mk_and(subst_var(f->a, x, t), subst_var(f->b, x, t));
    case Core::K::Or:
      return mk_or(subst_var(f->a, x, t), subst_var(f->b, x, t));
    case Core::K::Not:
      return mk_not(subst_var(f->a, x, t));
    case Core::K::Exists:
    case Core::K::Forall:
      if (f->var == x) return f;
      return mk_quant(f->k, f->var, subst_var(f->a, x, t));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Cooper's quantifier elimination for one existential over a QF body

namespace {

// Searches the conjunction spine for an equality with coefficient +-1 on x.
const Core* find_unit_eq(const Core* f, const std::string& x) {
  if (f->k == Core::K::Eq) {
    long long c = coeff_of(f->t, x);
    return (c == 1 || c == -1) ? f : nullptr;
  }
  if (f->k == Core::K::And) {
    if (const Core* r = find_unit_eq(f->a.get(), x)) return r;
    return find_unit_eq(f->b.get(), x);
  }
  return nullptr;
}

void collect_atoms(const CoreP& f, const std::string& x, std::vector<CoreP>& out) {
  switch (f->k) {
    case Core::K::Le:
    case Core::K::Eq:
    case Core::K::Div:
    case Core::K::NDiv:
      if (f->t.coeff.count(x)) out.push_back(f);
      return;
    case Core::K::And:
    case Core::K::Or:
      collect_atoms(f->a, x, out);
      collect_atoms(f->b, x, out);
      return;
    case Core::K::Not:
      collect_atoms(f->a, x, out);
      return;
    default:
      return;
  }
}

}  // namespace

CoreP Solver::cooper_exists(const std::string& x, CoreP f) {
  f = simplify(nnf(f, false));
  if (!free_in(f, x)) return f;

  if (const Core* eq = find_unit_eq(f.get(), x)) {
    long long c = coeff_of(eq->t, x);
    LinTerm rest = lin_drop(eq->t, x);
    // c*x + rest = 0  =>  x = -rest/c with c = +-1.
    LinTerm sol = lin_scale(rest, c == 1 ? -1 : 1);
    return simplify(subst_var(f, x, sol));
  }

  std::vector<CoreP> atoms;
  collect_atoms(f, x, atoms);
  long long lcm_coeff = 1;
  for (const auto& a : atoms) {
    long long c = coeff_of(a->t, x);
    long long ac = c < 0 ? -c : c;
    lcm_coeff = mul_checked(lcm_coeff / std::gcd(lcm_coeff, ac), ac);
  }

  // Scale every atom so the coefficient of x is +-lcm_coeff, then rename
  // lcm_coeff*x to a fresh y constrained by lcm_coeff | y.
  std::string y = fresh_internal("q");
  std::function<CoreP(const CoreP&)> rescale = [&](const CoreP& g) -> CoreP {
    switch (g->k) {
      case Core::K::Le:
      case Core::K::Eq:
      case Core::K::Div:
      case Core::K::NDiv: {
        long long c = coeff_of(g->t, x);
        if (c == 0) return g;
        long long m = lcm_coeff / (c < 0 ? -c : c);
        LinTerm t = lin_scale(g->t, m);
        long long cy = coeff_of(t, x);  // +-lcm_coeff
        t = lin_drop(t, x);
        t.coeff[y] = cy > 0 ? 1 : -1;
        Core nc;
        nc.k = g->k;
        nc.t = std::move(t);
        nc.d = g->k == Core::K::Div || g->k == Core::K::NDiv
                   ? mul_checked(g->d, m)
                   : 0;
        return mk(std::move(nc));
      }
      case Core::K::And:
        return mk_and(rescale(g->a), rescale(g->b));
      case Core::K::Or:
        return mk_or(rescale(g->a), rescale(g->b));
      case Core::K::Not:
        return mk_not(rescale(g->a));
      default:
        return g;
    }
  };
  CoreP g = rescale(f);
  if (lcm_coeff > 1) g = mk_and(g, mk_div(lcm_coeff, lin_var(y), false));

  // Bounds and divisibility period in terms of y.
  std::vector<CoreP> yatoms;
  collect_atoms(g, y, yatoms);
  std::vector<LinTerm> lower, upper;
  long long period = 1;
  for (const auto& a : yatoms) {
    long long cy = coeff_of(a->t, y);
    LinTerm rest = lin_drop(a->t, y);
    switch (a->k) {
      case Core::K::Le:
        if (cy > 0)
          upper.push_back(lin_scale(rest, -1));  // y <= -rest
        else
          lower.push_back(rest);  // y >= rest
        break;
      case Core::K::Eq: {
        LinTerm v = cy > 0 ? lin_scale(rest, -1) : rest;
        lower.push_back(v);
        upper.push_back(v);
        break;
      }
      case Core::K::Div:
      case Core::K::NDiv:
        period = mul_checked(period / std::gcd(period, a->d), a->d);
        break;
      default:
        break;
    }
  }

  bool use_lower = lower.size() <= upper.size();
  const std::vector<LinTerm>& bounds = use_lower ? lower : upper;

  // The infinity formula: inequalities decided by the sign of y, equalities
  // false, divisibilities periodic.
  std::function<CoreP(const CoreP&, long long)> inf_formula =
      [&](const CoreP& h, long long j) -> CoreP {
    switch (h->k) {
      case Core::K::Le: {
        long long cy = coeff_of(h->t, y);
        if (cy == 0) return h;
        bool sat_at_inf = use_lower ? cy > 0 : cy < 0;
        return sat_at_inf ? mk_true() : mk_false();
      }
      case Core::K::Eq:
        if (coeff_of(h->t, y) == 0) return h;
        return mk_false();
      case Core::K::Div:
      case Core::K::NDiv:
        if (coeff_of(h->t, y) == 0) return h;
        return mk_div(h->d, lin_subst(h->t, y, lin_const(j)),
                      h->k == Core::K::NDiv);
      case Core::K::And:
        return mk_and(inf_formula(h->a, j), inf_formula(h->b, j));
      case Core::K::Or:
        return mk_or(inf_formula(h->a, j), inf_formula(h->b, j));
      case Core::K::Not:
        return mk_not(inf_formula(h->a, j));
      default:
        return h;
    }
  };

  CoreP result = mk_false();
  for (long long j = 0; j < period; ++j) {
    result = mk_or(result, simplify(inf_formula(g, use_lower ? j : -j)));
    for (const auto& b : bounds) {
      LinTerm cand = use_lower ? lin_add(b, lin_const(j))
                               : lin_add(b, lin_const(-j));
      result = mk_or(result, simplify(subst_var(g, y, cand)));
    }
  }
  return simplify(result);
}

CoreP Solver::elim(const CoreP& f) {
  switch (f->k) {
    case Core::K::And:
      return mk_and(elim(f->a), elim(f->b));
    case Core::K::Or:
      return mk_or(elim(f->a), elim(f->b));
    case Core::K::Not:
      return mk_not(elim(f->a));
    case Core::K::Exists:
      return cooper_exists(f->var, elim(f->a));
    case Core::K::Forall: {
      CoreP body = elim(f->a);
      return simplify(mk_not(cooper_exists(f->var, nnf(body, true))));
    }
    default:
      return f;
  }
}

CoreP Solver::eliminate_quantifiers(const CoreP& f) {
  nodes_ = 0;
  return simplify(elim(f));
}

// ---------------------------------------------------------------------------
// Decision entry points

namespace {

bool eval_ground(const CoreP& f) {
  switch (f->k) {
    case Core::K::True:
      return true;
    case Core::K::False:
      return false;
    case Core::K::Le:
      if (!f->t.coeff.empty()) throw std::logic_error("non-ground residue");
      return f->t.k <= 0;
    case Core::K::Eq:
      if (!f->t.coeff.empty()) throw std::logic_error("non-ground residue");
      return f->t.k == 0;
    case Core::K::Div:
      if (!f->t.coeff.empty()) throw std::logic_error("non-ground residue");
      return mod_pos(f->t.k, f->d) == 0;
    case Core::K::NDiv:
      if (!f->t.coeff.empty()) throw std::logic_error("non-ground residue");
      return mod_pos(f->t.k, f->d) != 0;
    case Core::K::And:
      return eval_ground(f->a) && eval_ground(f->b);
    case Core::K::Or:
      return eval_ground(f->a) || eval_ground(f->b);
    case Core::K::Not:
      return !eval_ground(f->a);
    default:
      throw std::logic_error("quantifier survived elimination");
  }
}

}  // namespace

bool Solver::decide(const ConstraintPtr& c, bool universal) {
  nodes_ = 0;  // the budget is per decision
  ConstraintPtr closed = c;
  std::map<std::string, SizeSort> fv;
  free_size_vars(closed, fv);
  // Bool variables: two-valued case split; nat variables: guarded quantifier.
  for (const auto& [n, s] : fv) {
    if (s != SizeSort::Bool) continue;
    ConstraintPtr tt_case = substitute_size(closed, {{n, size_tt()}});
    ConstraintPtr ff_case = substitute_size(closed, {{n, size_ff()}});
    closed = universal ? c_and(tt_case, ff_case) : c_or(tt_case, ff_case);
  }
  SortedVars nat_vars;
  for (const auto& [n, s] : fv)
    if (s == SizeSort::Nat) nat_vars.emplace_back(n, s);
  closed = universal ? c_forall(nat_vars, closed) : c_exists(nat_vars, closed);
  CoreP f = simplify(elim(to_core(closed)));
  return eval_ground(f);
}

bool Solver::is_valid(const ConstraintPtr& c) { return decide(c, true); }

bool Solver::is_satisfiable(const ConstraintPtr& c) { return decide(c, false); }

bool Solver::entails(const ConstraintPtr& c, const ConstraintPtr& d) {
  return is_valid(c_implies(c, d));
}

bool Solver::equiv(const ConstraintPtr& c, const ConstraintPtr& d) {
  return is_valid(c_iff(c, d));
}

// ---------------------------------------------------------------------------
// Brute-force oracle

SizeValue evaluate_size(const SizePtr& e, const Valuation& mu) {
  switch (e->kind) {
    case SizeExpr::Kind::Var: {
      auto it = mu.find(e->name);
      if (it == mu.end())
        throw std::invalid_argument("valuation misses " + e->name);
      return it->second;
    }
    case SizeExpr::Kind::Zero:
      return 0ull;
    case SizeExpr::Kind::One:
      return 1ull;
    case SizeExpr::Kind::Literal:
      return e->value;
    case SizeExpr::Kind::Sum:
      return std::get<unsigned long long>(evaluate_size(e->lhs, mu)) +
             std::get<unsigned long long>(evaluate_size(e->rhs, mu));
    case SizeExpr::Kind::Max:
      return std::max(std::get<unsigned long long>(evaluate_size(e->lhs, mu)),
                      std::get<unsigned long long>(evaluate_size(e->rhs, mu)));
    case SizeExpr::Kind::TT:
      return true;
    case SizeExpr::Kind::FF:
      return false;
    case SizeExpr::Kind::Le:
      return std::get<unsigned long long>(evaluate_size(e->lhs, mu)) <=
             std::get<unsigned long long>(evaluate_size(e->rhs, mu));
  }
  return 0ull;
}

namespace {

bool eval_rec(const ConstraintPtr& c, Valuation& mu,
              const std::optional<unsigned long long>& bound);

bool eval_quant(const ConstraintPtr& c, Valuation& mu,
                const std::optional<unsigned long long>& bound, size_t idx) {
  bool ex = c->kind == Constraint::Kind::Exists;
  if (idx == c->vars.size()) return eval_rec(c->l, mu, bound);
  const auto& [name, sort] = c->vars[idx];
  std::optional<SizeValue> saved;
  if (auto it = mu.find(name); it != mu.end()) saved = it->second;
  bool result = !ex;
  if (sort == SizeSort::Bool) {
    for (bool v : {false, true}) {
      mu[name] = v;
      bool r = eval_quant(c, mu, bound, idx + 1);
      if (ex && r) { result = true; break; }
      if (!ex && !r) { result = false; break; }
    }
  } else {
    if (!bound)
      throw std::invalid_argument("unbounded quantifier in oracle mode");
    for (unsigned long long v = 0; v <= *bound; ++v) {
      mu[name] = v;
      bool r = eval_quant(c, mu, bound, idx + 1);
      if (ex && r) { result = true; break; }
      if (!ex && !r) { result = false; break; }
    }
  }
  if (saved)
    mu[name] = *saved;
  else
    mu.erase(name);
  return result;
}

bool eval_rec(const ConstraintPtr& c, Valuation& mu,
              const std::optional<unsigned long long>& bound) {
  switch (c->kind) {
    case Constraint::Kind::Truth:
      return true;
    case Constraint::Kind::Falsity:
      return false;
    case Constraint::Kind::Equal:
      return evaluate_size(c->a, mu) == evaluate_size(c->b, mu);
    case Constraint::Kind::Less:
      return std::get<unsigned long long>(evaluate_size(c->a, mu)) <
             std::get<unsigned long long>(evaluate_size(c->b, mu));
    case Constraint::Kind::Leq:
      return std::get<unsigned long long>(evaluate_size(c->a, mu)) <=
             std::get<unsigned long long>(evaluate_size(c->b, mu));
    case Constraint::Kind::Not:
      return !eval_rec(c->l, mu, bound);
    case Constraint::Kind::And:
      return eval_rec(c->l, mu, bound) && eval_rec(c->r, mu, bound);
    case Constraint::Kind::Or:
      return eval_rec(c->l, mu, bound) || eval_rec(c->r, mu, bound);
    case Constraint::Kind::Implies:
      return !eval_rec(c->l, mu, bound) || eval_rec(c->r, mu, bound);
    case Constraint::Kind::Iff:
      return eval_rec(c->l, mu, bound) == eval_rec(c->r, mu, bound);
    case Constraint::Kind::Exists:
    case Constraint::Kind::Forall:
      return eval_quant(c, mu, bound, 0);
  }
  return false;
}

}  // namespace

bool evaluate(const ConstraintPtr& c, const Valuation& mu,
              std::optional<unsigned long long> quantifier_bound) {
  Valuation m = mu;
  return eval_rec(c, m, quantifier_bound);
}

namespace {

long long eval_lin(const LinTerm& t, const std::map<std::string, long long>& mu) {
  long long acc = t.k;
  for (const auto& [v, c] : t.coeff) {
    auto it = mu.find(v);
    if (it == mu.end()) throw std::invalid_argument("valuation misses " + v);
    acc += c * it->second;
  }
  return acc;
}

}  // namespace

bool evaluate_core(const CoreP& f, const std::map<std::string, long long>& mu,
                   std::optional<long long> quantifier_bound) {
  switch (f->k) {
    case Core::K::True:
      return true;
    case Core::K::False:
      return false;
    case Core::K::Le:
      return eval_lin(f->t, mu) <= 0;
    case Core::K::Eq:
      return eval_lin(f->t, mu) == 0;
    case Core::K::Div:
      return mod_pos(eval_lin(f->t, mu), f->d) == 0;
    case Core::K::NDiv:
      return mod_pos(eval_lin(f->t, mu), f->d) != 0;
    case Core::K::And:
      return evaluate_core(f->a, mu, quantifier_bound) &&
             evaluate_core(f->b, mu, quantifier_bound);
    case Core::K::Or:
      return evaluate_core(f->a, mu, quantifier_bound) ||
             evaluate_core(f->b, mu, quantifier_bound);
    case Core::K::Not:
      return !evaluate_core(f->a, mu, quantifier_bound);
    case Core::K::Exists:
    case Core::K::Forall: {
      if (!quantifier_bound)
        throw std::invalid_argument("unbounded quantifier in core evaluation");
      bool ex = f->k == Core::K::Exists;
      auto m = mu;
      for (long long v = -*quantifier_bound; v <= *quantifier_bound; ++v) {
        m[f->var] = v;
        bool r = evaluate_core(f->a, m, quantifier_bound);
        if (ex && r) return true;
        if (!ex && !r) return false;
      }
      return !ex;
    }
  }
  return false;
}

}  // namespace stc
