#include "stc/termination.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace stc {

// ---------------------------------------------------------------------------
// Matching constraints (Figure-3 style derivation)

namespace {

std::optional<MatchFailure> env_insert(Environment& env, const std::string& x,
                                       const TypePtr& t) {
  auto it = env.find(x);
  if (it == env.end()) {
    env.emplace(x, t);
    return std::nullopt;
  }
  if (!type_alpha_equal(it->second, t))
    return MatchFailure{"pattern variable " + x +
                        " occurs at incompatible types " +
                        to_string(it->second) + " and " + to_string(t)};
  return std::nullopt;
}

}  // namespace

std::variant<MatchDerivation, MatchFailure> derive_matching(
    const PatternPtr& l, const std::string& base,
    const std::map<std::string, CtorShape>& ctors,
    std::map<std::string, std::string>& eps, FreshSupply& fresh) {
  MatchDerivation d;
  if (l->kind == Pattern::Kind::Var) {
    auto it = eps.find(l->name);
    std::string e;
    if (it != eps.end()) {
      e = it->second;
    } else {
      e = fresh.claim(l->name) ? l->name : fresh.fresh(l->name);
      eps.emplace(l->name, e);
    }
    SizeSort srt = annot_sort(base);
    d.size = size_var(e, srt);
    d.env.emplace(l->name, t_base(base, size_var(e, srt)));
    d.eps = eps;
    return d;
  }

  auto cit = ctors.find(l->name);
  if (cit == ctors.end())
    return MatchFailure{"pattern head " + l->name + " is not a constructor"};
  const CtorShape& shape = cit->second;
  if (shape.result_base != base)
    return MatchFailure{"constructor " + l->name + " builds " +
                        shape.result_base + ", but a pattern of type " + base +
                        " is required"};
  size_t m = shape.simple_args.size();
  size_t k = shape.rec_bases.size();
  if (l->args.size() != m + k)
    return MatchFailure{"constructor " + l->name + " expects " +
                        std::to_string(m + k) + " arguments, got " +
                        std::to_string(l->args.size())};

  if (base == "bool") {
    d.size = l->name == "true" ? size_tt() : size_ff();
    d.eps = eps;
    return d;
  }

  for (size_t i = 0; i < m; ++i) {
    if (l->args[i]->kind != Pattern::Kind::Var)
      return MatchFailure{"argument " + std::to_string(i + 1) + " of " +
                          l->name +
                          " is not recursive; only a plain variable may "
                          "appear there"};
    if (auto err = env_insert(d.env, l->args[i]->name, shape.simple_args[i]))
      return *err;
  }

  std::vector<SizePtr> sub_sizes;
  for (size_t j = 0; j < k; ++j) {
    auto sub = derive_matching(l->args[m + j], shape.rec_bases[j], ctors, eps,
                               fresh);
    if (std::holds_alternative<MatchFailure>(sub))
      return std::get<MatchFailure>(sub);
    MatchDerivation& sd = std::get<MatchDerivation>(sub);
    for (const auto& [x, t] : sd.env)
      if (auto err = env_insert(d.env, x, t)) return *err;
    sub_sizes.push_back(sd.size);
  }

  if (k == 0) {
    d.size = size_zero();
  } else {
    SizePtr mx = sub_sizes.front();
    for (size_t j = 1; j < sub_sizes.size(); ++j)
      mx = size_max(mx, sub_sizes[j]);
    d.size = size_sum(size_one(), mx);
  }
  d.eps = eps;
  return d;
}

// ---------------------------------------------------------------------------
// Precedences

bool Precedence::equiv(const std::string& a, const std::string& b) const {
  auto ia = class_of.find(a);
  auto ib = class_of.find(b);
  return ia != class_of.end() && ib != class_of.end() &&
         ia->second == ib->second;
}

namespace {

struct Graph {
  std::vector<std::string> nodes;
  std::map<std::string, std::set<std::string>> edges;  // a -> b : a depends on b
};

// Tarjan; components are emitted callees-first.
Precedence scc(const Graph& g) {
  Precedence p;
  std::map<std::string, int> index, low;
  std::vector<std::string> stack;
  std::set<std::string> on_stack;
  int counter = 0;

  std::function<void(const std::string&)> visit = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    auto eit = g.edges.find(v);
    if (eit != g.edges.end()) {
      for (const auto& w : eit->second) {
        if (!index.count(w)) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack.count(w)) {
          low[v] = std::min(low[v], index[w]);
        }
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> comp;
      while (true) {
        std::string w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        comp.push_back(w);
        if (w == v) break;
      }
      std::sort(comp.begin(), comp.end());
      int id = static_cast<int>(p.classes.size());
      for (const auto& w : comp) p.class_of[w] = id;
      p.classes.push_back(std::move(comp));
    }
  };
  for (const auto& n : g.nodes)
    if (!index.count(n)) visit(n);

  p.reach.assign(p.classes.size(), {});
  for (size_t i = 0; i < p.classes.size(); ++i) {
    p.reach[i].insert(static_cast<int>(i));
    for (const auto& member : p.classes[i]) {
      auto eit = g.edges.find(member);
      if (eit == g.edges.end()) continue;
      for (const auto& w : eit->second) {
        int j = p.class_of.at(w);
        if (j != static_cast<int>(i))
          p.reach[i].insert(p.reach[j].begin(), p.reach[j].end());
      }
    }
  }
  return p;
}

void collect_base_names(const TypePtr& t, std::set<std::string>& out) {
  switch (t->kind) {
    case Type::Kind::Base:
      out.insert(t->base);
      return;
    case Type::Kind::Arrow:
    case Type::Kind::Product:
      collect_base_names(t->l, out);
      collect_base_names(t->r, out);
      return;
    case Type::Kind::Forall:
    case Type::Kind::Exists:
      collect_base_names(t->body, out);
      return;
  }
}

void collect_fun_symbols(const TermPtr& t, std::set<std::string>& out) {
  switch (t->kind) {
    case Term::Kind::Fun:
      out.insert(t->name);
      return;
    case Term::Kind::Var:
    case Term::Kind::Ctor:
      return;
    case Term::Kind::Abs:
    case Term::Kind::Fst:
    case Term::Kind::Snd:
      collect_fun_symbols(t->a, out);
      return;
    case Term::Kind::App:
    case Term::Kind::Pair:
    case Term::Kind::Let:
      collect_fun_symbols(t->a, out);
      collect_fun_symbols(t->b, out);
      return;
    case Term::Kind::If:
      collect_fun_symbols(t->a, out);
      collect_fun_symbols(t->b, out);
      collect_fun_symbols(t->c, out);
      return;
  }
}

}  // namespace

bool Precedence::less_eq(const std::string& a, const std::string& b) const {
  auto ia = class_of.find(a);
  auto ib = class_of.find(b);
  if (ia == class_of.end() || ib == class_of.end()) return false;
  if (ia->second == ib->second) return true;
  return reach[ib->second].count(ia->second) != 0;
}

PrecedenceResult infer_precedences(const Program& program,
                                   const std::map<std::string, CtorShape>& ctors,
                                   const std::map<std::string, FunShape>& funs) {
  (void)funs;
  PrecedenceResult res;

  // Type precedence from constructor signatures plus explicit edges.
  Graph tg;
  tg.nodes = program.type_names;
  std::vector<std::pair<std::string, std::string>> strict_type;  // hi, lo
  for (const auto& name : program.symbol_order) {
    auto it = ctors.find(name);
    if (it == ctors.end()) continue;
    const CtorShape& s = it->second;
    std::set<std::string> arg_names;
    for (const auto& a : s.simple_args) collect_base_names(a, arg_names);
    for (const auto& n : arg_names) {
      tg.edges[s.result_base].insert(n);
      strict_type.emplace_back(s.result_base, n);
    }
    for (const auto& b : s.rec_bases) {
      tg.edges[s.result_base].insert(b);
      tg.edges[b].insert(s.result_base);
    }
  }
  for (const auto& [hi, lo] : program.type_edges) {
    tg.edges[hi].insert(lo);
    strict_type.emplace_back(hi, lo);
  }
  res.types = scc(tg);
  for (const auto& [hi, lo] : strict_type) {
    if (res.types.equiv(hi, lo))
      res.errors.push_back("type precedence violation: " + lo +
                           " must be strictly below " + hi);
  }

  // Function precedence from the call graph of right-hand sides and
  // conditions plus explicit edges.
  Graph fg;
  for (const auto& name : program.symbol_order)
    if (program.signatures.at(name).kind == SymbolSignature::Kind::Function)
      fg.nodes.push_back(name);
  for (const auto& r : program.rules) {
    std::set<std::string> called;
    collect_fun_symbols(r.rhs, called);
    for (const auto& c : r.conditions) collect_fun_symbols(c.term, called);
    for (const auto& g : called) fg.edges[r.fun].insert(g);
  }
  for (const auto& [hi, lo] : program.fun_edges) fg.edges[hi].insert(lo);
  res.functions = scc(fg);
  for (const auto& [hi, lo] : program.fun_edges) {
    if (res.functions.equiv(hi, lo))
      res.errors.push_back("declared precedence " + hi + " > " + lo +
                           " contradicts the call graph");
  }

  res.ok = res.errors.empty();
  return res;
}

// ---------------------------------------------------------------------------
// Measures

ConstraintPtr measure_constraint(const ClassMeasure& m,
                                 const std::vector<std::string>& primed,
                                 const std::vector<std::string>& current) {
  auto nat = [](const std::string& n) { return size_var(n, SizeSort::Nat); };
  switch (m.spec.form) {
    case MeasureSpec::Form::Lexicographic: {
      if (m.spec.indices.empty()) return c_false();
      ConstraintPtr acc = c_false();
      for (size_t k = 0; k < m.spec.indices.size(); ++k) {
        ConstraintPtr step = c_true();
        for (size_t j = 0; j < k; ++j) {
          unsigned i = m.spec.indices[j];
          step = c_and(step, c_eq(nat(primed[i]), nat(current[i])));
        }
        unsigned i = m.spec.indices[k];
        step = c_and(step, c_less(nat(primed[i]), nat(current[i])));
        acc = k == 0 ? step : c_or(acc, step);
      }
      return acc;
    }
    case MeasureSpec::Form::Linear: {
      SizePtr lhs, rhs;
      for (size_t i = 0; i < m.spec.coeffs.size(); ++i) {
        for (unsigned long long c = 0; c < m.spec.coeffs[i]; ++c) {
          lhs = lhs ? size_sum(lhs, nat(primed[i])) : nat(primed[i]);
          rhs = rhs ? size_sum(rhs, nat(current[i])) : nat(current[i]);
        }
      }
      if (!lhs) return c_false();
      return c_less(lhs, rhs);
    }
    case MeasureSpec::Form::Trusted: {
      SizeSubst subst;
      for (size_t i = 0; i < m.declared_names.size(); ++i) {
        subst[m.declared_names[i]] = nat(current[i]);
        subst[m.declared_names[i] + "'"] = nat(primed[i]);
      }
      return substitute_size(m.spec.trusted, subst);
    }
  }
  return c_false();
}

TypeAssignment build_tau_less(const Program& program, const Precedence& prec,
                              const std::map<std::string, FunShape>& funs,
                              const std::string& f, const ClassMeasure& measure) {
  TypeAssignment tau;
  for (const auto& [name, sig] : program.signatures) tau.types[name] = sig.type;

  const FunShape& fshape = funs.at(f);
  FreshSupply supply;
  for (const auto& v : fshape.size_vars) supply.reserve(v);

  for (const auto& [name, sig] : program.signatures) {
    if (sig.kind != SymbolSignature::Kind::Function) continue;
    if (!prec.equiv(name, f)) continue;
    auto git = funs.find(name);
    if (git == funs.end()) continue;
    const FunShape& g = git->second;

    if (g.size_vars.empty()) {
      // No measured arguments: equivalent symbols are unusable in rules.
      TypePtr t = t_forall({{supply.fresh("z"), SizeSort::Nat}}, c_false(),
                           g.result);
      for (auto it = g.plain_args.rbegin(); it != g.plain_args.rend(); ++it)
        t = t_arrow(*it, t);
      tau.types[name] = t;
      continue;
    }

    std::vector<std::string> primed;
    SortedVars binder;
    SizeSubst rename;
    for (size_t i = 0; i < g.size_vars.size(); ++i) {
      std::string p = supply.fresh(g.size_vars[i]);
      SizeSort srt = annot_sort(g.rec_bases[i]);
      primed.push_back(p);
      binder.emplace_back(p, srt);
      rename[g.size_vars[i]] = size_var(p, srt);
    }
    ConstraintPtr guard = measure_constraint(measure, primed, fshape.size_vars);
    TypePtr t = substitute_size(g.result, rename);
    for (size_t i = g.rec_bases.size(); i-- > 0;)
      t = t_arrow(t_base(g.rec_bases[i],
                         size_var(primed[i], annot_sort(g.rec_bases[i]))),
                  t);
    t = t_forall(binder, guard, t);
    for (auto it = g.plain_args.rbegin(); it != g.plain_args.rend(); ++it)
      t = t_arrow(*it, t);
    tau.types[name] = t;
  }
  return tau;
}

// ---------------------------------------------------------------------------
// Rule checking (conditions (iv)-(viii))

namespace {

ConstraintPtr close_set(const ConstraintPtr& c,
                        std::map<std::string, SizeSort> minted) {
  std::map<std::string, SizeSort> fv;
  free_size_vars(c, fv);
  SortedVars vars;
  for (const auto& [n, s] : minted)
    if (fv.count(n)) vars.emplace_back(n, s);
  return c_exists(vars, c);
}

RuleReport fail_rule(RuleReport rep, int condition, std::string why) {
  rep.ok = false;
  rep.failed_condition = condition;
  rep.failure = std::move(why);
  return rep;
}

}  // namespace

RuleReport check_rule(const Program& program, const Rule& rule,
                      const FunShape& shape, const TypeAssignment& tau_less,
                      const Precedence& prec,
                      const std::map<std::string, CtorShape>& ctors,
                      Solver& solver) {
  (void)program;
  RuleReport rep;
  rep.index = rule.index;
  rep.line = rule.line;

  size_t m = shape.plain_args.size();
  size_t k = shape.size_vars.size();

  // (iv) l = f x... l... with plain variables in the non-measured positions.
  if (rule.lhs_args.size() != m + k)
    return fail_rule(rep, 4,
                     "left-hand side has " + std::to_string(rule.lhs_args.size()) +
                         " arguments, signature expects " + std::to_string(m + k));
  for (size_t i = 0; i < m; ++i)
    if (rule.lhs_args[i]->kind != Pattern::Kind::Var)
      return fail_rule(rep, 4,
                       "argument " + std::to_string(i + 1) +
                           " is not measured; only a plain variable may "
                           "appear there");

  // (v) matching constraints and the merged environment.
  FreshSupply fresh;
  std::map<std::string, SizeSort> reserved;
  for (const auto& [s, ty] : tau_less.types) free_size_vars(ty, reserved);
  for (const auto& v : shape.size_vars) reserved.emplace(v, SizeSort::Nat);
  free_size_vars(shape.result, reserved);
  fresh.reserve_all(reserved);

  Environment env;
  for (size_t i = 0; i < m; ++i) {
    if (auto err = env_insert(env, rule.lhs_args[i]->name, shape.plain_args[i]))
      return fail_rule(rep, 5, err->message);
  }
  std::map<std::string, std::string> eps;
  std::vector<ConstraintPtr> hyp_parts;
  for (size_t j = 0; j < k; ++j) {
    auto sub = derive_matching(rule.lhs_args[m + j], shape.rec_bases[j], ctors,
                               eps, fresh);
    if (std::holds_alternative<MatchFailure>(sub))
      return fail_rule(rep, 5, std::get<MatchFailure>(sub).message);
    MatchDerivation& d = std::get<MatchDerivation>(sub);
    for (const auto& [x, t] : d.env)
      if (auto err = env_insert(env, x, t))
        return fail_rule(rep, 5, err->message);
    SizeSort srt = annot_sort(shape.rec_bases[j]);
    hyp_parts.push_back(c_eq(size_var(shape.size_vars[j], srt), d.size));
  }
  ConstraintPtr hyp = c_and_all(hyp_parts);

  // (vi) symbols in the right-hand side and conditions stay below f.
  std::set<std::string> called;
  collect_fun_symbols(rule.rhs, called);
  for (const auto& c : rule.conditions) collect_fun_symbols(c.term, called);
  for (const auto& g : called)
    if (!prec.less_eq(g, rule.fun))
      return fail_rule(rep, 6,
                       "symbol " + g + " is above " + rule.fun +
                           " in the precedence");

  Checker checker(tau_less, solver, fresh);

  // (vii) conditions type at bool sizes; existential packages are opened and
  // their guards collected as hypotheses for the right-hand side.
  std::vector<ConstraintPtr> cond_parts;
  std::vector<SizePtr> cond_sizes;
  for (size_t j = 0; j < rule.conditions.size(); ++j) {
    const auto& cond = rule.conditions[j];
    Judgment cj;
    try {
      cj = checker.infer(env, cond.term, "/cond" + std::to_string(j + 1));
    } catch (const TypeError& e) {
      return fail_rule(rep, 7, e.what());
    } catch (const SubtypeError& e) {
      return fail_rule(rep, 7, e.what());
    }
    ConstraintPtr part = cj.constraint;
    std::map<std::string, SizeSort> cond_minted = cj.minted;
    TypePtr ty = cj.type;
    while (ty->kind == Type::Kind::Exists) {
      SizeSubst s;
      for (const auto& [n, srt] : ty->vars) {
        std::string nn = fresh.fresh(n);
        cond_minted.emplace(nn, srt);
        s[n] = size_var(nn, srt);
      }
      part = c_and(part, substitute_size(ty->guard, s));
      ty = substitute_size(ty->body, s);
    }
    if (ty->kind != Type::Kind::Base || ty->base != "bool")
      return fail_rule(rep, 7,
                       "condition " + std::to_string(j + 1) +
                           " must have type bool, inferred " + to_string(cj.type));

    Obligation ob;
    ob.id = rule.fun + "/rule" + std::to_string(rule.index) + "/cond" +
            std::to_string(j + 1);
    ob.description = "condition " + std::to_string(j + 1) + " well-typed";
    ob.constraint = c_implies(hyp, close_set(part, cond_minted));
    ob.holds = solver.is_valid(ob.constraint);
    rep.obligations.push_back(ob);
    if (!ob.holds)
      return fail_rule(rep, 7,
                       "condition " + std::to_string(j + 1) +
                           " typing obligation is invalid");
    cond_parts.push_back(part);
    cond_sizes.push_back(ty->annot);
  }

  // (viii) the right-hand side checks against the declared result under the
  // matching hypothesis extended with the condition outcomes.
  Judgment d;
  try {
    d = checker.check(env, rule.rhs, shape.result, "/rhs");
  } catch (const TypeError& e) {
    return fail_rule(rep, 8, e.what());
  } catch (const SubtypeError& e) {
    return fail_rule(rep, 8, e.what());
  }
  ConstraintPtr rhs_obligation = close_set(d.constraint, d.minted);
  ConstraintPtr full_hyp = hyp;
  for (size_t j = 0; j < cond_parts.size(); ++j) {
    full_hyp = c_and(full_hyp, cond_parts[j]);
    full_hyp = c_and(full_hyp,
                     c_eq(cond_sizes[j], rule.conditions[j].expects_true
                                             ? size_tt()
                                             : size_ff()));
  }
  Obligation ob;
  ob.id = rule.fun + "/rule" + std::to_string(rule.index) + "/rhs";
  ob.description = "right-hand side checks against the declared result type";
  ob.constraint = c_implies(full_hyp, rhs_obligation);
  ob.holds = solver.is_valid(ob.constraint);
  rep.obligations.push_back(ob);
  if (!ob.holds)
    return fail_rule(rep, 8, "right-hand side obligation is invalid");

  rep.ok = true;
  return rep;
}

// ---------------------------------------------------------------------------
// Overlap warning heuristic

namespace {

PatternPtr rename_pattern(const PatternPtr& p, const std::string& suffix) {
  if (p->kind == Pattern::Kind::Var) return p_var(p->name + suffix);
  std::vector<PatternPtr> args;
  for (const auto& a : p->args) args.push_back(rename_pattern(a, suffix));
  return p_ctor(p->name, std::move(args));
}

using PatSubst = std::map<std::string, PatternPtr>;

PatternPtr resolve(PatternPtr p, const PatSubst& s) {
  while (p->kind == Pattern::Kind::Var) {
    auto it = s.find(p->name);
    if (it == s.end()) break;
    p = it->second;
  }
  return p;
}

bool occurs(const std::string& x, const PatternPtr& p, const PatSubst& s) {
  PatternPtr r = resolve(p, s);
  if (r->kind == Pattern::Kind::Var) return r->name == x;
  for (const auto& a : r->args)
    if (occurs(x, a, s)) return true;
  return false;
}

bool unify(const PatternPtr& a, const PatternPtr& b, PatSubst& s) {
  PatternPtr x = resolve(a, s);
  PatternPtr y = resolve(b, s);
  if (x->kind == Pattern::Kind::Var) {
    if (y->kind == Pattern::Kind::Var && x->name == y->name) return true;
    if (occurs(x->name, y, s)) return false;
    s[x->name] = y;
    return true;
  }
  if (y->kind == Pattern::Kind::Var) return unify(y, x, s);
  if (x->name != y->name || x->args.size() != y->args.size()) return false;
  for (size_t i = 0; i < x->args.size(); ++i)
    if (!unify(x->args[i], y->args[i], s)) return false;
  return true;
}

TermPtr pattern_ground(const PatternPtr& p, const PatSubst& s) {
  PatternPtr r = resolve(p, s);
  if (r->kind == Pattern::Kind::Var) return mk_var(r->name);
  TermPtr t = mk_ctor(r->name);
  for (const auto& a : r->args) t = mk_app(t, pattern_ground(a, s));
  return t;
}

std::vector<std::string> overlap_warnings(const Program& program) {
  std::vector<std::string> out;
  for (size_t i = 0; i < program.rules.size(); ++i) {
    for (size_t j = i + 1; j < program.rules.size(); ++j) {
      const Rule& r1 = program.rules[i];
      const Rule& r2 = program.rules[j];
      if (r1.fun != r2.fun) continue;
      if (r1.lhs_args.size() != r2.lhs_args.size()) continue;
      PatSubst s;
      bool ok = true;
      for (size_t a = 0; ok && a < r1.lhs_args.size(); ++a)
        ok = unify(r1.lhs_args[a], rename_pattern(r2.lhs_args[a], "~2"), s);
      if (!ok) continue;

      // Conditions are mutually exclusive when a shared test is required to
      // evaluate both to true and to false under the unifier.
      TermSubst sigma;
      for (const auto& [v, p] : s) sigma[v] = pattern_ground(p_var(v), s);
      TermSubst rename2;
      for (const auto& arg : r2.lhs_args)
        for (const auto& v : pattern_vars(arg)) rename2[v] = mk_var(v + "~2");
      bool exclusive = false;
      for (const auto& c1 : r1.conditions) {
        for (const auto& c2 : r2.conditions) {
          if (c1.expects_true == c2.expects_true) continue;
          TermPtr t1 = substitute_term(c1.term, sigma);
          TermPtr t2 =
              substitute_term(substitute_term(c2.term, rename2), sigma);
          if (alpha_equal(t1, t2)) exclusive = true;
        }
      }
      if (!exclusive)
        out.push_back("rules " + std::to_string(r1.index) + " and " +
                      std::to_string(r2.index) + " of " + r1.fun +
                      " have unifiable left-hand sides; local confluence is "
                      "assumed, not verified");
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Whole-program checking

Verdict check_program(const Program& program, const CheckOptions& opts) {
  Verdict v;
  Solver solver({opts.solver_budget});

  // Constructor signatures (the section-5 assumption).
  std::map<std::string, CtorShape> ctors;
  for (const auto& name : program.symbol_order) {
    const auto& sig = program.signatures.at(name);
    if (sig.kind != SymbolSignature::Kind::Constructor) continue;
    auto r = validate_constructor_signature(sig, solver);
    if (!r.ok) {
      v.errors.push_back("constructor " + name + ": " + r.error.message);
      continue;
    }
    ctors.emplace(name, r.shape);
  }

  // Function signature shapes (condition (i)).
  std::map<std::string, FunShape> funs;
  std::map<std::string, std::string> shape_errors;
  for (const auto& name : program.symbol_order) {
    const auto& sig = program.signatures.at(name);
    if (sig.kind != SymbolSignature::Kind::Function) continue;
    auto r = decompose_function_signature(sig, solver);
    if (!r.ok)
      shape_errors.emplace(name, r.error.message);
    else
      funs.emplace(name, r.shape);
  }

  auto precs = infer_precedences(program, ctors, funs);
  for (const auto& e : precs.errors) v.errors.push_back(e);

  // Resolve one measure per equivalence class; condition (iii).
  std::map<std::string, ClassMeasure> class_measures;  // keyed by member name
  std::map<std::string, std::string> measure_errors;
  for (const auto& cls : precs.functions.classes) {
    std::optional<size_t> arity;
    bool arity_ok = true;
    for (const auto& g : cls) {
      auto it = funs.find(g);
      if (it == funs.end()) continue;
      if (!arity) arity = it->second.size_vars.size();
      if (*arity != it->second.size_vars.size()) arity_ok = false;
    }
    if (!arity_ok) {
      for (const auto& g : cls)
        measure_errors.emplace(
            g, "equivalent functions must share the measured-argument count");
      continue;
    }
    const MeasureSpec* declared = nullptr;
    std::string owner;
    bool conflict = false;
    for (const auto& g : cls) {
      auto it = program.measures.find(g);
      if (it == program.measures.end()) continue;
      if (!declared) {
        declared = &it->second;
        owner = g;
      } else {
        conflict = true;
      }
    }
    if (conflict) {
      for (const auto& g : cls)
        measure_errors.emplace(g,
                               "conflicting measure declarations in one "
                               "equivalence class");
      continue;
    }
    ClassMeasure cm;
    if (declared) {
      cm.spec = *declared;
      auto oit = funs.find(owner);
      if (oit != funs.end()) cm.declared_names = oit->second.size_vars;
    }
    for (const auto& g : cls) {
      auto it = funs.find(g);
      if (it == funs.end()) continue;
      if (cm.declared_names.empty()) cm.declared_names = it->second.size_vars;
      if (cm.sorts.empty())
        for (const auto& b : it->second.rec_bases)
          cm.sorts.push_back(annot_sort(b));
    }
    if (!declared) {
      cm.spec.form = MeasureSpec::Form::Lexicographic;
      for (size_t i = 0; i < cm.sorts.size(); ++i)
        if (cm.sorts[i] == SizeSort::Nat)
          cm.spec.indices.push_back(static_cast<unsigned>(i));
    } else if (cm.spec.form == MeasureSpec::Form::Lexicographic) {
      for (unsigned i : cm.spec.indices)
        if (i >= cm.sorts.size() || cm.sorts[i] != SizeSort::Nat)
          measure_errors.emplace(owner, "lex measure index " +
                                            std::to_string(i) +
                                            " is not a nat-measured position");
    } else if (cm.spec.form == MeasureSpec::Form::Linear) {
      if (cm.spec.coeffs.size() != cm.sorts.size())
        measure_errors.emplace(owner,
                               "linear measure needs one coefficient per "
                               "measured argument");
    }
    for (const auto& g : cls) class_measures.emplace(g, cm);
  }

  // Group rules by function.
  std::map<std::string, std::vector<const Rule*>> rules_of;
  for (const auto& r : program.rules) rules_of[r.fun].push_back(&r);

  // Check classes callees-first; report in declaration order afterwards.
  std::map<std::string, FunctionReport> reports;
  for (const auto& cls : precs.functions.classes) {
    for (const auto& f : cls) {
      FunctionReport fr;
      fr.name = f;
      auto se = shape_errors.find(f);
      if (se != shape_errors.end()) {
        fr.status = Status::Error;
        fr.reasons.push_back("condition (i): " + se->second);
        reports.emplace(f, std::move(fr));
        continue;
      }
      auto me = measure_errors.find(f);
      if (me != measure_errors.end()) {
        fr.status = Status::Error;
        fr.reasons.push_back("condition (ii)/(iii): " + me->second);
        reports.emplace(f, std::move(fr));
        continue;
      }
      const FunShape& shape = funs.at(f);
      const ClassMeasure& cm = class_measures.at(f);
      if (cm.spec.form == MeasureSpec::Form::Trusted) {
        std::map<std::string, SizeSort> tfv;
        free_size_vars(cm.spec.trusted, tfv);
        std::set<std::string> allowed;
        for (const auto& n : cm.declared_names) {
          allowed.insert(n);
          allowed.insert(n + "'");
        }
        bool bad = false;
        for (const auto& [n, s] : tfv)
          if (!allowed.count(n)) bad = true;
        if (bad) {
          fr.status = Status::Error;
          fr.reasons.push_back(
              "condition (ii): trusted measure mentions unknown size "
              "variables");
          reports.emplace(f, std::move(fr));
          continue;
        }
        fr.warnings.push_back(
            "trusted measure in force: UNSOUND-IF-NOT-WF (well-foundedness "
            "of the declared descent is assumed, not checked)");
      }
      TypeAssignment tau_less =
          build_tau_less(program, precs.functions, funs, f, cm);
      bool all_ok = true;
      auto rit = rules_of.find(f);
      if (rit != rules_of.end()) {
        for (const Rule* r : rit->second) {
          try {
            RuleReport rr = check_rule(program, *r, shape, tau_less,
                                       precs.functions, ctors, solver);
            all_ok &= rr.ok;
            if (!rr.ok)
              fr.reasons.push_back(
                  "rule " + std::to_string(rr.index) + " fails condition (" +
                  std::to_string(rr.failed_condition) + "): " + rr.failure);
            fr.rules.push_back(std::move(rr));
          } catch (const SolverLimit&) {
            v.resource_exhausted = true;
            all_ok = false;
            RuleReport rr;
            rr.index = r->index;
            rr.line = r->line;
            rr.failure = "solver resource budget exhausted";
            fr.reasons.push_back("rule " + std::to_string(r->index) +
                                 ": solver resource budget exhausted");
            fr.rules.push_back(std::move(rr));
            solver.reset_budget();
          }
        }
      }
      fr.status = all_ok ? Status::Terminating : Status::Unknown;
      reports.emplace(f, std::move(fr));
    }
  }

  for (const auto& name : program.symbol_order) {
    if (program.signatures.at(name).kind != SymbolSignature::Kind::Function)
      continue;
    auto it = reports.find(name);
    if (it != reports.end()) v.functions.push_back(std::move(it->second));
  }

  for (auto& w : overlap_warnings(program)) v.warnings.push_back(std::move(w));

  bool any_error = !v.errors.empty();
  bool all_term = true;
  for (const auto& fr : v.functions) {
    any_error |= fr.status == Status::Error;
    all_term &= fr.status == Status::Terminating;
  }
  v.status = any_error ? Status::Error
                       : (all_term ? Status::Terminating : Status::Unknown);
  return v;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

const char* status_name(Status s) {
  switch (s) {
    case Status::Terminating: return "TERMINATING";
    case Status::Unknown: return "UNKNOWN";
    case Status::Error: return "ERROR";
  }
  return "UNKNOWN";
}

}  // namespace

std::string render_text(const Verdict& v, bool explain) {
  std::ostringstream os;
  for (const auto& f : v.functions) {
    os << f.name << ": " << status_name(f.status);
    if (!f.reasons.empty()) {
      os << " (" << f.reasons.front();
      for (size_t i = 1; i < f.reasons.size(); ++i) os << "; " << f.reasons[i];
      os << ")";
    }
    os << "\n";
    for (const auto& w : f.warnings) os << "  warning: " << w << "\n";
    if (explain) {
      for (const auto& r : f.rules) {
        for (const auto& ob : r.obligations) {
          os << "  " << ob.id << ": " << to_string(ob.constraint) << " => "
             << (ob.holds ? "VALID" : "INVALID") << "\n";
        }
      }
    }
  }
  for (const auto& w : v.warnings) os << "warning: " << w << "\n";
  for (const auto& e : v.errors) os << "error: " << e << "\n";
  os << "program: " << status_name(v.status) << "\n";
  return os.str();
}

std::string render_json(const Verdict& v) {
  nlohmann::json j;
  j["status"] = status_name(v.status);
  j["resource_exhausted"] = v.resource_exhausted;
  j["warnings"] = v.warnings;
  j["errors"] = v.errors;
  j["functions"] = nlohmann::json::array();
  for (const auto& f : v.functions) {
    nlohmann::json jf;
    jf["name"] = f.name;
    jf["status"] = status_name(f.status);
    jf["reasons"] = f.reasons;
    jf["warnings"] = f.warnings;
    jf["rules"] = nlohmann::json::array();
    for (const auto& r : f.rules) {
      nlohmann::json jr;
      jr["index"] = r.index;
      jr["line"] = r.line;
      jr["ok"] = r.ok;
      jr["failed_condition"] = r.failed_condition;
      jr["failure"] = r.failure;
      jr["obligations"] = nlohmann::json::array();
      for (const auto& ob : r.obligations) {
        nlohmann::json jo;
        jo["id"] = ob.id;
        jo["description"] = ob.description;
        jo["constraint"] = to_string(ob.constraint);
        jo["holds"] = ob.holds;
        jr["obligations"].push_back(std::move(jo));
      }
      jf["rules"].push_back(std::move(jr));
    }
    j["functions"].push_back(std::move(jf));
  }
  return j.dump(2) + "\n";
}

}  // namespace stc
