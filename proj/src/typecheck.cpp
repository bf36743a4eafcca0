#include "stc/typecheck.hpp"

#include "stc/program.hpp"

namespace stc {

const TypePtr& TypeAssignment::lookup(const std::string& name) const {
  auto it = types.find(name);
  if (it == types.end())
    throw std::out_of_range("no type assigned to symbol " + name);
  return it->second;
}

namespace {

// Existentially closes the minted variables free in c, consuming them.
ConstraintPtr close_minted(const ConstraintPtr& c,
                           std::map<std::string, SizeSort>& minted,
                           const std::map<std::string, SizeSort>* keep_free =
                               nullptr) {
  std::map<std::string, SizeSort> fv;
  free_size_vars(c, fv);
  SortedVars vars;
  for (auto it = minted.begin(); it != minted.end();) {
    if (fv.count(it->first) && (!keep_free || !keep_free->count(it->first))) {
      vars.emplace_back(it->first, it->second);
      it = minted.erase(it);
    } else {
      ++it;
    }
  }
  return c_exists(vars, c);
}

void merge_minted(std::map<std::string, SizeSort>& into,
                  const std::map<std::string, SizeSort>& from) {
  for (const auto& [n, s] : from) into.emplace(n, s);
}

Environment bind(const Environment& env, const std::string& x, const TypePtr& t) {
  Environment e = env;
  e[x] = t;
  return e;
}

// Fig. 2 binder side conditions require the bound term variable not to occur
// in the environment; rename the binder when it does.
std::pair<std::string, TermPtr> avoid_env(const Environment& env,
                                          const std::string& x,
                                          const TermPtr& body) {
  if (!env.count(x)) return {x, body};
  std::string nx = x;
  int i = 0;
  while (env.count(nx)) nx = x + "_" + std::to_string(++i);
  return {nx, substitute_term(body, {{x, mk_var(nx)}})};
}

}  // namespace

Checker::OpenedQuant Checker::open_fresh(const TypePtr& t) {
  OpenedQuant o;
  SizeSubst s;
  for (const auto& [n, srt] : t->vars) {
    std::string nn = fresh_.fresh(n);
    o.vars.emplace_back(nn, srt);
    s[n] = size_var(nn, srt);
  }
  o.guard = substitute_size(t->guard, s);
  o.body = substitute_size(t->body, s);
  return o;
}

void Checker::note(const std::string& rule, const std::string& path,
                   const ConstraintPtr& c) {
  trace_.push_back({rule, path, c});
}

Judgment Checker::infer(const Environment& env, const TermPtr& t,
                        const std::string& path) {
  switch (t->kind) {
    case Term::Kind::Var: {
      auto it = env.find(t->name);
      if (it == env.end()) throw TypeError("unbound variable " + t->name, path);
      note("var", path, c_true());
      return {c_true(), it->second, {}};
    }
    case Term::Kind::Ctor:
    case Term::Kind::Fun: {
      auto it = tau_.types.find(t->name);
      if (it == tau_.types.end())
        throw TypeError("no signature for symbol " + t->name, path);
      note("symb", path, c_true());
      return {c_true(), it->second, {}};
    }
    case Term::Kind::App: {
      Judgment fun = infer(env, t->a, path + "/0");
      while (fun.type->kind == Type::Kind::Forall) {
        OpenedQuant o = open_fresh(fun.type);
        for (const auto& [n, s] : o.vars) fun.minted.emplace(n, s);
        fun.constraint = c_and(fun.constraint, o.guard);
        fun.type = o.body;
        note("forall-elim", path + "/0", fun.constraint);
      }
      if (fun.type->kind != Type::Kind::Arrow)
        throw TypeError("application of a non-function of type " +
                            to_string(fun.type),
                        path);
      Judgment arg = check(env, t->b, fun.type->l, path + "/1");
      ConstraintPtr c = c_and(fun.constraint, arg.constraint);
      merge_minted(fun.minted, arg.minted);
      note("app", path, c);
      return {c, fun.type->r, std::move(fun.minted)};
    }
    case Term::Kind::Pair: {
      Judgment l = infer(env, t->a, path + "/0");
      Judgment r = infer(env, t->b, path + "/1");
      ConstraintPtr c = c_and(l.constraint, r.constraint);
      merge_minted(l.minted, r.minted);
      note("pair", path, c);
      return {c, t_product(l.type, r.type), std::move(l.minted)};
    }
    case Term::Kind::Fst:
    case Term::Kind::Snd: {
      Judgment arg = infer(env, t->a, path + "/0");
      while (arg.type->kind == Type::Kind::Forall) {
        OpenedQuant o = open_fresh(arg.type);
        for (const auto& [n, s] : o.vars) arg.minted.emplace(n, s);
        arg.constraint = c_and(arg.constraint, o.guard);
        arg.type = o.body;
        note("forall-elim", path + "/0", arg.constraint);
      }
      if (arg.type->kind != Type::Kind::Product)
        throw TypeError("projection from a non-product of type " +
                            to_string(arg.type),
                        path);
      bool fst = t->kind == Term::Kind::Fst;
      note(fst ? "fst" : "snd", path, arg.constraint);
      return {arg.constraint, fst ? arg.type->l : arg.type->r,
              std::move(arg.minted)};
    }
    case Term::Kind::Let: {
      Judgment bound = infer(env, t->a, path + "/0");
      if (bound.type->kind == Type::Kind::Exists) {
        OpenedQuant o = open_fresh(bound.type);
        auto [x, body] = avoid_env(env, t->name, t->b);
        Judgment u = infer(bind(env, x, o.body), body, path + "/1");
        std::map<std::string, SizeSort> result_fv;
        free_size_vars(u.type, result_fv);
        ConstraintPtr inner = close_minted(u.constraint, u.minted, &result_fv);
        ConstraintPtr c =
            c_and(bound.constraint,
                  c_and(c_exists(o.vars, o.guard),
                        c_forall(o.vars, c_implies(o.guard, inner))));
        merge_minted(bound.minted, u.minted);
        TypePtr ty = t_exists(o.vars, o.guard, u.type);
        note("exists-elim", path, c);
        return {c, ty, std::move(bound.minted)};
      }
      auto [x, body] = avoid_env(env, t->name, t->b);
      Judgment u = infer(bind(env, x, bound.type), body, path + "/1");
      ConstraintPtr c = c_and(bound.constraint, u.constraint);
      merge_minted(bound.minted, u.minted);
      note("let", path, c);
      return {c, u.type, std::move(bound.minted)};
    }
    case Term::Kind::Abs:
      throw TypeError("abstractions have no inference rule; a target type "
                      "is required",
                      path);
    case Term::Kind::If:
      throw TypeError("conditionals have no inference rule; a target type "
                      "is required",
                      path);
  }
  throw TypeError("malformed term", path);
}

Judgment Checker::check(const Environment& env, const TermPtr& t,
                        const TypePtr& type, const std::string& path) {
  // (a) universal targets
  if (type->kind == Type::Kind::Forall) {
    OpenedQuant o = open_fresh(type);
    Judgment u = check(env, t, o.body, path);
    ConstraintPtr inner = close_minted(u.constraint, u.minted);
    ConstraintPtr c = c_and(c_exists(o.vars, o.guard),
                            c_forall(o.vars, c_implies(o.guard, inner)));
    note("forall-intro", path, c);
    return {c, nullptr, std::move(u.minted)};
  }
  // (b) abstractions need an arrow
  if (t->kind == Term::Kind::Abs) {
    if (type->kind == Type::Kind::Arrow) {
      auto [x, body] = avoid_env(env, t->name, t->a);
      Judgment u = check(bind(env, x, type->l), body, type->r, path + "/0");
      note("abs", path, u.constraint);
      return u;
    }
    if (type->kind != Type::Kind::Exists)
      throw TypeError("abstraction checked against non-arrow type " +
                          to_string(type),
                      path);
  }
  // (c) conditionals need an exists-basic target
  if (t->kind == Term::Kind::If) {
    if (!is_exists_basic(type, solver_))
      throw TypeError("conditional target must be exists-basic; got " +
                          to_string(type),
                      path);
    Judgment test = check(env, t->a, t_bare("bool"), path + "/0");
    Judgment thenb = check(env, t->b, type, path + "/1");
    Judgment elseb = check(env, t->c, type, path + "/2");
    ConstraintPtr c = c_and(test.constraint,
                            c_and(thenb.constraint, elseb.constraint));
    merge_minted(test.minted, thenb.minted);
    merge_minted(test.minted, elseb.minted);
    note("if", path, c);
    return {c, nullptr, std::move(test.minted)};
  }
  // (d) lets: open an existential package when the bound term produces one
  if (t->kind == Term::Kind::Let) {
    Judgment bound = infer(env, t->a, path + "/0");
    if (bound.type->kind == Type::Kind::Exists) {
      OpenedQuant o = open_fresh(bound.type);
      auto [x, body] = avoid_env(env, t->name, t->b);
      Judgment u = check(bind(env, x, o.body), body, type, path + "/1");
      ConstraintPtr inner = close_minted(u.constraint, u.minted);
      ConstraintPtr c =
          c_and(bound.constraint,
                c_and(c_exists(o.vars, o.guard),
                      c_forall(o.vars, c_implies(o.guard, inner))));
      merge_minted(bound.minted, u.minted);
      note("exists-elim", path, c);
      return {c, nullptr, std::move(bound.minted)};
    }
    auto [x, body] = avoid_env(env, t->name, t->b);
    Judgment u = check(bind(env, x, bound.type), body, type, path + "/1");
    ConstraintPtr c = c_and(bound.constraint, u.constraint);
    merge_minted(bound.minted, u.minted);
    note("let", path, c);
    return {c, nullptr, std::move(bound.minted)};
  }
  // (e) existential introduction for the checking-only term forms
  if (type->kind == Type::Kind::Exists &&
      (t->kind == Term::Kind::Abs || t->kind == Term::Kind::Pair ||
       t->kind == Term::Kind::If)) {
    OpenedQuant o = open_fresh(type);
    Judgment u = check(env, t, o.body, path);
    ConstraintPtr inner = close_minted(u.constraint, u.minted);
    ConstraintPtr c = c_exists(o.vars, c_and(inner, o.guard));
    note("exists-intro", path, c);
    return {c, nullptr, std::move(u.minted)};
  }
  // (f) subsumption
  Judgment u = infer(env, t, path);
  ConstraintPtr j = gen_sub(u.type, type, fresh_);
  ConstraintPtr c = c_and(u.constraint, j);
  note("sub", path, c);
  return {c, nullptr, std::move(u.minted)};
}

GateResult typecheck_gate(Solver& solver, const TypeAssignment& tau,
                          const ConstraintPtr& hyp, const Environment& env,
                          const TermPtr& t, const TypePtr& type) {
  GateResult res;
  FreshSupply fresh;
  std::map<std::string, SizeSort> reserved;
  free_size_vars(hyp, reserved);
  free_size_vars(type, reserved);
  for (const auto& [x, ty] : env) free_size_vars(ty, reserved);
  for (const auto& [s, ty] : tau.types) free_size_vars(ty, reserved);
  fresh.reserve_all(reserved);

  Checker checker(tau, solver, fresh);
  try {
    Judgment d = checker.check(env, t, type);
    res.obligation = close_minted(d.constraint, d.minted);
    res.trace = checker.trace();
    if (!solver.is_satisfiable(hyp)) {
      res.status = GateResult::Status::Rejected;
      res.reason = "hypothesis constraint is unsatisfiable";
      return res;
    }
    if (!solver.entails(hyp, res.obligation)) {
      res.status = GateResult::Status::Rejected;
      res.reason = "obligation not entailed: " + to_string(res.obligation);
      return res;
    }
    res.status = GateResult::Status::Accepted;
    return res;
  } catch (const TypeError& e) {
    res.status = GateResult::Status::Rejected;
    res.reason = e.what();
    return res;
  } catch (const SubtypeError& e) {
    res.status = GateResult::Status::Rejected;
    res.reason = e.what();
    return res;
  } catch (const SolverLimit&) {
    res.status = GateResult::Status::Unknown;
    res.reason = "solver resource budget exhausted";
    return res;
  }
}

InferResult infer_type(Solver& solver, const TypeAssignment& tau,
                       const Environment& env, const TermPtr& t) {
  FreshSupply fresh;
  std::map<std::string, SizeSort> reserved;
  for (const auto& [x, ty] : env) free_size_vars(ty, reserved);
  for (const auto& [s, ty] : tau.types) free_size_vars(ty, reserved);
  fresh.reserve_all(reserved);
  Checker checker(tau, solver, fresh);
  Judgment j = checker.infer(env, t);
  std::map<std::string, SizeSort> keep;
  free_size_vars(j.type, keep);
  ConstraintPtr c = close_minted(j.constraint, j.minted, &keep);
  return {c, j.type, checker.trace()};
}

}  // namespace stc
