#include "stc/program.hpp"

#include "stc/solver.hpp"

namespace stc {

SymbolTable symbol_table(const Program& p) {
  SymbolTable t;
  for (const auto& [n, sig] : p.signatures) t.symbols.emplace(n, sig.kind);
  return t;
}

namespace {

void base_names(const TypePtr& t, std::set<std::string>& out) {
  switch (t->kind) {
    case Type::Kind::Base:
      out.insert(t->base);
      return;
    case Type::Kind::Arrow:
    case Type::Kind::Product:
      base_names(t->l, out);
      base_names(t->r, out);
      return;
    case Type::Kind::Forall:
    case Type::Kind::Exists:
      base_names(t->body, out);
      return;
  }
}

bool is_basic(const TypePtr& t) {
  switch (t->kind) {
    case Type::Kind::Base:
      return true;
    case Type::Kind::Product:
      return is_basic(t->l) && is_basic(t->r);
    default:
      return false;
  }
}

// 1 + max(a1, ..., ak)
SizePtr one_plus_max(const std::vector<std::string>& vars) {
  SizePtr m = size_var(vars.front(), SizeSort::Nat);
  for (size_t i = 1; i < vars.size(); ++i)
    m = size_max(m, size_var(vars[i], SizeSort::Nat));
  return size_sum(size_one(), m);
}

}  // namespace

bool is_exists_basic(const TypePtr& t, Solver& solver) {
  if (is_basic(t)) return true;
  if (t->kind != Type::Kind::Exists) return false;
  if (!is_exists_basic(t->body, solver)) return false;
  // Guard must be satisfiable for all values of the outer variables.
  return solver.is_valid(c_exists(t->vars, t->guard));
}

CtorValidation validate_constructor_signature(const SymbolSignature& sig,
                                              Solver& solver) {
  CtorValidation v;
  std::map<std::string, SizeSort> fv;
  free_size_vars(sig.type, fv);
  if (!fv.empty()) {
    v.error = {"constructor type must be closed; " + fv.begin()->first +
               " occurs free"};
    return v;
  }

  TypePtr cur = sig.type;
  int pos = 0;
  while (cur->kind == Type::Kind::Arrow) {
    v.shape.simple_args.push_back(cur->l);
    cur = cur->r;
    ++pos;
  }
  if (cur->kind == Type::Kind::Forall) {
    if (cur->guard->kind != Constraint::Kind::Truth) {
      v.error = {"constructor quantifier must be unguarded", pos};
      return v;
    }
    for (const auto& [n, s] : cur->vars) {
      if (s != SizeSort::Nat) {
        v.error = {"constructor size variables must be nat-sorted", pos};
        return v;
      }
      v.shape.size_vars.push_back(n);
    }
    cur = cur->body;
    for (size_t i = 0; i < v.shape.size_vars.size(); ++i, ++pos) {
      if (cur->kind != Type::Kind::Arrow || cur->l->kind != Type::Kind::Base) {
        v.error = {"expected recursive argument B^" + v.shape.size_vars[i], pos};
        return v;
      }
      const TypePtr& dom = cur->l;
      if (dom->annot->kind != SizeExpr::Kind::Var ||
          dom->annot->name != v.shape.size_vars[i]) {
        v.error = {"recursive argument " + std::to_string(i + 1) +
                       " must be annotated exactly by " + v.shape.size_vars[i],
                   pos};
        return v;
      }
      v.shape.rec_bases.push_back(dom->base);
      cur = cur->r;
    }
  }
  if (cur->kind != Type::Kind::Base) {
    v.error = {"constructor result must be an annotated base type", pos};
    return v;
  }
  v.shape.result_base = cur->base;
  v.shape.result_annot = cur->annot;

  for (size_t i = 0; i < v.shape.simple_args.size(); ++i) {
    if (!is_simple(v.shape.simple_args[i])) {
      v.error = {"non-recursive argument " + std::to_string(i + 1) +
                     " must be a simple type",
                 static_cast<int>(i)};
      return v;
    }
    std::set<std::string> names;
    base_names(v.shape.simple_args[i], names);
    if (names.count(v.shape.result_base)) {
      v.error = {"precedence violation: " + v.shape.result_base +
                     " occurs in non-recursive argument " +
                     std::to_string(i + 1),
                 static_cast<int>(i)};
      return v;
    }
  }

  if (v.shape.result_base == "bool") {
    bool is_true = sig.name == "true" &&
                   v.shape.result_annot->kind == SizeExpr::Kind::TT;
    bool is_false = sig.name == "false" &&
                    v.shape.result_annot->kind == SizeExpr::Kind::FF;
    if (!(is_true || is_false) || !v.shape.simple_args.empty() ||
        !v.shape.size_vars.empty()) {
      v.error = {"bool admits only the constructors true : bool^tt and "
                 "false : bool^ff"};
      return v;
    }
    v.ok = true;
    return v;
  }

  if (v.shape.size_vars.empty()) {
    if (!solver.is_valid(c_eq(v.shape.result_annot, size_zero()))) {
      v.error = {"result annotation must be 0 when there are no recursive "
                 "arguments; got " +
                 to_string(v.shape.result_annot)};
      return v;
    }
  } else {
    std::map<std::string, SizeSort> annot_fv;
    free_size_vars(v.shape.result_annot, annot_fv);
    for (const auto& [n, s] : annot_fv) {
      bool bound = false;
      for (const auto& sv : v.shape.size_vars) bound |= sv == n;
      if (!bound) {
        v.error = {"result annotation mentions unbound variable " + n};
        return v;
      }
    }
    if (!solver.is_valid(
            c_eq(v.shape.result_annot, one_plus_max(v.shape.size_vars)))) {
      v.error = {"result annotation must equal 1+max of the recursive "
                 "argument sizes; got " +
                 to_string(v.shape.result_annot)};
      return v;
    }
  }
  v.ok = true;
  return v;
}

FunValidation decompose_function_signature(const SymbolSignature& sig,
                                           Solver& solver) {
  FunValidation v;
  std::map<std::string, SizeSort> fv;
  free_size_vars(sig.type, fv);
  if (!fv.empty()) {
    v.error = {"function type must be closed; " + fv.begin()->first +
               " occurs free"};
    return v;
  }

  TypePtr cur = sig.type;
  int pos = 0;
  while (cur->kind == Type::Kind::Arrow) {
    v.shape.plain_args.push_back(cur->l);
    cur = cur->r;
    ++pos;
  }
  if (cur->kind == Type::Kind::Forall) {
    if (cur->guard->kind != Constraint::Kind::Truth) {
      v.error = {"measured quantifier must be unguarded in the declared type",
                 pos};
      return v;
    }
    for (const auto& [n, s] : cur->vars) v.shape.size_vars.push_back(n);
    cur = cur->body;
    for (size_t i = 0; i < v.shape.size_vars.size(); ++i, ++pos) {
      if (cur->kind != Type::Kind::Arrow || cur->l->kind != Type::Kind::Base) {
        v.error = {"expected measured argument B^" + v.shape.size_vars[i], pos};
        return v;
      }
      const TypePtr& dom = cur->l;
      if (dom->annot->kind != SizeExpr::Kind::Var ||
          dom->annot->name != v.shape.size_vars[i]) {
        v.error = {"measured argument " + std::to_string(i + 1) +
                       " must be annotated exactly by " + v.shape.size_vars[i],
                   pos};
        return v;
      }
      v.shape.rec_bases.push_back(dom->base);
      cur = cur->r;
    }
  }
  v.shape.result = cur;

  for (size_t i = 0; i < v.shape.plain_args.size(); ++i) {
    if (!is_simple(v.shape.plain_args[i])) {
      v.error = {"non-measured argument " + std::to_string(i + 1) +
                     " must be a simple type",
                 static_cast<int>(i)};
      return v;
    }
  }
  if (!is_exists_basic(v.shape.result, solver)) {
    v.error = {"result type must be exists-basic; got " +
               to_string(v.shape.result)};
    return v;
  }
  v.ok = true;
  return v;
}

}  // namespace stc
