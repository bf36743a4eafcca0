#include "stc/rewriter.hpp"

#include <algorithm>

namespace stc {

TermPtr head_beta_step(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::App:
      if (t->a->kind == Term::Kind::Abs)
        return substitute_term(t->a->a, {{t->a->name, t->b}});
      return nullptr;
    case Term::Kind::Let:
      return substitute_term(t->b, {{t->name, t->a}});
    case Term::Kind::Fst:
      if (t->a->kind == Term::Kind::Pair) return t->a->a;
      return nullptr;
    case Term::Kind::Snd:
      if (t->a->kind == Term::Kind::Pair) return t->a->b;
      return nullptr;
    case Term::Kind::If:
      if (t->a->kind == Term::Kind::Ctor) {
        if (t->a->name == "true") return t->b;
        if (t->a->name == "false") return t->c;
      }
      return nullptr;
    default:
      return nullptr;
  }
}

namespace {

bool match_rec(const PatternPtr& p, const TermPtr& t, TermSubst& out) {
  if (p->kind == Pattern::Kind::Var) {
    auto it = out.find(p->name);
    if (it != out.end()) return alpha_equal(it->second, t);
    out.emplace(p->name, t);
    return true;
  }
  TermPtr head;
  std::vector<TermPtr> args = spine(t, head);
  if (head->kind != Term::Kind::Ctor || head->name != p->name) return false;
  if (args.size() != p->args.size()) return false;
  for (size_t i = 0; i < p->args.size(); ++i)
    if (!match_rec(p->args[i], args[i], out)) return false;
  return true;
}

}  // namespace

std::optional<TermSubst> match_pattern(const PatternPtr& p, const TermPtr& t) {
  TermSubst out;
  if (!match_rec(p, t, out)) return std::nullopt;
  return out;
}

RewriteSystem rewrite_system(const Program& p) { return {p.rules}; }

namespace {

// Tries the rules at this exact node (a function symbol applied to exactly
// the rule's arity).
std::optional<StepResult> try_rules(const TermPtr& t, const RewriteSystem& rs,
                                    long long condition_fuel) {
  TermPtr head;
  std::vector<TermPtr> args = spine(t, head);
  if (head->kind != Term::Kind::Fun) return std::nullopt;
  for (const Rule& r : rs.rules) {
    if (r.fun != head->name || r.lhs_args.size() != args.size()) continue;
    TermSubst subst;
    bool matched = true;
    for (size_t i = 0; matched && i < args.size(); ++i)
      matched = match_rec(r.lhs_args[i], args[i], subst);
    if (!matched) continue;
    if (!r.conditions.empty() && condition_fuel <= 0) continue;
    bool fired = true;
    for (const auto& cond : r.conditions) {
      // Sub-fuel strictly below the remaining fuel keeps nested condition
      // evaluation well-founded; an exhausted condition blocks the rule.
      ReductionOutcome o =
          normalize(substitute_term(cond.term, subst), rs, condition_fuel - 1);
      if (!o.normal_form) {
        fired = false;
        break;
      }
      const char* want = cond.expects_true ? "true" : "false";
      if (!(o.result->kind == Term::Kind::Ctor && o.result->name == want)) {
        fired = false;
        break;
      }
    }
    if (!fired) continue;
    StepResult sr;
    sr.term = substitute_term(r.rhs, subst);
    sr.rule = r.fun + "/rule" + std::to_string(r.index);
    return sr;
  }
  return std::nullopt;
}

// Leftmost-innermost with a lazy conditional: arguments come to normal form
// before a contraction fires, but the branches of an `if` wait for the test.
// Values are substituted, so a rule duplicating a variable never duplicates
// pending work; on the locally confluent programs the checker accepts this
// reaches the same normal forms as any other complete strategy.
std::optional<StepResult> step_at(const TermPtr& t, const RewriteSystem& rs,
                                  long long condition_fuel,
                                  const std::string& pos) {
  auto descend = [&](const TermPtr& child, int idx,
                     auto rebuild) -> std::optional<StepResult> {
    auto sr = step_at(child, rs, condition_fuel, pos + "/" + std::to_string(idx));
    if (!sr) return std::nullopt;
    sr->term = rebuild(sr->term);
    return sr;
  };
  auto contract_here = [&]() -> std::optional<StepResult> {
    if (TermPtr h = head_beta_step(t)) {
      StepResult sr;
      sr.term = h;
      sr.position = pos;
      sr.rule = "beta";
      return sr;
    }
    if (auto sr = try_rules(t, rs, condition_fuel)) {
      sr->position = pos;
      return sr;
    }
    return std::nullopt;
  };
  switch (t->kind) {
    case Term::Kind::Abs:
      return descend(t->a, 0, [&](TermPtr n) { return mk_abs(t->name, n); });
    case Term::Kind::App:
      if (auto sr = descend(t->a, 0, [&](TermPtr n) { return mk_app(n, t->b); }))
        return sr;
      if (auto sr = descend(t->b, 1, [&](TermPtr n) { return mk_app(t->a, n); }))
        return sr;
      return contract_here();
    case Term::Kind::Pair:
      if (auto sr = descend(t->a, 0, [&](TermPtr n) { return mk_pair(n, t->b); }))
        return sr;
      return descend(t->b, 1, [&](TermPtr n) { return mk_pair(t->a, n); });
    case Term::Kind::Fst:
      if (auto sr = descend(t->a, 0, [&](TermPtr n) { return mk_fst(n); }))
        return sr;
      return contract_here();
    case Term::Kind::Snd:
      if (auto sr = descend(t->a, 0, [&](TermPtr n) { return mk_snd(n); }))
        return sr;
      return contract_here();
    case Term::Kind::Let:
      if (auto sr = descend(t->a, 0,
                            [&](TermPtr n) { return mk_let(t->name, n, t->b); }))
        return sr;
      return contract_here();
    case Term::Kind::If: {
      if (auto sr = descend(t->a, 0,
                            [&](TermPtr n) { return mk_if(n, t->b, t->c); }))
        return sr;
      if (auto sr = contract_here()) return sr;
      // Stuck test: normalize the branches so a normal form is still reached.
      if (auto sr = descend(t->b, 1,
                            [&](TermPtr n) { return mk_if(t->a, n, t->c); }))
        return sr;
      return descend(t->c, 2,
                     [&](TermPtr n) { return mk_if(t->a, t->b, n); });
    }
    default:
      return std::nullopt;
  }
}

}  // namespace

std::optional<StepResult> step(const TermPtr& t, const RewriteSystem& rs,
                               long long condition_fuel) {
  return step_at(t, rs, condition_fuel, ".");
}

ReductionOutcome normalize(const TermPtr& t, const RewriteSystem& rs,
                           long long fuel, bool want_trace) {
  ReductionOutcome o;
  o.result = t;
  while (o.steps < fuel) {
    auto sr = step(o.result, rs, fuel - o.steps);
    if (!sr) {
      o.normal_form = true;
      return o;
    }
    if (want_trace)
      o.trace.push_back(sr->position + ": " + sr->rule + " => " +
                        to_string(sr->term));
    o.result = sr->term;
    ++o.steps;
  }
  o.normal_form = step(o.result, rs, fuel) == std::nullopt;
  return o;
}

SizeValue ground_size(const TermPtr& t,
                      const std::map<std::string, CtorShape>& ctors) {
  TermPtr head;
  std::vector<TermPtr> args = spine(t, head);
  if (head->kind != Term::Kind::Ctor)
    throw std::invalid_argument("not a ground constructor term: " +
                                to_string(t));
  auto it = ctors.find(head->name);
  if (it == ctors.end())
    throw std::invalid_argument("unknown constructor " + head->name);
  const CtorShape& s = it->second;
  if (args.size() != s.simple_args.size() + s.rec_bases.size())
    throw std::invalid_argument("partially applied constructor " + head->name);
  if (s.result_base == "bool") return head->name == "true";
  size_t m = s.simple_args.size();
  unsigned long long best = 0;
  for (size_t j = 0; j < s.rec_bases.size(); ++j) {
    SizeValue v = ground_size(args[m + j], ctors);
    best = std::max(best, std::get<unsigned long long>(v));
  }
  return s.rec_bases.empty() ? 0ull : best + 1;
}

}  // namespace stc
