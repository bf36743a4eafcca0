#ifndef STC_REWRITER_HPP
#define STC_REWRITER_HPP

#include <optional>
#include <string>
#include <vector>

#include "stc/program.hpp"
#include "stc/solver.hpp"
#include "stc/syntax.hpp"

namespace stc {

// One of the six head contraction rules at the root, or nothing.
TermPtr head_beta_step(const TermPtr& t);

// First-order constructor matching; nonlinear patterns require syntactically
// (alpha-)equal bindings.
std::optional<TermSubst> match_pattern(const PatternPtr& p, const TermPtr& t);

struct RewriteSystem {
  std::vector<Rule> rules;  // declaration order
};

RewriteSystem rewrite_system(const Program& p);

struct StepResult {
  TermPtr term;
  std::string position;  // path of the contracted redex
  std::string rule;      // "beta" or "<fun>/rule<i>"
};

// One leftmost-outermost step; condition evaluation receives a sub-fuel
// budget equal to the remaining fuel and blocks the rule when exhausted.
std::optional<StepResult> step(const TermPtr& t, const RewriteSystem& rs,
                               long long condition_fuel);

struct ReductionOutcome {
  TermPtr result;
  bool normal_form = false;
  long long steps = 0;
  std::vector<std::string> trace;
};

ReductionOutcome normalize(const TermPtr& t, const RewriteSystem& rs,
                           long long fuel, bool want_trace = false);

// Syntactic size of a ground constructor term: constructor height for nat-like
// types, tt/ff for bool. Throws std::invalid_argument on non-ground input.
SizeValue ground_size(const TermPtr& t,
                      const std::map<std::string, CtorShape>& ctors);

}  // namespace stc

#endif
