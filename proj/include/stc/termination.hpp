#ifndef STC_TERMINATION_HPP
#define STC_TERMINATION_HPP

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stc/program.hpp"
#include "stc/solver.hpp"
#include "stc/syntax.hpp"
#include "stc/typecheck.hpp"

namespace stc {

// ---------------------------------------------------------------------------
// Matching constraints (one pattern against one measured argument)

struct MatchDerivation {
  SizePtr size;      // the a in alpha = a
  Environment env;   // pattern variable typings
  std::map<std::string, std::string> eps;  // pattern var -> size var
};

struct MatchFailure {
  std::string message;
};

// Derives the matching constraint for pattern l at base type B. `eps` is
// shared across the arguments of one rule so repeated variables agree;
// `fresh` resolves collisions with reserved names deterministically.
std::variant<MatchDerivation, MatchFailure> derive_matching(
    const PatternPtr& l, const std::string& base,
    const std::map<std::string, CtorShape>& ctors,
    std::map<std::string, std::string>& eps, FreshSupply& fresh);

// ---------------------------------------------------------------------------
// Precedences: quasi-orders represented by strongly connected components of
// the dependency graph, classes listed callees-first.

struct Precedence {
  std::map<std::string, int> class_of;
  std::vector<std::vector<std::string>> classes;  // topological, smaller first
  std::vector<std::set<int>> reach;  // class -> classes it depends on (incl itself)

  bool equiv(const std::string& a, const std::string& b) const;
  bool less_eq(const std::string& a, const std::string& b) const;  // a <= b
};

struct PrecedenceResult {
  bool ok = false;
  Precedence functions;
  Precedence types;
  std::vector<std::string> errors;
};

PrecedenceResult infer_precedences(const Program& program,
                                   const std::map<std::string, CtorShape>& ctors,
                                   const std::map<std::string, FunShape>& funs);

// ---------------------------------------------------------------------------
// Measures

// A class-level measure together with the size-variable names of the
// signature it was declared against (used to read trusted constraints).
struct ClassMeasure {
  MeasureSpec spec;
  std::vector<std::string> declared_names;
  std::vector<SizeSort> sorts;  // sorts of the measured positions
};

// The strict-descent constraint (primed < current) for a measure.
ConstraintPtr measure_constraint(const ClassMeasure& m,
                                 const std::vector<std::string>& primed,
                                 const std::vector<std::string>& current);

// tau< for checking rules of `f`: functions equivalent to f get their
// measured quantifier guarded by the measure against f's rigid variables.
TypeAssignment build_tau_less(const Program& program, const Precedence& prec,
                              const std::map<std::string, FunShape>& funs,
                              const std::string& f, const ClassMeasure& measure);

// ---------------------------------------------------------------------------
// Verdicts

struct Obligation {
  std::string id;
  std::string description;
  ConstraintPtr constraint;
  bool holds = false;
};

enum class Status { Terminating, Unknown, Error };

struct RuleReport {
  int index = 0;
  int line = 0;
  bool ok = false;
  int failed_condition = 0;  // Theorem-5 condition number when !ok
  std::string failure;
  std::vector<Obligation> obligations;
};

struct FunctionReport {
  std::string name;
  Status status = Status::Unknown;
  std::vector<std::string> reasons;
  std::vector<std::string> warnings;
  std::vector<RuleReport> rules;
};

struct Verdict {
  Status status = Status::Unknown;
  bool resource_exhausted = false;
  std::vector<FunctionReport> functions;  // declaration order
  std::vector<std::string> warnings;
  std::vector<std::string> errors;
};

struct CheckOptions {
  long long solver_budget = 10'000'000;
};

RuleReport check_rule(const Program& program, const Rule& rule,
                      const FunShape& shape, const TypeAssignment& tau_less,
                      const Precedence& prec,
                      const std::map<std::string, CtorShape>& ctors,
                      Solver& solver);

Verdict check_program(const Program& program, const CheckOptions& opts = {});

// Rendering (the CLI's report formats).
std::string render_text(const Verdict& v, bool explain);
std::string render_json(const Verdict& v);

}  // namespace stc

#endif
