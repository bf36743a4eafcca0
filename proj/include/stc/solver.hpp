#ifndef STC_SOLVER_HPP
#define STC_SOLVER_HPP

#include <exception>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "stc/syntax.hpp"

namespace stc {

// Raised when the configured formula-node budget is exhausted. Callers map
// this to a distinguished `unknown` / resource-exhausted verdict; it must
// never be converted into a yes/no answer.
class SolverLimit : public std::exception {
 public:
  const char* what() const noexcept override {
    return "solver node budget exhausted";
  }
};

// ---------------------------------------------------------------------------
// Core formulas: Presburger arithmetic over integer variables. Atoms are
// linear (in)equalities and divisibility constraints; nat-sorted variables
// carry explicit nonnegativity guards inserted during translation.

struct LinTerm {
  std::map<std::string, long long> coeff;
  long long k = 0;
};

struct Core;
using CoreP = std::shared_ptr<const Core>;

struct Core {
  enum class K { True, False, Le, Eq, Div, NDiv, And, Or, Not, Exists, Forall };
  K k;
  LinTerm t;          // Le: t <= 0; Eq: t = 0; Div/NDiv: d | t
  long long d = 0;    // Div/NDiv modulus
  CoreP a, b;         // And/Or children; Not/Exists/Forall body in a
  std::string var;    // Exists, Forall
};

std::string to_string(const CoreP& f);

struct SolverOptions {
  long long node_budget = 10'000'000;
};

class Solver {
 public:
  explicit Solver(SolverOptions opts = {});

  // Equivalence-preserving translation to a core formula: implication/iff
  // expanded, max occurrences case-split at the smallest enclosing scope,
  // bool-sorted equalities rewritten, nonnegativity guards inserted.
  CoreP normalize(const ConstraintPtr& c);

  // Cooper-style quantifier elimination over Z.
  CoreP eliminate_quantifiers(const CoreP& f);

  bool is_valid(const ConstraintPtr& c);
  bool is_satisfiable(const ConstraintPtr& c);
  bool entails(const ConstraintPtr& c, const ConstraintPtr& d);
  bool equiv(const ConstraintPtr& c, const ConstraintPtr& d);

  long long nodes_used() const { return nodes_; }
  void reset_budget() { nodes_ = 0; }

 private:
  SolverOptions opts_;
  long long nodes_ = 0;
  long long fresh_counter_ = 0;

  void charge(long long n = 1);
  CoreP mk(Core c);
  CoreP mk_true();
  CoreP mk_false();
  CoreP mk_le(LinTerm t);
  CoreP mk_eq(LinTerm t);
  CoreP mk_div(long long d, LinTerm t, bool negated);
  CoreP mk_and(CoreP a, CoreP b);
  CoreP mk_or(CoreP a, CoreP b);
  CoreP mk_not(CoreP a);
  CoreP mk_quant(Core::K k, std::string var, CoreP body);

  std::string fresh_internal(const char* stem);

  struct MaxDef {
    std::string var;
    LinTerm a, b;
  };
  LinTerm lin_of_size(const SizePtr& e, std::vector<MaxDef>& defs);
  CoreP wrap_max_defs(std::vector<MaxDef> defs, CoreP atom);
  CoreP bool_holds(const SizePtr& e);  // formula for "e = tt"
  CoreP atom_cmp(const SizePtr& a, const SizePtr& b, int rel);  // 0:=,1:<,2:<=
  CoreP to_core(const ConstraintPtr& c);

  CoreP nnf(const CoreP& f, bool neg);
  CoreP simplify(const CoreP& f);
  CoreP subst_var(const CoreP& f, const std::string& x, const LinTerm& t);
  CoreP elim(const CoreP& f);
  CoreP cooper_exists(const std::string& x, CoreP f);

  bool decide(const ConstraintPtr& c, bool universal);
};

// ---------------------------------------------------------------------------
// Brute-force evaluation: the independent oracle for differential testing.
// Quantifiers over nat are enumerated up to `quantifier_bound`; evaluating an
// unbounded quantifier without a bound throws std::invalid_argument.

using SizeValue = std::variant<unsigned long long, bool>;
using Valuation = std::map<std::string, SizeValue>;

SizeValue evaluate_size(const SizePtr& e, const Valuation& mu);
bool evaluate(const ConstraintPtr& c, const Valuation& mu,
              std::optional<unsigned long long> quantifier_bound = {});

// Ground-style evaluation of a core formula under an integer valuation;
// used by normalization-preservation tests.
bool evaluate_core(const CoreP& f, const std::map<std::string, long long>& mu,
                   std::optional<long long> quantifier_bound = {});

}  // namespace stc

#endif
