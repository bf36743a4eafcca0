#ifndef STC_SYNTAX_HPP
#define STC_SYNTAX_HPP

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stc {

// ---------------------------------------------------------------------------
// Size sorts

enum class SizeSort { Nat, Bool };

std::string to_string(SizeSort s);

using SortedVars = std::vector<std::pair<std::string, SizeSort>>;

// ---------------------------------------------------------------------------
// Size expressions: the two-sorted algebra {0, 1, +, max} over nat and
// {tt, ff, le} over bool. Nodes are immutable and freely shared.

struct SizeExpr;
using SizePtr = std::shared_ptr<const SizeExpr>;

struct SizeExpr {
  enum class Kind { Var, Zero, One, Literal, Sum, Max, TT, FF, Le };
  Kind kind;
  std::string name;                // Var
  SizeSort var_sort = SizeSort::Nat;
  unsigned long long value = 0;    // Literal
  SizePtr lhs, rhs;                // Sum, Max, Le

  SizeSort sort() const;
};

SizePtr size_var(std::string name, SizeSort sort);
SizePtr size_zero();
SizePtr size_one();
SizePtr size_literal(unsigned long long n);
SizePtr size_sum(SizePtr a, SizePtr b);
SizePtr size_max(SizePtr a, SizePtr b);
SizePtr size_tt();
SizePtr size_ff();
SizePtr size_le(SizePtr a, SizePtr b);

bool size_equal(const SizePtr& a, const SizePtr& b);
void free_size_vars(const SizePtr& e, std::map<std::string, SizeSort>& out);

// ---------------------------------------------------------------------------
// Constraints: first-order formulas over the size algebra.

struct Constraint;
using ConstraintPtr = std::shared_ptr<const Constraint>;

struct Constraint {
  enum class Kind {
    Truth, Falsity, Equal, Less, Leq,
    And, Or, Not, Implies, Iff, Exists, Forall
  };
  Kind kind;
  SizePtr a, b;        // Equal, Less, Leq
  ConstraintPtr l, r;  // connectives (Not uses l only)
  SortedVars vars;     // Exists, Forall (body in l)
};

ConstraintPtr c_true();
ConstraintPtr c_false();
ConstraintPtr c_eq(SizePtr a, SizePtr b);
ConstraintPtr c_less(SizePtr a, SizePtr b);
ConstraintPtr c_leq(SizePtr a, SizePtr b);
ConstraintPtr c_and(ConstraintPtr l, ConstraintPtr r);
ConstraintPtr c_or(ConstraintPtr l, ConstraintPtr r);
ConstraintPtr c_not(ConstraintPtr c);
ConstraintPtr c_implies(ConstraintPtr l, ConstraintPtr r);
ConstraintPtr c_iff(ConstraintPtr l, ConstraintPtr r);
ConstraintPtr c_exists(SortedVars vars, ConstraintPtr body);
ConstraintPtr c_forall(SortedVars vars, ConstraintPtr body);

// Conjunction of a list; empty list is truth.
ConstraintPtr c_and_all(const std::vector<ConstraintPtr>& cs);

void free_size_vars(const ConstraintPtr& c, std::map<std::string, SizeSort>& out);
bool constraint_alpha_equal(const ConstraintPtr& a, const ConstraintPtr& b);

// ---------------------------------------------------------------------------
// Types

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
  enum class Kind { Base, Arrow, Product, Forall, Exists };
  Kind kind;
  std::string base;      // Base
  SizePtr annot;         // Base
  TypePtr l, r;          // Arrow, Product
  SortedVars vars;       // Forall, Exists
  ConstraintPtr guard;   // Forall, Exists
  TypePtr body;          // Forall, Exists
};

TypePtr t_base(std::string name, SizePtr annot);
TypePtr t_arrow(TypePtr dom, TypePtr cod);
TypePtr t_product(TypePtr l, TypePtr r);
TypePtr t_forall(SortedVars vars, ConstraintPtr guard, TypePtr body);
TypePtr t_exists(SortedVars vars, ConstraintPtr guard, TypePtr body);

// The abbreviation B = exists a. B^a.
TypePtr t_bare(const std::string& base_name);

// Sort of annotations on base type `name`: bool for bool, nat otherwise.
SizeSort annot_sort(const std::string& base_name);

void free_size_vars(const TypePtr& t, std::map<std::string, SizeSort>& out);
bool type_alpha_equal(const TypePtr& a, const TypePtr& b);

// Natural transformation to simple types: B^a -> exists x. B^x, quantifiers
// dropped, arrow/product structural.
TypePtr erase(const TypePtr& t);
bool is_simple(const TypePtr& t);

// ---------------------------------------------------------------------------
// Terms

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { Var, Ctor, Fun, Abs, App, Pair, Fst, Snd, Let, If };
  Kind kind;
  std::string name;  // Var, Ctor, Fun, Abs (bound var), Let (bound var)
  TermPtr a, b, c;   // Abs: a=body; App: a b; Pair: a b; Fst/Snd: a;
                     // Let: a=bound term, b=body; If: a, b, c
};

TermPtr mk_var(std::string name);
TermPtr mk_ctor(std::string name);
TermPtr mk_fun(std::string name);
TermPtr mk_abs(std::string var, TermPtr body);
TermPtr mk_app(TermPtr f, TermPtr arg);
TermPtr mk_pair(TermPtr a, TermPtr b);
TermPtr mk_fst(TermPtr a);
TermPtr mk_snd(TermPtr a);
TermPtr mk_let(std::string var, TermPtr bound, TermPtr body);
TermPtr mk_if(TermPtr cond, TermPtr then_br, TermPtr else_br);

std::set<std::string> free_vars(const TermPtr& t);
bool alpha_equal(const TermPtr& a, const TermPtr& b);

using TermSubst = std::map<std::string, TermPtr>;

// Capture-avoiding simultaneous substitution.
TermPtr substitute_term(const TermPtr& t, const TermSubst& subst);

// Spine view: f t1 ... tn with f a symbol or other head.
std::vector<TermPtr> spine(const TermPtr& t, TermPtr& head);

// ---------------------------------------------------------------------------
// Patterns

struct Pattern;
using PatternPtr = std::shared_ptr<const Pattern>;

struct Pattern {
  enum class Kind { Var, Ctor };
  Kind kind;
  std::string name;
  std::vector<PatternPtr> args;  // Ctor
};

PatternPtr p_var(std::string name);
PatternPtr p_ctor(std::string name, std::vector<PatternPtr> args);

TermPtr pattern_to_term(const PatternPtr& p);
std::set<std::string> pattern_vars(const PatternPtr& p);

// ---------------------------------------------------------------------------
// Size substitution (sort-preserving, capture-avoiding). Throws
// std::invalid_argument on a sort mismatch.

using SizeSubst = std::map<std::string, SizePtr>;

SizePtr substitute_size(const SizePtr& e, const SizeSubst& s);
ConstraintPtr substitute_size(const ConstraintPtr& c, const SizeSubst& s);
TypePtr substitute_size(const TypePtr& t, const SizeSubst& s);

// ---------------------------------------------------------------------------
// Environments

using Environment = std::map<std::string, TypePtr>;

struct CompatResult {
  bool ok = true;
  std::string var;
  TypePtr left, right;
};

// Two environments are compatible iff shared variables carry syntactically
// equal types (up to renaming of bound size variables).
CompatResult check_compatible(const Environment& a, const Environment& b);

// ---------------------------------------------------------------------------
// Fresh size-variable supply. Deterministic: derived names use a counter and
// a prime suffix, skipping anything already reserved.

class FreshSupply {
 public:
  void reserve(const std::string& name);
  void reserve_all(const std::map<std::string, SizeSort>& vars);
  // Reserves `name` and reports whether it was previously unused.
  bool claim(const std::string& name);
  std::string fresh(const std::string& base);

 private:
  std::set<std::string> used_;
};

// ---------------------------------------------------------------------------
// Printing (surface syntax; round-trips through the parser)

std::string to_string(const SizePtr& e);
std::string to_string(const ConstraintPtr& c);
std::string to_string(const TypePtr& t);
std::string to_string(const TermPtr& t);
std::string to_string(const PatternPtr& p);

}  // namespace stc

#endif
