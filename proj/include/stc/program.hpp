#ifndef STC_PROGRAM_HPP
#define STC_PROGRAM_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stc/syntax.hpp"

namespace stc {

class Solver;

// ---------------------------------------------------------------------------
// Signatures and rules

struct SymbolSignature {
  enum class Kind { Constructor, Function };
  std::string name;
  Kind kind;
  TypePtr type;  // closed
};

struct RuleCondition {
  TermPtr term;
  bool expects_true;  // the constructor the condition must reduce to
};

struct Rule {
  std::vector<RuleCondition> conditions;
  std::string fun;
  std::vector<PatternPtr> lhs_args;
  TermPtr rhs;
  int line = 0;
  int index = 0;  // per-function rule number, 1-based, in declaration order
};

// Well-founded measure families plus the trusted escape hatch. The trusted
// form takes a raw constraint over the signature's size variables (current
// call) and the same names primed (recursive call); it is the caller's
// obligation that it denotes a well-founded relation.
struct MeasureSpec {
  enum class Form { Lexicographic, Linear, Trusted };
  Form form = Form::Lexicographic;
  std::vector<unsigned> indices;               // Lexicographic
  std::vector<unsigned long long> coeffs;      // Linear
  ConstraintPtr trusted;                       // Trusted
  bool declared = false;
};

struct Program {
  std::vector<std::string> type_names;  // declaration order; includes bool
  std::vector<std::pair<std::string, std::string>> type_edges;  // greater, smaller
  std::map<std::string, SymbolSignature> signatures;
  std::vector<std::string> symbol_order;  // declaration order
  std::map<std::string, MeasureSpec> measures;
  std::vector<Rule> rules;
  std::vector<std::pair<std::string, std::string>> fun_edges;  // greater, smaller
};

struct SymbolTable {
  std::map<std::string, SymbolSignature::Kind> symbols;
  bool is_ctor(const std::string& n) const {
    auto it = symbols.find(n);
    return it != symbols.end() && it->second == SymbolSignature::Kind::Constructor;
  }
  bool is_fun(const std::string& n) const {
    auto it = symbols.find(n);
    return it != symbols.end() && it->second == SymbolSignature::Kind::Function;
  }
  bool known(const std::string& n) const { return symbols.count(n) != 0; }
};

SymbolTable symbol_table(const Program& p);

// ---------------------------------------------------------------------------
// Constructor signature shape (the assumption of the termination criterion):
//   C1 -> ... -> Cm -> forall a1..ak. B1^a1 -> ... -> Bk^ak -> B^a
// with a = 0 when k = 0 and a = 1+max(a1..ak) otherwise; bool constructors
// are exactly true : bool^tt and false : bool^ff.

struct CtorShape {
  std::vector<TypePtr> simple_args;      // C1..Cm
  std::vector<std::string> size_vars;    // a1..ak
  std::vector<std::string> rec_bases;    // B1..Bk
  std::string result_base;               // B
  SizePtr result_annot;                  // a
};

struct ShapeError {
  std::string message;
  int position = -1;  // argument position when applicable
};

struct CtorValidation {
  bool ok = false;
  CtorShape shape;
  ShapeError error;
};

CtorValidation validate_constructor_signature(const SymbolSignature& sig,
                                              Solver& solver);

// ---------------------------------------------------------------------------
// Function signature shape (condition (i) of the criterion):
//   T1 -> ... -> Tm -> forall a1..ak. B1^a1 -> ... -> Bk^ak -> T
// with T1..Tm simple and T an exists-basic type. k = 0 collapses to
// T1 -> ... -> Tm -> T.

struct FunShape {
  std::vector<TypePtr> plain_args;       // T1..Tm
  std::vector<std::string> size_vars;    // a1..ak (rigid during rule checking)
  std::vector<std::string> rec_bases;    // B1..Bk
  TypePtr result;                        // T
};

struct FunValidation {
  bool ok = false;
  FunShape shape;
  ShapeError error;
};

FunValidation decompose_function_signature(const SymbolSignature& sig,
                                           Solver& solver);

// exists-basic: a product of annotated bases, possibly under existential
// quantifiers whose guards are satisfiable for every instance.
bool is_exists_basic(const TypePtr& t, Solver& solver);

}  // namespace stc

#endif
