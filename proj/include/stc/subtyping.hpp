#ifndef STC_SUBTYPING_HPP
#define STC_SUBTYPING_HPP

#include <stdexcept>

#include "stc/solver.hpp"
#include "stc/syntax.hpp"

namespace stc {

class SubtypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Compiles T <= U into a constraint. Requires erase(T) = erase(U); throws
// SubtypeError on a structural mismatch. Bound variables of quantified types
// are freshened from `fresh`, so the side conditions of the quantifier
// clauses hold by construction. Dispatch order when both sides carry outer
// quantifiers: right-forall, left-exists, right-exists, left-forall.
ConstraintPtr gen_sub(const TypePtr& t, const TypePtr& u, FreshSupply& fresh);

// C |- T <= U  iff  |= C -> J[T <= U].
bool check_sub(Solver& solver, const ConstraintPtr& c, const TypePtr& t,
               const TypePtr& u, FreshSupply& fresh);

}  // namespace stc

#endif
