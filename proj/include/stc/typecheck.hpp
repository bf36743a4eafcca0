#ifndef STC_TYPECHECK_HPP
#define STC_TYPECHECK_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "stc/solver.hpp"
#include "stc/subtyping.hpp"
#include "stc/syntax.hpp"

namespace stc {

// Symbol types in force for a judgment: tau itself, or the tau< variant
// built by the termination checker.
struct TypeAssignment {
  std::map<std::string, TypePtr> types;
  const TypePtr& lookup(const std::string& name) const;
};

struct TraceEntry {
  std::string rule;
  std::string path;
  ConstraintPtr constraint;
};

class TypeError : public std::runtime_error {
 public:
  TypeError(std::string message, std::string path)
      : std::runtime_error(message + " (at " + path + ")"),
        path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Result of one inference/checking judgment. `minted` are fresh size
// variables introduced by the derivation that are still free in the
// constraint (instantiation unknowns); the gate closes them existentially.
struct Judgment {
  ConstraintPtr constraint;
  TypePtr type;  // inference only
  std::map<std::string, SizeSort> minted;
};

struct InferResult {
  ConstraintPtr constraint;
  TypePtr type;
  std::vector<TraceEntry> trace;
};

class Checker {
 public:
  Checker(const TypeAssignment& tau, Solver& solver, FreshSupply& fresh)
      : tau_(tau), solver_(solver), fresh_(fresh) {}

  Judgment infer(const Environment& env, const TermPtr& t,
                 const std::string& path = ".");
  Judgment check(const Environment& env, const TermPtr& t, const TypePtr& type,
                 const std::string& path = ".");

  const std::vector<TraceEntry>& trace() const { return trace_; }

 private:
  struct OpenedQuant {
    SortedVars vars;
    ConstraintPtr guard;
    TypePtr body;
  };
  OpenedQuant open_fresh(const TypePtr& t);
  void note(const std::string& rule, const std::string& path,
            const ConstraintPtr& c);

  const TypeAssignment& tau_;
  Solver& solver_;
  FreshSupply& fresh_;
  std::vector<TraceEntry> trace_;
};

// The (type-check) gate: run checking, close leftover fresh variables
// existentially, then decide satisfiability of C and entailment C => D.
struct GateResult {
  enum class Status { Accepted, Rejected, Unknown };
  Status status = Status::Rejected;
  std::string reason;
  ConstraintPtr obligation;  // the closed D (when checking succeeded)
  std::vector<TraceEntry> trace;
};

GateResult typecheck_gate(Solver& solver, const TypeAssignment& tau,
                          const ConstraintPtr& hyp, const Environment& env,
                          const TermPtr& t, const TypePtr& type);

// Convenience wrappers matching the module surface.
InferResult infer_type(Solver& solver, const TypeAssignment& tau,
                       const Environment& env, const TermPtr& t);

}  // namespace stc

#endif
