#ifndef STC_PARSER_HPP
#define STC_PARSER_HPP

#include <stdexcept>
#include <string>

#include "stc/program.hpp"
#include "stc/syntax.hpp"

namespace stc {

struct Diagnostic {
  std::string message;
  int line = 0;
  int col = 0;
};

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(Diagnostic d)
      : std::runtime_error(std::to_string(d.line) + ":" + std::to_string(d.col) +
                           ": " + d.message),
        diag_(std::move(d)) {}
  const Diagnostic& diagnostic() const { return diag_; }

 private:
  Diagnostic diag_;
};

// Parses a full declaration file (.hrs). The returned program has passed the
// core well-formedness checks: declared symbols only, valid constructor
// signatures, pattern left-hand sides, FV(rhs) within FV(lhs).
Program parse_program(const std::string& text);

TermPtr parse_term(const std::string& text, const SymbolTable& syms);
TypePtr parse_type(const std::string& text);
ConstraintPtr parse_constraint(const std::string& text);

// "x : nat^a, l : list^d" -> environment (for the typecheck command).
Environment parse_environment(const std::string& text);

}  // namespace stc

#endif
