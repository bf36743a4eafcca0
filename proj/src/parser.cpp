#include "stc/parser.hpp"

#include <cctype>
#include <memory>
#include <optional>

#include "stc/solver.hpp"

namespace stc {

namespace {

// ---------------------------------------------------------------------------
// Lexer

struct Token {
  enum class Kind { Ident, Number, Punct, End };
  Kind kind;
  std::string text;
  unsigned long long num = 0;
  int line = 1, col = 1;
};

[[noreturn]] void fail(const Token& at, const std::string& msg) {
  throw ParseError({msg, at.line, at.col});
}

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto peek = [&](size_t off = 0) -> char {
    return i + off < src.size() ? src[i + off] : '\0';
  };
  while (i < src.size()) {
    char c = peek();
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && peek(1) == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && peek(1) == '*') {
      int sline = line, scol = col;
      advance(2);
      while (i < src.size() && !(peek() == '*' && peek(1) == '/')) advance(1);
      if (i >= src.size())
        throw ParseError({"unterminated block comment", sline, scol});
      advance(2);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) ||
              src[j] == '_' || src[j] == '\''))
        ++j;
      t.kind = Token::Kind::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      unsigned long long v = 0;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
        unsigned long long d = static_cast<unsigned long long>(src[j] - '0');
        if (v > (UINT64_MAX - d) / 10)
          throw ParseError({"numeric literal too large", line, col});
        v = v * 10 + d;
        ++j;
      }
      t.kind = Token::Kind::Number;
      t.text = src.substr(i, j - i);
      t.num = v;
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    auto punct = [&](const char* p) {
      size_t n = std::string(p).size();
      if (src.compare(i, n, p) != 0) return false;
      t.kind = Token::Kind::Punct;
      t.text = p;
      advance(n);
      out.push_back(t);
      return true;
    };
    if (punct("<->") || punct("->") || punct("=>") || punct("<=") ||
        punct(">=") || punct("/\\") || punct("\\/") || punct("(") ||
        punct(")") || punct("[") || punct("]") || punct(".") || punct(",") ||
        punct(";") || punct(":") || punct("^") || punct("*") || punct("+") ||
        punct("=") || punct("<") || punct(">") || punct("~"))
      continue;
    throw ParseError({"unexpected character '" + std::string(1, c) + "'",
                      line, col});
  }
  Token end;
  end.kind = Token::Kind::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------------------
// Pre-typed size expressions; sorts are resolved against a scope that is
// filled in as uses decide them.

struct PreSize {
  enum class K { Var, Num, Sum, Max, TT, FF, Le };
  K k;
  std::string name;
  unsigned long long num = 0;
  std::shared_ptr<PreSize> a, b;
  int line = 0, col = 0;
};
using PreP = std::shared_ptr<PreSize>;

struct SizeScope {
  std::vector<std::map<std::string, std::optional<SizeSort>>*> frames;
  std::map<std::string, std::optional<SizeSort>> free;

  std::optional<SizeSort>* lookup(const std::string& n) {
    for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
      auto f = (*it)->find(n);
      if (f != (*it)->end()) return &f->second;
    }
    auto f = free.find(n);
    return f == free.end() ? nullptr : &f->second;
  }
  std::optional<SizeSort>* lookup_or_free(const std::string& n) {
    if (auto* s = lookup(n)) return s;
    return &free.emplace(n, std::nullopt).first->second;
  }
};

// ---------------------------------------------------------------------------
// Parser proper

const char* kKeywords[] = {"fun",      "let",     "in",         "if",
                           "then",     "else",    "fst",        "snd",
                           "rule",     "type",    "constructor", "function",
                           "measure",  "precedence"};

bool is_keyword(const std::string& s) {
  for (const char* k : kKeywords)
    if (s == k) return true;
  return false;
}

class Parser {
 public:
  Parser(std::string text, const SymbolTable* syms)
      : tokens_(lex(text)), syms_(syms) {}

  const Token& cur() const { return tokens_[pos_]; }
  const Token& next(size_t off = 1) const {
    size_t p = pos_ + off;
    return tokens_[p < tokens_.size() ? p : tokens_.size() - 1];
  }
  void bump() {
    if (pos_ + 1 < tokens_.size()) ++pos_;
  }
  bool at_punct(const char* p) const {
    return cur().kind == Token::Kind::Punct && cur().text == p;
  }
  bool at_ident(const char* w) const {
    return cur().kind == Token::Kind::Ident && cur().text == w;
  }
  bool eat_punct(const char* p) {
    if (!at_punct(p)) return false;
    bump();
    return true;
  }
  bool eat_ident(const char* w) {
    if (!at_ident(w)) return false;
    bump();
    return true;
  }
  void expect_punct(const char* p) {
    if (!eat_punct(p)) fail(cur(), std::string("expected '") + p + "'");
  }
  std::string expect_ident(const char* what) {
    if (cur().kind != Token::Kind::Ident)
      fail(cur(), std::string("expected ") + what);
    std::string s = cur().text;
    bump();
    return s;
  }

  // ---- size expressions -------------------------------------------------

  PreP pre_atom() {
    Token t = cur();
    auto node = [&](PreSize::K k) {
      auto p = std::make_shared<PreSize>();
      p->k = k;
      p->line = t.line;
      p->col = t.col;
      return p;
    };
    if (t.kind == Token::Kind::Number) {
      bump();
      auto p = node(PreSize::K::Num);
      p->num = t.num;
      return p;
    }
    if (at_ident("tt")) {
      bump();
      return node(PreSize::K::TT);
    }
    if (at_ident("ff")) {
      bump();
      return node(PreSize::K::FF);
    }
    if (at_ident("max") && next().kind == Token::Kind::Punct &&
        next().text == "(") {
      bump();
      expect_punct("(");
      auto p = node(PreSize::K::Max);
      p->a = pre_size();
      expect_punct(",");
      p->b = pre_size();
      expect_punct(")");
      return p;
    }
    if (at_ident("le") && next().kind == Token::Kind::Punct &&
        next().text == "(") {
      bump();
      expect_punct("(");
      auto p = node(PreSize::K::Le);
      p->a = pre_size();
      expect_punct(",");
      p->b = pre_size();
      expect_punct(")");
      return p;
    }
    if (t.kind == Token::Kind::Ident) {
      if (is_keyword(t.text)) fail(t, "keyword in size expression");
      bump();
      auto p = node(PreSize::K::Var);
      p->name = t.text;
      return p;
    }
    if (eat_punct("(")) {
      PreP p = pre_size();
      expect_punct(")");
      return p;
    }
    fail(t, "expected size expression");
  }

  PreP pre_size() {
    PreP lhs = pre_atom();
    while (at_punct("+")) {
      Token t = cur();
      bump();
      auto p = std::make_shared<PreSize>();
      p->k = PreSize::K::Sum;
      p->line = t.line;
      p->col = t.col;
      p->a = lhs;
      p->b = pre_atom();
      lhs = p;
    }
    return lhs;
  }

  std::optional<SizeSort> sort_of(const PreP& p, SizeScope& scope) {
    switch (p->k) {
      case PreSize::K::Var: {
        auto* s = scope.lookup_or_free(p->name);
        return *s;
      }
      case PreSize::K::Num:
      case PreSize::K::Sum:
      case PreSize::K::Max:
        return SizeSort::Nat;
      case PreSize::K::TT:
      case PreSize::K::FF:
      case PreSize::K::Le:
        return SizeSort::Bool;
    }
    return std::nullopt;
  }

  SizePtr build_size(const PreP& p, SizeSort expected, SizeScope& scope) {
    switch (p->k) {
      case PreSize::K::Var: {
        auto* s = scope.lookup_or_free(p->name);
        if (!s->has_value()) *s = expected;
        if (**s != expected)
          throw ParseError({"size variable " + p->name + " used at sort " +
                                to_string(expected) + " but has sort " +
                                to_string(**s),
                            p->line, p->col});
        return size_var(p->name, expected);
      }
      case PreSize::K::Num:
        if (expected != SizeSort::Nat)
          throw ParseError({"numeric size in bool position", p->line, p->col});
        if (p->num == 0) return size_zero();
        if (p->num == 1) return size_one();
        return size_literal(p->num);
      case PreSize::K::Sum:
        if (expected != SizeSort::Nat)
          throw ParseError({"sum in bool position", p->line, p->col});
        return size_sum(build_size(p->a, SizeSort::Nat, scope),
                        build_size(p->b, SizeSort::Nat, scope));
      case PreSize::K::Max:
        if (expected != SizeSort::Nat)
          throw ParseError({"max in bool position", p->line, p->col});
        return size_max(build_size(p->a, SizeSort::Nat, scope),
                        build_size(p->b, SizeSort::Nat, scope));
      case PreSize::K::TT:
      case PreSize::K::FF:
        if (expected != SizeSort::Bool)
          throw ParseError({"boolean size constant in nat position", p->line,
                            p->col});
        return p->k == PreSize::K::TT ? size_tt() : size_ff();
      case PreSize::K::Le:
        if (expected != SizeSort::Bool)
          throw ParseError({"le(...) in nat position", p->line, p->col});
        return size_le(build_size(p->a, SizeSort::Nat, scope),
                       build_size(p->b, SizeSort::Nat, scope));
    }
    fail(cur(), "malformed size expression");
  }

  // ---- constraints --------------------------------------------------------

  ConstraintPtr constraint(SizeScope& scope) { return con_quant(scope); }

  ConstraintPtr con_quant(SizeScope& scope) {
    if (at_ident("forall") || at_ident("exists")) {
      bool fa = at_ident("forall");
      bump();
      std::map<std::string, std::optional<SizeSort>> frame;
      std::vector<std::string> names;
      while (cur().kind == Token::Kind::Ident && !at_punct(".")) {
        if (is_keyword(cur().text)) fail(cur(), "keyword in binder list");
        names.push_back(cur().text);
        frame.emplace(cur().text, std::nullopt);
        bump();
      }
      if (names.empty()) fail(cur(), "quantifier needs at least one variable");
      expect_punct(".");
      scope.frames.push_back(&frame);
      ConstraintPtr body = con_quant(scope);
      scope.frames.pop_back();
      SortedVars vars;
      for (const auto& n : names)
        vars.emplace_back(n, frame[n].value_or(SizeSort::Nat));
      return fa ? c_forall(vars, body) : c_exists(vars, body);
    }
    return con_iff(scope);
  }

  ConstraintPtr con_iff(SizeScope& scope) {
    ConstraintPtr l = con_imp(scope);
    while (eat_punct("<->")) l = c_iff(l, con_imp(scope));
    return l;
  }

  ConstraintPtr con_imp(SizeScope& scope) {
    ConstraintPtr l = con_or(scope);
    if (eat_punct("->")) return c_implies(l, con_imp(scope));
    return l;
  }

  ConstraintPtr con_or(SizeScope& scope) {
    ConstraintPtr l = con_and(scope);
    while (eat_punct("\\/")) l = c_or(l, con_and(scope));
    return l;
  }

  ConstraintPtr con_and(SizeScope& scope) {
    ConstraintPtr l = con_neg(scope);
    while (eat_punct("/\\")) l = c_and(l, con_neg(scope));
    return l;
  }

  ConstraintPtr con_neg(SizeScope& scope) {
    if (eat_punct("~")) return c_not(con_neg(scope));
    return con_atom(scope);
  }

  ConstraintPtr con_atom(SizeScope& scope) {
    if (at_ident("true")) {
      bump();
      return c_true();
    }
    if (at_ident("false")) {
      bump();
      return c_false();
    }
    if (at_ident("forall") || at_ident("exists")) return con_quant(scope);
    if (at_punct("(")) {
      // Either a parenthesized constraint or a parenthesized size expression
      // followed by a comparison; try the constraint reading first.
      size_t save = pos_;
      try {
        bump();
        ConstraintPtr c = constraint(scope);
        expect_punct(")");
        if (at_punct("=") || at_punct("<") || at_punct("<=") ||
            at_punct(">") || at_punct(">="))
          throw ParseError({"comparison after constraint", cur().line,
                            cur().col});
        return c;
      } catch (const ParseError&) {
        pos_ = save;
      }
    }
    PreP lhs = pre_size();
    int rel;
    bool flip = false;
    if (eat_punct("=")) {
      rel = 0;
    } else if (eat_punct("<")) {
      rel = 1;
    } else if (eat_punct("<=")) {
      rel = 2;
    } else if (eat_punct(">")) {
      rel = 1;
      flip = true;
    } else if (eat_punct(">=")) {
      rel = 2;
      flip = true;
    } else {
      fail(cur(), "expected comparison operator");
    }
    PreP rhs = pre_size();
    if (flip) std::swap(lhs, rhs);
    if (rel == 0) {
      SizeSort s =
          sort_of(lhs, scope).value_or(sort_of(rhs, scope).value_or(SizeSort::Nat));
      return c_eq(build_size(lhs, s, scope), build_size(rhs, s, scope));
    }
    SizePtr a = build_size(lhs, SizeSort::Nat, scope);
    SizePtr b = build_size(rhs, SizeSort::Nat, scope);
    return rel == 1 ? c_less(a, b) : c_leq(a, b);
  }

  // ---- types ---------------------------------------------------------------

  TypePtr type(SizeScope& scope) {
    if (at_ident("forall") || at_ident("exists")) {
      bool fa = at_ident("forall");
      bump();
      std::map<std::string, std::optional<SizeSort>> frame;
      std::vector<std::string> names;
      while (cur().kind == Token::Kind::Ident && !at_punct(".") &&
             !at_punct("[")) {
        if (is_keyword(cur().text)) fail(cur(), "keyword in binder list");
        names.push_back(cur().text);
        frame.emplace(cur().text, std::nullopt);
        bump();
      }
      if (names.empty()) fail(cur(), "quantifier needs at least one variable");
      scope.frames.push_back(&frame);
      ConstraintPtr guard = c_true();
      if (eat_punct("[")) {
        guard = constraint(scope);
        expect_punct("]");
      }
      expect_punct(".");
      TypePtr body = type(scope);
      scope.frames.pop_back();
      SortedVars vars;
      for (const auto& n : names)
        vars.emplace_back(n, frame[n].value_or(SizeSort::Nat));
      return fa ? t_forall(vars, guard, body) : t_exists(vars, guard, body);
    }
    TypePtr l = type_prod(scope);
    if (eat_punct("->")) return t_arrow(l, type(scope));
    return l;
  }

  TypePtr type_prod(SizeScope& scope) {
    TypePtr l = type_atom(scope);
    while (at_punct("*")) {
      bump();
      l = t_product(l, type_atom(scope));
    }
    return l;
  }

  TypePtr type_atom(SizeScope& scope) {
    if (eat_punct("(")) {
      TypePtr t = type(scope);
      expect_punct(")");
      return t;
    }
    Token t = cur();
    std::string name = expect_ident("type name");
    if (is_keyword(name)) fail(t, "keyword in type position");
    if (allowed_types_ && !allowed_types_->count(name))
      fail(t, "unknown type name " + name);
    if (eat_punct("^")) {
      PreP a = pre_atom();
      return t_base(name, build_size(a, annot_sort(name), scope));
    }
    return t_bare(name);
  }

  // ---- terms ----------------------------------------------------------------

  TermPtr term(std::set<std::string>& bound) {
    if (at_ident("fun")) {
      bump();
      Token vt = cur();
      std::string v = expect_ident("binder");
      if (syms_ && syms_->known(v)) fail(vt, "binder shadows declared symbol");
      expect_punct("->");
      bool added = bound.insert(v).second;
      TermPtr body = term(bound);
      if (added) bound.erase(v);
      return mk_abs(v, body);
    }
    if (at_ident("let")) {
      bump();
      Token vt = cur();
      std::string v = expect_ident("binder");
      if (syms_ && syms_->known(v)) fail(vt, "binder shadows declared symbol");
      expect_punct("=");
      TermPtr t = term(bound);
      if (!eat_ident("in")) fail(cur(), "expected 'in'");
      bool added = bound.insert(v).second;
      TermPtr body = term(bound);
      if (added) bound.erase(v);
      return mk_let(v, t, body);
    }
    if (at_ident("if")) {
      bump();
      TermPtr c = term(bound);
      if (!eat_ident("then")) fail(cur(), "expected 'then'");
      TermPtr a = term(bound);
      if (!eat_ident("else")) fail(cur(), "expected 'else'");
      TermPtr b = term(bound);
      return mk_if(c, a, b);
    }
    TermPtr head = term_prefix(bound);
    while (starts_atom()) head = mk_app(head, term_prefix(bound));
    return head;
  }

  bool starts_atom() const {
    if (cur().kind == Token::Kind::Number) return true;
    if (at_punct("(")) return true;
    if (cur().kind != Token::Kind::Ident) return false;
    const std::string& s = cur().text;
    if (s == "fst" || s == "snd") return true;
    return !is_keyword(s) && s != "then" && s != "else" && s != "in";
  }

  TermPtr term_prefix(std::set<std::string>& bound) {
    if (at_ident("fst")) {
      bump();
      return mk_fst(term_atom(bound));
    }
    if (at_ident("snd")) {
      bump();
      return mk_snd(term_atom(bound));
    }
    return term_atom(bound);
  }

  TermPtr term_atom(std::set<std::string>& bound) {
    Token t = cur();
    if (t.kind == Token::Kind::Number) {
      bump();
      return numeral(t);
    }
    if (eat_punct("(")) {
      TermPtr a = term(bound);
      if (eat_punct(",")) {
        TermPtr b = term(bound);
        expect_punct(")");
        return mk_pair(a, b);
      }
      expect_punct(")");
      return a;
    }
    if (t.kind == Token::Kind::Ident) {
      if (is_keyword(t.text)) fail(t, "unexpected keyword in term");
      bump();
      if (syms_) {
        if (syms_->is_ctor(t.text)) return mk_ctor(t.text);
        if (syms_->is_fun(t.text)) return mk_fun(t.text);
      }
      return mk_var(t.text);
    }
    fail(t, "expected term");
  }

  TermPtr numeral(const Token& t) {
    if (!syms_ || !syms_->is_ctor("0"))
      fail(t, "numeral notation needs a declared constructor 0");
    TermPtr acc = mk_ctor("0");
    if (t.num == 0) return acc;
    if (!syms_->is_ctor("s"))
      fail(t, "numeral notation needs a declared constructor s");
    for (unsigned long long k = 0; k < t.num; ++k)
      acc = mk_app(mk_ctor("s"), acc);
    return acc;
  }

  // ---- declarations -----------------------------------------------------------

  Program program() {
    Program p;
    p.type_names = {"bool"};
    p.signatures.emplace(
        "true", SymbolSignature{"true", SymbolSignature::Kind::Constructor,
                                t_base("bool", size_tt())});
    p.signatures.emplace(
        "false", SymbolSignature{"false", SymbolSignature::Kind::Constructor,
                                 t_base("bool", size_ff())});
    p.symbol_order = {"true", "false"};
    std::set<std::string> types = {"bool"};
    allowed_types_ = &types;
    std::map<std::string, int> rule_counts;

    while (cur().kind != Token::Kind::End) {
      Token t = cur();
      if (eat_ident("type")) {
        std::string name = expect_ident("type name");
        if (!types.insert(name).second) fail(t, "type " + name + " redeclared");
        p.type_names.push_back(name);
        while (eat_punct(">")) {
          Token ut = cur();
          std::string smaller = expect_ident("type name");
          if (!types.count(smaller))
            fail(ut, "unknown type name " + smaller);
          p.type_edges.emplace_back(name, smaller);
        }
        expect_punct(";");
        continue;
      }
      if (at_ident("constructor") || at_ident("function")) {
        bool is_ctor = at_ident("constructor");
        bump();
        Token nt = cur();
        std::string name;
        if (nt.kind == Token::Kind::Number) {
          name = nt.text;
          bump();
        } else {
          name = expect_ident("symbol name");
        }
        if (p.signatures.count(name)) fail(nt, "symbol " + name + " redeclared");
        expect_punct(":");
        SizeScope scope;
        TypePtr ty = type(scope);
        for (const auto& [n, s] : scope.free)
          fail(nt, "unbound size variable " + n + " in signature of " + name);
        expect_punct(";");
        SymbolSignature sig{name,
                            is_ctor ? SymbolSignature::Kind::Constructor
                                    : SymbolSignature::Kind::Function,
                            ty};
        p.signatures.emplace(name, sig);
        p.symbol_order.push_back(name);
        syms_owned_.symbols.emplace(name, sig.kind);
        continue;
      }
      if (eat_ident("measure")) {
        Token nt = cur();
        std::string name = expect_ident("function name");
        if (!syms_owned_.is_fun(name))
          fail(nt, name + " is not a declared function");
        if (p.measures.count(name))
          fail(nt, "measure for " + name + " redeclared");
        MeasureSpec m;
        m.declared = true;
        if (eat_ident("lex")) {
          m.form = MeasureSpec::Form::Lexicographic;
          while (cur().kind == Token::Kind::Number) {
            m.indices.push_back(static_cast<unsigned>(cur().num));
            bump();
          }
          if (m.indices.empty()) fail(cur(), "lex measure needs indices");
        } else if (eat_ident("linear")) {
          m.form = MeasureSpec::Form::Linear;
          bool nonzero = false;
          while (cur().kind == Token::Kind::Number) {
            m.coeffs.push_back(cur().num);
            nonzero |= cur().num != 0;
            bump();
          }
          if (m.coeffs.empty() || !nonzero)
            fail(cur(), "linear measure needs coefficients, not all zero");
        } else if (eat_ident("trust")) {
          m.form = MeasureSpec::Form::Trusted;
          expect_punct("[");
          SizeScope scope;
          m.trusted = constraint(scope);
          expect_punct("]");
        } else {
          fail(cur(), "expected lex, linear, or trust");
        }
        expect_punct(";");
        p.measures.emplace(name, m);
        continue;
      }
      if (eat_ident("precedence")) {
        Token nt = cur();
        std::string hi = expect_ident("function name");
        expect_punct(">");
        std::string lo = expect_ident("function name");
        if (!syms_owned_.is_fun(hi) || !syms_owned_.is_fun(lo))
          fail(nt, "precedence needs declared functions");
        expect_punct(";");
        p.fun_edges.emplace_back(hi, lo);
        continue;
      }
      if (eat_ident("rule")) {
        syms_ = &syms_owned_;
        Rule r;
        r.line = t.line;
        std::set<std::string> bound;
        if (at_ident("if")) {
          bump();
          while (true) {
            RuleCondition c;
            c.term = term(bound);
            expect_punct("=");
            if (eat_ident("true")) {
              c.expects_true = true;
            } else if (eat_ident("false")) {
              c.expects_true = false;
            } else {
              fail(cur(), "condition must expect true or false");
            }
            r.conditions.push_back(std::move(c));
            if (eat_punct(",")) continue;
            break;
          }
          expect_punct("=>");
        }
        Token lt = cur();
        TermPtr lhs = term(bound);
        expect_punct("->");
        TermPtr rhs = term(bound);
        expect_punct(";");
        syms_ = nullptr;

        TermPtr head;
        std::vector<TermPtr> args = spine(lhs, head);
        if (head->kind != Term::Kind::Fun)
          fail(lt, "rule left-hand side must be a function applied to patterns");
        r.fun = head->name;
        for (const auto& a : args) r.lhs_args.push_back(to_pattern(a, lt));
        r.rhs = rhs;
        r.index = ++rule_counts[r.fun];

        std::set<std::string> lhs_vars;
        for (const auto& a : r.lhs_args) {
          auto vs = pattern_vars(a);
          lhs_vars.insert(vs.begin(), vs.end());
        }
        auto check_fv = [&](const TermPtr& tm, const char* where) {
          for (const auto& v : free_vars(tm))
            if (!lhs_vars.count(v))
              fail(lt, std::string("unbound symbol or variable ") + v + " in " +
                           where);
        };
        check_fv(r.rhs, "right-hand side");
        for (const auto& c : r.conditions) check_fv(c.term, "condition");
        p.rules.push_back(std::move(r));
        continue;
      }
      fail(t, "expected a declaration");
    }

    allowed_types_ = nullptr;
    validate(p);
    return p;
  }

  PatternPtr to_pattern(const TermPtr& t, const Token& at) {
    if (t->kind == Term::Kind::Var) return p_var(t->name);
    TermPtr head;
    std::vector<TermPtr> args = spine(t, head);
    if (head->kind != Term::Kind::Ctor)
      fail(at, "left-hand side arguments must be constructor patterns, got " +
                   to_string(t));
    std::vector<PatternPtr> ps;
    for (const auto& a : args) ps.push_back(to_pattern(a, at));
    return p_ctor(head->name, std::move(ps));
  }

  void validate(Program& p) {
    Solver solver;
    for (const auto& name : p.symbol_order) {
      const auto& sig = p.signatures.at(name);
      if (sig.kind != SymbolSignature::Kind::Constructor) continue;
      auto v = validate_constructor_signature(sig, solver);
      if (!v.ok)
        throw ParseError({"constructor " + name + ": " + v.error.message, 0, 0});
    }
  }

  SymbolTable syms_owned_;

 private:
  std::vector<Token> tokens_;
  size_t pos_ = 0;
  const SymbolTable* syms_ = nullptr;
  const std::set<std::string>* allowed_types_ = nullptr;
};

}  // namespace

Program parse_program(const std::string& text) {
  Parser p(text, nullptr);
  p.syms_owned_.symbols.emplace("true", SymbolSignature::Kind::Constructor);
  p.syms_owned_.symbols.emplace("false", SymbolSignature::Kind::Constructor);
  return p.program();
}

TermPtr parse_term(const std::string& text, const SymbolTable& syms) {
  Parser p(text, &syms);
  std::set<std::string> bound;
  TermPtr t = p.term(bound);
  if (p.cur().kind != Token::Kind::End) fail(p.cur(), "trailing input");
  return t;
}

TypePtr parse_type(const std::string& text) {
  Parser p(text, nullptr);
  SizeScope scope;
  TypePtr t = p.type(scope);
  if (p.cur().kind != Token::Kind::End) fail(p.cur(), "trailing input");
  return t;
}

ConstraintPtr parse_constraint(const std::string& text) {
  Parser p(text, nullptr);
  SizeScope scope;
  ConstraintPtr c = p.constraint(scope);
  if (p.cur().kind != Token::Kind::End) fail(p.cur(), "trailing input");
  return c;
}

Environment parse_environment(const std::string& text) {
  Environment env;
  Parser p(text, nullptr);
  if (p.cur().kind == Token::Kind::End) return env;
  while (true) {
    std::string name = p.expect_ident("variable name");
    p.expect_punct(":");
    SizeScope scope;
    env[name] = p.type(scope);
    if (p.eat_punct(",")) continue;
    break;
  }
  if (p.cur().kind != Token::Kind::End) fail(p.cur(), "trailing input");
  return env;
}

}  // namespace stc
