#include "scw/hp/parser.hpp"

#include <cctype>
#include <sstream>

namespace scw::hp {

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ", ";
    out += parts[i];
  }
  return out;
}

}  // namespace

ParseError::ParseError(int line_, int column_, std::string msg,
                       std::vector<std::string> expected_)
    : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                         std::to_string(column_) + ": " + msg +
                         (expected_.empty() ? "" : " (expected " + join(expected_) + ")")),
      line(line_),
      column(column_),
      expected(std::move(expected_)) {}

namespace {

struct Token {
  enum class Kind { Ident, Number, Symbol, End };
  Kind kind;
  std::string text;
  int line;
  int column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) {
    int line = 1, col = 1;
    std::size_t i = 0;
    const auto peek = [&](std::size_t k = 0) -> char {
      return i + k < text.size() ? text[i + k] : '\0';
    };
    const auto advance = [&] {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    };
    while (i < text.size()) {
      const char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        continue;
      }
      if (c == '/' && peek(1) == '/') {
        while (i < text.size() && text[i] != '\n') advance();
        continue;
      }
      const int tl = line, tc = col;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string word;
        while (i < text.size() &&
               (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
          word += peek();
          advance();
        }
        tokens_.push_back({Token::Kind::Ident, word, tl, tc});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string num;
        bool dot = false;
        while (i < text.size() &&
               (std::isdigit(static_cast<unsigned char>(peek())) ||
                (peek() == '.' && !dot))) {
          if (peek() == '.') dot = true;
          num += peek();
          advance();
        }
        tokens_.push_back({Token::Kind::Number, num, tl, tc});
        continue;
      }
      // Multi-character symbols first.
      static const char* kSymbols[] = {":=", "++", ">=", "<=", "->", "<->"};
      std::string sym;
      for (const char* s : kSymbols) {
        const std::string_view sv(s);
        if (text.substr(i, sv.size()) == sv && sv.size() > sym.size()) sym = s;
      }
      if (sym.empty()) sym = std::string(1, c);
      for (std::size_t k = 0; k < sym.size(); ++k) advance();
      tokens_.push_back({Token::Kind::Symbol, sym, tl, tc});
    }
    tokens_.push_back({Token::Kind::End, "", line, col});
  }

  std::vector<Token> tokens_;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(Lexer(text).tokens_) {}

  ProgramPtr program() {
    auto p = parse_choice();
    expect_end();
    return p;
  }
  FormulaPtr formula() {
    auto f = parse_formula();
    expect_end();
    return f;
  }
  TermPtr term() {
    auto t = parse_term();
    expect_end();
    return t;
  }

 private:
  const Token& cur(std::size_t k = 0) const {
    return tokens_[std::min(pos_ + k, tokens_.size() - 1)];
  }
  bool at_symbol(std::string_view s, std::size_t k = 0) const {
    return cur(k).kind == Token::Kind::Symbol && cur(k).text == s;
  }
  bool at_ident(std::string_view s) const {
    return cur().kind == Token::Kind::Ident && cur().text == s;
  }
  void next() { ++pos_; }
  bool eat_symbol(std::string_view s) {
    if (!at_symbol(s)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(std::string msg, std::vector<std::string> expected = {}) const {
    const Token& t = cur();
    throw ParseError(t.line, t.column,
                     msg + (t.kind == Token::Kind::End ? " at end of input"
                                                       : " at '" + t.text + "'"),
                     std::move(expected));
  }
  void require_symbol(std::string_view s) {
    if (!eat_symbol(s)) fail("unexpected token", {std::string("'") + std::string(s) + "'"});
  }
  void expect_end() {
    if (cur().kind != Token::Kind::End) fail("trailing input", {"end of input"});
  }
  std::string require_ident() {
    if (cur().kind != Token::Kind::Ident) fail("unexpected token", {"identifier"});
    std::string name = cur().text;
    next();
    return name;
  }

  static bool is_keyword(const std::string& s) {
    return s == "true" || s == "false" || s == "forall" || s == "exists";
  }

  // --- terms ---------------------------------------------------------------

  TermPtr parse_term() {
    TermPtr t = parse_term_factor();
    while (at_symbol("+") || at_symbol("-")) {
      const bool plus = cur().text == "+";
      next();
      TermPtr rhs = parse_term_factor();
      t = plus ? t_add(t, rhs) : t_sub(t, rhs);
    }
    return t;
  }

  TermPtr parse_term_factor() {
    TermPtr t = parse_term_unary();
    while (eat_symbol("*")) t = t_mul(t, parse_term_unary());
    return t;
  }

  TermPtr parse_term_unary() {
    if (eat_symbol("-")) return t_neg(parse_term_unary());
    return parse_term_power();
  }

  TermPtr parse_term_power() {
    TermPtr base = parse_term_primary();
    if (eat_symbol("^")) {
      if (cur().kind != Token::Kind::Number || cur().text.find('.') != std::string::npos)
        fail("power wants a positive integer exponent", {"integer"});
      const int e = std::stoi(cur().text);
      next();
      if (e < 1) fail("power wants a positive integer exponent");
      return t_pow(base, e);
    }
    return base;
  }

  TermPtr parse_term_primary() {
    if (cur().kind == Token::Kind::Number) {
      auto r = rational_from_decimal(cur().text);
      if (!r) fail("malformed numeral");
      next();
      return t_const(*r);
    }
    if (cur().kind == Token::Kind::Ident && !is_keyword(cur().text))
      return t_var(require_ident());
    if (eat_symbol("(")) {
      TermPtr t = parse_term();
      require_symbol(")");
      return t;
    }
    fail("unexpected token in term", {"number", "identifier", "'('"});
  }

  // --- formulas --------------------------------------------------------

  FormulaPtr parse_formula() {  // iff, left-associative
    FormulaPtr f = parse_imp();
    while (eat_symbol("<->")) f = f_iff(f, parse_imp());
    return f;
  }

  FormulaPtr parse_imp() {  // right-associative
    FormulaPtr l = parse_or();
    if (eat_symbol("->")) return f_imp(l, parse_imp());
    return l;
  }

  FormulaPtr parse_or() {
    FormulaPtr f = parse_and();
    while (eat_symbol("|")) f = f_or(f, parse_and());
    return f;
  }

  FormulaPtr parse_and() {
    FormulaPtr f = parse_formula_unary();
    while (eat_symbol("&")) f = f_and(f, parse_formula_unary());
    return f;
  }

  FormulaPtr parse_formula_unary() {
    if (eat_symbol("!")) return f_not(parse_formula_unary());
    if (at_ident("true")) {
      next();
      return f_true();
    }
    if (at_ident("false")) {
      next();
      return f_false();
    }
    if (at_ident("forall") || at_ident("exists")) {
      const bool uni = cur().text == "forall";
      next();
      std::string var = require_ident();
      require_symbol("(");
      FormulaPtr body = parse_formula();
      require_symbol(")");
      return uni ? f_forall(std::move(var), body) : f_exists(std::move(var), body);
    }
    if (at_symbol("(")) {
      // Either a parenthesized formula or a parenthesized term starting a
      // comparison; backtrack on the latter.
      const std::size_t save = pos_;
      next();
      try {
        FormulaPtr f = parse_formula();
        require_symbol(")");
        if (is_cmp_ahead()) {
          pos_ = save;  // "(t1) >= t2": re-read as comparison
        } else {
          return f;
        }
      } catch (const ParseError&) {
        pos_ = save;
      }
    }
    return parse_comparison();
  }

  bool is_cmp_ahead() const {
    return at_symbol(">=") || at_symbol("<=") || at_symbol("=") || at_symbol(">") ||
           at_symbol("<");
  }

  FormulaPtr parse_comparison() {
    TermPtr l = parse_term();
    CmpOp op;
    if (eat_symbol(">=")) {
      op = CmpOp::Ge;
    } else if (eat_symbol("<=")) {
      op = CmpOp::Le;
    } else if (eat_symbol("=")) {
      op = CmpOp::Eq;
    } else if (eat_symbol(">")) {
      op = CmpOp::Gt;
    } else if (eat_symbol("<")) {
      op = CmpOp::Lt;
    } else {
      fail("expected comparison operator", {"'>='", "'<='", "'='", "'>'", "'<'"});
    }
    return f_cmp(op, l, parse_term());
  }

  // --- programs --------------------------------------------------------

  ProgramPtr parse_choice() {
    ProgramPtr p = parse_seq();
    while (eat_symbol("++")) p = p_choice(p, parse_seq());
    return p;
  }

  ProgramPtr parse_seq() {  // right-associative
    ProgramPtr p = parse_stmt();
    if (eat_symbol(";")) return p_seq(p, parse_seq());
    return p;
  }

  ProgramPtr parse_stmt() {
    if (cur().kind == Token::Kind::Ident && !is_keyword(cur().text)) {
      std::string var = require_ident();
      require_symbol(":=");
      if (eat_symbol("*")) return p_nondet(std::move(var));
      return p_assign(std::move(var), parse_term());
    }
    if (eat_symbol("?")) {
      require_symbol("(");
      FormulaPtr f = parse_formula();
      require_symbol(")");
      return p_test(f);
    }
    if (at_symbol("{")) {
      // ODE when the brace is followed by ident'=; otherwise grouping.
      if (cur(1).kind == Token::Kind::Ident && at_symbol("'", 2)) return parse_ode_or_loop();
      next();
      ProgramPtr inner = parse_choice();
      require_symbol("}");
      if (eat_symbol("*")) return p_loop(inner);
      return inner;
    }
    fail("unexpected token in program",
         {"identifier", "'?'", "'{'"});
  }

  ProgramPtr parse_ode_or_loop() {
    require_symbol("{");
    std::vector<OdeFlow> flows;
    while (true) {
      std::string var = require_ident();
      require_symbol("'");
      require_symbol("=");
      flows.push_back({std::move(var), parse_term()});
      if (!eat_symbol(",")) break;
    }
    FormulaPtr domain = f_true();
    if (eat_symbol("&")) domain = parse_formula();
    require_symbol("}");
    ProgramPtr ode = p_ode(std::move(flows), domain);
    if (eat_symbol("*")) return p_loop(ode);
    return ode;
  }

  std::vector<Token> tokens_;
  std::size_t pos_{0};
};

}  // namespace

ProgramPtr parse_program(std::string_view text) { return Parser(text).program(); }
FormulaPtr parse_formula(std::string_view text) { return Parser(text).formula(); }
TermPtr parse_term(std::string_view text) { return Parser(text).term(); }

}  // namespace scw::hp
