#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "scw/hp/ast.hpp"

namespace scw::hp {

// Syntax error with source location and the token set that was expected.
struct ParseError : std::runtime_error {
  ParseError(int line, int column, std::string msg, std::vector<std::string> expected);
  int line;
  int column;
  std::vector<std::string> expected;
};

// ASCII surface syntax (normative EBNF in the README):
//   program  = choice                  choice binds looser than ";"
//   choice   = seq { "++" seq }                     (left-associative)
//   seq      = stmt [ ";" seq ]                     (right-associative)
//   stmt     = ident ":=" term | ident ":=" "*" | "?(" formula ")"
//            | "{" flows ["&" formula] "}" | "{" program "}" [ "*" ]
//   flows    = ident "'" "=" term { "," ident "'" "=" term }
// "//" starts a line comment.
ProgramPtr parse_program(std::string_view text);
FormulaPtr parse_formula(std::string_view text);
TermPtr parse_term(std::string_view text);

}  // namespace scw::hp
