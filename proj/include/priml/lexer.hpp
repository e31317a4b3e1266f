#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "priml/ast.hpp"

namespace priml {

enum class Tok {
  Ident,
  Number,
  // keywords
  KwPriority,
  KwOrder,
  KwVal,
  KwFun,
  KwMain,
  KwDo,
  KwSync,
  KwSpawn,
  KwRet,
  KwCmd,
  KwFn,
  KwFix,
  KwLet,
  KwIn,
  KwEnd,
  KwCase,
  KwInl,
  KwInr,
  KwFst,
  KwSnd,
  KwOutput,
  KwInput,
  KwIfz,
  KwThread,
  KwUnit,
  KwNat,
  // punctuation
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Comma,
  Semi,
  Colon,
  Dot,
  Bar,
  Star,
  Plus,
  Eq,
  Lt,
  Le,      // <=
  Arrow,   // ->
  BindArr, // <-
  DArrow,  // =>
  Eof,
};

struct Token {
  Tok kind;
  std::string text;
  Nat num;
  SourceSpan span;
};

const char *tok_name(Tok t);

// Tokenizes the whole input. Comments are (* ... *), nested. Throws
// DiagnosticError with code E-PARSE on bad input.
std::vector<Token> lex(std::string_view source);

}  // namespace priml
