#ifndef QSYM_SRC_SCRIPT_DETAIL_HPP
#define QSYM_SRC_SCRIPT_DETAIL_HPP

#include <string>
#include <vector>

namespace qsym::detail {

enum class Tok {
  Ident,
  Int,
  String,
  Plus,
  Minus,
  Star,
  Slash,
  Caret,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Colon,
  Equals,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 0, column = 0;
};

std::vector<Token> lex_script(const std::string& source);

}  // namespace qsym::detail

#endif
