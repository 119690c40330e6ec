#include "qsym/errors.hpp"
#include "script_detail.hpp"

namespace qsym::detail {

namespace {

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
// identifiers may carry dots (case ids like thm1.branch1) and digits
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9') || c == '.'; }

}  // namespace

std::vector<Token> lex_script(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto push = [&](Tok k, std::string text, int l, int c) {
    out.push_back(Token{k, std::move(text), l, c});
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++col;
      ++i;
      continue;
    }
    if (c == '#') {  // comment to end of line
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    int l = line, cl = col;
    if (c == '"') {
      std::string s;
      ++i;
      ++col;
      while (i < src.size() && src[i] != '"') {
        if (src[i] == '\n') throw parse_error("unterminated string", l, cl);
        s += src[i++];
        ++col;
      }
      if (i >= src.size()) throw parse_error("unterminated string", l, cl);
      ++i;
      ++col;
      push(Tok::String, std::move(s), l, cl);
      continue;
    }
    if (c >= '0' && c <= '9') {
      std::string n;
      while (i < src.size() && src[i] >= '0' && src[i] <= '9') {
        n += src[i++];
        ++col;
      }
      push(Tok::Int, std::move(n), l, cl);
      continue;
    }
    if (ident_start(c)) {
      std::string n;
      while (i < src.size() && ident_char(src[i])) {
        n += src[i++];
        ++col;
      }
      push(Tok::Ident, std::move(n), l, cl);
      continue;
    }
    Tok k;
    switch (c) {
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '^': k = Tok::Caret; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case ',': k = Tok::Comma; break;
      case ';': k = Tok::Semi; break;
      case ':': k = Tok::Colon; break;
      case '=': k = Tok::Equals; break;
      default:
        throw parse_error(std::string("unexpected character '") + c + "'", l, cl);
    }
    push(k, std::string(1, c), l, cl);
    ++i;
    ++col;
  }
  out.push_back(Token{Tok::End, "", line, col});
  return out;
}

}  // namespace qsym::detail
