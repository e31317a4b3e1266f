#include "priml/lexer.hpp"

#include <fmt/core.h>

#include <cctype>
#include <unordered_map>

namespace priml {

const char *tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::KwPriority: return "'priority'";
    case Tok::KwOrder: return "'order'";
    case Tok::KwVal: return "'val'";
    case Tok::KwFun: return "'fun'";
    case Tok::KwMain: return "'main'";
    case Tok::KwDo: return "'do'";
    case Tok::KwSync: return "'sync'";
    case Tok::KwSpawn: return "'spawn'";
    case Tok::KwRet: return "'ret'";
    case Tok::KwCmd: return "'cmd'";
    case Tok::KwFn: return "'fn'";
    case Tok::KwFix: return "'fix'";
    case Tok::KwLet: return "'let'";
    case Tok::KwIn: return "'in'";
    case Tok::KwEnd: return "'end'";
    case Tok::KwCase: return "'case'";
    case Tok::KwInl: return "'inl'";
    case Tok::KwInr: return "'inr'";
    case Tok::KwFst: return "'fst'";
    case Tok::KwSnd: return "'snd'";
    case Tok::KwOutput: return "'output'";
    case Tok::KwInput: return "'input'";
    case Tok::KwIfz: return "'ifz'";
    case Tok::KwThread: return "'thread'";
    case Tok::KwUnit: return "'unit'";
    case Tok::KwNat: return "'nat'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Bar: return "'|'";
    case Tok::Star: return "'*'";
    case Tok::Plus: return "'+'";
    case Tok::Eq: return "'='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Arrow: return "'->'";
    case Tok::BindArr: return "'<-'";
    case Tok::DArrow: return "'=>'";
    case Tok::Eof: return "end of input";
  }
  return "?";
}

namespace {

const std::unordered_map<std::string_view, Tok> kKeywords = {
    {"priority", Tok::KwPriority}, {"order", Tok::KwOrder},
    {"val", Tok::KwVal},           {"fun", Tok::KwFun},
    {"main", Tok::KwMain},         {"do", Tok::KwDo},
    {"sync", Tok::KwSync},         {"spawn", Tok::KwSpawn},
    {"ret", Tok::KwRet},           {"cmd", Tok::KwCmd},
    {"fn", Tok::KwFn},             {"fix", Tok::KwFix},
    {"let", Tok::KwLet},           {"in", Tok::KwIn},
    {"end", Tok::KwEnd},           {"case", Tok::KwCase},
    {"inl", Tok::KwInl},           {"inr", Tok::KwInr},
    {"fst", Tok::KwFst},           {"snd", Tok::KwSnd},
    {"output", Tok::KwOutput},     {"input", Tok::KwInput},
    {"ifz", Tok::KwIfz},           {"thread", Tok::KwThread},
    {"unit", Tok::KwUnit},         {"nat", Tok::KwNat},
};

struct Lexer {
  std::string_view src;
  size_t pos = 0;
  int line = 1, col = 1;

  char peek(size_t off = 0) const {
    return pos + off < src.size() ? src[pos + off] : '\0';
  }

  void advance() {
    if (pos >= src.size()) return;
    if (src[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_trivia() {
    for (;;) {
      while (pos < src.size() && std::isspace(static_cast<unsigned char>(peek())))
        advance();
      if (peek() == '(' && peek(1) == '*') {
        SourceSpan open{line, col, line, col + 1};
        int depth = 0;
        do {
          if (pos >= src.size())
            fail(errcode::Parse, open, "unterminated comment");
          if (peek() == '(' && peek(1) == '*') {
            ++depth;
            advance();
            advance();
          } else if (peek() == '*' && peek(1) == ')') {
            --depth;
            advance();
            advance();
          } else {
            advance();
          }
        } while (depth > 0);
        continue;
      }
      break;
    }
  }
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

}  // namespace

std::vector<Token> lex(std::string_view source) {
  Lexer lx{source};
  std::vector<Token> out;
  for (;;) {
    lx.skip_trivia();
    int l = lx.line, c = lx.col;
    auto emit = [&](Tok k, std::string text, int len) {
      out.push_back(Token{k, std::move(text), Nat(0),
                          SourceSpan{l, c, l, c + len - 1}});
    };
    char ch = lx.peek();
    if (ch == '\0') {
      emit(Tok::Eof, "", 1);
      return out;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::string digits;
      while (std::isdigit(static_cast<unsigned char>(lx.peek()))) {
        digits += lx.peek();
        lx.advance();
      }
      Token t{Tok::Number, digits, Nat(digits),
              SourceSpan{l, c, l, c + static_cast<int>(digits.size()) - 1}};
      out.push_back(std::move(t));
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::string word;
      while (ident_char(lx.peek())) {
        word += lx.peek();
        lx.advance();
      }
      auto kw = kKeywords.find(word);
      Tok k = kw == kKeywords.end() ? Tok::Ident : kw->second;
      out.push_back(Token{k, std::move(word), Nat(0),
                          SourceSpan{l, c, l, lx.col - 1}});
      continue;
    }
    switch (ch) {
      case '(': lx.advance(); emit(Tok::LParen, "(", 1); break;
      case ')': lx.advance(); emit(Tok::RParen, ")", 1); break;
      case '{': lx.advance(); emit(Tok::LBrace, "{", 1); break;
      case '}': lx.advance(); emit(Tok::RBrace, "}", 1); break;
      case '[': lx.advance(); emit(Tok::LBracket, "[", 1); break;
      case ']': lx.advance(); emit(Tok::RBracket, "]", 1); break;
      case ',': lx.advance(); emit(Tok::Comma, ",", 1); break;
      case ';': lx.advance(); emit(Tok::Semi, ";", 1); break;
      case ':': lx.advance(); emit(Tok::Colon, ":", 1); break;
      case '.': lx.advance(); emit(Tok::Dot, ".", 1); break;
      case '|': lx.advance(); emit(Tok::Bar, "|", 1); break;
      case '*': lx.advance(); emit(Tok::Star, "*", 1); break;
      case '+': lx.advance(); emit(Tok::Plus, "+", 1); break;
      case '=':
        lx.advance();
        if (lx.peek() == '>') {
          lx.advance();
          emit(Tok::DArrow, "=>", 2);
        } else {
          emit(Tok::Eq, "=", 1);
        }
        break;
      case '<':
        lx.advance();
        if (lx.peek() == '=') {
          lx.advance();
          emit(Tok::Le, "<=", 2);
        } else if (lx.peek() == '-') {
          lx.advance();
          emit(Tok::BindArr, "<-", 2);
        } else {
          emit(Tok::Lt, "<", 1);
        }
        break;
      case '-':
        lx.advance();
        if (lx.peek() == '>') {
          lx.advance();
          emit(Tok::Arrow, "->", 2);
        } else {
          fail(errcode::Parse, SourceSpan{l, c, l, c},
               fmt::format("syntax error at {}.{}: unexpected character '-'",
                           l, c));
        }
        break;
      default:
        fail(errcode::Parse, SourceSpan{l, c, l, c},
             fmt::format("syntax error at {}.{}: unexpected character '{}'", l,
                         c, ch));
    }
  }
}

}  // namespace priml
