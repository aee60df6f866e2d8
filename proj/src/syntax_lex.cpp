#include "alm/syntax.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace alm {

std::string Span::str() const {
  std::ostringstream os;
  os << (origin ? *origin : std::string("<input>")) << ":" << line << ":" << col;
  return os.str();
}

Diagnostic::Diagnostic(Kind kind, Span span, const std::string& msg)
    : std::runtime_error(span.str() + ": " + msg), kind_(kind), span_(std::move(span)), msg_(msg) {}

void fail_input(const Span& s, const std::string& msg) {
  throw Diagnostic(Diagnostic::Kind::Input, s, msg);
}

void fail_semantic(const Span& s, const std::string& msg) {
  throw Diagnostic(Diagnostic::Kind::Semantic, s, msg);
}

namespace {

bool word_char(unsigned char c) { return std::isalnum(c) || c == '_'; }

}  // namespace

std::vector<Token> lex(const std::string& src, const std::string& origin) {
  auto org = std::make_shared<const std::string>(origin);
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  const size_t n = src.size();

  auto here = [&] { return Span{org, line, col}; };
  auto advance = [&](size_t k) {
    for (size_t j = 0; j < k && i < n; ++j, ++i) {
      unsigned char c = src[i];
      if (c == '\n') {
        ++line;
        col = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++col;
      }
    }
  };
  auto push = [&](Tok k, std::string text, size_t len) {
    Token t;
    t.kind = k;
    t.text = std::move(text);
    t.span = here();
    out.push_back(std::move(t));
    advance(len);
  };
  auto starts = [&](const char* s) { return src.compare(i, std::char_traits<char>::length(s), s) == 0; };

  while (i < n) {
    unsigned char c = src[i];
    if (c == '\n' || c == ' ' || c == '\t' || c == '\r') {
      advance(1);
      continue;
    }
    if (c == '%') {
      while (i < n && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isdigit(c)) {
      size_t j = i;
      while (j < n && std::isdigit((unsigned char)src[j])) ++j;
      Token t;
      t.kind = Tok::Int;
      t.text = src.substr(i, j - i);
      t.span = here();
      try {
        t.ival = std::stoll(t.text);
      } catch (const std::exception&) {
        fail_input(t.span, "integer literal out of range: " + t.text);
      }
      out.push_back(t);
      advance(j - i);
      continue;
    }
    if (std::isalpha(c) || c == '_') {
      size_t j = i;
      while (j < n && word_char((unsigned char)src[j])) ++j;
      std::string w = src.substr(i, j - i);
      bool upper = std::isupper(c) || c == '_';
      push(upper ? Tok::Var : Tok::Ident, w, j - i);
      continue;
    }
    // unicode operators used by the printed listings
    if (starts("\xC2\xAC")) { push(Tok::Minus, "-", 2); continue; }          // ¬
    if (starts("\xE2\x89\xA0")) { push(Tok::Neq, "!=", 3); continue; }      // ≠
    if (starts("\xE2\x86\x92")) { push(Tok::Arrow, "->", 3); continue; }    // →
    if (starts("\xC3\x97")) { push(Tok::Times, "*", 2); continue; }         // ×
    if (starts("\xE2\x89\xA4")) { push(Tok::Le, "<=", 3); continue; }       // ≤
    if (starts("\xE2\x89\xA5")) { push(Tok::Ge, ">=", 3); continue; }       // ≥
    if (starts("::")) { push(Tok::DColon, "::", 2); continue; }
    if (starts("..")) { push(Tok::DotDot, "..", 2); continue; }
    if (starts("->")) { push(Tok::Arrow, "->", 2); continue; }
    if (starts("!=")) { push(Tok::Neq, "!=", 2); continue; }
    if (starts("<=")) { push(Tok::Le, "<=", 2); continue; }
    if (starts(">=")) { push(Tok::Ge, ">=", 2); continue; }
    switch (c) {
      case '(': push(Tok::LParen, "(", 1); continue;
      case ')': push(Tok::RParen, ")", 1); continue;
      case '[': push(Tok::LBrack, "[", 1); continue;
      case ']': push(Tok::RBrack, "]", 1); continue;
      case ',': push(Tok::Comma, ",", 1); continue;
      case '.': push(Tok::Dot, ".", 1); continue;
      case ':': push(Tok::Colon, ":", 1); continue;
      case '*': push(Tok::Times, "*", 1); continue;
      case '+': push(Tok::Plus, "+", 1); continue;
      case '-': push(Tok::Minus, "-", 1); continue;
      case '/': push(Tok::Slash, "/", 1); continue;
      case '=': push(Tok::Eq, "=", 1); continue;
      case '<': push(Tok::Lt, "<", 1); continue;
      case '>': push(Tok::Gt, ">", 1); continue;
      default: break;
    }
    std::string bad(1, (char)c);
    if (c >= 0x80) {
      size_t j = i + 1;
      while (j < n && ((unsigned char)src[j] & 0xC0) == 0x80) ++j;
      bad = src.substr(i, j - i);
    }
    fail_input(here(), "unexpected character '" + bad + "'");
  }
  Token end;
  end.kind = Tok::End;
  end.span = here();
  out.push_back(end);
  return out;
}

SourceFile parse_path(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Diagnostic(Diagnostic::Kind::Input, Span{std::make_shared<const std::string>(path), 0, 0}, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_file(ss.str(), path);
}

}  // namespace alm
