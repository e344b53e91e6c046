/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include <sal/ast/lexer.hpp>

#include <array>
#include <cctype>
#include <cstdio>
#include <charconv>
#include <utility>

namespace sal::ast {

namespace {

constexpr std::array<std::pair<std::string_view, Keyword>, 11> kKeywords{{
  {"STREAM", Keyword::Stream},
  {"BY", Keyword::By},
  {"FOREACH", Keyword::Foreach},
  {"GENERATE", Keyword::Generate},
  {"FILTER", Keyword::Filter},
  {"TRANSFORM", Keyword::Transform},
  {"COLLAPSE", Keyword::Collapse},
  {"FOR", Keyword::For},
  {"PARTITION", Keyword::Partition},
  {"HASH", Keyword::Hash},
  {"WITH", Keyword::With},
}};

bool isIdentStart(char c)
{
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool isIdentChar(char c)
{
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool isDigit(char c)
{
  return c >= '0' && c <= '9';
}

class Lexer {
public:
  explicit Lexer(std::string_view source) : src_(source) {}

  std::vector<Token> run()
  {
    std::vector<Token> tokens;
    while (true) {
      skipTrivia();
      if (atEnd()) break;
      tokens.push_back(next());
    }
    return tokens;
  }

private:
  bool atEnd() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const
  {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  char advance()
  {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  SourceLoc here() const { return {line_, column_}; }

  void skipTrivia()
  {
    while (!atEnd()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (!atEnd() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token make(TokenKind kind, SourceLoc loc, std::string text)
  {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.loc = loc;
    return t;
  }

  Token next()
  {
    SourceLoc loc = here();
    char c = peek();
    if (isIdentStart(c)) return identifier(loc);
    if (isDigit(c) || (c == '.' && isDigit(peek(1)))) return number(loc);
    if (c == '"') return string(loc);

    advance();
    switch (c) {
      case '=':
        if (peek() == '=') { advance(); return make(TokenKind::EqEq, loc, "=="); }
        return make(TokenKind::Eq, loc, "=");
      case '!':
        if (peek() == '=') { advance(); return make(TokenKind::NotEq, loc, "!="); }
        break;
      case '<':
        if (peek() == '=') { advance(); return make(TokenKind::Le, loc, "<="); }
        return make(TokenKind::Lt, loc, "<");
      case '>':
        if (peek() == '=') { advance(); return make(TokenKind::Ge, loc, ">="); }
        return make(TokenKind::Gt, loc, ">");
      case '+': return make(TokenKind::Plus, loc, "+");
      case '-': return make(TokenKind::Minus, loc, "-");
      case '*': return make(TokenKind::Star, loc, "*");
      case '/': return make(TokenKind::Slash, loc, "/");
      case '(': return make(TokenKind::LParen, loc, "(");
      case ')': return make(TokenKind::RParen, loc, ")");
      case ',': return make(TokenKind::Comma, loc, ",");
      case '.': return make(TokenKind::Dot, loc, ".");
      case ':': return make(TokenKind::Colon, loc, ":");
      case ';': return make(TokenKind::Semi, loc, ";");
      default: break;
    }
    std::string shown;
    if (std::isprint(static_cast<unsigned char>(c))) {
      shown = std::string("'") + c + "'";
    } else {
      char buf[8];
      std::snprintf(buf, sizeof buf, "0x%02X", static_cast<unsigned char>(c));
      shown = buf;
    }
    throw LexError(loc, "illegal character " + shown);
  }

  Token identifier(SourceLoc loc)
  {
    std::size_t start = pos_;
    while (!atEnd() && isIdentChar(peek())) advance();
    std::string text(src_.substr(start, pos_ - start));
    if (auto kw = lookupKeyword(text)) {
      Token t = make(TokenKind::Keyword, loc, std::move(text));
      t.keyword = *kw;
      return t;
    }
    return make(TokenKind::Ident, loc, std::move(text));
  }

  Token number(SourceLoc loc)
  {
    std::size_t start = pos_;
    bool isFloat = false;
    while (isDigit(peek())) advance();
    // A '.' followed by an identifier is a method call on an integer, which
    // SAL has no use for; treat '.' as part of the number only before a digit.
    if (peek() == '.' && isDigit(peek(1))) {
      isFloat = true;
      advance();
      while (isDigit(peek())) advance();
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t mark = 1;
      if (peek(1) == '+' || peek(1) == '-') mark = 2;
      if (isDigit(peek(mark))) {
        isFloat = true;
        for (std::size_t i = 0; i < mark; ++i) advance();
        while (isDigit(peek())) advance();
      }
    }
    if (isIdentStart(peek())) {
      throw LexError(here(), "malformed number");
    }
    std::string text(src_.substr(start, pos_ - start));
    if (isFloat) {
      Token t = make(TokenKind::Float, loc, text);
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), t.floatValue);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw LexError(loc, "malformed number '" + text + "'");
      }
      return t;
    }
    Token t = make(TokenKind::Int, loc, text);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), t.intValue);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw LexError(loc, "integer literal out of range '" + text + "'");
    }
    return t;
  }

  Token string(SourceLoc loc)
  {
    std::size_t start = pos_;
    advance();  // opening quote
    std::string value;
    while (true) {
      if (atEnd() || peek() == '\n') {
        throw LexError(loc, "unterminated string literal");
      }
      char c = advance();
      if (c == '"') break;
      if (c == '\\') {
        if (atEnd()) throw LexError(loc, "unterminated string literal");
        char e = advance();
        switch (e) {
          case '"': value += '"'; break;
          case '\\': value += '\\'; break;
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          default: throw LexError(here(), std::string("unknown escape '\\") + e + "'");
        }
      } else {
        value += c;
      }
    }
    Token t = make(TokenKind::String, loc, std::string(src_.substr(start, pos_ - start)));
    t.stringValue = std::move(value);
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

} // namespace

std::string_view toString(TokenKind kind)
{
  switch (kind) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Int: return "integer";
    case TokenKind::Float: return "number";
    case TokenKind::String: return "string";
    case TokenKind::Eq: return "'='";
    case TokenKind::EqEq: return "'=='";
    case TokenKind::NotEq: return "'!='";
    case TokenKind::Lt: return "'<'";
    case TokenKind::Le: return "'<='";
    case TokenKind::Gt: return "'>'";
    case TokenKind::Ge: return "'>='";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Slash: return "'/'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::Comma: return "','";
    case TokenKind::Dot: return "'.'";
    case TokenKind::Colon: return "':'";
    case TokenKind::Semi: return "';'";
  }
  return "token";
}

std::string_view toString(Keyword keyword)
{
  for (auto const& [name, kw] : kKeywords) {
    if (kw == keyword) return name;
  }
  return "?";
}

std::optional<Keyword> lookupKeyword(std::string_view word)
{
  for (auto const& [name, kw] : kKeywords) {
    if (name.size() != word.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < name.size(); ++i) {
      if (std::toupper(static_cast<unsigned char>(word[i])) != name[i]) {
        same = false;
        break;
      }
    }
    if (same) return kw;
  }
  return std::nullopt;
}

std::vector<Token> tokenize(std::string_view source)
{
  return Lexer(source).run();
}

} // namespace sal::ast
