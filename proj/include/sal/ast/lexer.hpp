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

#ifndef SAL_AST_LEXER_HPP
#define SAL_AST_LEXER_HPP

#include <sal/ast/diagnostics.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sal::ast {

enum class TokenKind {
  Ident,
  Keyword,
  Int,
  Float,
  String,
  Eq,       // =
  EqEq,     // ==
  NotEq,    // !=
  Lt,
  Le,
  Gt,
  Ge,
  Plus,
  Minus,
  Star,
  Slash,
  LParen,
  RParen,
  Comma,
  Dot,
  Colon,
  Semi,
};

/// Statement keywords.  Matched case-insensitively.
enum class Keyword {
  Stream,
  By,
  Foreach,
  Generate,
  Filter,
  Transform,
  Collapse,
  For,
  Partition,
  Hash,
  With,
};

std::string_view toString(TokenKind kind);
std::string_view toString(Keyword keyword);
std::optional<Keyword> lookupKeyword(std::string_view word);

struct Token {
  TokenKind kind = TokenKind::Ident;
  std::string text;        // identifier, keyword or literal spelling
  SourceLoc loc;
  Keyword keyword = Keyword::Stream;  // valid when kind == Keyword
  std::int64_t intValue = 0;          // valid when kind == Int
  double floatValue = 0.0;            // valid when kind == Float
  std::string stringValue;            // unescaped contents when kind == String

  bool is(TokenKind k) const { return kind == k; }
  bool is(Keyword k) const { return kind == TokenKind::Keyword && keyword == k; }
};

/**
 * Splits SAL source into tokens.  Line comments ("//") and whitespace are
 * dropped.  Throws LexError with the offending position on an illegal
 * character, an unterminated string, or a malformed number.
 */
std::vector<Token> tokenize(std::string_view source);

} // namespace sal::ast

#endif
