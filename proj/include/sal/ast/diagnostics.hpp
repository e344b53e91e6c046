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

#ifndef SAL_AST_DIAGNOSTICS_HPP
#define SAL_AST_DIAGNOSTICS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace sal::ast {

/**
 * Position in SAL source text.  Both fields are 1-based; 0 means unknown.
 *
 * Locations never take part in structural comparison of AST nodes, so two
 * programs that differ only in layout compare equal.
 */
struct SourceLoc {
  int line = 0;
  int column = 0;

  friend bool operator==(SourceLoc const&, SourceLoc const&) { return true; }
};

enum class Severity { Note, Warning, Error };

std::string_view toString(Severity severity);

struct Diagnostic {
  Severity severity = Severity::Error;
  SourceLoc loc;
  std::string message;

  /// Renders "file:line:col: severity: message".
  std::string format(std::string_view file) const;
};

enum class ErrorCategory { Lexical, Syntax, Semantic };

class SalError : public std::runtime_error {
public:
  SalError(ErrorCategory category, Diagnostic diagnostic);

  ErrorCategory category() const noexcept { return category_; }
  Diagnostic const& diagnostic() const noexcept { return diagnostic_; }

private:
  ErrorCategory category_;
  Diagnostic diagnostic_;
};

class LexError : public SalError {
public:
  LexError(SourceLoc loc, std::string message)
    : SalError(ErrorCategory::Lexical, {Severity::Error, loc, std::move(message)}) {}
};

class SyntaxError : public SalError {
public:
  SyntaxError(SourceLoc loc, std::string message)
    : SalError(ErrorCategory::Syntax, {Severity::Error, loc, std::move(message)}) {}
};

class SemanticError : public SalError {
public:
  SemanticError(SourceLoc loc, std::string message)
    : SalError(ErrorCategory::Semantic, {Severity::Error, loc, std::move(message)}) {}
};

} // namespace sal::ast

#endif
