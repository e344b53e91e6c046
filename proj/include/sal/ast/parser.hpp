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

#ifndef SAL_AST_PARSER_HPP
#define SAL_AST_PARSER_HPP

#include <sal/ast/ast.hpp>
#include <sal/ast/lexer.hpp>

#include <span>
#include <string_view>

namespace sal::ast {

/**
 * Builds a SalProgram from tokens.
 *
 * Statements must appear in the order preamble, connection, partition/hash,
 * pipeline.  A pipeline statement's source must already be defined, and all
 * defined names are unique.  The terminating ';' may be omitted when the
 * next token starts a new statement or the input ends.
 *
 * Throws SyntaxError for grammar and ordering problems and SemanticError for
 * undefined or duplicate names.
 */
SalProgram parse(std::span<Token const> tokens);

/// tokenize() followed by parse().
SalProgram parseSource(std::string_view source);

} // namespace sal::ast

#endif
