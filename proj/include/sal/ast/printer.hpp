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

#ifndef SAL_AST_PRINTER_HPP
#define SAL_AST_PRINTER_HPP

#include <sal/ast/ast.hpp>

#include <string>

namespace sal::ast {

/// Canonical source text.  parseSource(print(p)) == p for every valid program.
std::string print(SalProgram const& program);
std::string print(PipelineStatement const& statement);
std::string print(Expression const& expr);

/// Shortest decimal spelling that reads back to the same double.
std::string formatNumber(double value);

} // namespace sal::ast

#endif
