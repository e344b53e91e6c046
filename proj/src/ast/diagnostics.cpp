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

#include <sal/ast/diagnostics.hpp>

namespace sal::ast {

std::string_view toString(Severity severity)
{
  switch (severity) {
    case Severity::Note: return "note";
    case Severity::Warning: return "warning";
    case Severity::Error: return "error";
  }
  return "error";
}

std::string Diagnostic::format(std::string_view file) const
{
  std::string out(file);
  out += ':';
  out += std::to_string(loc.line);
  out += ':';
  out += std::to_string(loc.column);
  out += ": ";
  out += toString(severity);
  out += ": ";
  out += message;
  return out;
}

SalError::SalError(ErrorCategory category, Diagnostic diagnostic)
  : std::runtime_error(diagnostic.message)
  , category_(category)
  , diagnostic_(std::move(diagnostic))
{}

} // namespace sal::ast
