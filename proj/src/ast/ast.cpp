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

#include <sal/ast/ast.hpp>

namespace sal::ast {

std::string_view toString(BinaryOp op)
{
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
  }
  return "?";
}

Expression Expression::literal(double value, bool integral, SourceLoc loc)
{
  Expression e;
  e.kind = Kind::Number;
  e.number = value;
  e.integral = integral;
  e.loc = loc;
  return e;
}

Expression Expression::reference(std::string name, Method method, std::int64_t arg, SourceLoc loc)
{
  Expression e;
  e.kind = Kind::Reference;
  e.name = std::move(name);
  e.method = method;
  e.methodArg = arg;
  e.loc = loc;
  return e;
}

Expression Expression::negate(Expression operand, SourceLoc loc)
{
  Expression e;
  e.kind = Kind::Negate;
  e.operands.push_back(std::move(operand));
  e.loc = loc;
  return e;
}

Expression Expression::binary(BinaryOp op, Expression lhs, Expression rhs, SourceLoc loc)
{
  Expression e;
  e.kind = Kind::Binary;
  e.op = op;
  e.operands.push_back(std::move(lhs));
  e.operands.push_back(std::move(rhs));
  e.loc = loc;
  return e;
}

std::string const& targetOf(PipelineStatement const& stmt)
{
  return std::visit([](auto const& s) -> std::string const& { return s.target; }, stmt);
}

std::string const& sourceOf(PipelineStatement const& stmt)
{
  return std::visit([](auto const& s) -> std::string const& { return s.source; }, stmt);
}

SourceLoc locOf(PipelineStatement const& stmt)
{
  return std::visit([](auto const& s) { return s.loc; }, stmt);
}

} // namespace sal::ast
