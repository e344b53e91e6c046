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

#include <sal/ast/printer.hpp>

#include <charconv>
#include <cstdint>

namespace sal::ast {

namespace {

int precedence(Expression const& e)
{
  switch (e.kind) {
    case Expression::Kind::Binary:
      switch (e.op) {
        case BinaryOp::Mul:
        case BinaryOp::Div: return 3;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 2;
        default: return 1;
      }
    case Expression::Kind::Negate: return 4;
    default: return 5;
  }
}

void printExpr(Expression const& e, std::string& out);

void printOperand(Expression const& e, int minPrecedence, std::string& out)
{
  if (precedence(e) < minPrecedence) {
    out += '(';
    printExpr(e, out);
    out += ')';
  } else {
    printExpr(e, out);
  }
}

void printExpr(Expression const& e, std::string& out)
{
  switch (e.kind) {
    case Expression::Kind::Number:
      if (e.integral) {
        out += std::to_string(static_cast<std::int64_t>(e.number));
      } else {
        std::string text = formatNumber(e.number);
        // Keep a fraction so the literal re-lexes as a float.
        if (text.find_first_of(".e") == std::string::npos) text += ".0";
        out += text;
      }
      break;
    case Expression::Kind::Reference:
      out += e.name;
      if (e.method == Method::Value) out += ".value(" + std::to_string(e.methodArg) + ")";
      if (e.method == Method::Prev) out += ".prev(" + std::to_string(e.methodArg) + ")";
      break;
    case Expression::Kind::Negate:
      out += '-';
      printOperand(e.operands[0], 4, out);
      break;
    case Expression::Kind::Binary: {
      int p = precedence(e);
      // Operators are left-associative: the right operand needs parentheses
      // at equal precedence.
      printOperand(e.operands[0], p, out);
      out += ' ';
      out += toString(e.op);
      out += ' ';
      printOperand(e.operands[1], p + 1, out);
      break;
    }
  }
}

std::string joinList(std::vector<std::string> const& items)
{
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  return out;
}

std::string quote(std::string const& s)
{
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

struct StatementPrinter {
  std::string operator()(StreamBy const& s) const
  {
    return s.target + " = STREAM " + s.source + " BY " + joinList(s.keys) + ";";
  }

  std::string operator()(ForEachGenerate const& s) const
  {
    std::string out = s.target + " = FOREACH " + s.source + " GENERATE " + s.op.name + "(";
    for (std::size_t i = 0; i < s.op.args.size(); ++i) {
      if (i) out += ", ";
      out += print(s.op.args[i]);
    }
    return out + ");";
  }

  std::string operator()(Filter const& s) const
  {
    return s.target + " = FILTER " + s.source + " BY " + print(s.predicate) + ";";
  }

  std::string operator()(Transform const& s) const
  {
    std::string out = s.target + " = FOREACH " + s.source + " TRANSFORM ";
    for (std::size_t i = 0; i < s.fields.size(); ++i) {
      if (i) out += ", ";
      out += "(" + print(s.fields[i].expr) + ") : " + s.fields[i].label;
    }
    return out + ";";
  }

  std::string operator()(CollapseBy const& s) const
  {
    return s.target + " = COLLAPSE " + s.source + " BY " + joinList(s.keptKeys) + " FOR " +
           joinList(s.features) + ";";
  }
};

} // namespace

std::string formatNumber(double value)
{
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buf, ptr);
}

std::string print(Expression const& expr)
{
  std::string out;
  printExpr(expr, out);
  return out;
}

std::string print(PipelineStatement const& statement)
{
  return std::visit(StatementPrinter{}, statement);
}

std::string print(SalProgram const& program)
{
  std::string out;
  for (auto const& c : program.preamble) {
    out += c.name + " = " + std::to_string(c.value) + ";\n";
  }
  for (auto const& c : program.connections) {
    out += c.name + " = " + c.sourceKind + "(" + quote(c.host) + ", " + std::to_string(c.port) + ");\n";
  }
  for (auto const& p : program.partitions) {
    out += "PARTITION " + p.stream + " BY " + joinList(p.keys) + ";\n";
  }
  for (auto const& h : program.hashes) {
    out += "HASH " + h.field + " WITH " + h.function + ";\n";
  }
  for (auto const& s : program.pipeline) {
    out += print(s);
    out += '\n';
  }
  return out;
}

} // namespace sal::ast
