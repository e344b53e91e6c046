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

#ifndef SAL_AST_AST_HPP
#define SAL_AST_AST_HPP

#include <sal/ast/diagnostics.hpp>

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace sal::ast {

enum class BinaryOp { Add, Sub, Mul, Div, Lt, Le, Gt, Ge, Eq, Ne };

std::string_view toString(BinaryOp op);

/// Method suffix on a reference: Name.value(i) or Name.prev(i).
enum class Method { None, Value, Prev };

/**
 * Expression tree used by FILTER predicates, TRANSFORM fields and operator
 * arguments.  A Reference names either a tuple field or a feature; which one
 * is decided during validation.
 */
struct Expression {
  enum class Kind { Number, Reference, Negate, Binary };

  Kind kind = Kind::Number;
  double number = 0.0;
  bool integral = false;       // literal was written without fraction/exponent
  std::string name;            // Reference
  Method method = Method::None;
  std::int64_t methodArg = 0;  // index for value(i) / prev(i)
  BinaryOp op = BinaryOp::Add;
  std::vector<Expression> operands;
  SourceLoc loc;

  static Expression literal(double value, bool integral, SourceLoc loc = {});
  static Expression reference(std::string name, Method method = Method::None,
                              std::int64_t arg = 0, SourceLoc loc = {});
  static Expression negate(Expression operand, SourceLoc loc = {});
  static Expression binary(BinaryOp op, Expression lhs, Expression rhs, SourceLoc loc = {});

  bool operator==(Expression const&) const = default;
};

struct PreambleConst {
  std::string name;
  std::int64_t value = 0;
  SourceLoc loc;
  bool operator==(PreambleConst const&) const = default;
};

/// Netflows = VastStream("localhost", 9999);
struct Connection {
  std::string name;
  std::string sourceKind;
  std::string host;
  std::int64_t port = 0;
  SourceLoc loc;
  bool operator==(Connection const&) const = default;
};

struct PartitionDecl {
  std::string stream;
  std::vector<std::string> keys;
  SourceLoc loc;
  bool operator==(PartitionDecl const&) const = default;
};

struct HashDecl {
  std::string field;
  std::string function;
  SourceLoc loc;
  bool operator==(HashDecl const&) const = default;
};

struct StreamBy {
  std::string target;
  std::string source;
  std::vector<std::string> keys;
  SourceLoc loc;
  bool operator==(StreamBy const&) const = default;
};

struct OperatorCall {
  std::string name;
  std::vector<Expression> args;  // references and integer literals
  bool operator==(OperatorCall const&) const = default;
};

struct ForEachGenerate {
  std::string target;
  std::string source;
  OperatorCall op;
  SourceLoc loc;
  bool operator==(ForEachGenerate const&) const = default;
};

struct Filter {
  std::string target;
  std::string source;
  Expression predicate;
  SourceLoc loc;
  bool operator==(Filter const&) const = default;
};

struct TransformField {
  Expression expr;
  std::string label;
  bool operator==(TransformField const&) const = default;
};

struct Transform {
  std::string target;
  std::string source;
  std::vector<TransformField> fields;
  SourceLoc loc;
  bool operator==(Transform const&) const = default;
};

struct CollapseBy {
  std::string target;
  std::string source;
  std::vector<std::string> keptKeys;
  std::vector<std::string> features;
  SourceLoc loc;
  bool operator==(CollapseBy const&) const = default;
};

using PipelineStatement = std::variant<StreamBy, ForEachGenerate, Filter, Transform, CollapseBy>;

std::string const& targetOf(PipelineStatement const& stmt);
std::string const& sourceOf(PipelineStatement const& stmt);
SourceLoc locOf(PipelineStatement const& stmt);

struct SalProgram {
  std::vector<PreambleConst> preamble;
  std::vector<Connection> connections;
  std::vector<PartitionDecl> partitions;
  std::vector<HashDecl> hashes;
  std::vector<PipelineStatement> pipeline;

  bool operator==(SalProgram const&) const = default;
};

} // namespace sal::ast

#endif
