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

#ifndef SAL_ENGINE_DATAFLOW_HPP
#define SAL_ENGINE_DATAFLOW_HPP

#include <sal/ast/validator.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sal::engine {

enum class NodeKind { KeyedDemux, FeatureGen, Filter, Transform, Project, CollapsedConsumer };

std::string_view toString(NodeKind kind);

/// Expression compiled against one stream's columns.
struct CompiledExpr {
  enum class Kind { Constant, Column, Feature, TopKValue, Prev, Negate, Binary };
  Kind kind = Kind::Constant;
  double constant = 0.0;
  std::size_t index = 0;       // column, feature slot, or prev buffer
  std::size_t arg = 0;         // value(i) / prev(i)
  ast::BinaryOp op = ast::BinaryOp::Add;
  std::vector<CompiledExpr> operands;
};

struct StreamSlot {
  std::string name;
  ast::TupleSchema schema;
  std::vector<std::size_t> keyColumns;  // scope keys as columns of this stream
  std::optional<std::size_t> chain;     // nullopt for unkeyed streams
  bool collapsed = false;
};

/// One operator node per pipeline statement, in program order.
struct GraphNode {
  NodeKind kind = NodeKind::KeyedDemux;
  std::size_t statement = 0;
  std::string target;
  std::size_t input = 0;                // stream slot read
  std::optional<std::size_t> output;    // stream slot written
  std::optional<std::size_t> chain;

  // FeatureGen / CollapsedConsumer
  ast::OperatorKind op = ast::OperatorKind::Ave;
  std::size_t featureSlot = 0;
  std::size_t fieldColumn = 0;          // input column, or map column for consumers
  std::int64_t window = 0;
  std::int64_t basicWindow = 0;
  std::int64_t k = 0;
  std::size_t state = 0;                // per-key state index within the input scope
  bool ownsState = true;                // false when reading a sketch fed by an earlier node

  // Filter / Transform
  std::vector<CompiledExpr> exprs;
  std::vector<std::size_t> prevColumns; // Transform: one PrevBuffer per column
  std::int64_t maxPrev = 0;

  // Project
  std::vector<std::size_t> keptColumns;
  std::vector<std::size_t> droppedColumns;
  std::vector<std::size_t> forSlots;
  std::size_t mapSlot = 0;

  std::string detail;                   // operator text for describe()
};

/// Features captured per tuple for one owner chain.
struct CaptureGroup {
  std::vector<std::size_t> rootKeyColumns;
  std::vector<std::size_t> slots;
  std::vector<std::size_t> outputColumns;  // positions among outputFeatures
};

/**
 * Statements whose state is partitioned by the same owner field.  A node
 * processes a chain for a tuple iff the owner value routes to it.
 */
struct Chain {
  std::string owner;
  std::size_t ownerColumn = 0;           // in the root schema
  std::string hashFunction;
  std::vector<std::size_t> nodes;        // program order, unkeyed ancestors included
  std::vector<CaptureGroup> capture;
};

/// Per-key state table shared by the stateful nodes of one key set in one chain.
struct StateScope {
  std::size_t chain = 0;
  std::vector<std::string> keys;
  std::size_t size = 0;                  // state entries per key
};

/**
 * Operator graph for one connection.  Features and map features share one
 * FeatureMap slot space; outputFeatures lists the FOREACH targets in program
 * order, which are the feature columns of output rows.
 */
class DataflowGraph {
public:
  std::vector<StreamSlot> streams;
  std::vector<GraphNode> nodes;
  std::vector<Chain> chains;
  std::vector<StateScope> scopes;
  std::vector<std::string> slotNames;
  std::vector<std::string> outputFeatures;
  std::vector<std::size_t> outputSlots;
  std::size_t rootStream = 0;
  std::string connection;
  std::vector<ast::Diagnostic> warnings;

  /// State scope of each node that keeps per-key state.
  std::vector<std::optional<std::size_t>> nodeScope;

  std::size_t countNodes(NodeKind kind) const;

  /// One line per node: "Kind(detail) target" with its input stream.
  std::string describe() const;
};

/**
 * Basic window for operators without an explicit b: N/50 for countdistinct,
 * whose window edge is only as fine as b, and N/10 for median (at least 1).
 */
std::int64_t defaultBasicWindow(ast::OperatorKind op, std::int64_t window);

/// Builds the graph for the given connection (default: the first one).
DataflowGraph compile(ast::TypedProgram const& program, std::string const& connection = {});

} // namespace sal::engine

#endif
