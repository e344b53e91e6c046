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

#ifndef SAL_AST_VALIDATOR_HPP
#define SAL_AST_VALIDATOR_HPP

#include <sal/ast/ast.hpp>
#include <sal/ast/schema.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sal::ast {

enum class OperatorKind { Ave, Sum, Var, TopK, Median, CountDistinct };

std::string_view toString(OperatorKind op);
std::optional<OperatorKind> lookupOperator(std::string_view name);

/// Window used when the preamble has no WindowSize binding.
inline constexpr std::int64_t kDefaultWindowSize = 1000;

/**
 * The keys a stream is demultiplexed by, plus the owner: the partition key
 * that decides which node holds the per-key state.  Two streams share
 * feature state only when their scopes are equal.
 */
struct KeyScope {
  std::vector<std::string> keys;
  std::string owner;

  bool keyed() const { return !keys.empty(); }
  bool operator==(KeyScope const&) const = default;
};

struct StreamInfo {
  std::string name;
  std::string connection;          // root connection this stream derives from
  TupleSchema schema;
  KeyScope scope;
  bool collapsed = false;          // COLLAPSE output: columns are FOR features
  std::vector<std::string> droppedKeys;  // collapsed only
  std::optional<std::size_t> statement;  // defining pipeline statement
};

struct FeatureInfo {
  std::string name;
  std::string stream;              // FOREACH source
  KeyScope scope;
  OperatorKind op = OperatorKind::Ave;
  std::string field;
  std::int64_t window = 0;         // N
  std::int64_t basicWindow = 0;    // b (topk only; 0 = sketch default)
  std::int64_t k = 0;              // topk only
  bool collapsed = false;          // computed over a COLLAPSE map
  std::size_t statement = 0;

  bool isTopK() const { return op == OperatorKind::TopK; }
};

struct PartitionKeyInfo {
  std::string field;
  std::string hashFunction;
};

struct PartitionInfo {
  std::string stream;
  std::vector<PartitionKeyInfo> keys;
};

struct StatementInfo {
  KeyScope input;
  KeyScope output;
};

/**
 * A validated program.  Feature references in `program` have been rewritten
 * to the defining statement's spelling.
 */
struct TypedProgram {
  SalProgram program;
  TupleSchema sourceSchema;
  std::int64_t windowSize = kDefaultWindowSize;
  std::vector<StreamInfo> streams;       // connections first, then pipeline streams
  std::vector<FeatureInfo> features;     // FOREACH ... GENERATE targets in program order
  std::vector<PartitionInfo> partitions;
  std::vector<StatementInfo> statements; // parallel to program.pipeline
  std::vector<Diagnostic> warnings;

  StreamInfo const* findStream(std::string_view name) const;
  FeatureInfo const* findFeature(std::string_view name) const;
  PartitionInfo const* findPartition(std::string_view stream) const;
  /// Largest i over every prev(i) in the given TRANSFORM statement.
  std::int64_t maxPrev(std::size_t statement) const;
};

/**
 * Resolves every reference and checks the typing and key-set rules.  Every
 * connection gets `schema` as its tuple schema.  Throws SemanticError naming
 * the offending statement.  Deterministic: identical input gives identical
 * diagnostics.
 */
TypedProgram validate(SalProgram const& program, TupleSchema const& schema = netflowSchema());

} // namespace sal::ast

#endif
