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

#ifndef SAL_AST_SCHEMA_HPP
#define SAL_AST_SCHEMA_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sal::ast {

enum class ValueType { Number, String };

struct Column {
  std::string name;
  ValueType type = ValueType::Number;
  bool operator==(Column const&) const = default;
};

/// Ordered, named tuple columns.
class TupleSchema {
public:
  TupleSchema() = default;
  explicit TupleSchema(std::vector<Column> columns) : columns_(std::move(columns)) {}

  std::vector<Column> const& columns() const noexcept { return columns_; }
  std::size_t size() const noexcept { return columns_.size(); }
  Column const& operator[](std::size_t i) const { return columns_[i]; }

  std::optional<std::size_t> indexOf(std::string_view name) const;
  bool contains(std::string_view name) const { return indexOf(name).has_value(); }

  bool operator==(TupleSchema const&) const = default;

private:
  std::vector<Column> columns_;
};

/**
 * Columns of a VastStream netflow, in input-file order:
 * TimeSeconds, ParseDate, IpLayerProtocol, SourceIp, DestIp, SourcePort,
 * DestPort, DurationSeconds, SrcPayloadBytes, DestPayloadBytes,
 * SrcTotalBytes, DestTotalBytes, SrcPacketCount, DestPacketCount.
 */
TupleSchema const& netflowSchema();

/// Connection source kinds known to the validator ("VastStream").
bool isKnownSourceKind(std::string_view kind);

/// HASH ... WITH names known to the validator.
bool isKnownHashFunction(std::string_view name);

} // namespace sal::ast

#endif
