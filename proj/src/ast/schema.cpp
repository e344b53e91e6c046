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

#include <sal/ast/schema.hpp>

#include <array>

namespace sal::ast {

std::optional<std::size_t> TupleSchema::indexOf(std::string_view name) const
{
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

TupleSchema const& netflowSchema()
{
  static TupleSchema const schema({
    {"TimeSeconds", ValueType::Number},
    {"ParseDate", ValueType::String},
    {"IpLayerProtocol", ValueType::String},
    {"SourceIp", ValueType::String},
    {"DestIp", ValueType::String},
    {"SourcePort", ValueType::Number},
    {"DestPort", ValueType::Number},
    {"DurationSeconds", ValueType::Number},
    {"SrcPayloadBytes", ValueType::Number},
    {"DestPayloadBytes", ValueType::Number},
    {"SrcTotalBytes", ValueType::Number},
    {"DestTotalBytes", ValueType::Number},
    {"SrcPacketCount", ValueType::Number},
    {"DestPacketCount", ValueType::Number},
  });
  return schema;
}

bool isKnownSourceKind(std::string_view kind)
{
  return kind == "VastStream";
}

bool isKnownHashFunction(std::string_view name)
{
  static constexpr std::array<std::string_view, 2> kNames{"IpHashFunction", "StringHashFunction"};
  for (auto n : kNames) {
    if (n == name) return true;
  }
  return false;
}

} // namespace sal::ast
