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

#include <sal/cli/pipeline.hpp>

#include <sal/ast/schema.hpp>

#include <algorithm>

namespace sal::cli {

std::vector<std::string> const& defaultPipelineFields()
{
  static std::vector<std::string> const fields{"SrcTotalBytes",   "DestTotalBytes", "DurationSeconds",
                                               "SrcPayloadBytes", "DestPayloadBytes", "SrcPacketCount",
                                               "DestPacketCount"};
  return fields;
}

std::vector<std::string> const& defaultPipelineGroupings()
{
  static std::vector<std::string> const groupings{"DestIp", "SourceIp"};
  return groupings;
}

namespace {

std::string groupName(std::string const& grouping)
{
  if (grouping.size() > 2 && grouping.ends_with("Ip")) return grouping.substr(0, grouping.size() - 2);
  return grouping;
}

void check(std::vector<std::string> const& fields, std::vector<std::string> const& groupings)
{
  if (fields.empty()) throw PipelineError("at least one field is required");
  if (groupings.empty()) throw PipelineError("at least one grouping is required");
  auto const& schema = ast::netflowSchema();
  for (auto const& f : fields) {
    auto column = schema.indexOf(f);
    if (!column) throw PipelineError("unknown field '" + f + "'");
    if (schema[*column].type == ast::ValueType::String) throw PipelineError("field '" + f + "' is not numeric");
  }
  for (auto const& g : groupings) {
    auto column = schema.indexOf(g);
    if (!column) throw PipelineError("unknown grouping field '" + g + "'");
    if (schema[*column].type != ast::ValueType::String) throw PipelineError("grouping field '" + g + "' is not text");
  }
  for (auto const* list : {&fields, &groupings}) {
    auto sorted = *list;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw PipelineError("duplicate name in field or grouping list");
    }
  }
}

} // namespace

std::vector<std::string> pipelineFeatureNames(std::vector<std::string> const& fields,
                                              std::vector<std::string> const& groupings)
{
  std::vector<std::string> names;
  for (auto const& g : groupings) {
    for (auto const& f : fields) {
      names.push_back("Ave" + f + "By" + groupName(g));
      names.push_back("Var" + f + "By" + groupName(g));
    }
  }
  return names;
}

std::string generatePipeline(std::vector<std::string> const& fields, std::vector<std::string> const& groupings,
                             std::int64_t windowSize)
{
  check(fields, groupings);
  if (windowSize <= 0) throw PipelineError("window size must be positive");
  std::string out;
  out += "// Preamble Statements\n";
  out += "WindowSize = " + std::to_string(windowSize) + ";\n\n";
  out += "// Connection Statements\n";
  out += "Netflows = VastStream(\"localhost\", 9999);\n\n";
  out += "// Partition Statements\n";
  out += "PARTITION Netflows By ";
  for (std::size_t i = 0; i < groupings.size(); ++i) out += (i ? ", " : "") + groupings[i];
  out += ";\n";
  for (auto const& g : groupings) out += "HASH " + g + " WITH IpHashFunction;\n";
  out += "\n// Pipeline Statements\n";
  for (auto const& g : groupings) {
    std::string stream = "VertsBy" + groupName(g);
    out += stream + " = STREAM Netflows BY " + g + ";\n";
    for (auto const& f : fields) {
      out += "Ave" + f + "By" + groupName(g) + " = FOREACH " + stream + " GENERATE ave(" + f + ");\n";
      out += "Var" + f + "By" + groupName(g) + " = FOREACH " + stream + " GENERATE var(" + f + ");\n";
    }
  }
  return out;
}

} // namespace sal::cli
