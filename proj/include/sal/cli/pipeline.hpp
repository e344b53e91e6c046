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

#ifndef SAL_CLI_PIPELINE_HPP
#define SAL_CLI_PIPELINE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sal::cli {

class PipelineError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// The seven flow fields of the classifier pipeline.
std::vector<std::string> const& defaultPipelineFields();

/// DestIp, then SourceIp.
std::vector<std::string> const& defaultPipelineGroupings();

/**
 * SAL source for the ave/var feature pipeline: per grouping a STREAM BY, per
 * field an ave and a var FOREACH.  Features are named Ave<Field>By<Group>
 * and Var<Field>By<Group>, where Group is the grouping field without its
 * "Ip" suffix.  Throws PipelineError for an unknown or non-numeric field or
 * a grouping that is not a text column.
 */
std::string generatePipeline(std::vector<std::string> const& fields, std::vector<std::string> const& groupings,
                             std::int64_t windowSize = 1000);

/// Feature names in the order generatePipeline defines them.
std::vector<std::string> pipelineFeatureNames(std::vector<std::string> const& fields,
                                              std::vector<std::string> const& groupings);

} // namespace sal::cli

#endif
