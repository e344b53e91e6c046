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

#ifndef SAL_CLI_SPLIT_HPP
#define SAL_CLI_SPLIT_HPP

#include <sal/engine/netflow.hpp>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sal::cli {

class SplitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// P1 = tuples [0, boundary), P2 = [boundary, size) of the time-sorted input.
struct ScenarioSplit {
  double splitTime = 0.0;            // TimeSeconds of the last tuple in P1
  std::size_t boundary = 0;
  std::size_t size = 0;
  std::size_t malicious1 = 0;
  std::size_t malicious2 = 0;

  std::string toJson() const;
};

/**
 * Stable-sorts by TimeSeconds, then picks the earliest boundary between two
 * distinct timestamps that best balances the malicious counts; tuples that
 * share a timestamp stay in one part.  Throws SplitError when fewer than
 * two tuples are malicious or when no boundary reaches a difference of at
 * most one.
 */
ScenarioSplit scenarioSplit(std::vector<engine::NetflowTuple>& tuples);

} // namespace sal::cli

#endif
