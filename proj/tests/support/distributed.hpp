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

#ifndef SAL_TESTS_DISTRIBUTED_HPP
#define SAL_TESTS_DISTRIBUTED_HPP

#include <sal/engine/netflow.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace sal::testing {

struct DistributedResult {
  bool nodesMatch = false;     // N-node in-process dump == 1-node dump
  bool rowsMatch = false;      // N-node feature rows == 1-node rows
  bool tcpMatches = false;     // TCP dump and rows == in-process
  std::size_t keys = 0;
  std::uint64_t deliveries = 0;
  double seconds = 0.0;
  std::string detail;
};

/// Synthetic power-law tuples from the CLI generator.
std::vector<engine::NetflowTuple> syntheticTuples(std::size_t count, std::uint64_t seed);

/// Runs `program` over `input` with 1 node, `nodes` in-process nodes and
/// `nodes` TCP nodes on localhost.
DistributedResult distributedEquivalence(std::string const& program, std::vector<engine::NetflowTuple> const& input,
                                         std::size_t nodes);

} // namespace sal::testing

#endif
