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

#ifndef SAL_CLUSTER_PARTITION_HPP
#define SAL_CLUSTER_PARTITION_HPP

#include <sal/ast/validator.hpp>
#include <sal/engine/dataflow.hpp>
#include <sal/engine/netflow.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sal::cluster {

class TopologyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// IpHashFunction: 64-bit FNV-1a over the raw string bytes.
std::uint64_t ipHash(std::string_view value) noexcept;

/// StringHashFunction: FNV-1a followed by a 64-bit finalizer.
std::uint64_t stringHash(std::string_view value) noexcept;

using HashFunction = std::uint64_t (*)(std::string_view) noexcept;

/// Throws TopologyError for a name unknown to the validator.
HashFunction lookupHashFunction(std::string_view name);

struct NodeAddress {
  std::size_t id = 0;
  std::string host;
  std::uint16_t basePort = 0;

  /// Node j pulls on basePort + j; 0 asks the OS for a free port.
  std::uint16_t listenPort() const noexcept
  {
    return basePort == 0 ? 0 : static_cast<std::uint16_t>(basePort + id);
  }
};

/// Cluster membership: node ids 0..N-1 and their addresses.
class NodeTopology {
public:
  /// N logical nodes on localhost with OS-assigned ports.
  static NodeTopology local(std::size_t nodes);

  /// "nodeId host basePort" lines; '#' starts a comment.  Ids must be 0..N-1.
  static NodeTopology parse(std::string_view text);
  static NodeTopology load(std::string const& path);

  std::size_t size() const noexcept { return nodes_.size(); }
  NodeAddress const& operator[](std::size_t id) const { return nodes_.at(id); }
  std::vector<NodeAddress> const& nodes() const noexcept { return nodes_; }

private:
  std::vector<NodeAddress> nodes_;
};

/**
 * PARTITION keys of one connection with their hash functions.  A tuple goes
 * to hash(key value) mod N for every key; the owner chains of the dataflow
 * graph run on the node their owner key routes to.
 */
class PartitionPlan {
public:
  struct Key {
    std::string field;
    std::size_t column = 0;
    std::string hashName;
    HashFunction hash = nullptr;
  };

  PartitionPlan() = default;
  PartitionPlan(ast::TypedProgram const& program, engine::DataflowGraph const& graph);

  std::vector<Key> const& keys() const noexcept { return keys_; }

  /// Node for one key value.
  std::size_t nodeFor(Key const& key, engine::NetflowTuple const& tuple, std::size_t nodes) const;

  /**
   * Sorted, de-duplicated target nodes.  Returns false (and leaves `out`
   * empty) when a key field is empty, which rejects the tuple.
   */
  bool route(engine::NetflowTuple const& tuple, std::size_t nodes, std::vector<std::size_t>& out) const;

  /// Whether `node` runs owner chain `chain` for this tuple.
  bool runsChain(std::size_t chain, engine::NetflowTuple const& tuple, std::size_t node, std::size_t nodes) const;

private:
  std::vector<Key> keys_;
  std::vector<std::size_t> chainKey_;   // chain -> index into keys_
};

} // namespace sal::cluster

#endif
