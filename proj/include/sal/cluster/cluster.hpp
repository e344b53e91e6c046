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

#ifndef SAL_CLUSTER_CLUSTER_HPP
#define SAL_CLUSTER_CLUSTER_HPP

#include <sal/cluster/node.hpp>
#include <sal/cluster/partition.hpp>
#include <sal/cluster/transport.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sal::cluster {

enum class TransportKind { InProcess, Tcp };

struct ClusterOptions {
  std::size_t nodes = 1;
  TransportKind transport = TransportKind::InProcess;
  std::optional<NodeTopology> topology;  // TCP only; default: localhost, free ports
  std::size_t queueCapacity = kDefaultQueueCapacity;
  RetryPolicy retry;
  NodeOptions node;
};

struct NodeReport {
  std::size_t id = 0;
  NodeCounters counters;
  engine::EngineStats engine;
  double readerCpuSeconds = 0.0;

  double cpuSeconds() const noexcept
  {
    return counters.ingestCpuSeconds + counters.processCpuSeconds + readerCpuSeconds;
  }
};

struct ClusterReport {
  double wallSeconds = 0.0;
  std::uint64_t tuples = 0;       // ingested over all nodes
  std::uint64_t rejected = 0;
  std::uint64_t deliveries = 0;   // tuples fed to engines over all nodes
  std::vector<NodeReport> nodes;

  /// Largest per-node CPU time: the run time if every node had its own core.
  double cpuMakespan() const noexcept;
};

/// Pulls the next tuple; false at the end of the stream.
using TupleSource = std::function<bool(engine::NetflowTuple&)>;

/**
 * N logical nodes inside one process, connected by the in-process or the
 * TCP transport.  Each run starts from empty state.
 */
class Cluster {
public:
  Cluster(ast::TypedProgram const& program, engine::DataflowGraph graph, ClusterOptions options);
  ~Cluster();

  engine::DataflowGraph const& graph() const noexcept { return graph_; }
  PartitionPlan const& plan() const noexcept { return plan_; }
  ClusterOptions const& options() const noexcept { return options_; }

  /**
   * All tuples enter at node 0.  When `rows` is given it receives one full
   * feature row per input tuple, assembled from every node.
   */
  ClusterReport run(std::span<engine::NetflowTuple const> input, std::vector<engine::FeatureRow>* rows = nullptr);

  /// One source per node, each ingested by its own node (weak scaling).
  ClusterReport run(std::vector<TupleSource> sources);

  /// Nodes of the last run.
  std::size_t size() const noexcept { return nodes_.size(); }
  NodeRuntime const& node(std::size_t id) const { return *nodes_.at(id); }

  /// Union of every node's FeatureMap after the last run, as FeatureMap::dump().
  std::string mergedDump() const;

private:
  ClusterReport execute(std::vector<TupleSource>& sources);

  engine::DataflowGraph graph_;
  PartitionPlan plan_;
  ClusterOptions options_;
  std::unique_ptr<Transport> transport_;
  std::vector<std::unique_ptr<NodeRuntime>> nodes_;
};

} // namespace sal::cluster

#endif
