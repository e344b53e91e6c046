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

#ifndef SAL_CLUSTER_NODE_HPP
#define SAL_CLUSTER_NODE_HPP

#include <sal/cluster/partition.hpp>
#include <sal/cluster/transport.hpp>
#include <sal/engine/engine.hpp>

#include <cstdint>
#include <exception>
#include <random>
#include <thread>
#include <vector>

namespace sal::cluster {

/// Tuples queued before a parallel feed.
inline constexpr std::size_t kDefaultBatchSize = 1000;

struct NodeOptions {
  std::size_t batchSize = kDefaultBatchSize;
  double dropRate = 0.0;        // fraction of deliveries discarded at the sender
  std::uint64_t seed = 0;       // drop decisions
  bool captureRows = false;     // keep feature rows per sender
  engine::EngineOptions engine;
};

struct NodeCounters {
  std::uint64_t ingested = 0;   // tuples entering at this node
  std::uint64_t rejected = 0;   // tuples without a routable key
  std::uint64_t dropped = 0;    // deliveries discarded by the drop-rate knob
  std::uint64_t sent = 0;       // deliveries pushed to peers
  std::uint64_t kept = 0;       // deliveries to itself
  std::uint64_t received = 0;   // tuples fed to the local engine
  std::uint64_t batches = 0;
  double ingestCpuSeconds = 0.0;
  double processCpuSeconds = 0.0;
};

/**
 * One logical node: routes the tuples it ingests and runs the owner chains
 * assigned to it for every tuple it receives.
 *
 * The ingest side (ingest, finishIngest) belongs to one caller thread.  The
 * processing thread started by start() drains the inbox, feeds the engine
 * in batches and stops after a TERMINATE from every sender.
 */
class NodeRuntime {
public:
  /// Feature rows and chain masks for the tuples of one sender, in arrival order.
  struct Received {
    std::vector<engine::FeatureRow> rows;
    std::vector<std::uint64_t> chains;
  };

  NodeRuntime(std::size_t id, engine::DataflowGraph const& graph, PartitionPlan const& plan,
              Transport& transport, NodeOptions options);
  ~NodeRuntime();

  NodeRuntime(NodeRuntime const&) = delete;
  NodeRuntime& operator=(NodeRuntime const&) = delete;

  std::size_t id() const noexcept { return id_; }

  void ingest(engine::NetflowTuple const& tuple);

  /// Sends TERMINATE to every node and records the caller's CPU time.
  void finishIngest();

  /// Starts processing; `senders` is the number of TERMINATEs to wait for.
  void start(std::size_t senders);

  /// Joins the processing thread and rethrows its error.
  void wait();

  engine::Engine& engine() noexcept { return engine_; }
  engine::Engine const& engine() const noexcept { return engine_; }

  /// Ingest sequence numbers delivered to each node, in send order.
  std::vector<std::vector<std::uint64_t>> const& sentLedger() const noexcept { return ledger_; }

  /// Indexed by sender.
  std::vector<Received> const& received() const noexcept { return received_; }

  NodeCounters counters() const noexcept { return counters_; }

private:
  void processLoop(std::size_t senders);
  void feed(std::vector<engine::NetflowTuple>& batch, std::vector<std::size_t>& from);

  std::size_t id_;
  std::size_t nodes_;
  PartitionPlan const& plan_;
  Transport& transport_;
  NodeOptions options_;
  engine::Engine engine_;
  std::mt19937_64 dropRng_;
  std::vector<std::size_t> targets_;
  std::string payload_;
  std::vector<std::vector<std::uint64_t>> ledger_;
  std::vector<Received> received_;
  NodeCounters counters_;
  std::thread thread_;
  std::exception_ptr error_;
};

} // namespace sal::cluster

#endif
