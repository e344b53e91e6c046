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

#include <sal/cluster/node.hpp>

namespace sal::cluster {

NodeRuntime::NodeRuntime(std::size_t id, engine::DataflowGraph const& graph, PartitionPlan const& plan,
                         Transport& transport, NodeOptions options)
    : id_(id),
      nodes_(transport.nodeCount()),
      plan_(plan),
      transport_(transport),
      options_(options),
      engine_(graph, options.engine),
      dropRng_(options.seed ^ (0x9e3779b97f4a7c15ULL * (id + 1))),
      ledger_(transport.nodeCount()),
      received_(transport.nodeCount())
{
  if (id_ >= nodes_) throw TopologyError("node id " + std::to_string(id_) + " outside the topology");
  if (options_.batchSize == 0) options_.batchSize = 1;
  if (nodes_ > 1) {
    engine_.setChainFilter([this](std::size_t chain, engine::NetflowTuple const& t) {
      return plan_.runsChain(chain, t, id_, nodes_);
    });
  }
}

NodeRuntime::~NodeRuntime()
{
  if (thread_.joinable()) {
    transport_.inbox(id_).close();
    thread_.join();
  }
}

void NodeRuntime::ingest(engine::NetflowTuple const& tuple)
{
  std::uint64_t seq = counters_.ingested++;
  if (!plan_.route(tuple, nodes_, targets_)) {
    ++counters_.rejected;
    return;
  }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  bool serialized = false;
  for (std::size_t to : targets_) {
    if (options_.dropRate > 0.0 && coin(dropRng_) < options_.dropRate) {
      ++counters_.dropped;
      continue;
    }
    ledger_[to].push_back(seq);
    if (to == id_) {
      transport_.keepLocal(id_, tuple);
      ++counters_.kept;
      continue;
    }
    if (!serialized) {
      payload_.clear();
      engine::appendCsv(payload_, tuple, tuple.label.has_value());
      serialized = true;
    }
    transport_.send(id_, to, payload_);
    ++counters_.sent;
  }
}

void NodeRuntime::finishIngest()
{
  for (std::size_t to = 0; to < nodes_; ++to) {
    if (to == id_) transport_.terminateLocal(id_);
    else transport_.terminate(id_, to);
  }
  counters_.ingestCpuSeconds = threadCpuSeconds();
}

void NodeRuntime::start(std::size_t senders)
{
  thread_ = std::thread([this, senders] {
    try {
      processLoop(senders);
    } catch (...) {
      error_ = std::current_exception();
      // Senders blocked on a full inbox must not wait for us forever.
      transport_.inbox(id_).close();
    }
    counters_.processCpuSeconds = threadCpuSeconds();
  });
}

void NodeRuntime::wait()
{
  if (thread_.joinable()) thread_.join();
  if (error_) std::rethrow_exception(error_);
}

void NodeRuntime::processLoop(std::size_t senders)
{
  Inbox& inbox = transport_.inbox(id_);
  std::vector<Delivery> deliveries;
  std::vector<engine::NetflowTuple> batch;
  std::vector<std::size_t> from;
  batch.reserve(options_.batchSize);
  std::size_t terminated = 0;
  while (terminated < senders) {
    deliveries.clear();
    inbox.popSome(deliveries, options_.batchSize);
    if (deliveries.empty()) throw TransportError("inbox of node " + std::to_string(id_) + " closed");
    for (auto& d : deliveries) {
      if (d.terminate) {
        ++terminated;
        continue;
      }
      batch.push_back(d.local ? std::move(*d.local) : engine::parseNetflow(d.payload));
      from.push_back(d.from);
      if (batch.size() >= options_.batchSize) feed(batch, from);
    }
  }
  feed(batch, from);
}

void NodeRuntime::feed(std::vector<engine::NetflowTuple>& batch, std::vector<std::size_t>& from)
{
  if (batch.empty()) return;
  std::vector<engine::FeatureRow> rows;
  std::vector<std::uint64_t> chains;
  engine_.processBatch(batch, options_.captureRows ? &rows : nullptr, options_.captureRows ? &chains : nullptr);
  counters_.received += batch.size();
  ++counters_.batches;
  if (options_.captureRows) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      auto& r = received_.at(from[i]);
      r.rows.push_back(std::move(rows[i]));
      r.chains.push_back(chains[i]);
    }
  }
  batch.clear();
  from.clear();
}

} // namespace sal::cluster
