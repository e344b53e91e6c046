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

#include <sal/cluster/cluster.hpp>

#include <algorithm>
#include <chrono>
#include <numeric>
#include <thread>

namespace sal::cluster {

double ClusterReport::cpuMakespan() const noexcept
{
  double worst = 0.0;
  for (auto const& n : nodes) worst = std::max(worst, n.cpuSeconds());
  return worst;
}

Cluster::Cluster(ast::TypedProgram const& program, engine::DataflowGraph graph, ClusterOptions options)
    : graph_(std::move(graph)), plan_(program, graph_), options_(std::move(options))
{
  if (options_.nodes == 0) throw TopologyError("a cluster needs at least one node");
  if (options_.topology && options_.topology->size() != options_.nodes) {
    throw TopologyError("topology lists " + std::to_string(options_.topology->size()) + " nodes, expected " +
                        std::to_string(options_.nodes));
  }
}

Cluster::~Cluster()
{
  nodes_.clear();
  transport_.reset();
}

ClusterReport Cluster::run(std::span<engine::NetflowTuple const> input, std::vector<engine::FeatureRow>* rows)
{
  std::size_t next = 0;
  std::vector<TupleSource> sources(1);
  sources[0] = [&](engine::NetflowTuple& t) {
    if (next >= input.size()) return false;
    t = input[next++];
    return true;
  };
  bool capture = options_.node.captureRows;
  options_.node.captureRows = rows != nullptr;
  ClusterReport report;
  try {
    report = execute(sources);
  } catch (...) {
    options_.node.captureRows = capture;
    throw;
  }
  options_.node.captureRows = capture;
  if (!rows) return report;

  // Sender 0's ledger maps each receiver's i-th row back to an input index.
  std::vector<std::vector<std::size_t>> chainColumns(graph_.chains.size());
  for (std::size_t c = 0; c < graph_.chains.size(); ++c) {
    for (auto const& group : graph_.chains[c].capture) {
      chainColumns[c].insert(chainColumns[c].end(), group.outputColumns.begin(), group.outputColumns.end());
    }
  }
  rows->assign(input.size(), engine::FeatureRow(graph_.outputFeatures.size()));
  auto const& ledger = nodes_[0]->sentLedger();
  for (auto const& node : nodes_) {
    auto const& got = node->received()[0];
    auto const& seqs = ledger[node->id()];
    for (std::size_t i = 0; i < got.rows.size(); ++i) {
      auto& out = (*rows)[seqs.at(i)];
      for (std::size_t c = 0; c < chainColumns.size(); ++c) {
        if (!(got.chains[i] >> c & 1)) continue;
        for (std::size_t col : chainColumns[c]) out[col] = got.rows[i][col];
      }
    }
  }
  return report;
}

ClusterReport Cluster::run(std::vector<TupleSource> sources)
{
  if (sources.size() != options_.nodes) {
    throw TopologyError("expected one source per node (" + std::to_string(options_.nodes) + "), got " +
                        std::to_string(sources.size()));
  }
  return execute(sources);
}

ClusterReport Cluster::execute(std::vector<TupleSource>& sources)
{
  nodes_.clear();
  transport_.reset();
  std::size_t n = options_.nodes;
  TcpTransport* tcp = nullptr;
  if (options_.transport == TransportKind::Tcp) {
    std::vector<std::size_t> hosted(n);
    std::iota(hosted.begin(), hosted.end(), std::size_t{0});
    auto owned = std::make_unique<TcpTransport>(options_.topology.value_or(NodeTopology::local(n)), hosted,
                                                options_.queueCapacity, options_.retry);
    tcp = owned.get();
    transport_ = std::move(owned);
  } else {
    transport_ = std::make_unique<InProcessTransport>(n, options_.queueCapacity);
  }
  for (std::size_t id = 0; id < n; ++id) {
    nodes_.push_back(std::make_unique<NodeRuntime>(id, graph_, plan_, *transport_, options_.node));
  }

  auto begin = std::chrono::steady_clock::now();
  for (auto& node : nodes_) node->start(sources.size());
  std::vector<std::thread> ingest;
  std::vector<std::exception_ptr> ingestErrors(sources.size());
  for (std::size_t s = 0; s < sources.size(); ++s) {
    ingest.emplace_back([&, s] {
      try {
        engine::NetflowTuple t;
        while (sources[s](t)) nodes_[s]->ingest(t);
        nodes_[s]->finishIngest();
      } catch (...) {
        ingestErrors[s] = std::current_exception();
        // Release the receivers; the run fails below.
        for (std::size_t id = 0; id < n; ++id) transport_->inbox(id).close();
      }
    });
  }
  for (auto& t : ingest) t.join();
  for (auto& e : ingestErrors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto& node : nodes_) node->wait();
  auto end = std::chrono::steady_clock::now();
  if (tcp) {
    if (auto error = tcp->readerError()) throw TransportError(*error);
  }

  ClusterReport report;
  report.wallSeconds = std::chrono::duration<double>(end - begin).count();
  for (auto& node : nodes_) {
    NodeReport r;
    r.id = node->id();
    r.counters = node->counters();
    r.engine = node->engine().stats();
    if (tcp) r.readerCpuSeconds = tcp->readerCpuSeconds(r.id);
    report.tuples += r.counters.ingested;
    report.rejected += r.counters.rejected;
    report.deliveries += r.counters.received;
    report.nodes.push_back(r);
  }
  return report;
}

std::string Cluster::mergedDump() const
{
  engine::FeatureMap merged(graph_.slotNames);
  for (auto const& node : nodes_) merged.mergeFrom(node->engine().featureMap());
  return merged.dump();
}

} // namespace sal::cluster
