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

#include <sal/cluster/partition.hpp>

#include <sal/ast/printer.hpp>
#include <sal/sketch/hash.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace sal::cluster {

std::uint64_t ipHash(std::string_view value) noexcept
{
  return sketch::fnv1a64(value);
}

std::uint64_t stringHash(std::string_view value) noexcept
{
  return sketch::mix64(sketch::fnv1a64(value));
}

HashFunction lookupHashFunction(std::string_view name)
{
  if (name == "IpHashFunction") return &ipHash;
  if (name == "StringHashFunction") return &stringHash;
  throw TopologyError("unknown hash function '" + std::string(name) + "'");
}

NodeTopology NodeTopology::local(std::size_t nodes)
{
  if (nodes == 0) throw TopologyError("a cluster needs at least one node");
  NodeTopology t;
  for (std::size_t i = 0; i < nodes; ++i) t.nodes_.push_back({i, "127.0.0.1", 0});
  return t;
}

NodeTopology NodeTopology::parse(std::string_view text)
{
  NodeTopology t;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineNo = 0;
  std::set<std::pair<std::string, unsigned>> endpoints;
  while (std::getline(in, line)) {
    ++lineNo;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string id;
    std::string host;
    std::string port;
    if (!(fields >> id)) continue;
    std::string extra;
    if (!(fields >> host >> port) || (fields >> extra)) {
      throw TopologyError("topology line " + std::to_string(lineNo) + ": expected 'nodeId host basePort'");
    }
    NodeAddress a;
    a.host = host;
    unsigned p = 0;
    auto [idEnd, idErr] = std::from_chars(id.data(), id.data() + id.size(), a.id);
    auto [pEnd, pErr] = std::from_chars(port.data(), port.data() + port.size(), p);
    if (idErr != std::errc() || idEnd != id.data() + id.size() || pErr != std::errc() ||
        pEnd != port.data() + port.size() || p > 65535) {
      throw TopologyError("topology line " + std::to_string(lineNo) + ": bad node id or port");
    }
    a.basePort = static_cast<std::uint16_t>(p);
    t.nodes_.push_back(a);
  }
  if (t.nodes_.empty()) throw TopologyError("topology lists no nodes");
  std::sort(t.nodes_.begin(), t.nodes_.end(), [](auto const& a, auto const& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < t.nodes_.size(); ++i) {
    if (t.nodes_[i].id != i) throw TopologyError("topology node ids must be 0.." + std::to_string(t.nodes_.size() - 1));
    if (t.nodes_[i].basePort != 0 && !endpoints.emplace(t.nodes_[i].host, t.nodes_[i].listenPort()).second) {
      throw TopologyError("topology nodes share the address " + t.nodes_[i].host + ":" +
                          std::to_string(t.nodes_[i].listenPort()));
    }
    if (t.nodes_[i].basePort != 0 && t.nodes_[i].basePort + i > 65535) {
      throw TopologyError("listen port of node " + std::to_string(i) + " exceeds 65535");
    }
  }
  return t;
}

NodeTopology NodeTopology::load(std::string const& path)
{
  std::ifstream in(path);
  if (!in) throw TopologyError("cannot read topology file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

PartitionPlan::PartitionPlan(ast::TypedProgram const& program, engine::DataflowGraph const& graph)
{
  auto const& schema = program.sourceSchema;
  if (auto p = program.findPartition(graph.connection)) {
    for (auto const& k : p->keys) {
      keys_.push_back({k.field, schema.indexOf(k.field).value(), k.hashFunction, lookupHashFunction(k.hashFunction)});
    }
  }
  for (auto const& chain : graph.chains) {
    auto it = std::find_if(keys_.begin(), keys_.end(), [&](Key const& k) { return k.field == chain.owner; });
    if (it == keys_.end()) throw TopologyError("chain owner '" + chain.owner + "' is not a partition key");
    chainKey_.push_back(static_cast<std::size_t>(it - keys_.begin()));
  }
}

namespace {

std::string_view keyText(engine::Cell const& cell, std::string& scratch)
{
  if (auto s = std::get_if<std::string_view>(&cell)) return *s;
  scratch = ast::formatNumber(std::get<double>(cell));
  return scratch;
}

} // namespace

std::size_t PartitionPlan::nodeFor(Key const& key, engine::NetflowTuple const& tuple, std::size_t nodes) const
{
  std::string scratch;
  return key.hash(keyText(tuple.cell(key.column), scratch)) % nodes;
}

bool PartitionPlan::route(engine::NetflowTuple const& tuple, std::size_t nodes, std::vector<std::size_t>& out) const
{
  out.clear();
  std::string scratch;
  for (auto const& key : keys_) {
    auto text = keyText(tuple.cell(key.column), scratch);
    if (text.empty()) {
      out.clear();
      return false;
    }
    out.push_back(key.hash(text) % nodes);
  }
  if (keys_.empty()) out.push_back(0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return true;
}

bool PartitionPlan::runsChain(std::size_t chain, engine::NetflowTuple const& tuple, std::size_t node,
                              std::size_t nodes) const
{
  return nodeFor(keys_[chainKey_.at(chain)], tuple, nodes) == node;
}

} // namespace sal::cluster
