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

#include "distributed.hpp"

#include <sal/ast/parser.hpp>
#include <sal/ast/validator.hpp>
#include <sal/cli/generator.hpp>
#include <sal/cluster/cluster.hpp>
#include <sal/engine/dataflow.hpp>

#include <chrono>

namespace sal::testing {

std::vector<engine::NetflowTuple> syntheticTuples(std::size_t count, std::uint64_t seed)
{
  cli::GeneratorOptions options;
  options.seed = seed;
  options.ipPool = 2000;
  cli::SyntheticGenerator gen(options);
  std::vector<engine::NetflowTuple> out(count);
  for (auto& t : out) gen.next(t);
  return out;
}

namespace {

struct Outcome {
  std::string dump;
  std::vector<engine::FeatureRow> rows;
  std::uint64_t deliveries = 0;
  std::size_t keys = 0;
};

Outcome runOnce(ast::TypedProgram const& typed, std::vector<engine::NetflowTuple> const& input, std::size_t nodes,
                cluster::TransportKind kind)
{
  cluster::ClusterOptions options;
  options.nodes = nodes;
  options.transport = kind;
  cluster::Cluster c(typed, engine::compile(typed), options);
  Outcome o;
  auto report = c.run(input, &o.rows);
  o.deliveries = report.deliveries;
  o.dump = c.mergedDump();
  for (std::size_t i = 0; i < c.size(); ++i) o.keys += c.node(i).engine().featureMap().keyCount();
  return o;
}

} // namespace

DistributedResult distributedEquivalence(std::string const& program, std::vector<engine::NetflowTuple> const& input,
                                         std::size_t nodes)
{
  auto start = std::chrono::steady_clock::now();
  auto typed = ast::validate(ast::parseSource(program));
  auto single = runOnce(typed, input, 1, cluster::TransportKind::InProcess);
  auto many = runOnce(typed, input, nodes, cluster::TransportKind::InProcess);
  auto tcp = runOnce(typed, input, nodes, cluster::TransportKind::Tcp);

  DistributedResult r;
  r.nodesMatch = many.dump == single.dump;
  r.rowsMatch = many.rows == single.rows;
  r.tcpMatches = tcp.dump == many.dump && tcp.rows == many.rows;
  r.keys = many.keys;
  r.deliveries = many.deliveries;
  if (!r.nodesMatch) r.detail += "dump differs (" + std::to_string(single.dump.size()) + " vs " +
                                 std::to_string(many.dump.size()) + " bytes); ";
  if (!r.rowsMatch) r.detail += "rows differ; ";
  if (!r.tcpMatches) r.detail += "tcp differs; ";
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

} // namespace sal::testing
