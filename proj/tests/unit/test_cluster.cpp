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

#include <doctest.h>

#include <sal/ast/parser.hpp>
#include <sal/ast/validator.hpp>
#include <sal/cluster/bounded_queue.hpp>
#include <sal/cluster/cluster.hpp>
#include <sal/cluster/envelope.hpp>
#include <sal/cluster/partition.hpp>
#include <sal/cluster/socket.hpp>
#include <sal/cluster/transport.hpp>
#include <sal/engine/dataflow.hpp>

#include "distributed.hpp"
#include "oracles.hpp"
#include "paths.hpp"

#include <cmath>
#include <random>
#include <set>
#include <thread>

using namespace sal;
using namespace sal::cluster;
using sal::testing::dataPath;
using sal::testing::randomTuple;
using sal::testing::readText;

namespace {

struct Compiled {
  ast::TypedProgram typed;
  engine::DataflowGraph graph;
  PartitionPlan plan;

  explicit Compiled(std::string const& source)
    : typed(ast::validate(ast::parseSource(source)))
    , graph(engine::compile(typed))
    , plan(typed, graph)
  {}
};

std::string listing1() { return readText(dataPath("listing1.sal")); }

std::string const kTwoKeys = R"(Netflows = VastStream("localhost", 9999);
PARTITION Netflows By SourceIp, DestIp;
HASH SourceIp WITH IpHashFunction;
HASH DestIp WITH IpHashFunction;
BySource = STREAM Netflows BY SourceIp;
S = FOREACH BySource GENERATE ave(SrcTotalBytes);
ByDest = STREAM Netflows BY DestIp;
D = FOREACH ByDest GENERATE var(DestTotalBytes);
)";

engine::NetflowTuple between(std::string source, std::string dest)
{
  std::mt19937_64 rng(1);
  auto t = randomTuple(rng, 1, 1, 0.0);
  t.sourceIp = std::move(source);
  t.destIp = std::move(dest);
  return t;
}

/// An address whose IpHashFunction value lands on `node` of `nodes`.
std::string addressOn(std::size_t node, std::size_t nodes, int salt = 0)
{
  for (int i = 0;; ++i) {
    std::string a = "10." + std::to_string(salt) + "." + std::to_string(i / 256) + "." + std::to_string(i % 256);
    if (ipHash(a) % nodes == node) return a;
  }
}

} // namespace

TEST_CASE("ipHash is FNV-1a and deterministic")
{
  CHECK(ipHash("") == 0xcbf29ce484222325ULL);
  CHECK(ipHash("192.168.0.1") == ipHash(std::string("192.168.0.") + "1"));
  CHECK(ipHash("192.168.0.1") == 0x2e9082d8e3366183ULL);
  CHECK(stringHash("a") != ipHash("a"));
  CHECK(lookupHashFunction("IpHashFunction") == &ipHash);
  CHECK_THROWS_AS(lookupHashFunction("Nope"), TopologyError);
}

TEST_CASE("ipHash mod 16 is uniform on random IPv4 strings")
{
  std::mt19937_64 rng(1);
  std::vector<int> bins(16);
  for (int i = 0; i < 100000; ++i) {
    std::uint32_t a = static_cast<std::uint32_t>(rng());
    std::string ip = std::to_string(a >> 24) + "." + std::to_string(a >> 16 & 255) + "." +
                     std::to_string(a >> 8 & 255) + "." + std::to_string(a & 255);
    ++bins[ipHash(ip) % 16];
  }
  double sigma = std::sqrt(100000.0 / 16 * 15 / 16);
  double chi2 = 0;
  for (int b : bins) {
    CHECK(std::abs(b - 6250) <= 3 * sigma);
    chi2 += (b - 6250.0) * (b - 6250.0) / 6250.0;
  }
  CHECK(chi2 < 30.58);  // chi-square 0.99 quantile, 15 degrees of freedom
}

TEST_CASE("route: dedupe, two targets and a single node")
{
  Compiled c(kTwoKeys);
  std::vector<std::size_t> out;
  auto same = between(addressOn(3, 4), addressOn(3, 4, 1));
  REQUIRE(c.plan.route(same, 4, out));
  CHECK(out == std::vector<std::size_t>{3});
  auto split = between(addressOn(1, 4), addressOn(2, 4, 1));
  REQUIRE(c.plan.route(split, 4, out));
  CHECK(std::set<std::size_t>(out.begin(), out.end()) == std::set<std::size_t>{1, 2});
  CHECK(out.size() == 2);
  REQUIRE(c.plan.route(split, 1, out));
  CHECK(out == std::vector<std::size_t>{0});
  auto missing = between("", "x");
  CHECK_FALSE(c.plan.route(missing, 4, out));
}

TEST_CASE("owner chains run only on the node owning their key")
{
  Compiled c(kTwoKeys);
  auto t = between(addressOn(1, 4), addressOn(2, 4, 1));
  REQUIRE(c.graph.chains.size() == 2);
  for (std::size_t chain = 0; chain < 2; ++chain) {
    std::size_t owners = 0;
    for (std::size_t node = 0; node < 4; ++node) owners += c.plan.runsChain(chain, t, node, 4);
    CHECK(owners == 1);
  }
}

TEST_CASE("topology files")
{
  auto t = NodeTopology::parse("# nodes\n0 10.0.0.1 7000\n1 10.0.0.2 7000  # peer\n\n");
  REQUIRE(t.size() == 2);
  CHECK(t[1].host == "10.0.0.2");
  CHECK(t[1].listenPort() == 7001);
  CHECK(NodeTopology::local(3).size() == 3);
  CHECK_THROWS_AS(NodeTopology::parse(""), TopologyError);
  CHECK_THROWS_AS(NodeTopology::parse("0 a 1\n0 b 2\n"), TopologyError);
  CHECK_THROWS_AS(NodeTopology::parse("0 a 1\n2 b 2\n"), TopologyError);
  CHECK_THROWS_AS(NodeTopology::parse("0 a notaport\n"), TopologyError);
  CHECK_THROWS_AS(NodeTopology::parse("0 a 7000\n1 a 6999\n"), TopologyError);
  CHECK_THROWS_AS(NodeTopology::load("/nonexistent/topology"), TopologyError);
}

TEST_CASE("envelope framing")
{
  std::string wire;
  appendFrame(wire, "abc");
  appendTerminate(wire);
  CHECK(wire.size() == 4 + 3 + 4);
  CHECK(wire.substr(0, 4) == std::string("\0\0\0\3", 4));
  FrameDecoder d;
  for (char ch : wire) d.feed(&ch, 1);
  auto a = d.next();
  REQUIRE(a);
  CHECK(a->payload == "abc");
  auto term = d.next();
  REQUIRE(term);
  CHECK(term->terminate());
  CHECK_FALSE(d.next());
  CHECK(d.buffered() == 0);

  std::string big(kMaxPayload + 1, 'x');
  std::string out;
  CHECK_THROWS_AS(appendFrame(out, big), FrameError);
  CHECK_THROWS_AS(appendFrame(out, ""), FrameError);
  CHECK_NOTHROW(appendFrame(out, std::string(kMaxPayload, 'y')));
  FrameDecoder bad;
  bad.feed(std::string("\x00\x01\x00\x01", 4));
  CHECK_THROWS_AS(bad.next(), FrameError);
}

TEST_CASE("bounded queue blocks when full and drains after close")
{
  BoundedQueue<int> q(2);
  q.push(1);
  q.push(2);
  std::thread producer([&] { q.push(3); });
  CHECK(*q.pop() == 1);
  producer.join();
  q.close();
  CHECK_FALSE(q.push(4));
  CHECK(*q.pop() == 2);
  CHECK(*q.pop() == 3);
  CHECK_FALSE(q.pop());
}

TEST_CASE("in-process transport delivers in order then TERMINATE")
{
  InProcessTransport t(2);
  t.send(0, 1, "a");
  t.send(0, 1, "b");
  t.terminate(0, 1);
  CHECK(t.inbox(1).pop()->payload == "a");
  CHECK(t.inbox(1).pop()->payload == "b");
  auto end = t.inbox(1).pop();
  CHECK(end->terminate);
  CHECK(end->from == 0);
}

TEST_CASE("TCP transport round-trip and connect failure")
{
  TcpTransport t(NodeTopology::local(2), {0, 1});
  t.send(0, 1, "hello");
  t.terminate(0, 1);
  auto got = t.inbox(1).pop();
  REQUIRE(got);
  CHECK(got->payload == "hello");
  CHECK(got->from == 0);
  CHECK(t.inbox(1).pop()->terminate);
  CHECK_FALSE(t.readerError());

  std::uint16_t port;
  {
    auto probe = listenTcp("127.0.0.1", 0, 1);
    port = localPort(probe);
  }
  auto topo = NodeTopology::parse("0 127.0.0.1 0\n1 127.0.0.1 " + std::to_string(port - 1) + "\n");
  RetryPolicy quick{3, std::chrono::milliseconds(1), std::chrono::milliseconds(2)};
  TcpTransport lonely(topo, {0}, 16, quick);
  CHECK_THROWS_AS(lonely.send(0, 1, "x"), TransportError);
}

TEST_CASE("conservation and degenerate skew")
{
  Compiled c(kTwoKeys);
  std::mt19937_64 rng(4);
  std::vector<engine::NetflowTuple> input;
  for (int i = 0; i < 1000; ++i) input.push_back(randomTuple(rng, 200, 200, i));
  std::uint64_t routed = 0;
  std::vector<std::size_t> out;
  for (auto const& t : input) {
    c.plan.route(t, 4, out);
    routed += out.size();
  }
  ClusterOptions options;
  options.nodes = 4;
  Cluster cluster(c.typed, c.graph, options);
  auto report = cluster.run(input);
  CHECK(report.deliveries == routed);
  std::uint64_t received = 0;
  for (auto const& n : report.nodes) received += n.counters.received;
  CHECK(received == routed);
  for (auto const& n : report.nodes) CHECK(n.counters.received > 0);

  for (auto& t : input) t.sourceIp = t.destIp = "1.2.3.4";
  auto skewed = cluster.run(input);
  std::size_t busy = 0;
  for (auto const& n : skewed.nodes) busy += n.counters.received > 0;
  CHECK(busy == 1);
  CHECK(skewed.deliveries == input.size());
}

TEST_CASE("drop rate discards only remote deliveries at the sender")
{
  Compiled c(kTwoKeys);
  std::mt19937_64 rng(6);
  std::vector<engine::NetflowTuple> input;
  for (int i = 0; i < 4000; ++i) input.push_back(randomTuple(rng, 200, 200, i));
  ClusterOptions options;
  options.nodes = 4;
  options.node.dropRate = 0.5;
  options.node.seed = 3;
  Cluster cluster(c.typed, c.graph, options);
  auto report = cluster.run(input);
  auto const& sender = report.nodes[0].counters;
  CHECK(sender.dropped > 0);
  double share = static_cast<double>(sender.dropped) / static_cast<double>(sender.dropped + sender.sent);
  CHECK(share == doctest::Approx(0.5).epsilon(0.1));
  std::uint64_t received = 0;
  for (auto const& n : report.nodes) received += n.counters.received;
  CHECK(received == sender.sent + sender.kept);
}

TEST_CASE("N nodes match one node, in-process and over TCP")
{
  auto input = sal::testing::syntheticTuples(20000, 2);
  for (std::size_t nodes : {2u, 4u}) {
    auto r = sal::testing::distributedEquivalence(readText(dataPath("pipeline28.sal")), input, nodes);
    INFO(r.detail);
    CHECK(r.nodesMatch);
    CHECK(r.rowsMatch);
    CHECK(r.tcpMatches);
  }
  auto d = sal::testing::distributedEquivalence(readText(dataPath("disclosure.sal")), input, 3);
  INFO(d.detail);
  CHECK(d.nodesMatch);
  CHECK(d.rowsMatch);
  CHECK(d.tcpMatches);
}

TEST_CASE("one source per node")
{
  Compiled c(listing1());
  ClusterOptions options;
  options.nodes = 2;
  Cluster cluster(c.typed, c.graph, options);
  std::vector<TupleSource> sources;
  for (int n = 0; n < 2; ++n) {
    auto rng = std::make_shared<std::mt19937_64>(n);
    auto left = std::make_shared<int>(1000);
    sources.push_back([rng, left](engine::NetflowTuple& t) {
      if ((*left)-- == 0) return false;
      t = randomTuple(*rng, 50, 50, 0);
      return true;
    });
  }
  auto report = cluster.run(sources);
  CHECK(report.tuples == 2000);
  CHECK(report.nodes[0].counters.ingested == 1000);
  CHECK(report.cpuMakespan() > 0.0);
  CHECK_THROWS_AS(cluster.run(std::vector<TupleSource>(3)), TopologyError);
}
