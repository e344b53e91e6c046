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

#include <sal/cli/commands.hpp>

#include <sal/ast/parser.hpp>
#include <sal/cli/input.hpp>
#include <sal/cli/pipeline.hpp>
#include <sal/cli/split.hpp>
#include <sal/cluster/cluster.hpp>
#include <sal/cluster/envelope.hpp>

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sal::cli {

using nlohmann::ordered_json;

namespace {

std::string readFile(std::string const& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

/// Opens `path` for writing, or returns `fallback` for "-" and empty paths.
class OutputFile {
public:
  OutputFile(std::string const& path, std::ostream& fallback) : stream_(&fallback)
  {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw std::ios_base::failure("cannot write '" + path + "'");
    stream_ = &file_;
  }

  std::ostream& operator*() { return *stream_; }

  void close()
  {
    stream_->flush();
    if (file_.is_open()) {
      file_.close();
      if (!file_) throw std::ios_base::failure("write failed");
    }
  }

private:
  std::ofstream file_;
  std::ostream* stream_;
};

void printWarnings(std::vector<ast::Diagnostic> const& warnings, std::string const& file, std::ostream& err)
{
  for (auto const& w : warnings) err << w.format(file) << '\n';
}

/// Maps an exception to an exit code, reporting it on `err`.
template <typename F>
int guarded(std::string const& file, std::ostream& err, F&& body)
{
  try {
    return body();
  } catch (ast::SalError const& e) {
    err << e.diagnostic().format(file) << '\n';
    return e.category() == ast::ErrorCategory::Semantic ? kExitSemantic : kExitSyntax;
  } catch (std::ios_base::failure const& e) {
    err << "sal: " << e.what() << '\n';
    return kExitIo;
  } catch (cluster::TransportError const& e) {
    err << "sal: transport error: " << e.what() << '\n';
    return kExitTransport;
  } catch (std::exception const& e) {
    err << "sal: " << e.what() << '\n';
    return kExitInput;
  }
}

std::pair<std::string, std::uint16_t> parseHostPort(std::string_view text)
{
  auto colon = text.rfind(':');
  unsigned port = 0;
  if (colon == std::string_view::npos ||
      std::from_chars(text.data() + colon + 1, text.data() + text.size(), port).ec != std::errc{} || port > 65535) {
    throw std::invalid_argument("expected HOST:PORT, got '" + std::string(text) + "'");
  }
  return {std::string(text.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

/// Reads frames until TERMINATE or end of stream, calling `line` per payload.
template <typename F>
void readFrames(cluster::Socket& socket, F&& line)
{
  cluster::FrameDecoder decoder;
  std::vector<char> buffer(64 * 1024);
  while (true) {
    while (auto frame = decoder.next()) {
      if (frame->terminate()) return;
      line(frame->payload);
    }
    std::size_t n = socket.readSome(buffer.data(), buffer.size());
    if (n == 0) {
      if (decoder.buffered() != 0) throw cluster::FrameError("stream ended inside a frame");
      return;
    }
    decoder.feed(buffer.data(), n);
  }
}

/// Collects framed tuples from a producer at host:port.
NetflowInput readSocketInput(std::string const& address)
{
  auto [host, port] = parseHostPort(address);
  cluster::Socket socket = cluster::connectTcp(host, port);
  NetflowInput input;
  readFrames(socket, [&](std::string const& payload) {
    ++input.lines;
    try {
      input.tuples.push_back(engine::parseNetflow(payload));
      if (input.tuples.back().label) input.labeled = true;
    } catch (engine::CsvError const& e) {
      ++input.malformed;
      if (input.samples.size() < 5) input.samples.push_back(address + ": " + e.what());
    }
  });
  if (static_cast<double>(input.malformed) > kMalformedLimit * static_cast<double>(input.lines)) {
    throw InputError(address + ": " + std::to_string(input.malformed) + " of " + std::to_string(input.lines) +
                     " tuples are malformed (limit 1%)");
  }
  return input;
}

ordered_json nodeJson(cluster::NodeReport const& n)
{
  ordered_json j;
  j["id"] = n.id;
  j["ingested"] = n.counters.ingested;
  j["received"] = n.counters.received;
  j["sent"] = n.counters.sent;
  j["kept"] = n.counters.kept;
  j["dropped"] = n.counters.dropped;
  j["rejected"] = n.counters.rejected;
  j["batches"] = n.counters.batches;
  j["chain_runs"] = n.engine.chainRuns;
  j["filtered"] = n.engine.filtered;
  j["not_ready"] = n.engine.notReady;
  j["faults"] = n.engine.faults;
  j["emitted"] = n.engine.emitted;
  j["evictions"] = n.engine.evictions;
  j["cpu_seconds"] = n.cpuSeconds();
  return j;
}

} // namespace

LoadedProgram loadProgramSource(std::string const& source)
{
  LoadedProgram p;
  p.typed = ast::validate(ast::parseSource(source));
  p.graph = engine::compile(p.typed);
  return p;
}

LoadedProgram loadProgram(std::string const& path)
{
  return loadProgramSource(readFile(path));
}

std::uint64_t effectiveSeed(std::uint64_t fallback)
{
  char const* env = std::getenv("SAL_SEED");
  if (!env || !*env) return fallback;
  std::uint64_t seed = 0;
  std::string_view text(env);
  if (std::from_chars(text.data(), text.data() + text.size(), seed).ec != std::errc{}) {
    throw std::invalid_argument("SAL_SEED must be an unsigned integer");
  }
  return seed;
}

// ---------------------------------------------------------------------------

int cmdCheck(std::string const& path, std::ostream& out, std::ostream& err)
{
  return guarded(path, err, [&] {
    auto program = loadProgram(path);
    printWarnings(program.typed.warnings, path, err);
    out << path << ": ok, " << program.typed.program.pipeline.size() << " statements, "
        << program.typed.features.size() << " features\n";
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------

int cmdRun(RunConfig const& config, std::ostream& out, std::ostream& err)
{
  return guarded(config.program, err, [&] {
    auto program = loadProgram(config.program);
    printWarnings(program.typed.warnings, config.program, err);

    NetflowInput input;
    if (config.input.starts_with("tcp:")) {
      input = readSocketInput(config.input.substr(4));
    } else if (config.input == "-") {
      input = readNetflowCsv(std::cin, "stdin");
    } else {
      input = readNetflowFile(config.input);
    }
    for (auto const& s : input.samples) err << "sal: skipped malformed line " << s << '\n';
    if (config.mode == RunMode::Train && !input.labeled) {
      throw InputError("train mode needs a Label column in the input");
    }
    bool withLabel = config.mode == RunMode::Train || (config.mode == RunMode::FeaturesOnly && input.labeled);

    cluster::ClusterOptions options;
    options.nodes = config.nodes;
    options.queueCapacity = config.queueCapacity;
    if (!config.topology.empty()) options.topology = cluster::NodeTopology::load(config.topology);
    options.transport = config.tcp || options.topology ? cluster::TransportKind::Tcp : cluster::TransportKind::InProcess;
    options.node.batchSize = config.batchSize;
    options.node.dropRate = config.dropRate;
    options.node.seed = effectiveSeed(config.seed);
    options.node.engine.workers = config.workers;
    options.node.engine.seed = options.node.seed;

    cluster::Cluster cluster(program.typed, program.graph, options);
    std::vector<engine::FeatureRow> rows;
    bool wantRows = !config.output.empty();
    auto report = cluster.run(input.tuples, wantRows ? &rows : nullptr);

    if (wantRows) {
      OutputFile file(config.output, out);
      std::string text = engine::featureHeader(program.graph, withLabel) + '\n';
      for (std::size_t i = 0; i < input.tuples.size(); ++i) {
        engine::appendFeatureLine(text, input.tuples[i], rows[i], withLabel);
        text += '\n';
        if (text.size() > (1 << 20)) {
          *file << text;
          text.clear();
        }
      }
      *file << text;
      file.close();
    }
    if (!config.dump.empty()) {
      OutputFile file(config.dump, out);
      *file << cluster.mergedDump();
      file.close();
    }

    ordered_json m;
    m["command"] = "run";
    m["mode"] = config.mode == RunMode::Train ? "train" : config.mode == RunMode::Test ? "test" : "features-only";
    m["nodes"] = config.nodes;
    m["transport"] = options.transport == cluster::TransportKind::Tcp ? "tcp" : "in-process";
    m["lines"] = input.lines;
    m["malformed"] = input.malformed;
    m["tuples"] = report.tuples;
    m["rejected"] = report.rejected;
    std::uint64_t dropped = 0;
    for (auto const& n : report.nodes) dropped += n.counters.dropped;
    m["dropped"] = dropped;
    m["deliveries"] = report.deliveries;
    m["wall_seconds"] = report.wallSeconds;
    m["throughput"] = report.wallSeconds > 0 ? static_cast<double>(report.tuples) / report.wallSeconds : 0.0;
    m["per_node"] = ordered_json::array();
    for (auto const& n : report.nodes) m["per_node"].push_back(nodeJson(n));
    OutputFile metrics(config.metrics, err);
    *metrics << m.dump() << '\n';
    metrics.close();
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------

int cmdGenPipeline(GenPipelineConfig const& config, std::ostream& out, std::ostream& err)
{
  return guarded("gen-pipeline", err, [&] {
    auto const& fields = config.fields.empty() ? defaultPipelineFields() : config.fields;
    auto const& groupings = config.groupings.empty() ? defaultPipelineGroupings() : config.groupings;
    std::string source = generatePipeline(fields, groupings, config.windowSize);
    loadProgramSource(source);   // the generated text must validate
    OutputFile file(config.output, out);
    *file << source;
    file.close();
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------

int cmdSplit(SplitConfig const& config, std::ostream& out, std::ostream& err)
{
  return guarded(config.input, err, [&] {
    auto input = readNetflowFile(config.input);
    if (!input.labeled) throw InputError("split needs a Label column in the input");
    ScenarioSplit split = scenarioSplit(input.tuples);
    if (!config.part1.empty()) {
      OutputFile file(config.part1, out);
      writeNetflowCsv(*file, input.tuples, true, 0, split.boundary);
      file.close();
    }
    if (!config.part2.empty()) {
      OutputFile file(config.part2, out);
      writeNetflowCsv(*file, input.tuples, true, split.boundary);
      file.close();
    }
    out << split.toJson() << '\n';
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------

int cmdGenData(GenDataConfig const& config, std::ostream& out, std::ostream& err)
{
  return guarded("gen-data", err, [&] {
    GeneratorOptions g = config.generator;
    g.seed = effectiveSeed(g.seed);
    SyntheticGenerator gen(g);
    OutputFile file(config.output, out);
    std::string text = engine::netflowHeader(g.labeled) + '\n';
    engine::NetflowTuple t;
    for (std::size_t i = 0; i < config.tuples; ++i) {
      gen.next(t);
      engine::appendCsv(text, t, g.labeled);
      text += '\n';
      if (text.size() > (1 << 20)) {
        *file << text;
        text.clear();
      }
    }
    *file << text;
    file.close();
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------

std::string BenchResult::toJson() const
{
  ordered_json j;
  j["command"] = "bench";
  j["mode"] = toString(mode);
  j["nodes"] = nodes;
  j["tuples"] = tuples;
  j["wall_seconds"] = wallSeconds;
  j["cpu_makespan_seconds"] = cpuMakespan;
  j["throughput"] = throughput;
  j["makespan_throughput"] = makespanThroughput;
  j["efficiency"] = efficiency ? ordered_json(*efficiency) : ordered_json();
  j["cpu_efficiency"] = cpuEfficiency ? ordered_json(*cpuEfficiency) : ordered_json();
  j["received"] = received;
  j["load_ratio"] = loadRatio;
  return j.dump();
}

namespace {

struct Baseline {
  double wall = 0.0;
  double cpu = 0.0;
};

std::vector<std::pair<KeyMode, Baseline>> readBaselines(std::string const& path)
{
  std::vector<std::pair<KeyMode, Baseline>> out;
  std::istringstream lines(readFile(path));
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    auto j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || j.value("nodes", 0) != 1 || !j.contains("mode")) continue;
    auto mode = parseKeyMode(j["mode"].get<std::string>());
    if (!mode) continue;
    out.emplace_back(*mode, Baseline{j.value("wall_seconds", 0.0), j.value("cpu_makespan_seconds", 0.0)});
  }
  return out;
}

} // namespace

std::vector<BenchResult> runBench(BenchConfig const& config, std::function<void(BenchResult const&)> const& onResult)
{
  LoadedProgram program = config.program.empty()
                              ? loadProgramSource(generatePipeline(defaultPipelineFields(), defaultPipelineGroupings()))
                              : loadProgram(config.program);
  std::vector<std::pair<KeyMode, Baseline>> baselines;
  if (!config.baseline.empty()) baselines = readBaselines(config.baseline);

  std::vector<BenchResult> results;
  for (KeyMode mode : config.modes) {
    std::optional<Baseline> base;
    for (auto const& [m, b] : baselines) {
      if (m == mode) base = b;
    }
    for (std::size_t n : config.nodes) {
      cluster::ClusterOptions options;
      options.nodes = n;
      options.transport = config.tcp ? cluster::TransportKind::Tcp : cluster::TransportKind::InProcess;
      options.node.batchSize = config.batchSize;
      options.node.engine.workers = config.workers;
      cluster::Cluster cluster(program.typed, program.graph, options);

      std::vector<cluster::TupleSource> sources;
      for (std::size_t id = 0; id < n; ++id) {
        GeneratorOptions g;
        g.keys = mode;
        g.seed = config.seed;
        g.node = id;
        g.ipPool = config.ipPool;
        auto gen = std::make_shared<SyntheticGenerator>(g);
        auto left = std::make_shared<std::size_t>(config.tuplesPerNode);
        sources.push_back([gen, left](engine::NetflowTuple& t) {
          if (*left == 0) return false;
          --*left;
          gen->next(t);
          return true;
        });
      }
      auto report = cluster.run(std::move(sources));

      BenchResult r;
      r.mode = mode;
      r.nodes = n;
      r.tuples = report.tuples;
      r.wallSeconds = report.wallSeconds;
      r.cpuMakespan = report.cpuMakespan();
      r.throughput = r.wallSeconds > 0 ? static_cast<double>(r.tuples) / r.wallSeconds : 0.0;
      r.makespanThroughput = r.cpuMakespan > 0 ? static_cast<double>(r.tuples) / r.cpuMakespan : 0.0;
      for (auto const& node : report.nodes) r.received.push_back(node.counters.received);
      auto [lo, hi] = std::minmax_element(r.received.begin(), r.received.end());
      r.loadRatio = *lo > 0 ? static_cast<double>(*hi) / static_cast<double>(*lo) : 0.0;
      if (n == 1 && !base) base = Baseline{r.wallSeconds, r.cpuMakespan};
      if (base) {
        if (r.wallSeconds > 0) r.efficiency = base->wall / r.wallSeconds;
        if (r.cpuMakespan > 0) r.cpuEfficiency = base->cpu / r.cpuMakespan;
      }
      if (onResult) onResult(r);
      results.push_back(std::move(r));
    }
  }
  return results;
}

int cmdBench(BenchConfig const& config, std::ostream& out, std::ostream& err)
{
  return guarded(config.program.empty() ? "bench" : config.program, err, [&] {
    BenchConfig c = config;
    c.seed = effectiveSeed(config.seed);
    OutputFile metrics(c.metrics, out);
    runBench(c, [&](BenchResult const& r) { *metrics << r.toJson() << std::endl; });
    metrics.close();
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------

int cmdServe(ServeConfig const& config, std::ostream& out, std::ostream& err)
{
  return guarded(config.program, err, [&] {
    auto program = loadProgram(config.program);
    printWarnings(program.typed.warnings, config.program, err);
    auto topology = cluster::NodeTopology::load(config.topology);
    if (config.nodeId >= topology.size()) {
      throw cluster::TopologyError("node id " + std::to_string(config.nodeId) + " is not in the topology");
    }
    cluster::PartitionPlan plan(program.typed, program.graph);
    cluster::TcpTransport transport(topology, {config.nodeId});

    cluster::NodeOptions options;
    options.batchSize = config.batchSize;
    options.seed = effectiveSeed(config.seed);
    options.engine.workers = config.workers;
    options.engine.seed = options.seed;
    cluster::NodeRuntime node(config.nodeId, program.graph, plan, transport, options);
    node.start(topology.size());

    // Ingest: a CSV file, a framed-tuple producer, or (node 0 by default)
    // the program's own connection address.
    std::uint64_t malformed = 0;
    std::string listen = config.listen;
    if (listen.empty() && config.input.empty() && !config.noIngest && config.nodeId == 0) {
      auto const& conn = program.typed.program.connections.front();
      listen = conn.host + ":" + std::to_string(conn.port);
    }
    if (!config.input.empty()) {
      auto input = readNetflowFile(config.input);
      malformed = input.malformed;
      for (auto const& t : input.tuples) node.ingest(t);
    } else if (!listen.empty() && !config.noIngest) {
      auto [host, port] = parseHostPort(listen);
      cluster::Socket listener = cluster::listenTcp(host, port);
      err << "sal: node " << config.nodeId << " waiting for tuples on " << host << ":"
          << cluster::localPort(listener) << '\n';
      cluster::Socket producer = cluster::acceptTcp(listener);
      readFrames(producer, [&](std::string const& payload) {
        try {
          node.ingest(engine::parseNetflow(payload));
        } catch (engine::CsvError const&) {
          ++malformed;
        }
      });
    }
    node.finishIngest();
    node.wait();
    if (auto error = transport.readerError()) throw cluster::TransportError(*error);

    if (!config.dump.empty()) {
      OutputFile file(config.dump, out);
      *file << node.engine().featureMap().dump();
      file.close();
    }
    cluster::NodeReport report;
    report.id = node.id();
    report.counters = node.counters();
    report.engine = node.engine().stats();
    report.readerCpuSeconds = transport.readerCpuSeconds(node.id());
    ordered_json m = nodeJson(report);
    m = ordered_json{{"command", "serve"}, {"malformed", malformed}, {"node", m}};
    OutputFile metrics(config.metrics, err);
    *metrics << m.dump() << '\n';
    metrics.close();
    return kExitOk;
  });
}

} // namespace sal::cli
