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

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
  using namespace sal::cli;
  CLI::App app{"sal: streaming analytics language toolkit"};
  app.require_subcommand(1);

  std::string checkPath;
  auto* check = app.add_subcommand("check", "Parse and validate a SAL program");
  check->add_option("program", checkPath, "SAL source file")->required();

  RunConfig run;
  std::string mode = "features-only";
  auto* runCmd = app.add_subcommand("run", "Run a program over netflow input and write feature rows");
  runCmd->add_option("program", run.program, "SAL source file")->required();
  runCmd->add_option("-i,--input", run.input, "Netflow CSV, '-' for stdin, or tcp:HOST:PORT")->required();
  runCmd->add_option("-m,--mode", mode, "train, test or features-only")
      ->check(CLI::IsMember({"train", "test", "features-only"}));
  runCmd->add_option("-n,--nodes", run.nodes, "Logical nodes")->check(CLI::Range(1, 255));
  runCmd->add_flag("--tcp", run.tcp, "Connect the in-process nodes over localhost TCP");
  runCmd->add_option("--topology", run.topology, "Topology file (\"nodeId host basePort\" lines); implies --tcp");
  runCmd->add_option("-o,--output", run.output, "Feature CSV ('-' for stdout)");
  runCmd->add_option("--metrics", run.metrics, "Metrics JSON lines (default stderr)");
  runCmd->add_option("--dump", run.dump, "Merged feature-map dump");
  runCmd->add_option("--seed", run.seed, "Random seed (SAL_SEED overrides)");
  runCmd->add_option("--batch-size", run.batchSize, "Tuples queued before each parallel feed")
      ->check(CLI::PositiveNumber);
  runCmd->add_option("--workers", run.workers, "Worker threads per node")->check(CLI::PositiveNumber);
  runCmd->add_option("--queue-capacity", run.queueCapacity, "Inbox capacity in envelopes")
      ->check(CLI::PositiveNumber);
  runCmd->add_option("--drop-rate", run.dropRate, "Fraction of deliveries to discard")->check(CLI::Range(0.0, 1.0));

  GenPipelineConfig gen;
  auto* genCmd = app.add_subcommand("gen-pipeline", "Emit the ave/var feature pipeline");
  genCmd->add_option("--fields", gen.fields, "Numeric fields")->delimiter(',');
  genCmd->add_option("--groupings", gen.groupings, "Grouping fields")->delimiter(',');
  genCmd->add_option("--window", gen.windowSize, "WindowSize")->check(CLI::PositiveNumber);
  genCmd->add_option("-o,--output", gen.output, "Output file (default stdout)");

  SplitConfig split;
  auto* splitCmd = app.add_subcommand("split", "Split a labeled scenario into two time-ordered parts");
  splitCmd->add_option("input", split.input, "Labeled netflow CSV")->required();
  splitCmd->add_option("--p1", split.part1, "Output CSV for the first part");
  splitCmd->add_option("--p2", split.part2, "Output CSV for the second part");

  GenDataConfig data;
  std::string dataKeys = "powerlaw";
  auto* dataCmd = app.add_subcommand("gen-data", "Write synthetic netflows as CSV");
  dataCmd->add_option("--tuples", data.tuples, "Number of flows");
  dataCmd->add_option("--keys", dataKeys, "powerlaw or uniform");
  dataCmd->add_option("--seed", data.generator.seed, "Generator seed (SAL_SEED overrides)");
  dataCmd->add_option("--node", data.generator.node, "Address namespace");
  dataCmd->add_option("--ip-pool", data.generator.ipPool, "Addresses in the pool")->check(CLI::Range(1, 65536));
  dataCmd->add_flag("--labeled", data.generator.labeled, "Add a Label column");
  dataCmd->add_option("--malicious-fraction", data.generator.maliciousFraction, "Share of malicious sources")
      ->check(CLI::Range(0.0, 1.0));
  dataCmd->add_option("--malicious-shift", data.generator.maliciousPayloadShift,
                      "Log-scale payload shift of malicious sources");
  dataCmd->add_option("-o,--output", data.output, "Output file (default stdout)");

  BenchConfig bench;
  std::vector<std::string> modes;
  auto* benchCmd = app.add_subcommand("bench", "Weak-scaling benchmark on synthetic netflows");
  benchCmd->add_option("--program", bench.program, "SAL program (default: generated 28-feature pipeline)");
  benchCmd->add_option("-n,--nodes", bench.nodes, "Node counts")->delimiter(',');
  benchCmd->add_option("--keys", modes, "powerlaw, uniform")->delimiter(',');
  benchCmd->add_option("--tuples-per-node", bench.tuplesPerNode, "Tuples ingested by each node");
  benchCmd->add_option("--ip-pool", bench.ipPool, "Addresses per node")->check(CLI::Range(1, 65536));
  benchCmd->add_option("--seed", bench.seed, "Generator seed (SAL_SEED overrides)");
  benchCmd->add_option("--baseline", bench.baseline, "Earlier metrics file holding N=1 runs");
  benchCmd->add_option("--metrics", bench.metrics, "Metrics JSON lines (default stdout)");
  benchCmd->add_flag("--tcp", bench.tcp, "Connect the nodes over localhost TCP");
  benchCmd->add_option("--batch-size", bench.batchSize, "Tuples per parallel feed")->check(CLI::PositiveNumber);
  benchCmd->add_option("--workers", bench.workers, "Worker threads per node")->check(CLI::PositiveNumber);

  ServeConfig serve;
  auto* serveCmd = app.add_subcommand("serve", "Run one node of a TCP cluster");
  serveCmd->add_option("program", serve.program, "SAL source file")->required();
  serveCmd->add_option("--node-id", serve.nodeId, "This node's id")->required();
  serveCmd->add_option("--topology", serve.topology, "Topology file")->required();
  serveCmd->add_option("-i,--input", serve.input, "Netflow CSV ingested by this node");
  serveCmd->add_option("--listen", serve.listen, "HOST:PORT accepting framed tuples");
  serveCmd->add_flag("--no-ingest", serve.noIngest, "Ingest nothing; only process peer tuples");
  serveCmd->add_option("--dump", serve.dump, "Feature-map dump of this node");
  serveCmd->add_option("--metrics", serve.metrics, "Metrics JSON line (default stderr)");
  serveCmd->add_option("--seed", serve.seed, "Random seed (SAL_SEED overrides)");
  serveCmd->add_option("--batch-size", serve.batchSize, "Tuples per parallel feed")->check(CLI::PositiveNumber);
  serveCmd->add_option("--workers", serve.workers, "Worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (*check) return cmdCheck(checkPath, std::cout, std::cerr);
  if (*runCmd) {
    run.mode = mode == "train" ? RunMode::Train : mode == "test" ? RunMode::Test : RunMode::FeaturesOnly;
    return cmdRun(run, std::cout, std::cerr);
  }
  if (*genCmd) return cmdGenPipeline(gen, std::cout, std::cerr);
  if (*dataCmd) {
    auto parsed = parseKeyMode(dataKeys);
    if (!parsed) {
      std::cerr << "sal: unknown key mode '" << dataKeys << "'\n";
      return kExitInput;
    }
    data.generator.keys = *parsed;
    return cmdGenData(data, std::cout, std::cerr);
  }
  if (*splitCmd) return cmdSplit(split, std::cout, std::cerr);
  if (*benchCmd) {
    if (!modes.empty()) {
      bench.modes.clear();
      for (auto const& m : modes) {
        auto parsed = parseKeyMode(m);
        if (!parsed) {
          std::cerr << "sal: unknown key mode '" << m << "'\n";
          return kExitInput;
        }
        bench.modes.push_back(*parsed);
      }
    }
    return cmdBench(bench, std::cout, std::cerr);
  }
  if (*serveCmd) return cmdServe(serve, std::cout, std::cerr);
  return kExitInput;
}
