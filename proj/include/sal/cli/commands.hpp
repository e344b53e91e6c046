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

#ifndef SAL_CLI_COMMANDS_HPP
#define SAL_CLI_COMMANDS_HPP

#include <sal/ast/validator.hpp>
#include <sal/cli/generator.hpp>
#include <sal/engine/dataflow.hpp>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sal::cli {

/// Process exit codes shared by every command.
enum ExitCode : int {
  kExitOk = 0,
  kExitSyntax = 1,      // lexical or syntax error in the program
  kExitSemantic = 2,    // program fails validation
  kExitIo = 3,          // unreadable or unwritable file
  kExitInput = 4,       // bad input data or arguments
  kExitTransport = 5,   // cluster transport failure
};

struct LoadedProgram {
  ast::TypedProgram typed;
  engine::DataflowGraph graph;
};

/// Parses, validates and compiles; throws SalError or std::ios_base::failure.
LoadedProgram loadProgram(std::string const& path);
LoadedProgram loadProgramSource(std::string const& source);

/// SAL_SEED from the environment, if set, else `fallback`.
std::uint64_t effectiveSeed(std::uint64_t fallback);

int cmdCheck(std::string const& path, std::ostream& out, std::ostream& err);

enum class RunMode { Train, Test, FeaturesOnly };

struct RunConfig {
  std::string program;
  std::string input;                 // CSV path, "-" for stdin, or tcp:HOST:PORT
  RunMode mode = RunMode::FeaturesOnly;
  std::size_t nodes = 1;
  bool tcp = false;                  // TCP between the in-process nodes
  std::string topology;              // addresses for TCP; implies tcp
  std::string output;                // feature CSV, "-" for stdout, empty for none
  std::string metrics;               // JSON lines; empty writes them to `err`
  std::string dump;                  // merged feature-map dump
  std::uint64_t seed = 0;
  std::size_t batchSize = 1000;
  std::size_t workers = 1;
  std::size_t queueCapacity = 10000;
  double dropRate = 0.0;
};

int cmdRun(RunConfig const& config, std::ostream& out, std::ostream& err);

struct GenPipelineConfig {
  std::vector<std::string> fields;      // empty: the seven defaults
  std::vector<std::string> groupings;   // empty: DestIp, SourceIp
  std::int64_t windowSize = 1000;
  std::string output;                   // empty or "-": stdout
};

int cmdGenPipeline(GenPipelineConfig const& config, std::ostream& out, std::ostream& err);

struct SplitConfig {
  std::string input;
  std::string part1;
  std::string part2;
};

int cmdSplit(SplitConfig const& config, std::ostream& out, std::ostream& err);

struct BenchConfig {
  std::string program;                  // empty: the generated 28-feature pipeline
  std::vector<std::size_t> nodes{1, 2, 4, 8};
  std::vector<KeyMode> modes{KeyMode::PowerLaw, KeyMode::Uniform};
  std::size_t tuplesPerNode = 1000000;
  std::size_t ipPool = 10000;
  std::uint64_t seed = 1;
  std::string baseline;                 // metrics of an earlier sweep holding N=1 runs
  std::string metrics;                  // empty: `out`
  bool tcp = false;
  std::size_t batchSize = 1000;
  std::size_t workers = 1;
};

struct BenchResult {
  KeyMode mode = KeyMode::PowerLaw;
  std::size_t nodes = 1;
  std::uint64_t tuples = 0;
  double wallSeconds = 0.0;
  double cpuMakespan = 0.0;             // largest per-node CPU time
  double throughput = 0.0;              // tuples / wall time
  double makespanThroughput = 0.0;      // tuples / CPU makespan
  std::optional<double> efficiency;     // T1 / Tn on wall time
  std::optional<double> cpuEfficiency;  // T1 / Tn on CPU makespan
  std::vector<std::uint64_t> received;  // tuples fed per node
  double loadRatio = 1.0;               // max / min of received

  std::string toJson() const;
};

/// Runs the sweep; `onResult` sees each result as soon as it is measured.
std::vector<BenchResult> runBench(BenchConfig const& config,
                                  std::function<void(BenchResult const&)> const& onResult = {});

int cmdBench(BenchConfig const& config, std::ostream& out, std::ostream& err);

struct GenDataConfig {
  GeneratorOptions generator;
  std::size_t tuples = 10000;
  std::string output;                // empty or "-": stdout
};

/// Synthetic netflow CSV.
int cmdGenData(GenDataConfig const& config, std::ostream& out, std::ostream& err);

struct ServeConfig {
  std::string program;
  std::size_t nodeId = 0;
  std::string topology;
  std::string input;                 // CSV path to ingest
  std::string listen;                // HOST:PORT accepting one framed-tuple producer
  bool noIngest = false;
  std::string dump;
  std::string metrics;
  std::uint64_t seed = 0;
  std::size_t batchSize = 1000;
  std::size_t workers = 1;
};

/// One node of a TCP cluster described by a topology file.
int cmdServe(ServeConfig const& config, std::ostream& out, std::ostream& err);

} // namespace sal::cli

#endif
