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

// Acceptance report: one PASS/FAIL line per criterion, details indented.
//
//   acceptance [--full] [--strict] [--tuples-per-node N]
//
// --full runs the weak-scaling sweep at 1M tuples per node.  --strict makes
// any FAIL line turn into a non-zero exit status.

#include <sal/ast/parser.hpp>
#include <sal/ast/printer.hpp>
#include <sal/ast/validator.hpp>
#include <sal/cli/commands.hpp>
#include <sal/cli/split.hpp>
#include <sal/engine/dataflow.hpp>

#include "distributed.hpp"
#include "equivalence.hpp"
#include "oracles.hpp"
#include "paths.hpp"
#include "sketch_suite.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>

using namespace sal;
using namespace sal::testing;

namespace {

int failures = 0;

void verdict(bool pass, char const* criterion, std::string const& summary)
{
  std::printf("%s  %-28s %s\n", pass ? "PASS" : "FAIL", criterion, summary.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <typename... Args>
void detail(char const* format, Args... args)
{
  std::printf("      ");
  std::printf(format, args...);
  std::printf("\n");
  std::fflush(stdout);
}

double since(std::chrono::steady_clock::time_point start)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(char const* format, double a, double b = 0, double c = 0, double d = 0)
{
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

void parserCorpus()
{
  auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::size_t statements = 0;
  for (auto const* name : {"listing1.sal", "disclosure.sal", "pipeline28.sal"}) {
    try {
      auto program = ast::parseSource(readText(dataPath(name)));
      auto typed = ast::validate(program);
      auto graph = engine::compile(typed);
      auto printed = ast::print(program);
      bool roundTrip = ast::parseSource(printed) == program && ast::print(ast::parseSource(printed)) == printed;
      statements += program.pipeline.size();
      detail("%s: %zu statements, %zu graph nodes, round-trip %s", name, program.pipeline.size(),
             graph.nodes.size(), roundTrip ? "ok" : "BROKEN");
      ok = ok && roundTrip && graph.nodes.size() == program.pipeline.size();
    } catch (std::exception const& e) {
      detail("%s: %s", name, e.what());
      ok = false;
    }
  }
  double seconds = since(start);
  verdict(ok && seconds < 1.0, "parser corpus",
          fmt("%.0f statements parsed, validated, compiled, round-tripped in %.3f s (limit 1 s)",
              static_cast<double>(statements), seconds));
}

void sketchSuite()
{
  SuiteOptions options;
  bool ok = true;
  double total = 0;
  std::size_t streams = 0;
  struct Row {
    SuiteOp op;
    char const* tolerance;
  };
  Row rows[] = {
    {SuiteOp::Count, "count error <= eps"},
    {SuiteOp::Sum, "relative error <= 5 eps"},
    {SuiteOp::Ave, "relative error <= 5 eps"},
    {SuiteOp::Var, "relative error <= 5 eps"},
    {SuiteOp::TopK, "|freq error| <= b/N + 0.01, Zipf(1.2)"},
    {SuiteOp::Median, "rank error <= eps N + b"},
    {SuiteOp::CountDistinct, "within 5% in >= 95% of trials, p=14"},
  };
  for (auto const& row : rows) {
    auto r = runSketchSuite(row.op, options);
    bool pass = r.windowBoundHeld && (row.op == SuiteOp::CountDistinct
                                          ? r.passed * 100 >= r.trials * 95
                                          : r.passed == r.trials);
    ok = ok && pass;
    total += r.seconds;
    streams += r.trials;
    detail("%-13s %s  %4zu/%zu streams within tolerance (%s), %zu queries, worst error/tolerance %.3f, "
           "window bound %s, %.1f s",
           suiteName(row.op), pass ? "ok  " : "MISS", r.passed, r.trials, row.tolerance, r.queries, r.worst,
           r.windowBoundHeld ? "held" : "VIOLATED", r.seconds);
    if (!pass) {
      detail("              worst: %s", r.worstDetail.c_str());
      for (auto const& f : r.failures) detail("              %s", f.c_str());
    }
  }
  verdict(ok, "sketch oracle suite",
          fmt("%.0f seeded streams (lengths 10-20000, windows 10-5000), %.1f s", static_cast<double>(streams), total));
}

void collapse()
{
  auto r = collapseEquivalence(100, 2000, 1);
  if (!r.firstMismatch.empty()) detail("first mismatch: %s", r.firstMismatch.c_str());
  verdict(r.mismatches == 0 && r.streams == 100, "COLLAPSE BY equivalence",
          fmt("%.0f streams, %.0f exact comparisons, %.0f mismatches, %.1f s", static_cast<double>(r.streams),
              static_cast<double>(r.comparisons), static_cast<double>(r.mismatches), r.seconds));
}

void distributed()
{
  auto input = syntheticTuples(100000, 1);
  auto r = distributedEquivalence(readText(dataPath("pipeline28.sal")), input, 4);
  detail("N=4 in-process dump == N=1: %s; feature rows identical: %s; TCP == in-process: %s",
         r.nodesMatch ? "yes" : "NO", r.rowsMatch ? "yes" : "NO", r.tcpMatches ? "yes" : "NO");
  if (!r.detail.empty()) detail("%s", r.detail.c_str());
  verdict(r.nodesMatch && r.rowsMatch && r.tcpMatches && r.seconds < 120.0, "distributed equivalence",
          fmt("28-feature program, 100000 tuples, %.0f keys, %.0f deliveries, %.1f s (limit 120 s)",
              static_cast<double>(r.keys), static_cast<double>(r.deliveries), r.seconds));
}

void weakScaling(std::size_t tuplesPerNode)
{
  detail("%-9s %2s %4s %10s %8s %8s %11s %6s %6s %6s", "keys", "N", "seed", "tuples", "wall s", "cpu s", "tuples/s",
         "E", "E_cpu", "load");
  std::vector<cli::BenchResult> results;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    cli::BenchConfig config;
    config.tuplesPerNode = tuplesPerNode;
    config.seed = seed;
    if (seed > 1) config.nodes = {1, 8};
    auto part = cli::runBench(config, [seed](cli::BenchResult const& r) {
      detail("%-9s %2zu %4llu %10llu %8.2f %8.2f %11.0f %6.3f %6.3f %6.3f", std::string(cli::toString(r.mode)).c_str(),
             r.nodes, static_cast<unsigned long long>(seed), static_cast<unsigned long long>(r.tuples),
             r.wallSeconds, r.cpuMakespan, r.throughput, r.efficiency.value_or(0), r.cpuEfficiency.value_or(0),
             r.loadRatio);
    });
    results.insert(results.end(), part.begin(), part.end());
  }
  auto median = [&](cli::KeyMode mode, std::size_t nodes, auto field) {
    std::vector<double> values;
    for (auto const& r : results)
      if (r.mode == mode && r.nodes == nodes) values.push_back(field(r));
    if (values.empty()) return -1.0;
    std::sort(values.begin(), values.end());
    return values[values.size() / 2];
  };
  auto cpuE = [](cli::BenchResult const& r) { return r.cpuEfficiency.value_or(0); };
  auto wallE = [](cli::BenchResult const& r) { return r.efficiency.value_or(0); };
  auto load = [](cli::BenchResult const& r) { return r.loadRatio; };
  auto rate = [](cli::BenchResult const& r) { return r.throughput; };
  double up = median(cli::KeyMode::Uniform, 8, cpuE), pp = median(cli::KeyMode::PowerLaw, 8, cpuE);
  double pr = median(cli::KeyMode::PowerLaw, 1, rate), ur = median(cli::KeyMode::Uniform, 1, rate);
  if (up < 0 || pp < 0 || pr < 0 || ur < 0) {
    verdict(false, "weak scaling", "sweep incomplete");
    return;
  }
  verdict(up >= pp, "weak scaling",
          fmt("N=8 CPU-makespan efficiency, median of 3 seeds: uniform %.3f >= power-law %.3f; load max/min %.2f vs "
              "%.2f",
              up, pp, median(cli::KeyMode::Uniform, 8, load), median(cli::KeyMode::PowerLaw, 8, load)) +
              fmt(" (%.0f tuples/node, 1 core: wall E %.3f vs %.3f)", static_cast<double>(tuplesPerNode),
                  median(cli::KeyMode::Uniform, 8, wallE), median(cli::KeyMode::PowerLaw, 8, wallE)));
  double floor = std::min(pr, ur);
  verdict(floor >= 50000.0, "weak scaling soft floor",
          fmt("single-node throughput, median of 3 seeds: power-law %.0f, uniform %.0f tuples/s (floor 50000)", pr, ur));
}

void scenarioSplit()
{
  std::size_t agreed = 0, trials = 0, ordered = 0, balanced = 0, rejected = 0;
  std::string firstProblem;
  std::mt19937_64 rng(1);
  for (std::size_t trial = 0; trial < 300; ++trial) {
    std::size_t n = 2 + rng() % 5000;
    std::size_t distinctTimes = 1 + rng() % (n + 1);
    double fraction = trial % 10 == 0 ? 1.0 : std::uniform_real_distribution<double>(0.0, 0.3)(rng);
    std::vector<engine::NetflowTuple> tuples;
    for (std::size_t i = 0; i < n; ++i) {
      auto t = randomTuple(rng, 50, 50, 1000.0 + static_cast<double>(rng() % distinctTimes));
      t.label = std::uniform_real_distribution<double>(0, 1)(rng) < fraction ? engine::Label::Malicious
                                                                             : engine::Label::Benign;
      tuples.push_back(t);
    }
    std::shuffle(tuples.begin(), tuples.end(), rng);
    auto sorted = tuples;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](auto const& a, auto const& b) { return a.timeSeconds < b.timeSeconds; });
    auto oracle = splitOracle(sorted);
    bool oracleDefined = oracle && (oracle->malicious1 > oracle->malicious2 ? oracle->malicious1 - oracle->malicious2
                                                                            : oracle->malicious2 - oracle->malicious1) <= 1;
    std::size_t totalMalicious = static_cast<std::size_t>(std::count_if(
        sorted.begin(), sorted.end(), [](auto const& t) { return t.label == engine::Label::Malicious; }));
    if (totalMalicious < 2) oracleDefined = false;
    ++trials;
    try {
      auto s = cli::scenarioSplit(tuples);
      bool sameAsOracle = oracleDefined && s.boundary == oracle->boundary && s.malicious1 == oracle->malicious1 &&
                          s.malicious2 == oracle->malicious2;
      bool strict = tuples[s.boundary - 1].timeSeconds < tuples[s.boundary].timeSeconds &&
                    std::is_sorted(tuples.begin(), tuples.end(),
                                   [](auto const& a, auto const& b) { return a.timeSeconds < b.timeSeconds; });
      bool within = (s.malicious1 > s.malicious2 ? s.malicious1 - s.malicious2 : s.malicious2 - s.malicious1) <= 1;
      agreed += sameAsOracle;
      ordered += strict;
      balanced += within;
      if (!(sameAsOracle && strict && within) && firstProblem.empty())
        firstProblem = "trial " + std::to_string(trial) + ": split at " + std::to_string(s.boundary);
    } catch (cli::SplitError const&) {
      ++rejected;
      if (!oracleDefined) {
        ++agreed;
        ++ordered;
        ++balanced;
      } else if (firstProblem.empty()) {
        firstProblem = "trial " + std::to_string(trial) + ": rejected but the oracle found a balanced split";
      }
    }
  }
  if (!firstProblem.empty()) detail("%s", firstProblem.c_str());
  verdict(agreed == trials && ordered == trials && balanced == trials, "scenario split",
          fmt("%.0f constructed streams: %.0f match the scan oracle, %.0f strictly ordered, %.0f balanced within 1",
              static_cast<double>(trials), static_cast<double>(agreed), static_cast<double>(ordered),
              static_cast<double>(balanced)) +
              fmt(" (%.0f correctly rejected as unbalanceable)", static_cast<double>(rejected)));
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Acceptance report"};
  bool full = false, strict = false;
  std::size_t tuplesPerNode = 100000;
  app.add_flag("--full", full, "weak-scaling sweep at 1M tuples per node");
  app.add_flag("--strict", strict, "exit non-zero when any criterion fails");
  app.add_option("--tuples-per-node", tuplesPerNode, "weak-scaling tuples per node");
  CLI11_PARSE(app, argc, argv);
  if (full) tuplesPerNode = 1000000;

  try {
    parserCorpus();
    sketchSuite();
    collapse();
    distributed();
    weakScaling(tuplesPerNode);
    scenarioSplit();
  } catch (std::exception const& e) {
    std::printf("ERROR %s\n", e.what());
    return 2;
  }
  std::printf("%d criteria failed\n", failures);
  return strict && failures > 0 ? 1 : 0;
}
