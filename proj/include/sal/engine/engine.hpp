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

#ifndef SAL_ENGINE_ENGINE_HPP
#define SAL_ENGINE_ENGINE_HPP

#include <sal/engine/dataflow.hpp>
#include <sal/engine/feature_map.hpp>
#include <sal/engine/netflow.hpp>
#include <sal/sketch/sum_var_sketch.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sal::engine {

struct EngineOptions {
  std::size_t workers = 1;
  double epsilon = sketch::kDefaultEpsilon;
  std::size_t mapCapacity = 10000;
  std::uint64_t seed = 0;
};

struct EngineStats {
  std::uint64_t tuples = 0;        // tuples handed to the engine
  std::uint64_t chainRuns = 0;     // (tuple, chain) pairs executed here
  std::uint64_t filtered = 0;      // FILTER predicate false
  std::uint64_t notReady = 0;      // FILTER dropped on a feature with no value yet
  std::uint64_t faults = 0;        // division by zero
  std::uint64_t pending = 0;       // TRANSFORM waiting for prev values
  std::uint64_t emitted = 0;       // TRANSFORM output tuples
  std::uint64_t evictions = 0;     // COLLAPSE map entries evicted

  EngineStats& operator+=(EngineStats const& o);
};

/// Formatted feature cells of one input tuple, in DataflowGraph::outputFeatures order.
using FeatureRow = std::vector<std::string>;

/**
 * Executes a DataflowGraph tuple by tuple.
 *
 * For each tuple, each chain runs its statements in program order.  The
 * per-key state of a chain lives in the worker shard chosen by the hash of
 * the tuple's owner value, so one key is only ever touched by one worker
 * and in input order; results do not depend on the worker count.  Features
 * are published through the FeatureMap, and each tuple's feature row is
 * captured right after its chain has run.
 */
class Engine {
public:
  using ChainFilter = std::function<bool(std::size_t chain, NetflowTuple const& tuple)>;

  explicit Engine(DataflowGraph graph, EngineOptions options = {});
  ~Engine();

  Engine(Engine const&) = delete;
  Engine& operator=(Engine const&) = delete;

  DataflowGraph const& graph() const noexcept;
  FeatureMap& featureMap() noexcept;
  FeatureMap const& featureMap() const noexcept;

  /// Restricts which chains run for a tuple (cluster routing); default runs all.
  void setChainFilter(ChainFilter filter);

  FeatureRow process(NetflowTuple const& tuple);

  /**
   * Parallel feed of one batch.  When `rows` is given it receives one row per
   * tuple; cells of chains that did not run here stay empty.  When
   * `processed` is given, bit c of entry i tells whether chain c ran for
   * tuple i.
   */
  void processBatch(std::span<NetflowTuple const> batch, std::vector<FeatureRow>* rows,
                    std::vector<std::uint64_t>* processed = nullptr);

  /// Call only while no batch is running.
  EngineStats stats() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// CSV header for feature output: tuple columns, feature names, optional Label.
std::string featureHeader(DataflowGraph const& graph, bool withLabel);

/// One output line (no newline) for a tuple and its feature row.
void appendFeatureLine(std::string& out, NetflowTuple const& tuple, FeatureRow const& row, bool withLabel);

} // namespace sal::engine

#endif
