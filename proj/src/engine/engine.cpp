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

#include <sal/engine/engine.hpp>

#include <sal/ast/printer.hpp>
#include <sal/engine/worker_pool.hpp>
#include <sal/sketch/distinct.hpp>
#include <sal/sketch/hash.hpp>
#include <sal/sketch/prev_buffer.hpp>
#include <sal/sketch/quantile.hpp>
#include <sal/sketch/topk.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <variant>

namespace sal::engine {

EngineStats& EngineStats::operator+=(EngineStats const& o)
{
  tuples += o.tuples;
  chainRuns += o.chainRuns;
  filtered += o.filtered;
  notReady += o.notReady;
  faults += o.faults;
  pending += o.pending;
  emitted += o.emitted;
  evictions += o.evictions;
  return *this;
}

namespace {

using Record = std::vector<Cell>;

using State = std::variant<std::monostate, sketch::SumVarSketch, sketch::BasicWindowTopK, sketch::DistinctSketch,
                           sketch::QuantileSketch, std::vector<sketch::PrevBuffer>, std::shared_ptr<MapFeature>>;

using StateTable = std::unordered_map<std::string, std::vector<State>>;

enum class Eval { Ok, NotReady, Fault };

void appendCell(std::string& out, Cell const& cell)
{
  if (auto s = std::get_if<std::string_view>(&cell))
    out += *s;
  else
    out += ast::formatNumber(std::get<double>(cell));
}

double numberOf(Cell const& cell)
{
  if (auto d = std::get_if<double>(&cell)) return *d;
  throw std::logic_error("string cell used as a number");
}

/// Exact statistic over the ready values of a collapsed map column.
std::optional<double> collapsedStat(ast::OperatorKind op, std::vector<double> values)
{
  if (values.empty()) return std::nullopt;
  double n = static_cast<double>(values.size());
  switch (op) {
    case ast::OperatorKind::Sum:
    case ast::OperatorKind::Ave:
    case ast::OperatorKind::Var: {
      double sum = 0.0;
      for (double v : values) sum += v;
      if (op == ast::OperatorKind::Sum) return sum;
      double mean = sum / n;
      if (op == ast::OperatorKind::Ave) return mean;
      double sq = 0.0;
      for (double v : values) sq += (v - mean) * (v - mean);
      return sq / n;
    }
    case ast::OperatorKind::Median: {
      auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
      std::nth_element(values.begin(), mid, values.end());
      return *mid;
    }
    case ast::OperatorKind::CountDistinct: {
      std::sort(values.begin(), values.end());
      return static_cast<double>(std::unique(values.begin(), values.end()) - values.begin());
    }
    case ast::OperatorKind::TopK: break;
  }
  return std::nullopt;
}

} // namespace

struct Engine::Impl {
  /// Scratch and state owned by one worker.
  struct Shard {
    std::vector<StateTable> tables;
    EngineStats stats;
    std::vector<Record> records;
    std::vector<std::size_t> alias;     // stream -> record holding its tuple
    std::vector<char> present;
    std::vector<std::string> keys;
    std::vector<char> keyValid;
    std::vector<std::pair<std::size_t, std::vector<State>*>> scopeCache;  // per scope: stream, row
    std::vector<FeatureMap::RowRef> rowCache;                              // per stream
    std::vector<double> prevScratch;
    std::string scratch;
    std::vector<Feature> captured;
  };

  DataflowGraph graph;
  EngineOptions options;
  FeatureMap features;
  ChainFilter filter;
  std::vector<Shard> shards;
  WorkerPool pool;
  std::uint64_t tuples = 0;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> work;  // per worker: (tuple, chain)

  Impl(DataflowGraph g, EngineOptions o)
    : graph(std::move(g))
    , options(o)
    , features(graph.slotNames)
    , shards(std::max<std::size_t>(1, o.workers))
    , pool(std::max<std::size_t>(1, o.workers))
    , work(shards.size())
  {
    if (graph.chains.size() > 64) throw std::invalid_argument("at most 64 owner chains are supported");
    for (auto& shard : shards) {
      shard.tables.resize(graph.scopes.size());
      shard.records.resize(graph.streams.size());
      shard.alias.resize(graph.streams.size());
      shard.present.resize(graph.streams.size());
      shard.keys.resize(graph.streams.size());
      shard.keyValid.resize(graph.streams.size());
      shard.scopeCache.resize(graph.scopes.size());
      shard.rowCache.resize(graph.streams.size());
    }
  }

  std::size_t workerFor(NetflowTuple const& t, Chain const& chain, std::string& scratch) const
  {
    if (shards.size() == 1) return 0;
    scratch.clear();
    appendCell(scratch, t.cell(chain.ownerColumn));
    return sketch::mix64(sketch::fnv1a64(scratch) ^ 0x5bd1e995ULL) % shards.size();
  }

  std::string const& keyOf(Shard& s, std::size_t stream)
  {
    if (!s.keyValid[stream]) {
      auto& key = s.keys[stream];
      key.clear();
      Record const& r = s.records[s.alias[stream]];
      bool first = true;
      for (auto column : graph.streams[stream].keyColumns) {
        if (!first) key += kKeySeparator;
        first = false;
        appendCell(key, r[column]);
      }
      s.keyValid[stream] = 1;
    }
    return s.keys[stream];
  }

  std::vector<State>& stateFor(Shard& s, std::size_t node, std::size_t stream)
  {
    auto scope = *graph.nodeScope[node];
    auto& cached = s.scopeCache[scope];
    if (cached.second && cached.first == stream) return *cached.second;
    auto& table = s.tables[scope];
    std::string const& key = keyOf(s, stream);
    auto it = table.find(key);
    if (it == table.end()) it = table.emplace(key, std::vector<State>(graph.scopes[scope].size)).first;
    cached = {stream, &it->second};
    return it->second;
  }

  FeatureMap::RowRef rowFor(Shard& s, std::size_t stream)
  {
    auto& ref = s.rowCache[stream];
    if (!ref) ref = features.locate(keyOf(s, stream));
    return ref;
  }

  Eval evaluate(Shard& s, CompiledExpr const& e, std::size_t stream, double& out,
                std::vector<sketch::PrevBuffer> const* prev)
  {
    Record const& r = s.records[s.alias[stream]];
    switch (e.kind) {
      case CompiledExpr::Kind::Constant: out = e.constant; return Eval::Ok;
      case CompiledExpr::Kind::Column: out = numberOf(r[e.index]); return Eval::Ok;
      case CompiledExpr::Kind::Prev: {
        auto v = (*prev)[e.index].prev(e.arg);
        if (!v) return Eval::NotReady;
        out = *v;
        return Eval::Ok;
      }
      case CompiledExpr::Kind::Feature: {
        Feature f = features.get(keyOf(s, stream), e.index);
        auto d = std::get_if<double>(&f);
        if (!d) return Eval::NotReady;
        out = *d;
        return Eval::Ok;
      }
      case CompiledExpr::Kind::TopKValue: {
        Feature f = features.get(keyOf(s, stream), e.index);
        auto top = std::get_if<sketch::TopKList>(&f);
        if (!top) return Eval::NotReady;
        out = e.arg < top->size() ? (*top)[e.arg].second : 0.0;
        return Eval::Ok;
      }
      case CompiledExpr::Kind::Negate: {
        auto status = evaluate(s, e.operands[0], stream, out, prev);
        out = -out;
        return status;
      }
      case CompiledExpr::Kind::Binary: break;
    }
    double a = 0.0;
    double b = 0.0;
    if (auto status = evaluate(s, e.operands[0], stream, a, prev); status != Eval::Ok) return status;
    if (auto status = evaluate(s, e.operands[1], stream, b, prev); status != Eval::Ok) return status;
    switch (e.op) {
      case ast::BinaryOp::Add: out = a + b; break;
      case ast::BinaryOp::Sub: out = a - b; break;
      case ast::BinaryOp::Mul: out = a * b; break;
      case ast::BinaryOp::Div:
        if (b == 0.0) return Eval::Fault;
        out = a / b;
        break;
      case ast::BinaryOp::Lt: out = a < b; break;
      case ast::BinaryOp::Le: out = a <= b; break;
      case ast::BinaryOp::Gt: out = a > b; break;
      case ast::BinaryOp::Ge: out = a >= b; break;
      case ast::BinaryOp::Eq: out = a == b; break;
      case ast::BinaryOp::Ne: out = a != b; break;
    }
    return Eval::Ok;
  }

  void forward(Shard& s, GraphNode const& node)
  {
    s.alias[*node.output] = s.alias[node.input];
    s.present[*node.output] = 1;
  }

  State& ensureSketch(State& state, GraphNode const& node)
  {
    if (!std::holds_alternative<std::monostate>(state)) return state;
    auto window = static_cast<std::uint64_t>(node.window);
    auto basic = static_cast<std::uint64_t>(node.basicWindow);
    switch (node.op) {
      case ast::OperatorKind::Ave:
      case ast::OperatorKind::Sum:
      case ast::OperatorKind::Var: state.emplace<sketch::SumVarSketch>(options.epsilon, window); break;
      case ast::OperatorKind::TopK:
        state.emplace<sketch::BasicWindowTopK>(window, basic, static_cast<std::uint64_t>(node.k));
        break;
      case ast::OperatorKind::CountDistinct:
        state.emplace<sketch::DistinctSketch>(window, basic, sketch::kDefaultPrecision, options.seed);
        break;
      case ast::OperatorKind::Median: state.emplace<sketch::QuantileSketch>(options.epsilon, window, basic); break;
    }
    return state;
  }

  void featureGen(Shard& s, std::size_t index, GraphNode const& node)
  {
    State& state = ensureSketch(stateFor(s, index, node.input)[node.state], node);
    Cell const& cell = s.records[s.alias[node.input]][node.fieldColumn];
    Feature value;
    switch (node.op) {
      case ast::OperatorKind::Ave:
      case ast::OperatorKind::Sum:
      case ast::OperatorKind::Var: {
        auto& sk = std::get<sketch::SumVarSketch>(state);
        if (node.ownsState) sk.insert(numberOf(cell));
        auto v = node.op == ast::OperatorKind::Ave ? sk.mean()
               : node.op == ast::OperatorKind::Sum ? sk.sum()
                                                   : sk.variance();
        if (v) value = *v;
        break;
      }
      case ast::OperatorKind::TopK: {
        auto& sk = std::get<sketch::BasicWindowTopK>(state);
        s.scratch.clear();
        appendCell(s.scratch, cell);
        sk.insert(s.scratch);
        value = sk.query();
        break;
      }
      case ast::OperatorKind::CountDistinct: {
        auto& sk = std::get<sketch::DistinctSketch>(state);
        s.scratch.clear();
        appendCell(s.scratch, cell);
        sk.insert(s.scratch);
        value = sk.estimate();
        break;
      }
      case ast::OperatorKind::Median: {
        auto& sk = std::get<sketch::QuantileSketch>(state);
        sk.insert(numberOf(cell));
        if (auto m = sk.median()) value = *m;
        break;
      }
    }
    features.updateInsert(rowFor(s, node.input), node.featureSlot, std::move(value));
  }

  void filterNode(Shard& s, GraphNode const& node)
  {
    double v = 0.0;
    switch (evaluate(s, node.exprs.front(), node.input, v, nullptr)) {
      case Eval::Ok:
        if (v != 0.0)
          forward(s, node);
        else
          ++s.stats.filtered;
        return;
      case Eval::NotReady: ++s.stats.notReady; return;
      case Eval::Fault: ++s.stats.faults; return;
    }
  }

  void transformNode(Shard& s, std::size_t index, GraphNode const& node)
  {
    State& state = stateFor(s, index, node.input)[node.state];
    if (std::holds_alternative<std::monostate>(state)) {
      state.emplace<std::vector<sketch::PrevBuffer>>(node.prevColumns.size(),
                                                     sketch::PrevBuffer(static_cast<std::size_t>(node.maxPrev)));
    }
    auto& buffers = std::get<std::vector<sketch::PrevBuffer>>(state);
    Record const& in = s.records[s.alias[node.input]];
    for (std::size_t i = 0; i < node.prevColumns.size(); ++i) buffers[i].push(numberOf(in[node.prevColumns[i]]));

    auto& values = s.prevScratch;
    values.assign(node.exprs.size(), 0.0);
    for (std::size_t i = 0; i < node.exprs.size(); ++i) {
      switch (evaluate(s, node.exprs[i], node.input, values[i], &buffers)) {
        case Eval::Ok: break;
        case Eval::NotReady: ++s.stats.pending; return;
        case Eval::Fault: ++s.stats.faults; return;
      }
    }
    std::size_t out = *node.output;
    Record& r = s.records[out];
    r.clear();
    for (auto column : graph.streams[node.input].keyColumns) r.push_back(in[column]);
    for (double v : values) r.emplace_back(v);
    s.alias[out] = out;
    s.present[out] = 1;
    ++s.stats.emitted;
  }

  void projectNode(Shard& s, std::size_t index, GraphNode const& node)
  {
    std::string const& sourceKey = keyOf(s, node.input);
    Record const& in = s.records[s.alias[node.input]];
    std::size_t out = *node.output;
    auto& kept = s.keys[out];
    kept.clear();
    for (std::size_t i = 0; i < node.keptColumns.size(); ++i) {
      if (i) kept += kKeySeparator;
      appendCell(kept, in[node.keptColumns[i]]);
    }
    s.keyValid[out] = 1;
    std::string dropped;
    for (std::size_t i = 0; i < node.droppedColumns.size(); ++i) {
      if (i) dropped += kKeySeparator;
      appendCell(dropped, in[node.droppedColumns[i]]);
    }
    MapFeature::Values values(node.forSlots.size());
    s.captured.resize(node.forSlots.size());
    features.read(sourceKey, node.forSlots, s.captured);
    for (std::size_t i = 0; i < node.forSlots.size(); ++i) {
      if (auto d = std::get_if<double>(&s.captured[i])) values[i] = *d;
    }

    State& state = stateFor(s, index, out)[node.state];
    if (std::holds_alternative<std::monostate>(state)) {
      auto map = std::make_shared<MapFeature>(node.forSlots.size(), options.mapCapacity);
      state = map;
      features.updateInsert(kept, node.mapSlot, map);
    }
    auto& map = std::get<std::shared_ptr<MapFeature>>(state);
    auto before = map->evictions();
    map->update(dropped, std::move(values));
    s.stats.evictions += map->evictions() - before;
    s.alias[out] = out;
    s.present[out] = 1;
  }

  void consumerNode(Shard& s, GraphNode const& node)
  {
    std::string const& key = s.keys[node.input];
    Feature f = features.get(key, node.mapSlot);
    Feature value;
    if (auto map = std::get_if<std::shared_ptr<MapFeature>>(&f)) {
      if (auto v = collapsedStat(node.op, (*map)->column(node.fieldColumn))) value = *v;
    }
    features.updateInsert(key, node.featureSlot, std::move(value));
  }

  void runChain(Shard& s, NetflowTuple const& t, Chain const& chain)
  {
    ++s.stats.chainRuns;
    std::fill(s.present.begin(), s.present.end(), 0);
    std::fill(s.keyValid.begin(), s.keyValid.end(), 0);
    for (auto& cached : s.scopeCache) cached.second = nullptr;
    std::fill(s.rowCache.begin(), s.rowCache.end(), FeatureMap::RowRef{});
    Record& root = s.records[graph.rootStream];
    root.resize(NetflowTuple::kColumns);
    for (std::size_t c = 0; c < NetflowTuple::kColumns; ++c) root[c] = t.cell(c);
    s.alias[graph.rootStream] = graph.rootStream;
    s.present[graph.rootStream] = 1;

    for (auto index : chain.nodes) {
      GraphNode const& node = graph.nodes[index];
      if (!s.present[node.input]) continue;
      switch (node.kind) {
        case NodeKind::KeyedDemux: forward(s, node); break;
        case NodeKind::FeatureGen: featureGen(s, index, node); break;
        case NodeKind::Filter: filterNode(s, node); break;
        case NodeKind::Transform: transformNode(s, index, node); break;
        case NodeKind::Project: projectNode(s, index, node); break;
        case NodeKind::CollapsedConsumer: consumerNode(s, node); break;
      }
    }
  }

  void capture(Shard& s, NetflowTuple const& t, Chain const& chain, FeatureRow& row)
  {
    for (auto const& group : chain.capture) {
      s.scratch.clear();
      for (std::size_t i = 0; i < group.rootKeyColumns.size(); ++i) {
        if (i) s.scratch += kKeySeparator;
        appendCell(s.scratch, t.cell(group.rootKeyColumns[i]));
      }
      s.captured.resize(group.slots.size());
      features.read(s.scratch, group.slots, s.captured);
      for (std::size_t i = 0; i < group.slots.size(); ++i) row[group.outputColumns[i]] = formatFeature(s.captured[i]);
    }
  }
};

Engine::Engine(DataflowGraph graph, EngineOptions options)
  : impl_(std::make_unique<Impl>(std::move(graph), options))
{}

Engine::~Engine() = default;

DataflowGraph const& Engine::graph() const noexcept { return impl_->graph; }
FeatureMap& Engine::featureMap() noexcept { return impl_->features; }
FeatureMap const& Engine::featureMap() const noexcept { return impl_->features; }

void Engine::setChainFilter(ChainFilter filter) { impl_->filter = std::move(filter); }

FeatureRow Engine::process(NetflowTuple const& tuple)
{
  std::vector<FeatureRow> rows;
  processBatch(std::span<NetflowTuple const>(&tuple, 1), &rows);
  return std::move(rows.front());
}

void Engine::processBatch(std::span<NetflowTuple const> batch, std::vector<FeatureRow>* rows,
                          std::vector<std::uint64_t>* processed)
{
  Impl& m = *impl_;
  m.tuples += batch.size();
  if (rows) {
    rows->resize(batch.size());
    for (auto& row : *rows) row.assign(m.graph.outputFeatures.size(), std::string());
  }
  if (processed) processed->assign(batch.size(), 0);

  for (auto& list : m.work) list.clear();
  std::string scratch;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    for (std::size_t c = 0; c < m.graph.chains.size(); ++c) {
      if (m.filter && !m.filter(c, batch[i])) continue;
      if (processed) (*processed)[i] |= std::uint64_t{1} << c;
      m.work[m.workerFor(batch[i], m.graph.chains[c], scratch)].emplace_back(i, c);
    }
  }
  m.pool.run([&](std::size_t w) {
    auto& shard = m.shards[w];
    for (auto [i, c] : m.work[w]) {
      Chain const& chain = m.graph.chains[c];
      m.runChain(shard, batch[i], chain);
      if (rows) m.capture(shard, batch[i], chain, (*rows)[i]);
    }
  });
}

EngineStats Engine::stats() const
{
  EngineStats total;
  total.tuples = impl_->tuples;
  for (auto const& shard : impl_->shards) total += shard.stats;
  return total;
}

std::string featureHeader(DataflowGraph const& graph, bool withLabel)
{
  std::string out = netflowHeader(false);
  for (auto const& name : graph.outputFeatures) {
    out += ',';
    out += name;
  }
  if (withLabel) out += ",Label";
  return out;
}

void appendFeatureLine(std::string& out, NetflowTuple const& tuple, FeatureRow const& row, bool withLabel)
{
  appendCsv(out, tuple, false);
  for (auto const& cell : row) {
    out += ',';
    appendCsvField(out, cell);
  }
  if (withLabel) {
    out += ',';
    if (tuple.label) out += toString(*tuple.label);
  }
}

} // namespace sal::engine
