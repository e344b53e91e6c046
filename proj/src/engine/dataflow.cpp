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

#include <sal/engine/dataflow.hpp>

#include <sal/ast/printer.hpp>

#include <algorithm>
#include <map>
#include <sstream>

namespace sal::engine {

std::string_view toString(NodeKind kind)
{
  switch (kind) {
    case NodeKind::KeyedDemux: return "KeyedDemux";
    case NodeKind::FeatureGen: return "FeatureGen";
    case NodeKind::Filter: return "Filter";
    case NodeKind::Transform: return "Transform";
    case NodeKind::Project: return "Project";
    case NodeKind::CollapsedConsumer: return "CollapsedConsumer";
  }
  return "?";
}

namespace {

std::string joinNames(std::vector<std::string> const& names)
{
  std::string out;
  for (auto const& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

bool sharesSumVar(ast::OperatorKind op)
{
  return op == ast::OperatorKind::Ave || op == ast::OperatorKind::Var || op == ast::OperatorKind::Sum;
}

class Compiler {
public:
  Compiler(ast::TypedProgram const& program, std::string const& connection)
    : typed_(program)
  {
    if (!typed_.program.connections.empty()) {
      graph_.connection = connection.empty() ? typed_.program.connections.front().name : connection;
      if (!typed_.findStream(graph_.connection)) {
        throw std::invalid_argument("unknown connection '" + graph_.connection + "'");
      }
    }
  }

  DataflowGraph run()
  {
    graph_.warnings = typed_.warnings;
    if (graph_.connection.empty()) return std::move(graph_);

    auto const* root = typed_.findStream(graph_.connection);
    graph_.rootStream = addStream(*root);
    rootSchema_ = &root->schema;

    // Feature map slots: FOREACH targets, then COLLAPSE maps.
    for (auto const& f : typed_.features) {
      if (typed_.findStream(f.stream)->connection != graph_.connection) continue;
      slotOf_[f.name] = graph_.slotNames.size();
      graph_.slotNames.push_back(f.name);
      graph_.outputFeatures.push_back(f.name);
      graph_.outputSlots.push_back(slotOf_[f.name]);
    }
    auto const& pipeline = typed_.program.pipeline;
    for (std::size_t i = 0; i < pipeline.size(); ++i) {
      if (auto c = std::get_if<ast::CollapseBy>(&pipeline[i])) {
        if (typed_.findStream(c->target)->connection != graph_.connection) continue;
        slotOf_[c->target] = graph_.slotNames.size();
        graph_.slotNames.push_back(c->target);
      }
    }

    for (std::size_t i = 0; i < pipeline.size(); ++i) {
      auto const* out = typed_.findStream(ast::targetOf(pipeline[i]));
      auto const* in = typed_.findStream(ast::sourceOf(pipeline[i]));
      if ((out ? out->connection : in->connection) != graph_.connection) continue;
      std::visit([&](auto const& stmt) { add(i, stmt); }, pipeline[i]);
    }
    buildChains();
    return std::move(graph_);
  }

private:
  std::size_t addStream(ast::StreamInfo const& info)
  {
    StreamSlot slot;
    slot.name = info.name;
    slot.schema = info.schema;
    slot.collapsed = info.collapsed;
    for (auto const& key : info.scope.keys) {
      auto column = info.schema.indexOf(key);
      slot.keyColumns.push_back(column.value_or(0));
    }
    if (info.scope.keyed()) slot.chain = chainFor(info.scope.owner);
    streamIndex_[info.name] = graph_.streams.size();
    scopeOf_.push_back(info.scope);
    graph_.streams.push_back(std::move(slot));
    return graph_.streams.size() - 1;
  }

  std::size_t chainFor(std::string const& owner)
  {
    for (std::size_t i = 0; i < graph_.chains.size(); ++i) {
      if (graph_.chains[i].owner == owner) return i;
    }
    Chain c;
    c.owner = owner;
    c.ownerColumn = rootSchema_->indexOf(owner).value();
    c.hashFunction = "IpHashFunction";
    if (auto p = typed_.findPartition(graph_.connection)) {
      for (auto const& k : p->keys) {
        if (k.field == owner) c.hashFunction = k.hashFunction;
      }
    }
    graph_.chains.push_back(std::move(c));
    return graph_.chains.size() - 1;
  }

  std::size_t stateScope(std::size_t chain, std::vector<std::string> const& keys)
  {
    for (std::size_t i = 0; i < graph_.scopes.size(); ++i) {
      if (graph_.scopes[i].chain == chain && graph_.scopes[i].keys == keys) return i;
    }
    graph_.scopes.push_back({chain, keys, 0});
    return graph_.scopes.size() - 1;
  }

  GraphNode& addNode(NodeKind kind, std::size_t statement, std::string const& target, std::string const& source)
  {
    GraphNode node;
    node.kind = kind;
    node.statement = statement;
    node.target = target;
    node.input = streamIndex_.at(source);
    node.chain = graph_.streams[node.input].chain;
    graph_.nodes.push_back(std::move(node));
    graph_.nodeScope.emplace_back();
    return graph_.nodes.back();
  }

  void attachState(GraphNode& node, std::vector<std::string> const& keys)
  {
    std::size_t scope = stateScope(*node.chain, keys);
    graph_.nodeScope.back() = scope;
    node.state = graph_.scopes[scope].size++;
  }

  void setOutput(GraphNode& node, std::string const& name)
  {
    node.output = addStream(*typed_.findStream(name));
    if (!node.chain) node.chain = graph_.streams[*node.output].chain;
  }

  void add(std::size_t i, ast::StreamBy const& s)
  {
    auto& node = addNode(NodeKind::KeyedDemux, i, s.target, s.source);
    node.detail = joinNames(s.keys);
    setOutput(node, s.target);
  }

  void add(std::size_t i, ast::ForEachGenerate const& s)
  {
    auto const* f = typed_.findFeature(s.target);
    auto const& in = graph_.streams[streamIndex_.at(s.source)];
    bool consumer = in.collapsed;
    auto& node = addNode(consumer ? NodeKind::CollapsedConsumer : NodeKind::FeatureGen, i, s.target, s.source);
    node.op = f->op;
    node.featureSlot = slotOf_.at(f->name);
    node.fieldColumn = in.schema.indexOf(f->field).value();
    node.window = f->window;
    node.k = f->k;
    node.basicWindow = f->basicWindow > 0 ? f->basicWindow : defaultBasicWindow(f->op, f->window);
    node.detail = std::string(ast::toString(f->op)) + " " + f->field;
    if (consumer) {
      node.mapSlot = slotOf_.at(s.source);
      return;
    }
    if (sharesSumVar(f->op)) {
      auto key = std::make_tuple(node.input, node.fieldColumn, node.window);
      auto it = sumVarOwner_.find(key);
      if (it != sumVarOwner_.end()) {
        node.ownsState = false;
        node.state = graph_.nodes[it->second].state;
        graph_.nodeScope.back() = graph_.nodeScope[it->second];
        return;
      }
      sumVarOwner_[key] = graph_.nodes.size() - 1;
    }
    attachState(node, scopeOf_[node.input].keys);
  }

  void add(std::size_t i, ast::Filter const& s)
  {
    auto& node = addNode(NodeKind::Filter, i, s.target, s.source);
    node.exprs.push_back(compileExpr(s.predicate, node));
    node.detail = ast::print(s.predicate);
    setOutput(node, s.target);
  }

  void add(std::size_t i, ast::Transform const& s)
  {
    auto& node = addNode(NodeKind::Transform, i, s.target, s.source);
    node.maxPrev = typed_.maxPrev(i);
    for (auto const& field : s.fields) {
      node.exprs.push_back(compileExpr(field.expr, node));
      if (!node.detail.empty()) node.detail += ", ";
      node.detail += "(" + ast::print(field.expr) + ") : " + field.label;
    }
    attachState(node, scopeOf_[node.input].keys);
    setOutput(node, s.target);
  }

  void add(std::size_t i, ast::CollapseBy const& s)
  {
    auto& node = addNode(NodeKind::Project, i, s.target, s.source);
    auto const& in = graph_.streams[node.input];
    auto const* out = typed_.findStream(s.target);
    for (auto const& key : s.keptKeys) node.keptColumns.push_back(in.schema.indexOf(key).value());
    for (auto const& key : out->droppedKeys) node.droppedColumns.push_back(in.schema.indexOf(key).value());
    for (auto const& name : s.features) node.forSlots.push_back(slotOf_.at(name));
    node.mapSlot = slotOf_.at(s.target);
    node.detail = "BY " + joinNames(s.keptKeys) + " FOR " + joinNames(s.features);
    attachState(node, s.keptKeys);
    setOutput(node, s.target);
  }

  CompiledExpr compileExpr(ast::Expression const& e, GraphNode& node)
  {
    CompiledExpr c;
    auto const& schema = graph_.streams[node.input].schema;
    switch (e.kind) {
      case ast::Expression::Kind::Number:
        c.kind = CompiledExpr::Kind::Constant;
        c.constant = e.number;
        return c;
      case ast::Expression::Kind::Negate:
        c.kind = CompiledExpr::Kind::Negate;
        c.operands.push_back(compileExpr(e.operands.at(0), node));
        return c;
      case ast::Expression::Kind::Binary:
        c.kind = CompiledExpr::Kind::Binary;
        c.op = e.op;
        for (auto const& operand : e.operands) c.operands.push_back(compileExpr(operand, node));
        return c;
      case ast::Expression::Kind::Reference: break;
    }
    if (auto column = schema.indexOf(e.name)) {
      if (e.method == ast::Method::Prev) {
        auto it = std::find(node.prevColumns.begin(), node.prevColumns.end(), *column);
        c.kind = CompiledExpr::Kind::Prev;
        c.index = static_cast<std::size_t>(it - node.prevColumns.begin());
        if (it == node.prevColumns.end()) node.prevColumns.push_back(*column);
        c.arg = static_cast<std::size_t>(e.methodArg);
        return c;
      }
      c.kind = CompiledExpr::Kind::Column;
      c.index = *column;
      return c;
    }
    c.index = slotOf_.at(e.name);
    if (e.method == ast::Method::Value) {
      c.kind = CompiledExpr::Kind::TopKValue;
      c.arg = static_cast<std::size_t>(e.methodArg);
    } else {
      c.kind = CompiledExpr::Kind::Feature;
    }
    return c;
  }

  void buildChains()
  {
    // Unkeyed ancestors run inside every chain that reads from them.
    std::vector<std::optional<std::size_t>> producer(graph_.streams.size());
    for (std::size_t n = 0; n < graph_.nodes.size(); ++n) {
      if (graph_.nodes[n].output) producer[*graph_.nodes[n].output] = n;
    }
    for (std::size_t c = 0; c < graph_.chains.size(); ++c) {
      std::vector<bool> member(graph_.nodes.size(), false);
      for (std::size_t n = 0; n < graph_.nodes.size(); ++n) {
        if (graph_.nodes[n].chain != c) continue;
        member[n] = true;
        auto stream = graph_.nodes[n].input;
        while (producer[stream] && !graph_.streams[stream].chain) {
          member[*producer[stream]] = true;
          stream = graph_.nodes[*producer[stream]].input;
        }
      }
      for (std::size_t n = 0; n < graph_.nodes.size(); ++n) {
        if (member[n]) graph_.chains[c].nodes.push_back(n);
      }
    }

    std::map<std::pair<std::size_t, std::vector<std::size_t>>, std::size_t> groups;
    for (std::size_t col = 0; col < graph_.outputFeatures.size(); ++col) {
      auto const* f = typed_.findFeature(graph_.outputFeatures[col]);
      std::size_t chain = chainFor(f->scope.owner);
      std::vector<std::size_t> keyColumns;
      for (auto const& key : f->scope.keys) keyColumns.push_back(rootSchema_->indexOf(key).value());
      auto [it, inserted] = groups.try_emplace({chain, keyColumns}, graph_.chains[chain].capture.size());
      if (inserted) graph_.chains[chain].capture.push_back({keyColumns, {}, {}});
      auto& group = graph_.chains[chain].capture[it->second];
      group.slots.push_back(graph_.outputSlots[col]);
      group.outputColumns.push_back(col);
    }
  }

  ast::TypedProgram const& typed_;
  DataflowGraph graph_;
  ast::TupleSchema const* rootSchema_ = nullptr;
  std::map<std::string, std::size_t> streamIndex_;
  std::vector<ast::KeyScope> scopeOf_;
  std::map<std::string, std::size_t> slotOf_;
  std::map<std::tuple<std::size_t, std::size_t, std::int64_t>, std::size_t> sumVarOwner_;
};

} // namespace

std::size_t DataflowGraph::countNodes(NodeKind kind) const
{
  return static_cast<std::size_t>(
    std::count_if(nodes.begin(), nodes.end(), [&](GraphNode const& n) { return n.kind == kind; }));
}

std::string DataflowGraph::describe() const
{
  std::ostringstream out;
  for (auto const& node : nodes) {
    out << toString(node.kind) << '(' << node.detail << ") " << node.target << " <- " << streams[node.input].name;
    if (node.chain) out << " [by " << chains[*node.chain].owner << ']';
    out << '\n';
  }
  return out.str();
}

std::int64_t defaultBasicWindow(ast::OperatorKind op, std::int64_t window)
{
  std::int64_t divisor = op == ast::OperatorKind::CountDistinct ? 50 : 10;
  return std::max<std::int64_t>(1, window / divisor);
}

DataflowGraph compile(ast::TypedProgram const& program, std::string const& connection)
{
  return Compiler(program, connection).run();
}

} // namespace sal::engine
