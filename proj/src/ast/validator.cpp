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

#include <sal/ast/validator.hpp>

#include <sal/ast/printer.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

namespace sal::ast {

namespace {

constexpr std::array<std::pair<std::string_view, OperatorKind>, 6> kOperators{{
  {"ave", OperatorKind::Ave},
  {"sum", OperatorKind::Sum},
  {"var", OperatorKind::Var},
  {"topk", OperatorKind::TopK},
  {"median", OperatorKind::Median},
  {"countdistinct", OperatorKind::CountDistinct},
}};

bool isUnsupportedOperator(std::string_view name)
{
  return name == "max" || name == "min" || name == "autocorrelation";
}

bool needsNumeric(OperatorKind op)
{
  return op != OperatorKind::TopK && op != OperatorKind::CountDistinct;
}

bool equalsIgnoreCase(std::string_view a, std::string_view b)
{
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

std::string joinKeys(std::vector<std::string> const& keys)
{
  std::string out = "[";
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i) out += ", ";
    out += keys[i];
  }
  return out + "]";
}

class Validator {
public:
  Validator(SalProgram const& program, TupleSchema const& schema)
  {
    typed_.program = program;
    typed_.sourceSchema = schema;
  }

  TypedProgram run()
  {
    preamble();
    connections();
    partitions();
    auto& pipeline = typed_.program.pipeline;
    for (std::size_t i = 0; i < pipeline.size(); ++i) {
      current_ = i;
      std::visit([this](auto& stmt) { check(stmt); }, pipeline[i]);
    }
    if (pipeline.empty()) {
      typed_.warnings.push_back({Severity::Warning, {}, "program has no pipeline statements"});
    }
    return std::move(typed_);
  }

private:
  [[noreturn]] void fail(SourceLoc loc, std::string const& message) const
  {
    auto const& stmt = typed_.program.pipeline[current_];
    throw SemanticError(loc, "in statement '" + targetOf(stmt) + "': " + message);
  }

  void preamble()
  {
    for (auto const& c : typed_.program.preamble) {
      if (c.name == "WindowSize") {
        if (c.value < 1) throw SemanticError(c.loc, "WindowSize must be positive");
        typed_.windowSize = c.value;
      }
    }
  }

  void connections()
  {
    for (auto const& c : typed_.program.connections) {
      if (!isKnownSourceKind(c.sourceKind)) {
        throw SemanticError(c.loc, "unknown stream source '" + c.sourceKind + "'");
      }
      if (c.port < 0 || c.port > 65535) {
        throw SemanticError(c.loc, "port out of range for '" + c.name + "'");
      }
      StreamInfo info;
      info.name = c.name;
      info.connection = c.name;
      info.schema = typed_.sourceSchema;
      typed_.streams.push_back(std::move(info));
    }
  }

  void partitions()
  {
    for (auto const& p : typed_.program.partitions) {
      bool isConnection = std::any_of(typed_.program.connections.begin(), typed_.program.connections.end(),
                                      [&](Connection const& c) { return c.name == p.stream; });
      if (!isConnection) {
        throw SemanticError(p.loc, "PARTITION names '" + p.stream + "', which is not a connection");
      }
      if (typed_.findPartition(p.stream)) {
        throw SemanticError(p.loc, "stream '" + p.stream + "' is partitioned more than once");
      }
      PartitionInfo info;
      info.stream = p.stream;
      std::set<std::string> seen;
      for (auto const& key : p.keys) {
        if (!typed_.sourceSchema.contains(key)) {
          throw SemanticError(p.loc, "partition key '" + key + "' is not a field of '" + p.stream + "'");
        }
        if (!seen.insert(key).second) {
          throw SemanticError(p.loc, "partition key '" + key + "' listed twice");
        }
        info.keys.push_back({key, "IpHashFunction"});
      }
      typed_.partitions.push_back(std::move(info));
    }
    std::set<std::string> hashed;
    for (auto const& h : typed_.program.hashes) {
      if (!isKnownHashFunction(h.function)) {
        throw SemanticError(h.loc, "unknown hash function '" + h.function + "'");
      }
      if (!hashed.insert(h.field).second) {
        throw SemanticError(h.loc, "field '" + h.field + "' has more than one HASH statement");
      }
      bool found = false;
      for (auto& p : typed_.partitions) {
        for (auto& key : p.keys) {
          if (key.field == h.field) {
            key.hashFunction = h.function;
            found = true;
          }
        }
      }
      if (!found) {
        throw SemanticError(h.loc, "HASH field '" + h.field + "' is not a partition key");
      }
    }
  }

  StreamInfo const& stream(std::string const& name) const
  {
    // parse() guarantees sources are defined streams.
    return *typed_.findStream(name);
  }

  StatementInfo& info()
  {
    if (typed_.statements.size() <= current_) typed_.statements.resize(current_ + 1);
    return typed_.statements[current_];
  }

  void requireKeyed(StreamInfo const& s, SourceLoc loc, std::string_view what)
  {
    if (!s.scope.keyed()) {
      fail(loc, std::string(what) + " needs a keyed stream, but '" + s.name +
                  "' has no keys (use STREAM ... BY first)");
    }
  }

  void requireNotCollapsed(StreamInfo const& s, SourceLoc loc, std::string_view what)
  {
    if (s.collapsed) {
      fail(loc, std::string(what) + " cannot read collapsed stream '" + s.name +
                  "'; only FOREACH ... GENERATE applies to it");
    }
  }

  void addStream(StreamInfo s)
  {
    s.statement = current_;
    info().output = s.scope;
    typed_.streams.push_back(std::move(s));
  }

  void check(StreamBy& s)
  {
    StreamInfo const& src = stream(s.source);
    info().input = src.scope;
    requireNotCollapsed(src, s.loc, "STREAM BY");
    auto const* partition = typed_.findPartition(src.connection);
    std::set<std::string> seen;
    for (auto const& key : s.keys) {
      if (!seen.insert(key).second) fail(s.loc, "key '" + key + "' listed twice");
      bool isPartitionKey = partition &&
        std::any_of(partition->keys.begin(), partition->keys.end(),
                    [&](PartitionKeyInfo const& k) { return k.field == key; });
      if (!isPartitionKey) {
        fail(s.loc, "BY field '" + key + "' is not listed in the PARTITION statement for '" +
                      src.connection + "'");
      }
      if (!src.schema.contains(key)) {
        fail(s.loc, "BY field '" + key + "' is not a field of stream '" + src.name + "'");
      }
    }
    StreamInfo out = src;
    out.name = s.target;
    out.scope.keys = s.keys;
    if (src.scope.keyed()) {
      if (!seen.count(src.scope.owner)) {
        fail(s.loc, "re-keying '" + src.name + "' must keep its partition key '" + src.scope.owner + "'");
      }
      out.scope.owner = src.scope.owner;
    } else {
      out.scope.owner = s.keys.front();
    }
    addStream(std::move(out));
  }

  void check(ForEachGenerate& s)
  {
    StreamInfo const& src = stream(s.source);
    info().input = src.scope;
    info().output = src.scope;
    requireKeyed(src, s.loc, "FOREACH");

    auto op = lookupOperator(s.op.name);
    if (!op) {
      if (isUnsupportedOperator(s.op.name)) {
        fail(s.loc, "unsupported operator '" + s.op.name +
                      "': it cannot be computed over a sliding window in polylogarithmic space");
      }
      fail(s.loc, "unknown operator '" + s.op.name + "'");
    }

    FeatureInfo f;
    f.name = s.target;
    f.stream = src.name;
    f.scope = src.scope;
    f.op = *op;
    f.collapsed = src.collapsed;
    f.statement = current_;
    f.window = typed_.windowSize;

    std::size_t arity = *op == OperatorKind::TopK ? 4 : 1;
    if (s.op.args.size() != arity) {
      fail(s.loc, "operator '" + s.op.name + "' takes " + std::to_string(arity) + " argument" +
                    (arity == 1 ? "" : "s") + ", got " + std::to_string(s.op.args.size()));
    }
    auto const& fieldArg = s.op.args.front();
    if (fieldArg.kind != Expression::Kind::Reference || fieldArg.method != Method::None) {
      fail(s.loc, "first argument of '" + s.op.name + "' must be a field name");
    }
    f.field = fieldArg.name;
    auto column = src.schema.indexOf(f.field);
    if (!column) {
      if (src.collapsed) {
        fail(s.loc, "'" + f.field + "' is not one of the features collapsed into '" + src.name + "'");
      }
      fail(s.loc, "unknown field '" + f.field + "' in stream '" + src.name + "'");
    }
    if (needsNumeric(*op) && src.schema[*column].type != ValueType::Number) {
      fail(s.loc, "operator '" + s.op.name + "' needs a numeric field, but '" + f.field + "' is a string");
    }

    if (*op == OperatorKind::TopK) {
      if (src.collapsed) fail(s.loc, "topk is not available on collapsed streams");
      std::array<std::int64_t, 3> params{};
      for (std::size_t i = 1; i < 4; ++i) {
        auto const& a = s.op.args[i];
        if (a.kind != Expression::Kind::Number || !a.integral) {
          fail(s.loc, "topk arguments 2-4 (window, basic window, k) must be integers");
        }
        params[i - 1] = static_cast<std::int64_t>(a.number);
      }
      f.window = params[0];
      f.basicWindow = params[1];
      f.k = params[2];
      if (f.window < 1) fail(s.loc, "topk window must be positive");
      if (f.basicWindow < 1 || f.basicWindow > f.window) {
        fail(s.loc, "topk basic window must be in [1, window]");
      }
      if (f.k < 1) fail(s.loc, "topk k must be positive");
    }
    typed_.features.push_back(std::move(f));
  }

  void check(Filter& s)
  {
    StreamInfo const& src = stream(s.source);
    info().input = src.scope;
    requireNotCollapsed(src, s.loc, "FILTER");
    checkExpr(s.predicate, src, false);
    StreamInfo out = src;
    out.name = s.target;
    addStream(std::move(out));
  }

  void check(Transform& s)
  {
    StreamInfo const& src = stream(s.source);
    info().input = src.scope;
    requireNotCollapsed(src, s.loc, "TRANSFORM");
    requireKeyed(src, s.loc, "TRANSFORM");
    std::vector<Column> columns;
    for (auto const& key : src.scope.keys) {
      columns.push_back(src.schema[*src.schema.indexOf(key)]);
    }
    std::set<std::string> labels(src.scope.keys.begin(), src.scope.keys.end());
    for (auto& field : s.fields) {
      if (!labels.insert(field.label).second) {
        fail(s.loc, "TRANSFORM label '" + field.label + "' clashes with a key or another label");
      }
      checkExpr(field.expr, src, true);
      columns.push_back({field.label, ValueType::Number});
    }
    StreamInfo out = src;
    out.name = s.target;
    out.schema = TupleSchema(std::move(columns));
    addStream(std::move(out));
  }

  void check(CollapseBy& s)
  {
    StreamInfo const& src = stream(s.source);
    info().input = src.scope;
    requireNotCollapsed(src, s.loc, "COLLAPSE");
    requireKeyed(src, s.loc, "COLLAPSE");
    std::set<std::string> kept;
    for (auto const& key : s.keptKeys) {
      if (std::find(src.scope.keys.begin(), src.scope.keys.end(), key) == src.scope.keys.end()) {
        fail(s.loc, "COLLAPSE keeps '" + key + "', which is not in the key set " +
                      joinKeys(src.scope.keys) + " of '" + src.name + "'");
      }
      if (!kept.insert(key).second) fail(s.loc, "key '" + key + "' listed twice");
    }
    if (!kept.count(src.scope.owner)) {
      fail(s.loc, "COLLAPSE must keep the partition key '" + src.scope.owner + "'");
    }
    std::vector<std::string> dropped;
    for (auto const& key : src.scope.keys) {
      if (!kept.count(key)) dropped.push_back(key);
    }
    if (dropped.empty()) fail(s.loc, "COLLAPSE must drop at least one key");

    std::vector<Column> columns;
    std::set<std::string> seen;
    for (auto& name : s.features) {
      FeatureInfo const* f = resolveFeature(name, s.loc);
      if (!f) fail(s.loc, "unknown feature '" + name + "' in FOR list");
      if (!seen.insert(f->name).second) fail(s.loc, "feature '" + f->name + "' listed twice");
      if (f->scope != src.scope) {
        fail(s.loc, "feature '" + f->name + "' is keyed by " + joinKeys(f->scope.keys) +
                      ", not by the key set " + joinKeys(src.scope.keys) + " of '" + src.name + "'");
      }
      if (f->isTopK()) fail(s.loc, "topk feature '" + f->name + "' cannot be collapsed");
      columns.push_back({f->name, ValueType::Number});
    }
    StreamInfo out = src;
    out.name = s.target;
    out.collapsed = true;
    out.scope.keys = s.keptKeys;
    out.droppedKeys = std::move(dropped);
    out.schema = TupleSchema(std::move(columns));
    addStream(std::move(out));
  }

  // Exact match first, then a unique case-insensitive match (reported as a
  // warning).  Rewrites `name` to the canonical spelling.
  FeatureInfo const* resolveFeature(std::string& name, SourceLoc loc)
  {
    if (auto f = typed_.findFeature(name)) return f;
    FeatureInfo const* match = nullptr;
    for (auto const& f : typed_.features) {
      if (equalsIgnoreCase(f.name, name)) {
        if (match) fail(loc, "reference '" + name + "' matches more than one feature ignoring case");
        match = &f;
      }
    }
    if (match) {
      typed_.warnings.push_back({Severity::Warning, loc,
                                 "'" + name + "' resolved to feature '" + match->name + "' ignoring case"});
      name = match->name;
    }
    return match;
  }

  void checkExpr(Expression& e, StreamInfo const& src, bool inTransform)
  {
    switch (e.kind) {
      case Expression::Kind::Number: return;
      case Expression::Kind::Negate:
      case Expression::Kind::Binary:
        for (auto& operand : e.operands) checkExpr(operand, src, inTransform);
        return;
      case Expression::Kind::Reference: break;
    }

    if (auto column = src.schema.indexOf(e.name)) {
      if (e.method == Method::Value) {
        fail(e.loc, "value(i) applies only to topk features, but '" + e.name + "' is a tuple field");
      }
      if (e.method == Method::Prev) {
        if (!inTransform) fail(e.loc, "prev(i) is only allowed inside TRANSFORM expressions");
        if (e.methodArg < 1) fail(e.loc, "prev(i) needs i >= 1");
      }
      if (src.schema[*column].type != ValueType::Number) {
        fail(e.loc, "field '" + e.name + "' is a string and cannot be used in an expression");
      }
      return;
    }

    FeatureInfo const* f = resolveFeature(e.name, e.loc);
    if (!f) fail(e.loc, "unknown field or feature '" + e.name + "' in stream '" + src.name + "'");
    if (f->scope != src.scope) {
      fail(e.loc, "feature '" + f->name + "' is keyed by " + joinKeys(f->scope.keys) +
                    ", but stream '" + src.name + "' is keyed by " + joinKeys(src.scope.keys));
    }
    if (e.method == Method::Prev) {
      if (!inTransform) fail(e.loc, "prev(i) is only allowed inside TRANSFORM expressions");
      fail(e.loc, "prev(i) applies to tuple fields, not to feature '" + f->name + "'");
    }
    if (f->isTopK()) {
      if (e.method != Method::Value) {
        fail(e.loc, "topk feature '" + f->name + "' must be read with value(i)");
      }
      if (e.methodArg < 0 || e.methodArg >= f->k) {
        fail(e.loc, "value(" + std::to_string(e.methodArg) + ") is out of range for '" + f->name +
                      "' (k = " + std::to_string(f->k) + ")");
      }
    } else if (e.method == Method::Value) {
      fail(e.loc, "value(i) applies only to topk features, but '" + f->name + "' is " +
                    std::string(toString(f->op)));
    }
  }

  TypedProgram typed_;
  std::size_t current_ = 0;
};

void collectMaxPrev(Expression const& e, std::int64_t& best)
{
  if (e.kind == Expression::Kind::Reference && e.method == Method::Prev) {
    best = std::max(best, e.methodArg);
  }
  for (auto const& operand : e.operands) collectMaxPrev(operand, best);
}

} // namespace

std::string_view toString(OperatorKind op)
{
  for (auto const& [name, kind] : kOperators) {
    if (kind == op) return name;
  }
  return "?";
}

std::optional<OperatorKind> lookupOperator(std::string_view name)
{
  for (auto const& [n, kind] : kOperators) {
    if (n == name) return kind;
  }
  return std::nullopt;
}

StreamInfo const* TypedProgram::findStream(std::string_view name) const
{
  for (auto const& s : streams) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

FeatureInfo const* TypedProgram::findFeature(std::string_view name) const
{
  for (auto const& f : features) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

PartitionInfo const* TypedProgram::findPartition(std::string_view stream) const
{
  for (auto const& p : partitions) {
    if (p.stream == stream) return &p;
  }
  return nullptr;
}

std::int64_t TypedProgram::maxPrev(std::size_t statement) const
{
  std::int64_t best = 0;
  if (auto t = std::get_if<Transform>(&program.pipeline.at(statement))) {
    for (auto const& field : t->fields) collectMaxPrev(field.expr, best);
  }
  return best;
}

TypedProgram validate(SalProgram const& program, TupleSchema const& schema)
{
  return Validator(program, schema).run();
}

} // namespace sal::ast
