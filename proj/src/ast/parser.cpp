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

#include <sal/ast/parser.hpp>

#include <set>
#include <string>

namespace sal::ast {

namespace {

enum class Phase { Preamble = 0, Connection = 1, Partition = 2, Pipeline = 3 };

std::string_view phaseName(Phase phase)
{
  switch (phase) {
    case Phase::Preamble: return "preamble";
    case Phase::Connection: return "connection";
    case Phase::Partition: return "partition";
    case Phase::Pipeline: return "pipeline";
  }
  return "?";
}

std::string describe(Token const& t)
{
  switch (t.kind) {
    case TokenKind::Ident: return "identifier '" + t.text + "'";
    case TokenKind::Keyword: return "keyword '" + t.text + "'";
    case TokenKind::Int:
    case TokenKind::Float: return "number '" + t.text + "'";
    case TokenKind::String: return "string " + t.text;
    default: return std::string(toString(t.kind));
  }
}

class Parser {
public:
  explicit Parser(std::span<Token const> tokens) : tokens_(tokens) {}

  SalProgram run()
  {
    while (!atEnd()) statement();
    return std::move(program_);
  }

private:
  bool atEnd() const { return pos_ >= tokens_.size(); }

  Token const* peek(std::size_t ahead = 0) const
  {
    return pos_ + ahead < tokens_.size() ? &tokens_[pos_ + ahead] : nullptr;
  }

  bool check(TokenKind kind, std::size_t ahead = 0) const
  {
    auto t = peek(ahead);
    return t && t->kind == kind;
  }

  bool check(Keyword kw, std::size_t ahead = 0) const
  {
    auto t = peek(ahead);
    return t && t->is(kw);
  }

  SourceLoc endLoc() const
  {
    if (tokens_.empty()) return {1, 1};
    auto const& last = tokens_.back();
    return {last.loc.line, last.loc.column + static_cast<int>(last.text.size())};
  }

  [[noreturn]] void fail(std::string const& expected) const
  {
    if (atEnd()) throw SyntaxError(endLoc(), "expected " + expected + " but reached end of input");
    auto const& t = tokens_[pos_];
    throw SyntaxError(t.loc, "expected " + expected + " but found " + describe(t));
  }

  Token const& expect(TokenKind kind, std::string_view what = {})
  {
    if (!check(kind)) fail(what.empty() ? std::string(toString(kind)) : std::string(what));
    return tokens_[pos_++];
  }

  Token const& expect(Keyword kw)
  {
    if (!check(kw)) fail("'" + std::string(toString(kw)) + "'");
    return tokens_[pos_++];
  }

  bool accept(TokenKind kind)
  {
    if (check(kind)) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool startsStatement() const
  {
    if (check(Keyword::Partition) || check(Keyword::Hash)) return true;
    return check(TokenKind::Ident) && check(TokenKind::Eq, 1);
  }

  void terminator()
  {
    if (accept(TokenKind::Semi)) return;
    if (atEnd() || startsStatement()) return;
    fail("';'");
  }

  void enterPhase(Phase phase, SourceLoc loc)
  {
    if (phase < phase_) {
      throw SyntaxError(loc, std::string(phaseName(phase)) + " statement must precede " +
                               std::string(phaseName(phase_)) + " statements");
    }
    phase_ = phase;
  }

  void define(std::string const& name, SourceLoc loc)
  {
    if (!names_.insert(name).second) {
      throw SemanticError(loc, "redefinition of '" + name + "'");
    }
  }

  void requireStream(std::string const& name, SourceLoc loc)
  {
    if (streams_.count(name)) return;
    if (names_.count(name)) {
      throw SemanticError(loc, "'" + name + "' is not a stream");
    }
    throw SemanticError(loc, "undefined stream '" + name + "'");
  }

  std::vector<std::string> identList()
  {
    std::vector<std::string> out;
    out.push_back(expect(TokenKind::Ident).text);
    while (accept(TokenKind::Comma)) out.push_back(expect(TokenKind::Ident).text);
    return out;
  }

  void statement()
  {
    if (check(Keyword::Partition)) return partition();
    if (check(Keyword::Hash)) return hash();
    if (!check(TokenKind::Ident)) fail("statement");

    Token const& name = tokens_[pos_++];
    expect(TokenKind::Eq);
    if (check(TokenKind::Int)) return preamble(name);
    if (check(TokenKind::Ident)) return connection(name);
    if (check(Keyword::Stream)) return streamBy(name);
    if (check(Keyword::Foreach)) return forEach(name);
    if (check(Keyword::Filter)) return filter(name);
    if (check(Keyword::Collapse)) return collapse(name);
    fail("integer constant, connection or pipeline statement");
  }

  void preamble(Token const& name)
  {
    enterPhase(Phase::Preamble, name.loc);
    Token const& value = expect(TokenKind::Int);
    define(name.text, name.loc);
    program_.preamble.push_back({name.text, value.intValue, name.loc});
    terminator();
  }

  void connection(Token const& name)
  {
    enterPhase(Phase::Connection, name.loc);
    Token const& kind = expect(TokenKind::Ident);
    expect(TokenKind::LParen);
    Token const& host = expect(TokenKind::String);
    expect(TokenKind::Comma);
    Token const& port = expect(TokenKind::Int);
    expect(TokenKind::RParen);
    define(name.text, name.loc);
    streams_.insert(name.text);
    program_.connections.push_back({name.text, kind.text, host.stringValue, port.intValue, name.loc});
    terminator();
  }

  void partition()
  {
    Token const& kw = tokens_[pos_++];
    enterPhase(Phase::Partition, kw.loc);
    Token const& stream = expect(TokenKind::Ident);
    expect(Keyword::By);
    auto keys = identList();
    program_.partitions.push_back({stream.text, std::move(keys), kw.loc});
    terminator();
  }

  void hash()
  {
    Token const& kw = tokens_[pos_++];
    enterPhase(Phase::Partition, kw.loc);
    Token const& field = expect(TokenKind::Ident);
    expect(Keyword::With);
    Token const& function = expect(TokenKind::Ident);
    program_.hashes.push_back({field.text, function.text, kw.loc});
    terminator();
  }

  Token const& pipelineSource(Token const& target)
  {
    enterPhase(Phase::Pipeline, target.loc);
    ++pos_;  // statement keyword
    Token const& source = expect(TokenKind::Ident, "stream name");
    requireStream(source.text, source.loc);
    return source;
  }

  void streamBy(Token const& target)
  {
    Token const& source = pipelineSource(target);
    expect(Keyword::By);
    auto keys = identList();
    define(target.text, target.loc);
    streams_.insert(target.text);
    program_.pipeline.emplace_back(StreamBy{target.text, source.text, std::move(keys), target.loc});
    terminator();
  }

  void forEach(Token const& target)
  {
    Token const& source = pipelineSource(target);
    if (acceptKeyword(Keyword::Generate)) {
      OperatorCall call;
      call.name = expect(TokenKind::Ident, "operator name").text;
      expect(TokenKind::LParen);
      if (!check(TokenKind::RParen)) {
        call.args.push_back(operatorArg());
        while (accept(TokenKind::Comma)) call.args.push_back(operatorArg());
      }
      expect(TokenKind::RParen);
      define(target.text, target.loc);
      program_.pipeline.emplace_back(ForEachGenerate{target.text, source.text, std::move(call), target.loc});
      terminator();
      return;
    }
    if (acceptKeyword(Keyword::Transform)) {
      std::vector<TransformField> fields;
      do {
        Expression e = expression();
        expect(TokenKind::Colon);
        Token const& label = expect(TokenKind::Ident, "field label");
        fields.push_back({std::move(e), label.text});
      } while (accept(TokenKind::Comma));
      define(target.text, target.loc);
      streams_.insert(target.text);
      program_.pipeline.emplace_back(Transform{target.text, source.text, std::move(fields), target.loc});
      terminator();
      return;
    }
    fail("'GENERATE' or 'TRANSFORM'");
  }

  bool acceptKeyword(Keyword kw)
  {
    if (check(kw)) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expression operatorArg()
  {
    if (check(TokenKind::Int)) {
      Token const& t = tokens_[pos_++];
      return Expression::literal(static_cast<double>(t.intValue), true, t.loc);
    }
    if (check(TokenKind::Ident)) {
      Token const& t = tokens_[pos_++];
      return Expression::reference(t.text, Method::None, 0, t.loc);
    }
    fail("field name or integer argument");
  }

  void filter(Token const& target)
  {
    Token const& source = pipelineSource(target);
    expect(Keyword::By);
    Expression predicate = expression();
    define(target.text, target.loc);
    streams_.insert(target.text);
    program_.pipeline.emplace_back(Filter{target.text, source.text, std::move(predicate), target.loc});
    terminator();
  }

  void collapse(Token const& target)
  {
    Token const& source = pipelineSource(target);
    expect(Keyword::By);
    auto kept = identList();
    expect(Keyword::For);
    auto features = identList();
    define(target.text, target.loc);
    streams_.insert(target.text);
    program_.pipeline.emplace_back(
      CollapseBy{target.text, source.text, std::move(kept), std::move(features), target.loc});
    terminator();
  }

  // Precedence, loosest first: comparison, additive, multiplicative, unary.
  Expression expression() { return comparison(); }

  Expression comparison()
  {
    Expression lhs = additive();
    while (auto t = peek()) {
      BinaryOp op;
      switch (t->kind) {
        case TokenKind::Lt: op = BinaryOp::Lt; break;
        case TokenKind::Le: op = BinaryOp::Le; break;
        case TokenKind::Gt: op = BinaryOp::Gt; break;
        case TokenKind::Ge: op = BinaryOp::Ge; break;
        case TokenKind::EqEq: op = BinaryOp::Eq; break;
        case TokenKind::NotEq: op = BinaryOp::Ne; break;
        default: return lhs;
      }
      ++pos_;
      lhs = Expression::binary(op, std::move(lhs), additive(), t->loc);
    }
    return lhs;
  }

  Expression additive()
  {
    Expression lhs = multiplicative();
    while (check(TokenKind::Plus) || check(TokenKind::Minus)) {
      Token const& t = tokens_[pos_++];
      auto op = t.kind == TokenKind::Plus ? BinaryOp::Add : BinaryOp::Sub;
      lhs = Expression::binary(op, std::move(lhs), multiplicative(), t.loc);
    }
    return lhs;
  }

  Expression multiplicative()
  {
    Expression lhs = unary();
    while (check(TokenKind::Star) || check(TokenKind::Slash)) {
      Token const& t = tokens_[pos_++];
      auto op = t.kind == TokenKind::Star ? BinaryOp::Mul : BinaryOp::Div;
      lhs = Expression::binary(op, std::move(lhs), unary(), t.loc);
    }
    return lhs;
  }

  Expression unary()
  {
    if (check(TokenKind::Minus)) {
      SourceLoc loc = tokens_[pos_++].loc;
      return Expression::negate(unary(), loc);
    }
    return primary();
  }

  Expression primary()
  {
    if (check(TokenKind::Int)) {
      Token const& t = tokens_[pos_++];
      return Expression::literal(static_cast<double>(t.intValue), true, t.loc);
    }
    if (check(TokenKind::Float)) {
      Token const& t = tokens_[pos_++];
      return Expression::literal(t.floatValue, false, t.loc);
    }
    if (check(TokenKind::LParen)) {
      ++pos_;
      Expression inner = expression();
      expect(TokenKind::RParen);
      return inner;
    }
    if (check(TokenKind::Ident)) {
      Token const& name = tokens_[pos_++];
      if (!accept(TokenKind::Dot)) return Expression::reference(name.text, Method::None, 0, name.loc);
      Token const& method = expect(TokenKind::Ident, "method name");
      Method m;
      if (method.text == "value") {
        m = Method::Value;
      } else if (method.text == "prev") {
        m = Method::Prev;
      } else {
        throw SyntaxError(method.loc, "unknown method '" + method.text + "', expected 'value' or 'prev'");
      }
      expect(TokenKind::LParen);
      Token const& index = expect(TokenKind::Int, "integer index");
      expect(TokenKind::RParen);
      return Expression::reference(name.text, m, index.intValue, name.loc);
    }
    fail("expression");
  }

  std::span<Token const> tokens_;
  std::size_t pos_ = 0;
  Phase phase_ = Phase::Preamble;
  SalProgram program_;
  std::set<std::string> names_;
  std::set<std::string> streams_;
};

} // namespace

SalProgram parse(std::span<Token const> tokens)
{
  return Parser(tokens).run();
}

SalProgram parseSource(std::string_view source)
{
  auto tokens = tokenize(source);
  return parse(tokens);
}

} // namespace sal::ast
