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

#include <sal/ast/lexer.hpp>
#include <sal/ast/parser.hpp>
#include <sal/ast/printer.hpp>
#include <sal/ast/validator.hpp>

#include "paths.hpp"

#include <random>

using namespace sal::ast;
using sal::testing::dataPath;
using sal::testing::readText;

namespace {

std::string const kHeader = R"(WindowSize = 1000;
Netflows = VastStream("localhost", 9999);
PARTITION Netflows By SourceIp, DestIp;
HASH SourceIp WITH IpHashFunction;
HASH DestIp WITH IpHashFunction;
)";

TypedProgram check(std::string const& pipeline)
{
  return validate(parseSource(kHeader + pipeline));
}

ErrorCategory categoryOf(std::string const& source)
{
  try {
    validate(parseSource(source));
  } catch (SalError const& e) {
    return e.category();
  }
  FAIL("program was accepted: " << source);
  return ErrorCategory::Lexical;
}

} // namespace

TEST_CASE("lexer splits tokens and drops comments")
{
  auto tokens = tokenize("X = FOREACH s GENERATE ave(F); // trailing\n y >= 2.5e1 != \"a\\\"b\"");
  REQUIRE(tokens.size() == 15);
  CHECK((tokens[0].kind == TokenKind::Ident));
  CHECK(tokens[2].is(Keyword::Foreach));
  CHECK(tokens[4].is(Keyword::Generate));
  CHECK((tokens[11].kind == TokenKind::Ge));
  CHECK((tokens[12].kind == TokenKind::Float));
  CHECK(tokens[12].floatValue == 25.0);
  CHECK((tokens[13].kind == TokenKind::NotEq));
  CHECK(tokens[14].stringValue == "a\"b");
  CHECK(tokens[10].loc.line == 2);
}

TEST_CASE("keywords are case-insensitive")
{
  auto tokens = tokenize("stream Stream STREAM By by");
  for (auto const& t : tokens) CHECK((t.kind == TokenKind::Keyword));
}

TEST_CASE("lexer rejects illegal input with a position")
{
  CHECK_THROWS_AS(tokenize("a = #"), LexError);
  CHECK_THROWS_AS(tokenize("\"open"), LexError);
  try {
    tokenize("ok\n  @");
  } catch (LexError const& e) {
    CHECK(e.diagnostic().loc.line == 2);
    CHECK(e.diagnostic().loc.column == 3);
  }
}

TEST_CASE("Listing 1 parses, validates and keys VertsByDest by DestIp")
{
  auto typed = validate(parseSource(readText(dataPath("listing1.sal"))));
  CHECK(typed.windowSize == 1000);
  CHECK(typed.program.pipeline.size() == 3);
  auto const* s = typed.findStream("VertsByDest");
  REQUIRE(s);
  CHECK(s->scope.keys == std::vector<std::string>{"DestIp"});
  auto const* f = typed.findFeature("Feature1");
  REQUIRE(f);
  CHECK((f->op == OperatorKind::Ave));
  CHECK(f->window == 1000);
}

TEST_CASE("case-study statements parse with a warning for top2")
{
  auto typed = validate(parseSource(readText(dataPath("disclosure.sal"))));
  CHECK(typed.program.pipeline.size() == 16);
  CHECK(typed.features.size() == 11);
  CHECK_FALSE(typed.warnings.empty());
  auto const* top = typed.findFeature("Top2");
  REQUIRE(top);
  CHECK(top->window == 10000);
  CHECK(top->basicWindow == 1000);
  CHECK(top->k == 2);
  auto const* collapsed = typed.findStream("DestOnly");
  REQUIRE(collapsed);
  CHECK(collapsed->collapsed);
  CHECK(collapsed->scope.keys == std::vector<std::string>{"DestIp"});
  CHECK(typed.maxPrev(10) == 1);
}

TEST_CASE("printer round-trips the corpus")
{
  for (auto const* name : {"listing1.sal", "disclosure.sal"}) {
    auto program = parseSource(readText(dataPath(name)));
    auto printed = print(program);
    CHECK(parseSource(printed) == program);
    CHECK(print(parseSource(printed)) == printed);
  }
}

TEST_CASE("error categories")
{
  CHECK((categoryOf(kHeader + "A = STREAM Netflows BY Protocol;") == ErrorCategory::Semantic));
  CHECK((categoryOf(kHeader + "A = STREAM Netflows BY IpLayerProtocol;") == ErrorCategory::Semantic));
  CHECK((categoryOf(kHeader + "A = STREAM Netflows DestIp;") == ErrorCategory::Syntax));
  CHECK((categoryOf(kHeader + "A = STREAM Nowhere BY DestIp;") == ErrorCategory::Semantic));
  CHECK((categoryOf(kHeader + "A = STREAM Netflows BY DestIp; A = STREAM Netflows BY DestIp;") ==
        ErrorCategory::Semantic));
  CHECK((categoryOf("A = STREAM Netflows BY DestIp;" + kHeader) == ErrorCategory::Semantic));
  CHECK((categoryOf(kHeader + "A = STREAM Netflows BY DestIp; B = FOREACH A GENERATE mode(SrcTotalBytes);") ==
        ErrorCategory::Semantic));
  CHECK((categoryOf(kHeader + "A = STREAM Netflows BY DestIp; B = FOREACH A GENERATE ave(SourceIp);") ==
        ErrorCategory::Semantic));
  CHECK((categoryOf(kHeader + "A = STREAM Netflows BY DestIp; B = FOREACH A GENERATE max(SrcTotalBytes);") ==
        ErrorCategory::Semantic));
  CHECK((categoryOf(kHeader + "A = STREAM Netflows BY DestIp; B = FILTER A BY SrcTotalBytes.prev(1) > 0;") ==
        ErrorCategory::Semantic));
  CHECK((categoryOf(kHeader + "A = STREAM Netflows BY DestIp; B = FOREACH A GENERATE topk(DestPort,10,20,2);") ==
        ErrorCategory::Semantic));
}

TEST_CASE("BY keys must be partition keys and keep the owner")
{
  CHECK_NOTHROW(check("A = STREAM Netflows BY DestIp; B = STREAM A BY DestIp, SourceIp;"));
  CHECK_THROWS_AS(check("A = STREAM Netflows BY DestIp; B = STREAM A BY SourceIp;"), SemanticError);
  CHECK_THROWS_AS(check("A = STREAM Netflows BY DestPort;"), SemanticError);
}

TEST_CASE("COLLAPSE checks kept keys and FOR features")
{
  std::string base = "A = STREAM Netflows BY DestIp, SourceIp; F = FOREACH A GENERATE sum(SrcTotalBytes); ";
  auto typed = check(base + "C = COLLAPSE A BY DestIp FOR F; G = FOREACH C GENERATE ave(F);");
  CHECK(typed.findStream("C")->droppedKeys == std::vector<std::string>{"SourceIp"});
  CHECK(typed.findFeature("G")->collapsed);
  CHECK_THROWS_AS(check(base + "C = COLLAPSE A BY SourceIp FOR F;"), SemanticError);
  CHECK_THROWS_AS(check(base + "C = COLLAPSE A BY DestIp, SourceIp FOR F;"), SemanticError);
  CHECK_THROWS_AS(check(base + "C = COLLAPSE A BY DestIp FOR Missing;"), SemanticError);
  CHECK_THROWS_AS(check(base + "C = COLLAPSE A BY DestIp FOR F; G = FOREACH C GENERATE ave(SrcTotalBytes);"),
                  SemanticError);
}

TEST_CASE("feature references are scoped to their key set")
{
  std::string base = "A = STREAM Netflows BY DestIp; F = FOREACH A GENERATE ave(SrcTotalBytes); ";
  CHECK_NOTHROW(check(base + "B = FILTER A BY F > 10;"));
  CHECK_THROWS_AS(check(base + "S = STREAM Netflows BY SourceIp; B = FILTER S BY F > 10;"), SemanticError);
  CHECK_THROWS_AS(check(base + "B = FILTER A BY F.value(0) > 10;"), SemanticError);
}

TEST_CASE("semicolons may be omitted before a statement or the end")
{
  CHECK_NOTHROW(check("A = STREAM Netflows BY DestIp\nB = FOREACH A GENERATE ave(SrcTotalBytes)"));
  CHECK_THROWS_AS(parseSource(kHeader + "A = STREAM Netflows BY DestIp B"), SyntaxError);
}

TEST_CASE("default and explicit window sizes")
{
  auto typed = validate(parseSource(R"(N = VastStream("h", 1); PARTITION N By DestIp;
    A = STREAM N BY DestIp; F = FOREACH A GENERATE countdistinct(SourceIp);
    G = FOREACH A GENERATE median(SrcTotalBytes);)"));
  CHECK(typed.windowSize == kDefaultWindowSize);
  CHECK(typed.findFeature("F")->window == kDefaultWindowSize);
  CHECK(typed.findStream("A")->scope.owner == "DestIp");
}

TEST_CASE("formatNumber is shortest round-trip")
{
  CHECK(formatNumber(1.0) == "1");
  CHECK(formatNumber(0.1) == "0.1");
  CHECK(formatNumber(-2.5) == "-2.5");
  CHECK(std::stod(formatNumber(1.0 / 3.0)) == 1.0 / 3.0);
}

// ---------------------------------------------------------------------------
// Property: print(parse(print(p))) == print(p) and parse(print(p)) == p for
// random syntactically valid programs.

namespace {

struct RandomProgram {
  std::mt19937_64 rng;
  std::vector<std::string> streams{"Netflows"};
  std::vector<std::string> names;
  int counter = 0;

  explicit RandomProgram(std::uint64_t seed) : rng(seed) {}

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

  std::string fresh() { return "N" + std::to_string(counter++); }

  Expression expr(int depth)
  {
    static char const* const fields[] = {"SrcTotalBytes", "DestPort", "TimeSeconds", "Feat"};
    int choice = depth <= 0 ? static_cast<int>(pick(2)) : static_cast<int>(pick(4));
    switch (choice) {
      case 0: {
        if (pick(2)) return Expression::literal(static_cast<double>(pick(1000)), true);
        return Expression::literal(static_cast<double>(pick(100000)) / 64.0 + 0.5, false);
      }
      case 1: {
        Method m = static_cast<Method>(pick(3));
        return Expression::reference(fields[pick(4)], m, m == Method::None ? 0 : static_cast<std::int64_t>(pick(5)));
      }
      case 2: return Expression::negate(expr(depth - 1));
      default: return Expression::binary(static_cast<BinaryOp>(pick(10)), expr(depth - 1), expr(depth - 1));
    }
  }

  SalProgram build()
  {
    SalProgram p;
    p.preamble.push_back({"WindowSize", static_cast<std::int64_t>(1 + pick(5000)), {}});
    p.connections.push_back({"Netflows", "VastStream", "localhost", 9999, {}});
    p.partitions.push_back({"Netflows", {"SourceIp", "DestIp"}, {}});
    p.hashes.push_back({"SourceIp", "IpHashFunction", {}});
    std::size_t count = 1 + pick(12);
    for (std::size_t i = 0; i < count; ++i) {
      std::string source = streams[pick(streams.size())];
      std::string target = fresh();
      switch (pick(5)) {
        case 0: p.pipeline.push_back(StreamBy{target, source, {"DestIp"}, {}}); break;
        case 1: {
          OperatorCall call{pick(2) ? "ave" : "topk", {Expression::reference("DestPort")}};
          if (call.name == "topk") {
            for (int a = 0; a < 3; ++a) call.args.push_back(Expression::literal(1.0 + pick(100), true));
          }
          p.pipeline.push_back(ForEachGenerate{target, source, call, {}});
          break;
        }
        case 2: p.pipeline.push_back(Filter{target, source, expr(3), {}}); break;
        case 3: {
          Transform t{target, source, {}, {}};
          for (std::size_t f = 0; f <= pick(3); ++f) t.fields.push_back({expr(2), "L" + std::to_string(f)});
          p.pipeline.push_back(t);
          break;
        }
        default: p.pipeline.push_back(CollapseBy{target, source, {"DestIp"}, {"Feat", "Other"}, {}}); break;
      }
      if (!std::holds_alternative<ForEachGenerate>(p.pipeline.back())) streams.push_back(target);
    }
    return p;
  }
};

} // namespace

TEST_CASE("print/parse round-trip on random programs")
{
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    SalProgram p = RandomProgram(seed).build();
    std::string text = print(p);
    SalProgram back;
    REQUIRE_NOTHROW(back = parseSource(text));
    CHECK_MESSAGE(back == p, text);
    CHECK(print(back) == text);
  }
}
