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

#include <sal/sketch/distinct.hpp>
#include <sal/sketch/exp_histogram.hpp>
#include <sal/sketch/hash.hpp>
#include <sal/sketch/prev_buffer.hpp>
#include <sal/sketch/quantile.hpp>
#include <sal/sketch/sum_var_sketch.hpp>
#include <sal/sketch/topk.hpp>

#include "oracles.hpp"
#include "sketch_suite.hpp"

#include <json.hpp>

#include <random>

using namespace sal::sketch;
using namespace sal::testing;

TEST_CASE("exp histogram keeps the last N items")
{
  ExpHistogram eh(0.1, 4);
  CHECK(eh.sum() == 0.0);
  for (int i = 0; i < 5; ++i) eh.insert(1.0);
  CHECK(eh.sum() == doctest::Approx(4.0).epsilon(0.1));
  CHECK(eh.itemsInWindow() == 4);
}

TEST_CASE("exp histogram weighted sums stay within epsilon on every prefix")
{
  std::mt19937_64 rng(7);
  for (double eps : {0.01, 0.05, 0.2}) {
    for (std::size_t window : {1u, 7u, 100u, 1000u}) {
      ExpHistogram eh(eps, window);
      std::vector<double> items;
      for (std::size_t i = 1; i <= 5000; ++i) {
        double w = static_cast<double>(rng() % 4 == 0 ? 0 : rng() % 1000);
        items.push_back(w);
        eh.insert(w);
        double exact = exactSum(lastN(items, i, window));
        REQUIRE(std::abs(eh.sum() - exact) <= eps * exact + 1e-9);
        REQUIRE(eh.invariantsHold());
      }
      // polylog space: far fewer buckets than items
      if (window == 1000) CHECK(eh.bucketCount() < 600);
    }
  }
}

TEST_CASE("exp histogram exact mode")
{
  ExpHistogram eh(0.0, 3);
  for (double x : {1.0, 2.0, 3.0, 4.0}) eh.insert(x);
  CHECK(eh.sum() == 9.0);
}

TEST_CASE("sum/var: constant, single item and empty")
{
  SumVarSketch s(0.01, 100);
  CHECK_FALSE(s.mean().has_value());
  CHECK_FALSE(s.variance().has_value());
  s.insert(42.0);
  CHECK(*s.mean() == 42.0);
  CHECK(*s.variance() == 0.0);
  SumVarSketch c(0.01, 50);
  for (int i = 0; i < 500; ++i) c.insert(7.0);
  CHECK(*c.mean() == 7.0);
  CHECK(*c.variance() == 0.0);
  CHECK(*c.sum() == 350.0);
}

TEST_CASE("sum/var: stream 1..1000 and alternating 0,2")
{
  SumVarSketch s(0.01, 1000);
  for (int i = 1; i <= 1000; ++i) s.insert(i);
  CHECK(*s.mean() == doctest::Approx(500.5).epsilon(0.01));
  SumVarSketch a(0.0, 100);
  for (int i = 0; i < 1000; ++i) a.insert(i % 2 ? 2.0 : 0.0);
  CHECK(*a.variance() == doctest::Approx(1.0));
  SumVarSketch e(0.001, 100);
  for (int i = 0; i < 1000; ++i) e.insert(i % 2 ? 2.0 : 0.0);
  CHECK(*e.variance() == doctest::Approx(1.0).epsilon(0.005));
}

TEST_CASE("sum/var: small spread on a large mean")
{
  SumVarSketch s(0.01, 500);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d(1e9, 1.0);
  std::vector<double> items;
  for (int i = 0; i < 3000; ++i) {
    items.push_back(d(rng));
    s.insert(items.back());
  }
  auto w = lastN(items, items.size(), 500);
  CHECK(relativeError(*s.variance(), exactVariance(w)) < 0.05);
}

TEST_CASE("topk: 90/10 stream and single item")
{
  BasicWindowTopK t(10, 5, 2);
  CHECK(t.query().empty());
  CHECK(t.value(0) == 0.0);
  for (int i = 0; i < 9; ++i) t.insert("80");
  t.insert("443");
  auto q = t.query();
  REQUIRE(q.size() == 2);
  CHECK(q[0].first == "80");
  CHECK(q[0].second == doctest::Approx(0.9));
  CHECK(q[1].first == "443");
  CHECK(q[1].second == doctest::Approx(0.1));
  CHECK(t.value(0) + t.value(1) > 0.9);
  CHECK(t.value(2) == 0.0);

  BasicWindowTopK one(10, 5, 2);
  one.insert("53");
  REQUIRE(one.query().size() == 1);
  CHECK(one.query()[0].second == 1.0);
}

TEST_CASE("topk: ring holds at most ceil(N/b) closed windows and values are ordered")
{
  BasicWindowTopK t(100, 30, 3);
  std::mt19937_64 rng(5);
  Zipf z(50, 1.2);
  for (int i = 0; i < 5000; ++i) {
    t.insert(std::to_string(z(rng)));
    REQUIRE(t.closedWindows() <= 4);
    REQUIRE(t.coveredItems() <= 129);
    REQUIRE(t.value(0) >= t.value(1));
    REQUIRE(t.value(1) >= t.value(2));
    REQUIRE(t.value(0) <= 1.0);
  }
  auto j = nlohmann::json::parse(t.dumpJson());
  CHECK(j["type"] == "BasicWindowTopK");
}

TEST_CASE("countdistinct: repeated value, rollover and 10,000 distinct values")
{
  DistinctSketch one(1000, 100);
  CHECK(one.estimate() == 0.0);
  for (int i = 0; i < 5000; ++i) one.insert("x");
  CHECK(one.estimate() == doctest::Approx(1.0));

  DistinctSketch roll(1000, 100);
  for (int i = 0; i < 2000; ++i) roll.insert(std::to_string(i));
  CHECK(roll.coveredItems() >= 1000);
  CHECK(roll.coveredItems() <= 1099);
  CHECK(relativeError(roll.estimate(), static_cast<double>(roll.coveredItems())) < 0.05);

  int within = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    DistinctSketch d(10000, 200, kDefaultPrecision, seed);
    for (int i = 0; i < 10000; ++i) d.insert("item" + std::to_string(i));
    if (relativeError(d.estimate(), 10000.0) <= 0.05) ++within;
  }
  CHECK(within >= 38);
}

TEST_CASE("countdistinct is deterministic for a fixed seed")
{
  DistinctSketch a(500, 50, 14, 9), b(500, 50, 14, 9);
  for (int i = 0; i < 3000; ++i) {
    a.insert(std::to_string(i * 7 % 1300));
    b.insert(std::to_string(i * 7 % 1300));
  }
  CHECK(a.estimate() == b.estimate());
  CHECK(a.dumpJson() == b.dumpJson());
}

TEST_CASE("register merge is commutative, associative and idempotent")
{
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    HllRegisters a(10), b(10), c(10);
    for (int i = 0; i < 300; ++i) {
      a.addHash(rng());
      b.addHash(rng());
      c.addHash(rng());
    }
    HllRegisters ab = a, ba = b;
    ab.merge(b);
    ba.merge(a);
    CHECK(ab == ba);
    HllRegisters left = ab, right = b;
    left.merge(c);
    right.merge(c);
    HllRegisters right2 = a;
    right2.merge(right);
    CHECK(left == right2);
    HllRegisters self = a;
    self.merge(a);
    CHECK(self == a);
  }
}

TEST_CASE("median: examples")
{
  QuantileSketch q(0.01, 1000, 100);
  CHECK_FALSE(q.median().has_value());
  q.insert(3.5);
  CHECK(*q.median() == 3.5);
  std::vector<double> items;
  QuantileSketch m(0.01, 1000, 100);
  for (int i = 1; i <= 999; ++i) {
    items.push_back(i);
    m.insert(i);
  }
  CHECK(rankError(items, *m.median(), 500) <= 0.01 * 1000 + 100);
  QuantileSketch c(0.05, 100, 10);
  for (int i = 0; i < 1000; ++i) c.insert(-2.0);
  CHECK(*c.median() == -2.0);
}

TEST_CASE("prev buffer")
{
  PrevBuffer p(2);
  CHECK(p.depth() == 3);
  p.push(1);
  CHECK(*p.prev(0) == 1);
  CHECK_FALSE(p.prev(1).has_value());
  p.push(2);
  p.push(3);
  p.push(4);
  CHECK(p.ready());
  CHECK(*p.prev(0) == 4);
  CHECK(*p.prev(2) == 2);
  CHECK_FALSE(p.prev(3).has_value());
}

TEST_CASE("hash functions are stable")
{
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hash64("x", 1) != hash64("x", 2));
}

// Reduced oracle suites; the acceptance binary runs the full 1,000 streams.
TEST_CASE("oracle suites")
{
  SuiteOptions o;
  o.trials = 150;
  o.seed = 99;
  for (auto op : {SuiteOp::Count, SuiteOp::Sum, SuiteOp::Ave, SuiteOp::Var, SuiteOp::TopK, SuiteOp::Median}) {
    auto r = runSketchSuite(op, o);
    INFO(suiteName(op) << ": " << r.worstDetail);
    CHECK(r.passed == r.trials);
    CHECK(r.windowBoundHeld);
  }
  auto distinct = runSketchSuite(SuiteOp::CountDistinct, o);
  CHECK(distinct.windowBoundHeld);
  CHECK(static_cast<double>(distinct.passed) >= 0.95 * static_cast<double>(distinct.trials));
}
