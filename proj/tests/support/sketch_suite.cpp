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

#include "sketch_suite.hpp"
#include "oracles.hpp"

#include <sal/sketch/distinct.hpp>
#include <sal/sketch/exp_histogram.hpp>
#include <sal/sketch/quantile.hpp>
#include <sal/sketch/sum_var_sketch.hpp>
#include <sal/sketch/topk.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace sal::testing {

char const* suiteName(SuiteOp op)
{
  switch (op) {
    case SuiteOp::Count: return "count";
    case SuiteOp::Sum: return "sum";
    case SuiteOp::Ave: return "ave";
    case SuiteOp::Var: return "var";
    case SuiteOp::TopK: return "topk";
    case SuiteOp::Median: return "median";
    case SuiteOp::CountDistinct: return "countdistinct";
  }
  return "?";
}

namespace {

double const kEpsilons[] = {0.005, 0.01, 0.02, 0.05};

struct Trial {
  std::mt19937_64 rng;
  std::size_t length;
  std::size_t window;
  double epsilon;
  int shape;
  double walk_ = 0.0;

  Trial(SuiteOptions const& o, std::size_t index)
    : rng(o.seed * 0x9e3779b97f4a7c15ULL + index)
  {
    // log-uniform lengths and windows so short and long streams both occur
    auto logPick = [&](std::size_t lo, std::size_t hi) {
      double a = std::log(static_cast<double>(lo)), b = std::log(static_cast<double>(hi) + 1.0);
      auto v = static_cast<std::size_t>(std::exp(std::uniform_real_distribution<double>(a, b)(rng)));
      return std::clamp(v, lo, hi);
    };
    length = logPick(o.minLength, o.maxLength);
    window = logPick(o.minWindow, o.maxWindow);
    epsilon = kEpsilons[rng() % 4];
    shape = static_cast<int>(rng() % 5);
  }

  double value(std::size_t i)
  {
    switch (shape) {
      case 0: return std::uniform_real_distribution<double>(0.0, 1000.0)(rng);
      case 1: return std::lognormal_distribution<double>(5.0, 2.0)(rng);
      case 2: return std::normal_distribution<double>(1e6, 10.0)(rng);
      case 3: return static_cast<double>(rng() % 6);
      default:
        walk_ += std::normal_distribution<double>(0.0, 1.0)(rng);
        return 1e4 + walk_ + static_cast<double>(i % 2);
    }
  }

  /// Query positions: ~24 spread points, the window fill point and the end.
  std::vector<std::size_t> queryPoints()
  {
    std::vector<std::size_t> q;
    for (std::size_t j = 1; j <= 24; ++j) q.push_back(std::max<std::size_t>(1, length * j / 24));
    if (window <= length) q.push_back(window);
    if (window + 1 <= length) q.push_back(window + 1);
    q.push_back(1);
    std::sort(q.begin(), q.end());
    q.erase(std::unique(q.begin(), q.end()), q.end());
    return q;
  }
};

void note(SuiteResult& r, double ratio, std::size_t trial, Trial const& t, std::size_t at, double est, double exact)
{
  ++r.queries;
  if (ratio > r.worst) {
    r.worst = ratio;
    std::ostringstream s;
    s << "trial " << trial << " len=" << t.length << " N=" << t.window << " eps=" << t.epsilon
      << " shape=" << t.shape << " at=" << at << " est=" << est << " exact=" << exact;
    r.worstDetail = s.str();
  }
}

double numericTrial(SuiteOp op, Trial& t, SuiteResult& r, std::size_t index)
{
  std::vector<double> items;
  items.reserve(t.length);
  auto points = t.queryPoints();
  std::size_t next = 0;
  double worst = 0.0;

  if (op == SuiteOp::Count) {
    sketch::ExpHistogram eh(t.epsilon, t.window);
    for (std::size_t i = 1; i <= t.length; ++i) {
      eh.insert(1.0);
      double exact = static_cast<double>(std::min(i, t.window));
      double ratio = std::abs(eh.sum() - exact) / exact / t.epsilon;
      if (!eh.invariantsHold()) r.windowBoundHeld = false;
      note(r, ratio, index, t, i, eh.sum(), exact);
      worst = std::max(worst, ratio);
    }
    return worst;
  }

  if (op == SuiteOp::Median) {
    std::size_t b = std::max<std::size_t>(1, t.window / 10);
    sketch::QuantileSketch q(t.epsilon, t.window, b);
    for (std::size_t i = 1; i <= t.length; ++i) {
      items.push_back(t.value(i));
      q.insert(items.back());
      if (next < points.size() && points[next] == i) {
        ++next;
        auto w = lastN(items, i, t.window);
        if (q.coveredItems() < w.size() || q.coveredItems() > t.window + b - 1) r.windowBoundHeld = false;
        double est = *q.median();
        std::size_t target = (w.size() + 1) / 2;
        double tol = t.epsilon * static_cast<double>(t.window) + static_cast<double>(b);
        double ratio = static_cast<double>(rankError(w, est, target)) / tol;
        note(r, ratio, index, t, i, est, exactLowerMedian(w));
        worst = std::max(worst, ratio);
      }
    }
    return worst;
  }

  sketch::SumVarSketch s(t.epsilon, t.window);
  for (std::size_t i = 1; i <= t.length; ++i) {
    items.push_back(t.value(i));
    s.insert(items.back());
    if (next < points.size() && points[next] == i) {
      ++next;
      auto w = lastN(items, i, t.window);
      if (s.count() != w.size()) r.windowBoundHeld = false;
      double est = 0, exact = 0, floor = 0;
      switch (op) {
        case SuiteOp::Sum:
          est = *s.sum(), exact = exactSum(w);
          floor = 1e-9 * std::max(1.0, std::abs(exactMean(w))) * static_cast<double>(w.size());
          break;
        case SuiteOp::Ave:
          est = *s.mean(), exact = exactMean(w);
          floor = 1e-9 * std::max(1.0, std::abs(exact));
          break;
        default: {
          est = *s.variance(), exact = exactVariance(w);
          double m = exactMean(w);
          floor = 1e-9 * std::max(1.0, m * m);
          break;
        }
      }
      double ratio = std::abs(est - exact) / std::max(std::abs(exact), floor) / (5.0 * t.epsilon);
      if (std::abs(est - exact) <= floor) ratio = 0.0;
      note(r, ratio, index, t, i, est, exact);
      worst = std::max(worst, ratio);
    }
  }
  return worst;
}

double topkTrial(Trial& t, SuiteResult& r, std::size_t index)
{
  std::size_t b = std::max<std::size_t>(1, t.window / 10);
  std::size_t k = 1 + t.rng() % 5;
  std::size_t pool = 10 + t.rng() % 2000;
  Zipf zipf(pool, 1.2);
  sketch::BasicWindowTopK topk(t.window, b, k);
  std::vector<std::string> items;
  auto points = t.queryPoints();
  std::size_t next = 0;
  double tol = static_cast<double>(b) / static_cast<double>(t.window) + 0.01;
  double worst = 0.0;
  for (std::size_t i = 1; i <= t.length; ++i) {
    items.push_back(std::to_string(zipf(t.rng)));
    topk.insert(items.back());
    if (next < points.size() && points[next] == i) {
      ++next;
      auto w = lastN(items, i, t.window);
      if (topk.coveredItems() < w.size() || topk.coveredItems() > t.window + b - 1) r.windowBoundHeld = false;
      auto exact = exactTopK(w, k);
      for (std::size_t j = 0; j < k; ++j) {
        double e = j < exact.size() ? exact[j].second : 0.0;
        double est = topk.value(j);
        double ratio = std::abs(est - e) / tol;
        note(r, ratio, index, t, i, est, e);
        worst = std::max(worst, ratio);
      }
    }
  }
  return worst;
}

/// Returns the worst relative error; the trial passes when it is <= 5%.
double distinctTrial(Trial& t, SuiteResult& r, std::size_t index)
{
  std::size_t b = std::max<std::size_t>(1, t.window / 50);
  std::size_t pool = 1 + t.rng() % (4 * t.window);
  sketch::DistinctSketch d(t.window, b, sketch::kDefaultPrecision, index);
  std::vector<std::string> items;
  auto points = t.queryPoints();
  std::size_t next = 0;
  double worst = 0.0;
  for (std::size_t i = 1; i <= t.length; ++i) {
    items.push_back("v" + std::to_string(t.rng() % pool));
    d.insert(items.back());
    if (next < points.size() && points[next] == i) {
      ++next;
      std::size_t covered = static_cast<std::size_t>(d.coveredItems());
      if (covered < std::min(i, t.window) || covered > t.window + b - 1) r.windowBoundHeld = false;
      auto exact = static_cast<double>(exactDistinct(lastN(items, i, covered)));
      double err = relativeError(d.estimate(), exact);
      note(r, err / 0.05, index, t, i, d.estimate(), exact);
      worst = std::max(worst, err / 0.05);
    }
  }
  return worst;
}

} // namespace

SuiteResult runSketchSuite(SuiteOp op, SuiteOptions const& options)
{
  SuiteResult r;
  auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < options.trials; ++i) {
    Trial t(options, i + static_cast<std::size_t>(op) * 1000003);
    double worst = 0.0;
    switch (op) {
      case SuiteOp::TopK: worst = topkTrial(t, r, i); break;
      case SuiteOp::CountDistinct: worst = distinctTrial(t, r, i); break;
      default: worst = numericTrial(op, t, r, i); break;
    }
    ++r.trials;
    if (worst <= 1.0) {
      ++r.passed;
    } else if (r.failures.size() < 10) {
      std::ostringstream s;
      s << "trial " << i << " len=" << t.length << " N=" << t.window << " eps=" << t.epsilon
        << " shape=" << t.shape << " error/tolerance=" << worst;
      r.failures.push_back(s.str());
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

} // namespace sal::testing
